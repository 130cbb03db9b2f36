#pragma once

#include "procap/questions.hpp"
#include "procap/util.hpp"

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace procap {

struct DecodeParams {
    double length_penalty = 1.0;
    int max_answer_tokens = 20;

    void validate() const;
    // Stable key component for the answer cache; changes whenever either
    // decode knob changes.
    std::string fingerprint() const;
};

struct VqaRequest {
    std::string meme_id;
    Focus focus = Focus::content;
    std::string image_b64;
    std::string prompt;
    DecodeParams params;
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VqaBackend {
public:
    virtual ~VqaBackend() = default;
    virtual std::string answer(const VqaRequest& request) = 0;
};

// Replays canned answers from a JSON file {meme_id: {focus: answer}}.
class FixtureVqaBackend : public VqaBackend {
public:
    explicit FixtureVqaBackend(const std::filesystem::path& answers_path);
    explicit FixtureVqaBackend(std::map<std::string, std::map<std::string, std::string>> answers);
    std::string answer(const VqaRequest& request) override;

    size_t calls() const { return calls_.load(); }

private:
    std::map<std::string, std::map<std::string, std::string>> answers_;
    std::atomic<size_t> calls_{0};
};

// Client for the inference protocol: POST <base_url>/v1/vqa with
// {image_b64, prompt, length_penalty, max_new_tokens}; a 200 response
// carries {answer}. Any other status is a protocol error that names the
// meme and focus.
class HttpVqaBackend : public VqaBackend {
public:
    explicit HttpVqaBackend(std::string base_url, int timeout_seconds = 120);
    std::string answer(const VqaRequest& request) override;

private:
    std::string host_;
    int port_ = 80;
    int timeout_seconds_;
};

// Runs a user-supplied command per request (`local:<command>`), writing the
// request JSON to its stdin and reading the response JSON from its stdout.
// The command speaks the same schema as the HTTP protocol.
class CommandVqaBackend : public VqaBackend {
public:
    explicit CommandVqaBackend(std::string command);
    std::string answer(const VqaRequest& request) override;

private:
    std::string command_;
};

// Backend spec grammar: "fixture:<path>", "local:<command>" or an http(s)
// URL. The PROCAP_BACKEND environment variable, when set, overrides `spec`.
std::unique_ptr<VqaBackend> make_backend(const std::string& spec);

} // namespace procap
