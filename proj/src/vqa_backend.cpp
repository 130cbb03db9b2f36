#include "procap/vqa_backend.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <unistd.h>

#include "httplib.h"
#include "json.hpp"

namespace procap {

using json = nlohmann::json;

void DecodeParams::validate() const {
    if (!(length_penalty > 0.0)) {
        throw ConfigError("length_penalty must be > 0");
    }
    if (max_answer_tokens <= 0) {
        throw ConfigError("max_answer_tokens must be positive");
    }
}

std::string DecodeParams::fingerprint() const {
    std::ostringstream out;
    out.imbue(std::locale::classic()); // cache keys must not vary with the global locale
    out << "lp" << length_penalty << "-mt" << max_answer_tokens;
    return out.str();
}

FixtureVqaBackend::FixtureVqaBackend(const std::filesystem::path& answers_path) {
    json doc = json::parse(read_file(answers_path));
    if (!doc.is_object()) {
        throw std::runtime_error("fixture answers must be a JSON object keyed by meme id");
    }
    for (const auto& [meme_id, by_focus] : doc.items()) {
        for (const auto& [focus, answer] : by_focus.items()) {
            answers_[meme_id][focus] = answer.get<std::string>();
        }
    }
}

FixtureVqaBackend::FixtureVqaBackend(
    std::map<std::string, std::map<std::string, std::string>> answers)
    : answers_(std::move(answers)) {}

std::string FixtureVqaBackend::answer(const VqaRequest& request) {
    ++calls_;
    auto meme = answers_.find(request.meme_id);
    if (meme != answers_.end()) {
        auto it = meme->second.find(focus_name(request.focus));
        if (it != meme->second.end()) {
            return it->second;
        }
    }
    return "";
}

namespace {

json request_body(const VqaRequest& request) {
    return json{{"image_b64", request.image_b64},
                {"prompt", request.prompt},
                {"length_penalty", request.params.length_penalty},
                {"max_new_tokens", request.params.max_answer_tokens}};
}

std::string parse_answer(const std::string& body, const VqaRequest& request) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error&) {
        throw BackendError("backend protocol error for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): response is not JSON");
    }
    if (!doc.is_object() || !doc.contains("answer") || !doc.at("answer").is_string()) {
        throw BackendError("backend protocol error for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): missing answer field");
    }
    return doc.at("answer").get<std::string>();
}

} // namespace

HttpVqaBackend::HttpVqaBackend(std::string base_url, int timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
    std::string url = base_url;
    if (url.rfind("http://", 0) == 0) {
        url = url.substr(7);
    } else if (url.rfind("https://", 0) == 0) {
        throw ConfigError("https backends are not supported; use http");
    }
    while (!url.empty() && url.back() == '/') {
        url.pop_back();
    }
    size_t colon = url.find(':');
    if (colon == std::string::npos) {
        host_ = url;
        port_ = 80;
    } else {
        host_ = url.substr(0, colon);
        port_ = std::stoi(url.substr(colon + 1));
    }
    if (host_.empty()) {
        throw ConfigError("invalid backend url: " + base_url);
    }
}

std::string HttpVqaBackend::answer(const VqaRequest& request) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Result res = client.Post("/v1/vqa", request_body(request).dump(),
                                      "application/json");
    if (!res) {
        throw BackendError("backend timeout for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError("backend protocol error for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): HTTP " +
                           std::to_string(res->status));
    }
    return parse_answer(res->body, request);
}

CommandVqaBackend::CommandVqaBackend(std::string command) : command_(std::move(command)) {
    if (command_.empty()) {
        throw ConfigError("local backend command is empty");
    }
}

std::string CommandVqaBackend::answer(const VqaRequest& request) {
    static std::atomic<uint64_t> counter{0};
    std::filesystem::path tmp =
        std::filesystem::temp_directory_path() /
        ("procap_vqa_" + std::to_string(::getpid()) + "_" +
         std::to_string(counter.fetch_add(1)) + ".json");
    write_file(tmp, request_body(request).dump());
    std::string cmd = command_ + " < " + tmp.string();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        std::filesystem::remove(tmp);
        throw BackendError("backend protocol error for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): cannot launch command");
    }
    std::string output;
    char buffer[4096];
    size_t n = 0;
    while ((n = ::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        output.append(buffer, n);
    }
    int status = ::pclose(pipe);
    std::filesystem::remove(tmp);
    if (status != 0) {
        throw BackendError("backend protocol error for (" + request.meme_id + ", " +
                           focus_name(request.focus) + "): command exited with status " +
                           std::to_string(status));
    }
    return parse_answer(output, request);
}

std::unique_ptr<VqaBackend> make_backend(const std::string& spec) {
    std::string resolved = spec;
    if (const char* env = std::getenv("PROCAP_BACKEND"); env != nullptr && env[0] != '\0') {
        resolved = env;
    }
    if (resolved.rfind("fixture:", 0) == 0) {
        return std::make_unique<FixtureVqaBackend>(
            std::filesystem::path(resolved.substr(8)));
    }
    if (resolved.rfind("local:", 0) == 0) {
        return std::make_unique<CommandVqaBackend>(resolved.substr(6));
    }
    if (resolved.rfind("http", 0) == 0) {
        return std::make_unique<HttpVqaBackend>(resolved);
    }
    throw ConfigError("unknown backend spec: " + resolved);
}

} // namespace procap
