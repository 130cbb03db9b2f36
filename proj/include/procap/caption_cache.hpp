#pragma once

#include "procap/questions.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace procap {

struct CacheRow {
    std::string meme_id;
    Focus focus = Focus::content;
    std::string params_fingerprint;
    std::string answer;
    bool suppressed = false;
};

// Newline-delimited JSON answer store keyed by (meme_id, focus,
// params_fingerprint). Keys are write-once: inserting a different value for
// an existing key is an error, re-inserting the identical row is a no-op.
// One process must be the only writer of a cache file.
class AnswerCache {
public:
    AnswerCache() = default;
    explicit AnswerCache(std::filesystem::path path);

    std::optional<CacheRow> lookup(const std::string& meme_id, Focus focus,
                                   const std::string& params_fingerprint) const;

    // Returns true when the row was new.
    bool insert(const CacheRow& row);

    // Rewrites the backing file with all rows in insertion order. A no-op
    // when nothing changed since load, so an all-hits rerun leaves the file
    // byte-identical.
    void flush();

    size_t size() const { return rows_.size(); }
    const std::vector<CacheRow>& rows() const { return rows_; }

private:
    using Key = std::tuple<std::string, std::string, std::string>;

    static Key key_of(const std::string& meme_id, Focus focus, const std::string& fp);

    std::filesystem::path path_;
    std::vector<CacheRow> rows_;
    std::map<Key, size_t> index_;
    bool dirty_ = false;
};

} // namespace procap
