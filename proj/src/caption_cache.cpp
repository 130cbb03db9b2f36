#include "procap/caption_cache.hpp"

#include "procap/util.hpp"

#include <fstream>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

AnswerCache::AnswerCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) {
        return; // a missing cache file starts empty
    }
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("cache line " + std::to_string(line_no) +
                                     ": malformed JSON: " + e.what());
        }
        CacheRow row;
        row.meme_id = obj.at("meme_id").get<std::string>();
        row.focus = parse_focus(obj.at("focus").get<std::string>());
        row.params_fingerprint = obj.at("params_fingerprint").get<std::string>();
        row.answer = obj.at("answer").get<std::string>();
        row.suppressed = obj.at("suppressed").get<bool>();
        Key key = key_of(row.meme_id, row.focus, row.params_fingerprint);
        if (index_.contains(key)) {
            throw std::runtime_error("cache line " + std::to_string(line_no) +
                                     ": duplicate key for meme '" + row.meme_id + "'");
        }
        index_[key] = rows_.size();
        rows_.push_back(std::move(row));
    }
}

AnswerCache::Key AnswerCache::key_of(const std::string& meme_id, Focus focus,
                                     const std::string& fp) {
    return {meme_id, focus_name(focus), fp};
}

std::optional<CacheRow> AnswerCache::lookup(const std::string& meme_id, Focus focus,
                                            const std::string& params_fingerprint) const {
    auto it = index_.find(key_of(meme_id, focus, params_fingerprint));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return rows_[it->second];
}

bool AnswerCache::insert(const CacheRow& row) {
    Key key = key_of(row.meme_id, row.focus, row.params_fingerprint);
    auto it = index_.find(key);
    if (it != index_.end()) {
        const CacheRow& existing = rows_[it->second];
        if (existing.answer != row.answer || existing.suppressed != row.suppressed) {
            throw std::runtime_error("cache key (" + row.meme_id + ", " +
                                     focus_name(row.focus) + ", " + row.params_fingerprint +
                                     ") is write-once; conflicting value");
        }
        return false;
    }
    index_[key] = rows_.size();
    rows_.push_back(row);
    dirty_ = true;
    return true;
}

void AnswerCache::flush() {
    if (!dirty_ || path_.empty()) {
        return;
    }
    std::string out;
    for (const CacheRow& row : rows_) {
        json obj;
        obj["meme_id"] = row.meme_id;
        obj["focus"] = focus_name(row.focus);
        obj["params_fingerprint"] = row.params_fingerprint;
        obj["answer"] = row.answer;
        obj["suppressed"] = row.suppressed;
        out += obj.dump();
        out += '\n';
    }
    write_file(path_, out);
    dirty_ = false;
}

} // namespace procap
