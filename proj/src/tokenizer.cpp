#include "procap/tokenizer.hpp"

#include <cctype>

namespace procap {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool matches_mask(std::string_view text, size_t pos) {
    static constexpr std::string_view pattern = "[mask]";
    if (pos + pattern.size() > text.size()) {
        return false;
    }
    for (size_t i = 0; i < pattern.size(); ++i) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(text[pos + i])));
        if (c != pattern[i]) {
            return false;
        }
    }
    return true;
}

} // namespace

std::vector<Token> Tokenizer::tokenize(std::string_view text) const {
    std::vector<Token> tokens;
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '[' && matches_mask(text, i)) {
            tokens.push_back({std::string(mask_token), i, i + mask_token.size()});
            i += mask_token.size();
            continue;
        }
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t begin = i;
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        Token tok;
        tok.begin = begin;
        tok.end = i;
        tok.text.reserve(i - begin);
        for (size_t k = begin; k < i; ++k) {
            tok.text.push_back(
                static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

size_t Tokenizer::count(std::string_view text) const {
    return tokenize(text).size();
}

std::string Tokenizer::truncate(std::string_view text, size_t max_tokens) const {
    std::vector<Token> tokens = tokenize(text);
    if (tokens.size() <= max_tokens) {
        return std::string(text);
    }
    if (max_tokens == 0) {
        return std::string();
    }
    return std::string(text.substr(0, tokens[max_tokens - 1].end));
}

} // namespace procap
