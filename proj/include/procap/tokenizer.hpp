#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace procap {

inline constexpr std::string_view mask_token = "[mask]";

struct Token {
    std::string text; // lowercased
    size_t begin = 0; // byte offset into the source string
    size_t end = 0;   // one past the last byte
};

// Word tokenizer shared by the caption budgets and the classifier stubs.
// Tokens are maximal runs of alphanumeric bytes (non-ASCII bytes count as
// letters so UTF-8 words survive), lowercased. The literal "[MASK]" is a
// single token regardless of case. Punctuation is not a token and does not
// count against any budget.
class Tokenizer {
public:
    std::vector<Token> tokenize(std::string_view text) const;
    size_t count(std::string_view text) const;

    // Longest prefix of `text` containing at most `max_tokens` tokens.
    // Cutting at a token boundary keeps re-tokenization stable: the result
    // tokenizes to exactly the first `max_tokens` tokens of the input.
    std::string truncate(std::string_view text, size_t max_tokens) const;
};

} // namespace procap
