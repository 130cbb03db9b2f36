#include "procap/tokenizer.hpp"

#include "helpers.hpp"

#include "doctest.h"

using namespace procap;

TEST_CASE("tokenizer splits alphanumeric runs and lowercases") {
    Tokenizer tok;
    auto tokens = tok.tokenize("Hello, World! 42x");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0].text == "hello");
    CHECK(tokens[1].text == "world");
    CHECK(tokens[2].text == "42x");
}

TEST_CASE("punctuation does not count as a token") {
    Tokenizer tok;
    CHECK(tok.count("a cat.") == 2);
    CHECK(tok.count("...") == 0);
    CHECK(tok.count("") == 0);
}

TEST_CASE("[MASK] is a single token in any case") {
    Tokenizer tok;
    auto tokens = tok.tokenize("It was [MASK].");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[2].text == mask_token);
    CHECK(tok.tokenize("x [mask] y")[1].text == mask_token);
    // an unterminated bracket is not a mask
    CHECK(tok.count("[mas k]") == 2);
}

TEST_CASE("truncate keeps whole tokens and is prefix-stable") {
    Tokenizer tok;
    CHECK(tok.truncate("one two three", 2) == "one two");
    CHECK(tok.truncate("one two", 5) == "one two");
    CHECK(tok.truncate("one two", 0) == "");
    CHECK(tok.truncate("a, b, c", 2) == "a, b");

    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        std::string text = testing::random_sentence(rng, 1, 30);
        size_t budget = rng.next_below(12);
        std::string cut = tok.truncate(text, budget);
        CHECK(tok.count(cut) == std::min(budget, tok.count(text)));
        // re-truncating is a fixed point
        CHECK(tok.truncate(cut, budget) == cut);
    }
}
