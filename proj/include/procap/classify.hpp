#pragma once

#include "procap/dataset.hpp"
#include "procap/text_model.hpp"
#include "procap/tokenizer.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace procap {

struct ScorePair {
    double s0 = 0.5; // non-hateful
    double s1 = 0.5; // hateful
};

double sigmoid(double z);

// s0 > s1 is non-hateful; anything else, ties included, is hateful.
Label predict(const ScorePair& score);

// Space-joins the nonempty blocks; the concatenation used everywhere a meme
// text meets its caption or a prompt block.
std::string join_blocks(std::initializer_list<std::string_view> parts);

inline constexpr const char* default_prompt_template = "It was [MASK].";

struct LabelWords {
    std::string positive = "good"; // non-hateful
    std::string negative = "bad";  // hateful
    int positive_token_id = -1;
    int negative_token_id = -1;
};

// Resolves label words against the LM vocabulary. Each word must tokenize to
// exactly one token and that token must exist in the vocabulary.
LabelWords resolve_label_words(const MaskedLm& lm, const Tokenizer& tokenizer,
                               const std::string& positive, const std::string& negative);

// Sentence-encoder classification head: scores are elementwise sigmoids of a
// d x 2 linear layer over the encoded [text, caption] concatenation.
struct EncoderHead {
    std::shared_ptr<TextEncoder> encoder;
    std::vector<double> weight; // row-major, dim x 2
    double bias[2] = {0.0, 0.0};
    double dropout_rate = 0.4; // training-time only; scoring here is eval mode
};

EncoderHead make_encoder_head(std::shared_ptr<TextEncoder> encoder, uint64_t init_seed,
                              double dropout_rate = 0.4);

// z_k = W[:,k] . features + b_k followed by elementwise sigmoid.
ScorePair linear_scores(std::span<const double> weight, const double bias[2],
                        std::span<const double> features);

// Eval-mode score path (dropout disabled, deterministic).
ScorePair encoder_scores(const EncoderHead& head, const std::string& meme_text,
                         const std::string& caption);

struct Demonstration {
    std::string text;    // demo meme text
    std::string caption; // demo caption
};

// Prompt blocks in the order they are concatenated for the LM:
// [test, non-hate demo, hate demo]. Demo blocks carry their label word in
// place of the mask, so the whole sequence contains exactly one mask token.
struct PromptEnvelope {
    std::string test_block;
    std::string demo_nonhate;
    std::string demo_hate;
    size_t mask_index = 0; // token position in the concatenated sequence

    std::string concatenated() const;
};

PromptEnvelope build_envelope(const std::string& meme_text, const std::string& caption,
                              const std::string& template_text,
                              const Demonstration& demo_nonhate, const Demonstration& demo_hate,
                              const LabelWords& labels, const Tokenizer& tokenizer);

// Prompt-head score path: elementwise sigmoid over the vocabulary logits at
// the mask position, read out at the label-word ids. A sequence longer than
// the LM window is an error, never a silent truncation.
ScorePair prompt_scores(const MaskedLm& lm, const PromptEnvelope& envelope,
                        const LabelWords& labels, const Tokenizer& tokenizer);

} // namespace procap
