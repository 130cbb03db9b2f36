#include "procap/classify.hpp"

#include "procap/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace procap {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

Label predict(const ScorePair& score) {
    return score.s0 > score.s1 ? Label::non_hateful : Label::hateful;
}

LabelWords resolve_label_words(const MaskedLm& lm, const Tokenizer& tokenizer,
                               const std::string& positive, const std::string& negative) {
    LabelWords words;
    words.positive = positive;
    words.negative = negative;
    for (auto [word, id] : {std::pair<const std::string&, int*>{positive, &words.positive_token_id},
                            std::pair<const std::string&, int*>{negative, &words.negative_token_id}}) {
        std::vector<Token> tokens = tokenizer.tokenize(word);
        if (tokens.size() != 1) {
            throw std::invalid_argument("label word '" + word +
                                        "' must map to exactly one token");
        }
        std::optional<int> found = lm.token_id(tokens[0].text);
        if (!found) {
            throw std::invalid_argument("label word '" + word + "' is not in the LM vocabulary");
        }
        *id = *found;
    }
    return words;
}

EncoderHead make_encoder_head(std::shared_ptr<TextEncoder> encoder, uint64_t init_seed,
                              double dropout_rate) {
    if (!encoder) {
        throw std::invalid_argument("encoder head requires an encoder");
    }
    EncoderHead head;
    head.encoder = std::move(encoder);
    head.dropout_rate = dropout_rate;
    head.weight.resize(head.encoder->dim() * 2);
    Rng rng(mix_seed(init_seed, 0x68656164));
    for (double& w : head.weight) {
        w = 0.02 * rng.next_normal();
    }
    return head;
}

ScorePair linear_scores(std::span<const double> weight, const double bias[2],
                        std::span<const double> features) {
    if (weight.size() != features.size() * 2) {
        throw std::runtime_error("weight matrix does not match encoder dimension");
    }
    double z[2] = {bias[0], bias[1]};
    for (size_t i = 0; i < features.size(); ++i) {
        z[0] += weight[i * 2] * features[i];
        z[1] += weight[i * 2 + 1] * features[i];
    }
    return {sigmoid(z[0]), sigmoid(z[1])};
}

std::string join_blocks(std::initializer_list<std::string_view> parts) {
    std::string out;
    for (std::string_view part : parts) {
        if (part.empty()) {
            continue;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += part;
    }
    return out;
}

namespace {

size_t count_mask_tokens(const std::vector<Token>& tokens) {
    size_t n = 0;
    for (const Token& t : tokens) {
        if (t.text == mask_token) {
            ++n;
        }
    }
    return n;
}

std::string replace_mask(const std::string& template_text, const std::string& word) {
    size_t pos = template_text.find("[MASK]");
    std::string out = template_text;
    out.replace(pos, 6, word);
    return out;
}

} // namespace

ScorePair encoder_scores(const EncoderHead& head, const std::string& meme_text,
                         const std::string& caption) {
    std::vector<double> features = head.encoder->encode(join_blocks({meme_text, caption}));
    return linear_scores(head.weight, head.bias, features);
}

std::string PromptEnvelope::concatenated() const {
    return join_blocks({test_block, demo_nonhate, demo_hate});
}

PromptEnvelope build_envelope(const std::string& meme_text, const std::string& caption,
                              const std::string& template_text,
                              const Demonstration& demo_nonhate, const Demonstration& demo_hate,
                              const LabelWords& labels, const Tokenizer& tokenizer) {
    size_t first = template_text.find("[MASK]");
    if (first == std::string::npos ||
        template_text.find("[MASK]", first + 1) != std::string::npos) {
        throw std::invalid_argument("prompt template must contain exactly one [MASK]");
    }
    for (const Demonstration* demo : {&demo_nonhate, &demo_hate}) {
        if (demo->caption.empty()) {
            throw std::invalid_argument("demonstration is missing its caption");
        }
    }
    for (const std::string* text : {&meme_text, &caption, &demo_nonhate.text,
                                    &demo_nonhate.caption, &demo_hate.text,
                                    &demo_hate.caption}) {
        if (count_mask_tokens(tokenizer.tokenize(*text)) != 0) {
            throw std::invalid_argument("meme text or caption may not contain the mask token");
        }
    }

    PromptEnvelope envelope;
    envelope.test_block = join_blocks({meme_text, caption, template_text});
    envelope.demo_nonhate = join_blocks(
        {demo_nonhate.text, demo_nonhate.caption, replace_mask(template_text, labels.positive)});
    envelope.demo_hate = join_blocks(
        {demo_hate.text, demo_hate.caption, replace_mask(template_text, labels.negative)});

    std::vector<Token> tokens = tokenizer.tokenize(envelope.concatenated());
    size_t mask_count = 0;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].text == mask_token) {
            envelope.mask_index = i;
            ++mask_count;
        }
    }
    if (mask_count != 1) {
        throw std::runtime_error("envelope must contain exactly one mask token");
    }
    return envelope;
}

ScorePair prompt_scores(const MaskedLm& lm, const PromptEnvelope& envelope,
                        const LabelWords& labels, const Tokenizer& tokenizer) {
    std::vector<Token> token_spans = tokenizer.tokenize(envelope.concatenated());
    if (token_spans.size() > lm.max_sequence_tokens()) {
        throw std::runtime_error("envelope of " + std::to_string(token_spans.size()) +
                                 " tokens exceeds the LM window of " +
                                 std::to_string(lm.max_sequence_tokens()));
    }
    std::vector<std::string> tokens;
    tokens.reserve(token_spans.size());
    for (Token& t : token_spans) {
        tokens.push_back(std::move(t.text));
    }
    if (envelope.mask_index >= tokens.size() || tokens[envelope.mask_index] != mask_token) {
        throw std::runtime_error("envelope mask index does not point at the mask token");
    }
    std::vector<double> logits = lm.mask_logits(tokens, envelope.mask_index);
    if (labels.positive_token_id < 0 || labels.negative_token_id < 0 ||
        static_cast<size_t>(labels.positive_token_id) >= logits.size() ||
        static_cast<size_t>(labels.negative_token_id) >= logits.size()) {
        throw std::runtime_error("label word token ids are not resolved against this LM");
    }
    return {sigmoid(logits[static_cast<size_t>(labels.positive_token_id)]),
            sigmoid(logits[static_cast<size_t>(labels.negative_token_id)])};
}

} // namespace procap
