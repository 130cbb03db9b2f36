#include "procap/text_model.hpp"

#include "procap/rng.hpp"
#include "procap/util.hpp"

#include <cmath>

namespace procap {

HashedTextEncoder::HashedTextEncoder(size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        throw std::invalid_argument("encoder dimension must be positive");
    }
}

std::vector<double> HashedTextEncoder::encode(const std::string& text) const {
    std::vector<double> features(dim_, 0.0);
    for (const Token& token : tokenizer_.tokenize(text)) {
        features[fnv1a64(token.text) % dim_] += 1.0;
    }
    double norm = 0.0;
    for (double v : features) {
        norm += v * v;
    }
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : features) {
            v /= norm;
        }
    }
    return features;
}

HashedMaskedLm::HashedMaskedLm(std::vector<std::string> vocab, size_t context_dim,
                               size_t max_sequence, uint64_t init_seed)
    : vocab_(std::move(vocab)), context_dim_(context_dim), max_sequence_(max_sequence) {
    if (vocab_.empty()) {
        throw std::invalid_argument("masked LM vocabulary must be nonempty");
    }
    if (context_dim_ == 0) {
        throw std::invalid_argument("context dimension must be positive");
    }
    weights_.resize(vocab_.size() * context_dim_);
    bias_.assign(vocab_.size(), 0.0);
    Rng rng(mix_seed(init_seed, 0x6c6d));
    for (double& w : weights_) {
        w = 0.02 * rng.next_normal();
    }
}

std::optional<int> HashedMaskedLm::token_id(const std::string& token) const {
    for (size_t i = 0; i < vocab_.size(); ++i) {
        if (vocab_[i] == token) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

// Bucket counts over the tokens preceding the mask, under a fixed
// sqrt(dim) scale. Left-context only: in the prompt envelope the mask sits
// at the end of the test block, so this reads the meme under test while the
// demonstration blocks that follow stay out of the features. Repeating the
// demos into every feature vector would hand both classes' words to every
// example and no margin could form. The scale must not depend on the
// example either, and a constant one keeps the logits inside the range
// where the sigmoid still moves.
std::vector<double> HashedMaskedLm::context_features(std::span<const std::string> tokens,
                                                     size_t mask_index) const {
    std::vector<double> features(context_dim_, 0.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(context_dim_));
    const size_t end = std::min(mask_index, tokens.size());
    for (size_t i = 0; i < end; ++i) {
        features[fnv1a64(tokens[i]) % context_dim_] += scale;
    }
    return features;
}

std::vector<double> HashedMaskedLm::mask_logits(std::span<const std::string> tokens,
                                                size_t mask_index) const {
    if (mask_index >= tokens.size()) {
        throw std::invalid_argument("mask index outside token sequence");
    }
    std::vector<double> h = context_features(tokens, mask_index);
    std::vector<double> logits(vocab_.size(), 0.0);
    for (size_t j = 0; j < vocab_.size(); ++j) {
        double z = bias_[j];
        const double* row = &weights_[j * context_dim_];
        for (size_t k = 0; k < context_dim_; ++k) {
            z += row[k] * h[k];
        }
        logits[j] = z;
    }
    return logits;
}

std::vector<std::string> HashedMaskedLm::default_vocab() {
    return {"good", "bad", "[mask]", "it", "was", "a", "the", "and", "of", "in"};
}

} // namespace procap
