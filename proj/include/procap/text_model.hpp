#pragma once

#include "procap/tokenizer.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace procap {

// Sentence encoder behind an interface; the real system would put a
// pretrained transformer here.
class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual size_t dim() const = 0;
    virtual std::vector<double> encode(const std::string& text) const = 0;
};

// Deterministic stand-in encoder: tokens hash into `dim` buckets, counts are
// L2-normalized. No weights, no state.
class HashedTextEncoder : public TextEncoder {
public:
    explicit HashedTextEncoder(size_t dim = 64);
    size_t dim() const override { return dim_; }
    std::vector<double> encode(const std::string& text) const override;

private:
    size_t dim_;
    Tokenizer tokenizer_;
};

// Masked language model behind an interface. Inputs are tokenizer tokens;
// the model reports raw vocabulary logits at the mask position. Label-word
// lookups go through token_id.
class MaskedLm {
public:
    virtual ~MaskedLm() = default;
    virtual size_t vocab_size() const = 0;
    virtual size_t max_sequence_tokens() const = 0;
    virtual std::optional<int> token_id(const std::string& token) const = 0;
    virtual std::vector<double> mask_logits(std::span<const std::string> tokens,
                                            size_t mask_index) const = 0;
};

// Deterministic trainable stub: context tokens hash into `context_dim`
// bucket counts h, and logits = U h + c with a small seeded init. Exposes
// its parameters so the training loop can run analytic gradient steps
// against the label-word rows.
class HashedMaskedLm : public MaskedLm {
public:
    HashedMaskedLm(std::vector<std::string> vocab, size_t context_dim = 64,
                   size_t max_sequence = 1024, uint64_t init_seed = 0);

    size_t vocab_size() const override { return vocab_.size(); }
    size_t max_sequence_tokens() const override { return max_sequence_; }
    std::optional<int> token_id(const std::string& token) const override;
    std::vector<double> mask_logits(std::span<const std::string> tokens,
                                    size_t mask_index) const override;

    // Context feature vector for one token sequence (mask excluded).
    std::vector<double> context_features(std::span<const std::string> tokens,
                                         size_t mask_index) const;
    size_t context_dim() const { return context_dim_; }

    // Row-major weight matrix, vocab_size x context_dim, then bias.
    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }
    std::vector<double>& bias() { return bias_; }
    const std::vector<double>& bias() const { return bias_; }
    const std::vector<std::string>& vocab() const { return vocab_; }

    // Small default vocabulary containing the default label words.
    static std::vector<std::string> default_vocab();

private:
    std::vector<std::string> vocab_;
    size_t context_dim_;
    size_t max_sequence_;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

} // namespace procap
