#pragma once

#include "procap/classify.hpp"
#include "procap/metrics.hpp"
#include "procap/optim.hpp"
#include "procap/probing.hpp"
#include "procap/rng.hpp"
#include "procap/run_config.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace procap {

// Binary cross-entropy against a one-hot target: -(y0 log s0 + y1 log s1).
// Log arguments are clamped at 1e-12.
double bce_loss(const ScorePair& score, const double y[2]);
double bce_loss(const ScorePair& score, Label label);

// One classifier input: the meme text and its rendered (optionally
// tag-padded) caption.
struct Example {
    std::string id;
    std::string text;
    std::string caption;
    std::optional<Label> label;
};

// Assembles classifier inputs from cached answers. Every meme must have a
// complete cached ProCap under the config's decode fingerprint; a missing
// one is an error (captioning and training are separate phases).
std::vector<Example> build_examples(const Dataset& dataset, const AnswerCache& cache,
                                    const RunConfig& config);

// Trainable classifier: one of the two heads over a frozen featurizer.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual HeadKind head() const = 0;
    // Eval-mode deterministic score.
    virtual ScorePair score(const Example& example) const = 0;
    // One AdamW step on the mean batch loss; returns that loss.
    virtual double train_batch(std::span<const Example* const> batch, Rng& dropout_rng) = 0;
    virtual void save(const std::filesystem::path& dir) const = 0;
};

class EncoderClassifier : public Classifier {
public:
    EncoderClassifier(const RunConfig& config, uint64_t seed);

    HeadKind head() const override { return HeadKind::encoder; }
    ScorePair score(const Example& example) const override;
    double train_batch(std::span<const Example* const> batch, Rng& dropout_rng) override;
    void save(const std::filesystem::path& dir) const override;

    EncoderHead& encoder_head() { return head_; }
    // Checkpoint restores drop the optimizer state; such classifiers only
    // score.
    void mark_eval_only();

private:
    std::vector<double> featurize(const Example& example) const;

    EncoderHead head_;
    std::unique_ptr<AdamW> opt_weight_;
    std::unique_ptr<AdamW> opt_bias_;
};

class PromptClassifier : public Classifier {
public:
    // Demonstrations are sampled uniformly from the labeled train examples,
    // one per class, fixed for the whole run (keyed by the run seed).
    PromptClassifier(const RunConfig& config, uint64_t seed,
                     std::span<const Example> train_examples);

    static std::unique_ptr<PromptClassifier> load(const RunConfig& config,
                                                  const std::string& weights_json);

    HeadKind head() const override { return HeadKind::prompt; }
    ScorePair score(const Example& example) const override;
    double train_batch(std::span<const Example* const> batch, Rng& dropout_rng) override;
    void save(const std::filesystem::path& dir) const override;

    const MaskedLm& lm() const { return lm_; }
    const LabelWords& label_words() const { return labels_; }
    PromptEnvelope envelope_for(const Example& example) const;

private:
    PromptClassifier(std::vector<std::string> vocab, size_t context_dim, size_t window,
                     std::string template_text);

    Tokenizer tokenizer_;
    HashedMaskedLm lm_;
    LabelWords labels_;
    std::string template_;
    Demonstration demo_nonhate_;
    Demonstration demo_hate_;
    std::unique_ptr<AdamW> opt_weight_;
    std::unique_ptr<AdamW> opt_bias_;
};

struct TrainResult {
    std::unique_ptr<Classifier> classifier;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

// Deterministic training run: seeded init, per-epoch shuffles keyed by
// (seed, epoch), AdamW steps on mean batch loss. Aborts on non-finite loss.
TrainResult train(const RunConfig& config, std::span<const Example> train_examples,
                  uint64_t seed);

struct EvalResult {
    std::vector<ScorePair> scores;
    std::vector<Label> predictions;
};

EvalResult evaluate(const Classifier& classifier, std::span<const Example> examples);

// Per-seed metrics on the test set; requires fully labeled examples.
SeedMetrics evaluate_seed(const Classifier& classifier, std::span<const Example> test_examples,
                          uint64_t seed);

// Full multi-seed experiment: train/evaluate per seed, aggregate, stamp the
// config fingerprint. Checkpoints land under checkpoint_dir/seed<k> when a
// directory is given.
MetricsReport run_experiment(const RunConfig& config, std::span<const Example> train_examples,
                             std::span<const Example> test_examples,
                             const std::filesystem::path& checkpoint_dir = {});

std::unique_ptr<Classifier> load_checkpoint(const std::filesystem::path& dir);

} // namespace procap
