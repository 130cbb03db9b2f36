#include "procap/train.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

namespace {

constexpr double log_epsilon = 1e-12;

void check_one_hot(const double y[2]) {
    bool valid = (y[0] == 0.0 || y[0] == 1.0) && (y[1] == 0.0 || y[1] == 1.0) &&
                 (y[0] + y[1] == 1.0);
    if (!valid) {
        throw std::invalid_argument("bce_loss target must be one-hot");
    }
}

void one_hot(Label label, double y[2]) {
    y[0] = label == Label::non_hateful ? 1.0 : 0.0;
    y[1] = label == Label::hateful ? 1.0 : 0.0;
}

} // namespace

double bce_loss(const ScorePair& score, const double y[2]) {
    check_one_hot(y);
    double loss = 0.0;
    // Zero-weight terms are skipped rather than multiplied so that a zero
    // score on the unlabeled class cannot poison the sum with 0 * -inf.
    if (y[0] != 0.0) {
        loss -= std::log(std::max(score.s0, log_epsilon));
    }
    if (y[1] != 0.0) {
        loss -= std::log(std::max(score.s1, log_epsilon));
    }
    return loss;
}

double bce_loss(const ScorePair& score, Label label) {
    double y[2];
    one_hot(label, y);
    return bce_loss(score, y);
}

std::vector<Example> build_examples(const Dataset& dataset, const AnswerCache& cache,
                                    const RunConfig& config) {
    std::vector<ProbingQuestion> bank = question_subset(config.question_subset);
    DecodeParams params = config.decode_params();
    CaptionBudgets budgets{config.joint_budget, config.per_answer_budget};
    Tokenizer tokenizer;

    std::vector<Example> examples;
    examples.reserve(dataset.records.size());
    for (const MemeRecord& record : dataset.records) {
        std::optional<ProCap> procap = procap_from_cache(record.id, bank, cache, params);
        if (!procap) {
            throw std::runtime_error("missing caption for meme '" + record.id +
                                     "' (fingerprint " + params.fingerprint() + ")");
        }
        Example example;
        example.id = record.id;
        example.text = record.text;
        example.caption = render_procap(*procap, record.text, tokenizer, budgets);
        if (config.use_tags) {
            example.caption = augment_tags(example.caption, record.tags);
        }
        example.label = record.label;
        examples.push_back(std::move(example));
    }
    return examples;
}

// ---------------------------------------------------------------------------
// Encoder head
// ---------------------------------------------------------------------------

EncoderClassifier::EncoderClassifier(const RunConfig& config, uint64_t seed) {
    auto encoder = std::make_shared<HashedTextEncoder>(config.encoder_dim);
    head_ = make_encoder_head(std::move(encoder), mix_seed(seed, 0x656e63), config.dropout);
    opt_weight_ = std::make_unique<AdamW>(head_.weight.size(), config.learning_rate,
                                          config.weight_decay);
    opt_bias_ = std::make_unique<AdamW>(2, config.learning_rate, config.weight_decay);
}

std::vector<double> EncoderClassifier::featurize(const Example& example) const {
    return head_.encoder->encode(join_blocks({example.text, example.caption}));
}

ScorePair EncoderClassifier::score(const Example& example) const {
    return encoder_scores(head_, example.text, example.caption);
}

double EncoderClassifier::train_batch(std::span<const Example* const> batch,
                                      Rng& dropout_rng) {
    if (!opt_weight_) {
        throw std::runtime_error("classifier restored from a checkpoint is evaluation-only");
    }
    if (batch.empty()) {
        throw std::invalid_argument("empty training batch");
    }
    const size_t dim = head_.encoder->dim();
    std::vector<double> grad_weight(head_.weight.size(), 0.0);
    double grad_bias[2] = {0.0, 0.0};
    double loss_sum = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const Example* example : batch) {
        if (!example->label) {
            throw std::runtime_error("training example '" + example->id + "' has no label");
        }
        std::vector<double> features = featurize(*example);
        if (head_.dropout_rate > 0.0) {
            const double keep = 1.0 - head_.dropout_rate;
            for (double& f : features) {
                if (dropout_rng.next_double() < head_.dropout_rate) {
                    f = 0.0;
                } else {
                    f /= keep;
                }
            }
        }
        ScorePair s = linear_scores(head_.weight, head_.bias, features);
        double y[2];
        one_hot(*example->label, y);
        loss_sum += bce_loss(s, y);
        // d/dz of -y log(sigmoid(z)) is y * (sigmoid(z) - 1)
        double gz[2] = {y[0] * (s.s0 - 1.0), y[1] * (s.s1 - 1.0)};
        for (size_t i = 0; i < dim; ++i) {
            grad_weight[i * 2] += gz[0] * features[i] * inv_batch;
            grad_weight[i * 2 + 1] += gz[1] * features[i] * inv_batch;
        }
        grad_bias[0] += gz[0] * inv_batch;
        grad_bias[1] += gz[1] * inv_batch;
    }
    opt_weight_->step(head_.weight, grad_weight);
    opt_bias_->step(std::span<double>(head_.bias, 2), std::span<const double>(grad_bias, 2));
    return loss_sum * inv_batch;
}

void EncoderClassifier::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    json descriptor;
    descriptor["head"] = "encoder";
    descriptor["label_words"] = {{"positive", "good"}, {"negative", "bad"}};
    descriptor["template"] = default_prompt_template;
    descriptor["encoder_dim"] = head_.encoder->dim();
    write_file(dir / "descriptor.json", descriptor.dump(2) + "\n");

    json weights;
    weights["weight"] = head_.weight;
    weights["bias"] = {head_.bias[0], head_.bias[1]};
    weights["dropout"] = head_.dropout_rate;
    write_file(dir / "weights.json", weights.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Prompt head
// ---------------------------------------------------------------------------

PromptClassifier::PromptClassifier(const RunConfig& config, uint64_t seed,
                                   std::span<const Example> train_examples)
    : lm_(HashedMaskedLm::default_vocab(), config.lm_context_dim, config.lm_window,
          mix_seed(seed, 0x706c6d)),
      template_(config.prompt_template) {
    labels_ = resolve_label_words(lm_, tokenizer_, config.label_positive, config.label_negative);

    std::vector<const Example*> nonhate;
    std::vector<const Example*> hate;
    for (const Example& example : train_examples) {
        if (!example.label) {
            continue;
        }
        (*example.label == Label::hateful ? hate : nonhate).push_back(&example);
    }
    if (nonhate.empty() || hate.empty()) {
        throw std::runtime_error(
            "prompt head needs at least one training meme of each class for demonstrations");
    }
    Rng demo_rng(mix_seed(seed, 0x64656d6f));
    const Example* pick_nonhate = nonhate[demo_rng.next_below(nonhate.size())];
    const Example* pick_hate = hate[demo_rng.next_below(hate.size())];
    demo_nonhate_ = {pick_nonhate->text, pick_nonhate->caption};
    demo_hate_ = {pick_hate->text, pick_hate->caption};

    opt_weight_ = std::make_unique<AdamW>(lm_.weights().size(), config.learning_rate,
                                          config.weight_decay);
    opt_bias_ = std::make_unique<AdamW>(lm_.bias().size(), config.learning_rate,
                                        config.weight_decay);
}

PromptEnvelope PromptClassifier::envelope_for(const Example& example) const {
    return build_envelope(example.text, example.caption, template_, demo_nonhate_, demo_hate_,
                          labels_, tokenizer_);
}

ScorePair PromptClassifier::score(const Example& example) const {
    return prompt_scores(lm_, envelope_for(example), labels_, tokenizer_);
}

double PromptClassifier::train_batch(std::span<const Example* const> batch, Rng&) {
    if (!opt_weight_) {
        throw std::runtime_error("classifier restored from a checkpoint is evaluation-only");
    }
    if (batch.empty()) {
        throw std::invalid_argument("empty training batch");
    }
    const size_t dim = lm_.context_dim();
    const size_t pos = static_cast<size_t>(labels_.positive_token_id);
    const size_t neg = static_cast<size_t>(labels_.negative_token_id);
    std::vector<double> grad_weight(lm_.weights().size(), 0.0);
    std::vector<double> grad_bias(lm_.bias().size(), 0.0);
    double loss_sum = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const Example* example : batch) {
        if (!example->label) {
            throw std::runtime_error("training example '" + example->id + "' has no label");
        }
        PromptEnvelope envelope = envelope_for(*example);
        ScorePair s = prompt_scores(lm_, envelope, labels_, tokenizer_);

        std::vector<Token> spans = tokenizer_.tokenize(envelope.concatenated());
        std::vector<std::string> tokens;
        tokens.reserve(spans.size());
        for (Token& t : spans) {
            tokens.push_back(std::move(t.text));
        }
        std::vector<double> h = lm_.context_features(tokens, envelope.mask_index);

        double y[2];
        one_hot(*example->label, y);
        loss_sum += bce_loss(s, y);
        double gz_pos = y[0] * (s.s0 - 1.0);
        double gz_neg = y[1] * (s.s1 - 1.0);
        for (size_t k = 0; k < dim; ++k) {
            grad_weight[pos * dim + k] += gz_pos * h[k] * inv_batch;
            grad_weight[neg * dim + k] += gz_neg * h[k] * inv_batch;
        }
        grad_bias[pos] += gz_pos * inv_batch;
        grad_bias[neg] += gz_neg * inv_batch;
    }
    opt_weight_->step(lm_.weights(), grad_weight);
    opt_bias_->step(lm_.bias(), grad_bias);
    return loss_sum * inv_batch;
}

void PromptClassifier::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    json descriptor;
    descriptor["head"] = "prompt";
    descriptor["label_words"] = {{"positive", labels_.positive},
                                 {"negative", labels_.negative}};
    descriptor["template"] = template_;
    descriptor["encoder_dim"] = lm_.context_dim();
    write_file(dir / "descriptor.json", descriptor.dump(2) + "\n");

    json weights;
    weights["vocab"] = lm_.vocab();
    weights["context_dim"] = lm_.context_dim();
    weights["window"] = lm_.max_sequence_tokens();
    weights["lm_weight"] = lm_.weights();
    weights["lm_bias"] = lm_.bias();
    weights["demo_nonhate"] = {{"text", demo_nonhate_.text}, {"caption", demo_nonhate_.caption}};
    weights["demo_hate"] = {{"text", demo_hate_.text}, {"caption", demo_hate_.caption}};
    write_file(dir / "weights.json", weights.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

namespace {

std::unique_ptr<Classifier> make_classifier(const RunConfig& config, uint64_t seed,
                                            std::span<const Example> train_examples) {
    if (config.head == HeadKind::encoder) {
        return std::make_unique<EncoderClassifier>(config, seed);
    }
    return std::make_unique<PromptClassifier>(config, seed, train_examples);
}

} // namespace

TrainResult train(const RunConfig& config, std::span<const Example> train_examples,
                  uint64_t seed) {
    config.validate();
    if (train_examples.empty()) {
        throw std::runtime_error("cannot train on an empty dataset");
    }
    std::unique_ptr<Classifier> classifier = make_classifier(config, seed, train_examples);

    Rng dropout_rng(mix_seed(seed, 0x64726f70));
    std::vector<size_t> order(train_examples.size());
    std::vector<const Example*> batch;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        Rng shuffle_rng(mix_seed(seed, static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order);
        for (size_t start = 0; start < order.size();
             start += static_cast<size_t>(config.batch_size)) {
            size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
            batch.clear();
            for (size_t i = start; i < end; ++i) {
                batch.push_back(&train_examples[order[i]]);
            }
            double loss = classifier->train_batch(batch, dropout_rng);
            if (!std::isfinite(loss)) {
                throw std::runtime_error(
                    "non-finite training loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(start / config.batch_size) +
                    " (seed " + std::to_string(seed) + "); aborting");
            }
        }
    }

    TrainResult result;
    double loss_sum = 0.0;
    size_t correct = 0;
    for (const Example& example : train_examples) {
        ScorePair s = classifier->score(example);
        loss_sum += bce_loss(s, *example.label);
        if (predict(s) == *example.label) {
            ++correct;
        }
    }
    result.final_loss = loss_sum / static_cast<double>(train_examples.size());
    result.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(train_examples.size());
    result.classifier = std::move(classifier);
    return result;
}

EvalResult evaluate(const Classifier& classifier, std::span<const Example> examples) {
    EvalResult result;
    result.scores.reserve(examples.size());
    result.predictions.reserve(examples.size());
    for (const Example& example : examples) {
        ScorePair s = classifier.score(example);
        result.scores.push_back(s);
        result.predictions.push_back(predict(s));
    }
    return result;
}

SeedMetrics evaluate_seed(const Classifier& classifier, std::span<const Example> test_examples,
                          uint64_t seed) {
    EvalResult eval = evaluate(classifier, test_examples);
    std::vector<double> scores_s1;
    std::vector<Label> labels;
    for (size_t i = 0; i < test_examples.size(); ++i) {
        if (!test_examples[i].label) {
            throw std::runtime_error("evaluation example '" + test_examples[i].id +
                                     "' has no label");
        }
        scores_s1.push_back(eval.scores[i].s1);
        labels.push_back(*test_examples[i].label);
    }
    SeedMetrics metrics;
    metrics.seed = seed;
    metrics.auc = auc_roc(scores_s1, labels);
    metrics.accuracy = accuracy(eval.predictions, labels);
    return metrics;
}

MetricsReport run_experiment(const RunConfig& config, std::span<const Example> train_examples,
                             std::span<const Example> test_examples,
                             const std::filesystem::path& checkpoint_dir) {
    std::vector<SeedMetrics> per_seed;
    for (uint64_t seed : config.seeds) {
        TrainResult trained = train(config, train_examples, seed);
        per_seed.push_back(evaluate_seed(*trained.classifier, test_examples, seed));
        if (!checkpoint_dir.empty()) {
            trained.classifier->save(checkpoint_dir / ("seed" + std::to_string(seed)));
        }
    }
    MetricsReport report = aggregate_runs(per_seed);
    report.config_fingerprint = config.fingerprint();
    return report;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

void EncoderClassifier::mark_eval_only() {
    opt_weight_.reset();
    opt_bias_.reset();
}

PromptClassifier::PromptClassifier(std::vector<std::string> vocab, size_t context_dim,
                                   size_t window, std::string template_text)
    : lm_(std::move(vocab), context_dim, window, 0), template_(std::move(template_text)) {}

std::unique_ptr<PromptClassifier> PromptClassifier::load(const RunConfig& config,
                                                         const std::string& weights_json) {
    json weights = json::parse(weights_json);
    auto classifier = std::unique_ptr<PromptClassifier>(new PromptClassifier(
        weights.at("vocab").get<std::vector<std::string>>(),
        weights.at("context_dim").get<size_t>(), weights.at("window").get<size_t>(),
        config.prompt_template));
    std::vector<double> w = weights.at("lm_weight").get<std::vector<double>>();
    std::vector<double> b = weights.at("lm_bias").get<std::vector<double>>();
    if (w.size() != classifier->lm_.weights().size() ||
        b.size() != classifier->lm_.bias().size()) {
        throw std::runtime_error("checkpoint LM weight sizes do not match its vocabulary");
    }
    classifier->lm_.weights() = std::move(w);
    classifier->lm_.bias() = std::move(b);
    classifier->labels_ = resolve_label_words(classifier->lm_, classifier->tokenizer_,
                                              config.label_positive, config.label_negative);
    classifier->demo_nonhate_ = {weights.at("demo_nonhate").at("text").get<std::string>(),
                                 weights.at("demo_nonhate").at("caption").get<std::string>()};
    classifier->demo_hate_ = {weights.at("demo_hate").at("text").get<std::string>(),
                              weights.at("demo_hate").at("caption").get<std::string>()};
    return classifier;
}

std::unique_ptr<Classifier> load_checkpoint(const std::filesystem::path& dir) {
    json descriptor = json::parse(read_file(dir / "descriptor.json"));
    json weights = json::parse(read_file(dir / "weights.json"));
    std::string head = descriptor.at("head").get<std::string>();

    RunConfig config;
    config.learning_rate = 1.0; // placeholder; loaded classifiers never train
    config.batch_size = 1;
    if (head == "encoder") {
        config.head = HeadKind::encoder;
        config.encoder_dim = descriptor.at("encoder_dim").get<size_t>();
        config.dropout = weights.value("dropout", 0.4);
        auto classifier = std::make_unique<EncoderClassifier>(config, 0);
        EncoderHead& h = classifier->encoder_head();
        std::vector<double> w = weights.at("weight").get<std::vector<double>>();
        if (w.size() != h.weight.size()) {
            throw std::runtime_error("checkpoint weight size does not match encoder_dim");
        }
        h.weight = std::move(w);
        h.bias[0] = weights.at("bias").at(0).get<double>();
        h.bias[1] = weights.at("bias").at(1).get<double>();
        classifier->mark_eval_only();
        return classifier;
    }
    if (head == "prompt") {
        config.head = HeadKind::prompt;
        config.label_positive = descriptor.at("label_words").at("positive").get<std::string>();
        config.label_negative = descriptor.at("label_words").at("negative").get<std::string>();
        config.prompt_template = descriptor.at("template").get<std::string>();
        return PromptClassifier::load(config, weights.dump());
    }
    throw std::runtime_error("unknown checkpoint head: " + head);
}

} // namespace procap
