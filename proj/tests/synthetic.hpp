#pragma once

#include "helpers.hpp"
#include "procap/probing.hpp"
#include "procap/run_config.hpp"
#include "procap/train.hpp"

#include <map>
#include <string>
#include <vector>

namespace procap::testing {

using AnswerMap = std::map<std::string, std::map<std::string, std::string>>;

// Linearly separable two-class corpus: each class draws meme text and
// fixture answers from its own word list.
struct SyntheticCorpus {
    Dataset train_set;
    Dataset test_set;
    AnswerMap answers;
};

inline const std::vector<std::string>& class_words(Label label) {
    static const std::vector<std::string> benign = {"sunny", "picnic", "flowers", "kitten",
                                                    "garden", "smile", "bicycle", "cake"};
    static const std::vector<std::string> nasty = {"sneer", "mockery", "slur", "vitriol",
                                                   "contempt", "derision", "spite", "venom"};
    return label == Label::non_hateful ? benign : nasty;
}

inline std::string class_sentence(Label label, Rng& rng, size_t min_words, size_t max_words) {
    const std::vector<std::string>& words = class_words(label);
    size_t n = min_words + rng.next_below(max_words - min_words + 1);
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i > 0) {
            out.push_back(' ');
        }
        out += words[rng.next_below(words.size())];
    }
    return out;
}

inline SyntheticCorpus make_separable_corpus(size_t train_count, size_t test_count,
                                             uint64_t seed) {
    SyntheticCorpus corpus;
    corpus.train_set.name = "synthetic-train";
    corpus.test_set.name = "synthetic-test";
    Rng rng(seed);
    size_t id = 0;
    auto add = [&](Dataset& dataset, Split split, size_t count) {
        for (size_t i = 0; i < count; ++i, ++id) {
            Label label = i % 2 == 0 ? Label::non_hateful : Label::hateful;
            std::string meme_id = "syn" + std::to_string(id);
            MemeRecord rec = make_record(meme_id, class_sentence(label, rng, 3, 7), label, split);
            dataset.records.push_back(rec);

            std::map<std::string, std::string>& m = corpus.answers[meme_id];
            m["content"] = class_sentence(label, rng, 4, 8);
            m["race"] = class_sentence(label, rng, 1, 3);
            m["gender"] = class_sentence(label, rng, 1, 3);
            m["religion"] = class_sentence(label, rng, 1, 3);
            m["nationality"] = class_sentence(label, rng, 1, 3);
            m["disability"] = class_sentence(label, rng, 1, 3);
            m["animal"] = class_sentence(label, rng, 1, 3);
            m["val_person"] = rng.next_below(4) == 0 ? "no" : "yes";
            m["val_animal"] = rng.next_below(4) == 0 ? "nothing" : "a dog";
        }
    };
    add(corpus.train_set, Split::train, train_count);
    add(corpus.test_set, Split::test, test_count);
    return corpus;
}

// Captions both splits into the cache with the config's bank and params.
inline void caption_corpus(const SyntheticCorpus& corpus, const RunConfig& config,
                           AnswerCache& cache) {
    FixtureVqaBackend backend(corpus.answers);
    std::vector<ProbingQuestion> bank = question_subset(config.question_subset);
    caption_dataset(corpus.train_set, bank, backend, cache, config.decode_params(), 1);
    caption_dataset(corpus.test_set, bank, backend, cache, config.decode_params(), 1);
}

// Desk-scale config: tiny stub models train in milliseconds; the reference
// learning rates are transformer-scale, so desk runs use a linear-probe rate.
inline RunConfig desk_config(HeadKind head) {
    RunConfig config;
    config.head = head;
    config.dataset_name = "synthetic";
    config.learning_rate = 0.05;
    config.batch_size = 16;
    config.epochs = 10;
    config.seeds = {0, 1, 2};
    return config;
}

} // namespace procap::testing
