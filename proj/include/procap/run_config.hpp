#pragma once

#include "procap/probing.hpp"
#include "procap/util.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace procap {

enum class HeadKind { encoder, prompt };

std::string head_name(HeadKind head);
HeadKind parse_head(const std::string& name);

// Every knob of one training/evaluation run. Defaults mirror the reference
// setup: AdamW, ten seeds, ten epochs, encoder head at lr 2e-5 / batch 64,
// prompt head at batch 16 with lr 1.3e-5 on fhm and 1e-5 elsewhere.
struct RunConfig {
    HeadKind head = HeadKind::prompt;
    std::string dataset_name = "fhm";
    std::filesystem::path train_manifest;
    std::filesystem::path test_manifest;
    std::filesystem::path cache_path;

    double learning_rate = 0.0; // 0 means "resolve from head + dataset"
    int batch_size = 0;         // 0 means "resolve from head"
    int epochs = 10;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

    double length_penalty = 1.0;
    int max_answer_tokens = 20;
    std::string question_subset = "all";
    bool use_tags = false;

    double weight_decay = 0.01;
    double dropout = 0.4;
    size_t encoder_dim = 64;
    std::string prompt_template = "It was [MASK].";
    std::string label_positive = "good";
    std::string label_negative = "bad";
    size_t lm_context_dim = 64;
    size_t lm_window = 1024;

    size_t joint_budget = 65;
    size_t per_answer_budget = 20;

    // Fills learning_rate / batch_size defaults and validates invariants.
    void resolve();
    void validate() const;

    DecodeParams decode_params() const;
    std::string to_json() const;
    std::string fingerprint() const;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace procap
