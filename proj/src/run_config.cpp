#include "procap/run_config.hpp"

#include <cmath>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

std::string head_name(HeadKind head) {
    return head == HeadKind::encoder ? "encoder" : "prompt";
}

HeadKind parse_head(const std::string& name) {
    if (name == "encoder") {
        return HeadKind::encoder;
    }
    if (name == "prompt") {
        return HeadKind::prompt;
    }
    throw ConfigError("unknown head: " + name);
}

void RunConfig::resolve() {
    if (learning_rate == 0.0) {
        if (head == HeadKind::encoder) {
            learning_rate = 2e-5;
        } else {
            learning_rate = dataset_name == "fhm" ? 1.3e-5 : 1e-5;
        }
    }
    if (batch_size == 0) {
        batch_size = head == HeadKind::encoder ? 64 : 16;
    }
    validate();
}

void RunConfig::validate() const {
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be > 0");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (epochs < 1) {
        throw ConfigError("epochs must be >= 1");
    }
    if (seeds.empty()) {
        throw ConfigError("seeds must be nonempty");
    }
    if (!(length_penalty > 0.0)) {
        throw ConfigError("length_penalty must be > 0");
    }
    if (max_answer_tokens <= 0) {
        throw ConfigError("max_answer_tokens must be positive");
    }
    if (joint_budget == 0 || per_answer_budget == 0) {
        throw ConfigError("truncation budgets must be positive");
    }
    if (dropout < 0.0 || dropout >= 1.0) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
    if (weight_decay < 0.0) {
        throw ConfigError("weight_decay must be >= 0");
    }
    if (encoder_dim == 0 || lm_context_dim == 0 || lm_window == 0) {
        throw ConfigError("model dimensions must be positive");
    }
    (void)::procap::question_subset(question_subset); // rejects unknown specs
}

DecodeParams RunConfig::decode_params() const {
    return DecodeParams{length_penalty, max_answer_tokens};
}

namespace {

json config_json(const RunConfig& c) {
    json doc;
    doc["head"] = head_name(c.head);
    doc["dataset"] = c.dataset_name;
    doc["train_manifest"] = c.train_manifest.string();
    doc["test_manifest"] = c.test_manifest.string();
    doc["cache"] = c.cache_path.string();
    doc["learning_rate"] = c.learning_rate;
    doc["batch_size"] = c.batch_size;
    doc["epochs"] = c.epochs;
    doc["seeds"] = c.seeds;
    doc["length_penalty"] = c.length_penalty;
    doc["max_answer_tokens"] = c.max_answer_tokens;
    doc["questions"] = c.question_subset;
    doc["use_tags"] = c.use_tags;
    doc["weight_decay"] = c.weight_decay;
    doc["dropout"] = c.dropout;
    doc["encoder_dim"] = c.encoder_dim;
    doc["template"] = c.prompt_template;
    doc["label_positive"] = c.label_positive;
    doc["label_negative"] = c.label_negative;
    doc["lm_context_dim"] = c.lm_context_dim;
    doc["lm_window"] = c.lm_window;
    doc["joint_budget"] = c.joint_budget;
    doc["per_answer_budget"] = c.per_answer_budget;
    return doc;
}

} // namespace

std::string RunConfig::to_json() const {
    return config_json(*this).dump(2) + "\n";
}

std::string RunConfig::fingerprint() const {
    return fingerprint_hex(config_json(*this).dump());
}

RunConfig run_config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a flat JSON object");
    }
    RunConfig c;
    if (doc.contains("head")) c.head = parse_head(doc.at("head").get<std::string>());
    if (doc.contains("dataset")) c.dataset_name = doc.at("dataset").get<std::string>();
    if (doc.contains("train_manifest"))
        c.train_manifest = doc.at("train_manifest").get<std::string>();
    if (doc.contains("test_manifest"))
        c.test_manifest = doc.at("test_manifest").get<std::string>();
    if (doc.contains("cache")) c.cache_path = doc.at("cache").get<std::string>();
    if (doc.contains("learning_rate")) c.learning_rate = doc.at("learning_rate").get<double>();
    if (doc.contains("batch_size")) c.batch_size = doc.at("batch_size").get<int>();
    if (doc.contains("epochs")) c.epochs = doc.at("epochs").get<int>();
    if (doc.contains("seeds")) c.seeds = doc.at("seeds").get<std::vector<uint64_t>>();
    if (doc.contains("length_penalty")) c.length_penalty = doc.at("length_penalty").get<double>();
    if (doc.contains("max_answer_tokens"))
        c.max_answer_tokens = doc.at("max_answer_tokens").get<int>();
    if (doc.contains("questions")) c.question_subset = doc.at("questions").get<std::string>();
    if (doc.contains("use_tags")) c.use_tags = doc.at("use_tags").get<bool>();
    if (doc.contains("weight_decay")) c.weight_decay = doc.at("weight_decay").get<double>();
    if (doc.contains("dropout")) c.dropout = doc.at("dropout").get<double>();
    if (doc.contains("encoder_dim")) c.encoder_dim = doc.at("encoder_dim").get<size_t>();
    if (doc.contains("template")) c.prompt_template = doc.at("template").get<std::string>();
    if (doc.contains("label_positive"))
        c.label_positive = doc.at("label_positive").get<std::string>();
    if (doc.contains("label_negative"))
        c.label_negative = doc.at("label_negative").get<std::string>();
    if (doc.contains("lm_context_dim")) c.lm_context_dim = doc.at("lm_context_dim").get<size_t>();
    if (doc.contains("lm_window")) c.lm_window = doc.at("lm_window").get<size_t>();
    if (doc.contains("joint_budget")) c.joint_budget = doc.at("joint_budget").get<size_t>();
    if (doc.contains("per_answer_budget"))
        c.per_answer_budget = doc.at("per_answer_budget").get<size_t>();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from_json(read_file(path));
}

} // namespace procap
