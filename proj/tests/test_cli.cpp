#include "procap/cli.hpp"

#include "procap/caption_cache.hpp"
#include "procap/metrics.hpp"
#include "procap/run_config.hpp"
#include "synthetic.hpp"

#include <set>

#include "doctest.h"
#include "json.hpp"

using namespace procap;
using procap::testing::TempDir;

namespace {

// Recursive file inventory relative to a root.
std::set<std::string> inventory(const std::filesystem::path& root) {
    std::set<std::string> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.insert(std::filesystem::relative(entry.path(), root).string());
        }
    }
    return files;
}

// Three-meme manifest + fixture answers; one meme has no person, one has no
// animal.
void write_caption_fixtures(const TempDir& tmp) {
    std::string manifest;
    for (int i = 1; i <= 3; ++i) {
        manifest += "{\"id\": \"m" + std::to_string(i) + "\", \"img\": \"m" +
                    std::to_string(i) + ".png\", \"text\": \"text " + std::to_string(i) +
                    "\", \"label\": " + std::to_string(i % 2) + "}\n";
    }
    write_file(tmp.file("manifest.jsonl"), manifest);

    nlohmann::json answers;
    for (int i = 1; i <= 3; ++i) {
        std::string id = "m" + std::to_string(i);
        answers[id] = {{"content", "a scene"},   {"race", "asian"},
                       {"gender", "a woman"},    {"religion", "muslim"},
                       {"nationality", "china"}, {"disability", "none visible"},
                       {"animal", "a pig"},      {"val_person", i == 1 ? "no" : "yes"},
                       {"val_animal", i == 2 ? "no animals" : "yes"}};
    }
    write_file(tmp.file("answers.json"), answers.dump());
}

} // namespace

TEST_CASE("--help prints usage and exits 0") {
    CHECK(cli::run({"--help"}) == 0);
    CHECK(cli::run({}) == 0);
    CHECK(cli::run({"caption", "--help"}) == 0);
}

TEST_CASE("unknown subcommand exits 2") {
    CHECK(cli::run({"frobnicate"}) == 2);
}

TEST_CASE("missing required flags exit 2") {
    CHECK(cli::run({"caption"}) == 2);
    CHECK(cli::run({"report"}) == 2);
}

TEST_CASE("caption on a 3-meme manifest fills the cache with gated rows") {
    TempDir tmp("cli_caption");
    write_caption_fixtures(tmp);
    std::filesystem::path cache_path = tmp.file("cache.jsonl");

    int code = cli::run({"caption", "--manifest", tmp.file("manifest.jsonl").string(),
                         "--backend", "fixture:" + tmp.file("answers.json").string(),
                         "--cache", cache_path.string(), "--length-penalty", "2"});
    CHECK(code == 0);

    AnswerCache cache(cache_path);
    CHECK(cache.size() <= 27); // 9 questions x 3 memes
    CHECK(cache.size() == 27); // gated foci persist as suppressed rows
    size_t suppressed = 0;
    for (const CacheRow& row : cache.rows()) {
        CHECK(row.params_fingerprint == DecodeParams{2.0, 20}.fingerprint());
        if (row.suppressed) {
            ++suppressed;
            CHECK(row.answer.empty());
        }
    }
    // m1: five person foci gated; m2: animal gated
    CHECK(suppressed == 6);

    // rerun is a no-op on the cache file
    std::string before = read_file(cache_path);
    CHECK(cli::run({"caption", "--manifest", tmp.file("manifest.jsonl").string(), "--backend",
                    "fixture:" + tmp.file("answers.json").string(), "--cache",
                    cache_path.string(), "--length-penalty", "2"}) == 0);
    CHECK(read_file(cache_path) == before);
}

TEST_CASE("caption reports partial failures and exits 1") {
    TempDir tmp("cli_fail");
    write_caption_fixtures(tmp);
    // an http backend that is unreachable fails every meme but still finishes
    int code = cli::run({"caption", "--manifest", tmp.file("manifest.jsonl").string(),
                         "--backend", "http://127.0.0.1:1", "--cache",
                         tmp.file("cache.jsonl").string()});
    CHECK(code == 1);
}

TEST_CASE("convert writes a manifest the loader accepts") {
    TempDir tmp("cli_convert");
    write_file(tmp.file("raw.jsonl"),
               "{\"id\": 10, \"img\": \"img/10.png\", \"label\": 1, \"text\": \"x\"}\n");
    CHECK(cli::run({"convert", "--dataset", "fhm", "--in", tmp.file("raw.jsonl").string(),
                    "--out", tmp.file("manifest.jsonl").string(), "--split", "train"}) == 0);
    Dataset ds = load_dataset(tmp.file("manifest.jsonl"), Split::train);
    REQUIRE(ds.records.size() == 1);
    CHECK(ds.records[0].id == "10");
}

TEST_CASE("preprocess cleans images into the output directory") {
    TempDir tmp("cli_preprocess");
    ImageBuffer img = testing::make_image_with_word();
    save_image(img, tmp.file("w1.ppm"));
    write_file(tmp.file("manifest.jsonl"),
               "{\"id\": \"w1\", \"img\": \"" + tmp.file("w1.ppm").string() +
                   "\", \"text\": \"t\", \"label\": 0}\n");
    write_file(tmp.file("sidecar.json"),
               R"({"w1": [{"bbox": [8, 8, 16, 6], "text": "word", "confidence": 1.0}]})");

    std::filesystem::path out_dir = tmp.file("clean");
    CHECK(cli::run({"preprocess", "--manifest", tmp.file("manifest.jsonl").string(),
                    "--out-dir", out_dir.string(), "--ocr", tmp.file("sidecar.json").string()}) ==
          0);
    CHECK(std::filesystem::exists(out_dir / "w1.ppm"));
    Dataset cleaned = load_dataset(out_dir / "manifest.jsonl", Split::train);
    CHECK(cleaned.records[0].image_ref == (out_dir / "w1.ppm").string());
    // the dark word block was painted over with the light surround
    ImageBuffer after = load_image(out_dir / "w1.ppm");
    CHECK(after.at(10, 10, 0) > 200);
}

TEST_CASE("train/ablate/report write only under the run directory") {
    TempDir tmp("cli_train");
    auto corpus = testing::make_separable_corpus(16, 8, 77);
    std::filesystem::path inputs = tmp.file("inputs");
    std::filesystem::create_directories(inputs);
    write_dataset(corpus.train_set, inputs / "train.jsonl");
    write_dataset(corpus.test_set, inputs / "test.jsonl");
    nlohmann::json answers(corpus.answers);
    write_file(inputs / "answers.json", answers.dump());

    RunConfig config = testing::desk_config(HeadKind::prompt);
    config.seeds = {0, 1};
    config.epochs = 3;
    config.train_manifest = inputs / "train.jsonl";
    config.test_manifest = inputs / "test.jsonl";
    config.cache_path = inputs / "cache.jsonl";
    write_file(inputs / "config.json", config.to_json());

    CHECK(cli::run({"caption", "--manifest", (inputs / "train.jsonl").string(), "--backend",
                    "fixture:" + (inputs / "answers.json").string(), "--cache",
                    (inputs / "cache.jsonl").string()}) == 0);
    CHECK(cli::run({"caption", "--manifest", (inputs / "test.jsonl").string(), "--split",
                    "test", "--backend", "fixture:" + (inputs / "answers.json").string(),
                    "--cache", (inputs / "cache.jsonl").string()}) == 0);

    std::set<std::string> before = inventory(tmp.path());
    std::filesystem::path run_dir = tmp.file("run");
    CHECK(cli::run({"train", "--config", (inputs / "config.json").string(), "--run-dir",
                    run_dir.string()}) == 0);

    CHECK(std::filesystem::exists(run_dir / "config.json"));
    CHECK(std::filesystem::exists(run_dir / "reports" / "metrics.json"));
    CHECK(std::filesystem::exists(run_dir / "checkpoints" / "seed0" / "weights.json"));

    // nothing new outside the run directory
    std::set<std::string> after = inventory(tmp.path());
    for (const std::string& file : after) {
        if (!before.contains(file)) {
            CHECK(file.rfind("run/", 0) == 0);
        }
    }

    // the snapshot is the exact resolved config
    RunConfig snapshot = load_run_config(run_dir / "config.json");
    CHECK(snapshot.to_json() == config.to_json());

    // report renders the stored metrics
    CHECK(cli::run({"report", "--in", run_dir.string()}) == 0);

    // evaluate against a saved checkpoint
    CHECK(cli::run({"evaluate", "--config", (inputs / "config.json").string(), "--checkpoint",
                    (run_dir / "checkpoints" / "seed0").string(), "--run-dir",
                    run_dir.string()}) == 0);
    CHECK(std::filesystem::exists(run_dir / "reports" / "predictions.jsonl"));

    // ablation over the desk grid, captioning each cell first
    for (double penalty : {1.0, 2.0, 3.0}) {
        for (const Dataset* ds : {&corpus.train_set, &corpus.test_set}) {
            std::filesystem::path manifest =
                ds == &corpus.train_set ? inputs / "train.jsonl" : inputs / "test.jsonl";
            CHECK(cli::run({"caption", "--manifest", manifest.string(), "--split",
                            ds == &corpus.train_set ? "train" : "test", "--backend",
                            "fixture:" + (inputs / "answers.json").string(), "--cache",
                            (inputs / "cache.jsonl").string(), "--length-penalty",
                            std::to_string(penalty)}) == 0);
        }
    }
    CHECK(cli::run({"ablate", "--config", (inputs / "config.json").string(), "--grid",
                    "subset=content_only,all;penalty=1,2,3", "--run-dir",
                    run_dir.string()}) == 0);
    CHECK(std::filesystem::exists(run_dir / "reports" / "ablation.json"));
    CHECK(cli::run({"report", "--in", run_dir.string()}) == 0);
}

TEST_CASE("inference mode scores an unlabeled test manifest") {
    TempDir tmp("cli_inference");
    auto corpus = testing::make_separable_corpus(8, 4, 81);
    for (MemeRecord& rec : corpus.test_set.records) {
        rec.label.reset();
    }
    write_dataset(corpus.train_set, tmp.file("train.jsonl"));
    write_dataset(corpus.test_set, tmp.file("test.jsonl"));
    write_file(tmp.file("answers.json"), nlohmann::json(corpus.answers).dump());

    RunConfig config = testing::desk_config(HeadKind::encoder);
    config.seeds = {0};
    config.epochs = 2;
    config.train_manifest = tmp.file("train.jsonl");
    config.test_manifest = tmp.file("test.jsonl");
    config.cache_path = tmp.file("cache.jsonl");
    write_file(tmp.file("config.json"), config.to_json());

    CHECK(cli::run({"caption", "--manifest", tmp.file("train.jsonl").string(), "--backend",
                    "fixture:" + tmp.file("answers.json").string(), "--cache",
                    tmp.file("cache.jsonl").string()}) == 0);
    CHECK(cli::run({"caption", "--manifest", tmp.file("test.jsonl").string(), "--split",
                    "test", "--inference", "--backend",
                    "fixture:" + tmp.file("answers.json").string(), "--cache",
                    tmp.file("cache.jsonl").string()}) == 0);

    // train only sees the labeled train split, so evaluating the unlabeled
    // manifest needs a checkpoint trained here first
    std::filesystem::path train_run = tmp.file("train_run");
    RunConfig labeled = config;
    labeled.test_manifest = tmp.file("train.jsonl"); // any labeled manifest works
    write_file(tmp.file("config_train.json"), labeled.to_json());
    CHECK(cli::run({"train", "--config", tmp.file("config_train.json").string(), "--run-dir",
                    train_run.string()}) == 0);

    std::filesystem::path eval_run = tmp.file("eval_run");
    CHECK(cli::run({"evaluate", "--config", tmp.file("config.json").string(), "--checkpoint",
                    (train_run / "checkpoints" / "seed0").string(), "--run-dir",
                    eval_run.string(), "--inference"}) == 0);
    std::string predictions = read_file(eval_run / "reports" / "predictions.jsonl");
    CHECK(std::count(predictions.begin(), predictions.end(), '\n') == 4);
    CHECK(predictions.find("\"s0\"") != std::string::npos);
    // no labels, so no metrics summary
    CHECK(!std::filesystem::exists(eval_run / "reports" / "evaluation.json"));
}

TEST_CASE("train with a missing caption cache fails with exit 1") {
    TempDir tmp("cli_nocache");
    auto corpus = testing::make_separable_corpus(4, 2, 78);
    write_dataset(corpus.train_set, tmp.file("train.jsonl"));
    write_dataset(corpus.test_set, tmp.file("test.jsonl"));
    RunConfig config = testing::desk_config(HeadKind::encoder);
    config.train_manifest = tmp.file("train.jsonl");
    config.test_manifest = tmp.file("test.jsonl");
    config.cache_path = tmp.file("cache.jsonl");
    write_file(tmp.file("config.json"), config.to_json());
    CHECK(cli::run({"train", "--config", tmp.file("config.json").string(), "--run-dir",
                    tmp.file("run").string()}) == 1);
}

TEST_CASE("separate processes reproduce the metrics report byte for byte") {
    TempDir tmp("cli_restart");
    auto corpus = testing::make_separable_corpus(16, 8, 99);
    write_dataset(corpus.train_set, tmp.file("train.jsonl"));
    write_dataset(corpus.test_set, tmp.file("test.jsonl"));
    write_file(tmp.file("answers.json"), nlohmann::json(corpus.answers).dump());

    RunConfig config = testing::desk_config(HeadKind::prompt);
    config.seeds = {0, 1};
    config.epochs = 3;
    config.train_manifest = tmp.file("train.jsonl");
    config.test_manifest = tmp.file("test.jsonl");
    config.cache_path = tmp.file("cache.jsonl");
    write_file(tmp.file("config.json"), config.to_json());

    for (const char* split : {"train", "test"}) {
        CHECK(cli::run({"caption", "--manifest", tmp.file(std::string(split) + ".jsonl").string(),
                        "--split", split, "--backend",
                        "fixture:" + tmp.file("answers.json").string(), "--cache",
                        tmp.file("cache.jsonl").string()}) == 0);
    }

    std::string command = std::string(PROCAP_BIN) + " train --config " +
                          tmp.file("config.json").string() + " --run-dir " +
                          tmp.file("run").string() + " > /dev/null";
    REQUIRE(std::system(command.c_str()) == 0);
    std::string first = read_file(tmp.file("run") / "reports" / "metrics.json");
    REQUIRE(std::system(command.c_str()) == 0);
    CHECK(read_file(tmp.file("run") / "reports" / "metrics.json") == first);
}

TEST_CASE("invalid config exits 2") {
    TempDir tmp("cli_badcfg");
    write_file(tmp.file("config.json"), R"({"epochs": 0})");
    CHECK(cli::run({"train", "--config", tmp.file("config.json").string(), "--run-dir",
                    tmp.file("run").string()}) == 2);
    write_file(tmp.file("config2.json"), "not json");
    CHECK(cli::run({"train", "--config", tmp.file("config2.json").string(), "--run-dir",
                    tmp.file("run").string()}) == 2);
}
