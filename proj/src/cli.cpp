#include "procap/cli.hpp"

#include "procap/ablation.hpp"
#include "procap/dataset.hpp"
#include "procap/preprocess.hpp"
#include "procap/probing.hpp"
#include "procap/run_dir.hpp"
#include "procap/train.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

namespace procap::cli {

using json = nlohmann::ordered_json;

namespace {

struct ConvertArgs {
    std::string dataset;
    std::string in_path;
    std::string out_path;
    std::string split = "train";
};

struct PreprocessArgs {
    std::string manifest;
    std::string out_dir;
    std::string fill = "median-ring";
    std::string ocr_sidecar;
    std::string split = "train";
};

struct CaptionArgs {
    std::string manifest;
    std::string backend;
    std::string cache;
    std::string questions = "all";
    double length_penalty = 1.0;
    int max_answer_tokens = 20;
    int jobs = 1;
    std::string split = "train";
    bool inference = false;
};

// Config-file value < flag override < hard default resolution.
struct ConfigOverrides {
    std::string config_path;
    std::optional<std::string> head;
    std::optional<std::string> dataset;
    std::optional<std::string> train_manifest;
    std::optional<std::string> test_manifest;
    std::optional<std::string> cache;
    std::optional<double> learning_rate;
    std::optional<int> batch_size;
    std::optional<int> epochs;
    std::optional<std::string> seeds;
    std::optional<double> length_penalty;
    std::optional<int> max_answer_tokens;
    std::optional<std::string> questions;
    std::optional<bool> use_tags;

    RunConfig resolve() const {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_run_config(config_path);
        }
        if (head) config.head = parse_head(*head);
        if (dataset) config.dataset_name = *dataset;
        if (train_manifest) config.train_manifest = *train_manifest;
        if (test_manifest) config.test_manifest = *test_manifest;
        if (cache) config.cache_path = *cache;
        if (learning_rate) config.learning_rate = *learning_rate;
        if (batch_size) config.batch_size = *batch_size;
        if (epochs) config.epochs = *epochs;
        if (seeds) {
            config.seeds.clear();
            for (const std::string& s : split(*seeds, ',')) {
                if (!trim(s).empty()) {
                    config.seeds.push_back(std::stoull(trim(s)));
                }
            }
        }
        if (length_penalty) config.length_penalty = *length_penalty;
        if (max_answer_tokens) config.max_answer_tokens = *max_answer_tokens;
        if (questions) config.question_subset = *questions;
        if (use_tags) config.use_tags = *use_tags;
        config.resolve();
        return config;
    }
};

void add_config_options(CLI::App* cmd, ConfigOverrides& overrides) {
    cmd->add_option("--config", overrides.config_path, "flat JSON config file");
    cmd->add_option("--head", overrides.head, "encoder|prompt");
    cmd->add_option("--dataset", overrides.dataset, "dataset name (fhm|harm|mami|...)");
    cmd->add_option("--train-manifest", overrides.train_manifest);
    cmd->add_option("--test-manifest", overrides.test_manifest);
    cmd->add_option("--cache", overrides.cache, "caption cache file");
    cmd->add_option("--learning-rate", overrides.learning_rate);
    cmd->add_option("--batch-size", overrides.batch_size);
    cmd->add_option("--epochs", overrides.epochs);
    cmd->add_option("--seeds", overrides.seeds, "comma-separated seed list");
    cmd->add_option("--length-penalty", overrides.length_penalty);
    cmd->add_option("--max-answer-tokens", overrides.max_answer_tokens);
    cmd->add_option("--questions", overrides.questions, "all|content_only|focus list");
    cmd->add_option("--use-tags", overrides.use_tags, "pad augmented image tags");
}

int cmd_convert(const ConvertArgs& args) {
    Dataset dataset = convert_raw(args.dataset, args.in_path, parse_split(args.split));
    write_dataset(dataset, args.out_path);
    SplitStats stats = split_stats(dataset);
    std::cout << "wrote " << dataset.records.size() << " records (" << stats.hateful
              << " hateful, " << stats.non_hateful << " non-hateful) to " << args.out_path
              << "\n";
    return 0;
}

int cmd_preprocess(const PreprocessArgs& args) {
    Split split = parse_split(args.split);
    Dataset dataset = load_dataset(args.manifest, split, split == Split::test);
    FillStrategy fill = parse_fill_strategy(args.fill);
    std::unique_ptr<OcrBackend> ocr;
    if (!args.ocr_sidecar.empty()) {
        ocr = std::make_unique<FixtureOcr>(args.ocr_sidecar);
    }
    std::filesystem::create_directories(args.out_dir);

    Dataset cleaned = dataset;
    size_t failures = 0;
    for (MemeRecord& record : cleaned.records) {
        try {
            ImageBuffer image = load_image(record.image_ref);
            std::vector<TextRegion> regions;
            if (ocr) {
                regions = detect_text_regions(image, record.id, *ocr);
            }
            ImageBuffer clean = inpaint(image, regions, fill);
            std::filesystem::path out =
                std::filesystem::path(args.out_dir) / (record.id + ".ppm");
            save_image(clean, out);
            record.image_ref = out.string();
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << "preprocess failed for '" << record.id << "': " << e.what() << "\n";
        }
    }
    write_dataset(cleaned, std::filesystem::path(args.out_dir) / "manifest.jsonl");
    std::cout << "preprocessed " << (cleaned.records.size() - failures) << "/"
              << cleaned.records.size() << " images into " << args.out_dir << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_caption(const CaptionArgs& args) {
    Split split = parse_split(args.split);
    Dataset dataset = load_dataset(args.manifest, split, args.inference && split == Split::test);
    std::vector<ProbingQuestion> bank = question_subset(args.questions);
    DecodeParams params{args.length_penalty, args.max_answer_tokens};
    params.validate();
    std::unique_ptr<VqaBackend> backend = make_backend(args.backend);
    AnswerCache cache((std::filesystem::path(args.cache)));

    CaptionRunReport report =
        caption_dataset(dataset, bank, *backend, cache, params, args.jobs);
    std::cout << "captioned " << report.processed << "/" << dataset.records.size()
              << " memes (" << report.backend_calls << " backend calls, " << cache.size()
              << " cache rows, " << report.failed << " failures)\n";
    for (const std::string& failure : report.failures) {
        std::cerr << "caption failed for " << failure << "\n";
    }
    return report.failed == 0 ? 0 : 1;
}

RunDirectory open_run_dir(const std::string& run_dir, const RunConfig& config) {
    std::string root = run_dir;
    if (root.empty()) {
        root = "runs/" + config.fingerprint();
    }
    RunDirectory rd{std::filesystem::path(root)};
    rd.write_snapshot(config);
    return rd;
}

int cmd_train(const ConfigOverrides& overrides, const std::string& run_dir) {
    RunConfig config = overrides.resolve();
    RunDirectory rd = open_run_dir(run_dir, config);

    Dataset train_set = load_dataset(config.train_manifest, Split::train);
    Dataset test_set = load_dataset(config.test_manifest, Split::test);
    AnswerCache cache(config.cache_path);
    std::vector<Example> train_examples = build_examples(train_set, cache, config);
    std::vector<Example> test_examples = build_examples(test_set, cache, config);

    MetricsReport report =
        run_experiment(config, train_examples, test_examples, rd.checkpoints_dir());
    write_file(rd.reports_dir() / "metrics.json", metrics_report_to_json(report));

    std::string label = head_name(config.head) + "/" + config.dataset_name;
    std::cout << render_metrics_table(std::vector<std::string>{label},
                                      std::vector<MetricsReport>{report});
    return 0;
}

int cmd_evaluate(const ConfigOverrides& overrides, const std::string& run_dir,
                 const std::string& checkpoint, bool inference) {
    RunConfig config = overrides.resolve();
    RunDirectory rd = open_run_dir(run_dir, config);
    std::unique_ptr<Classifier> classifier = load_checkpoint(checkpoint);

    Dataset test_set = load_dataset(config.test_manifest, Split::test, inference);
    AnswerCache cache(config.cache_path);
    std::vector<Example> examples = build_examples(test_set, cache, config);
    EvalResult eval = evaluate(*classifier, examples);

    std::string lines;
    for (size_t i = 0; i < examples.size(); ++i) {
        json row;
        row["id"] = examples[i].id;
        row["s0"] = eval.scores[i].s0;
        row["s1"] = eval.scores[i].s1;
        row["prediction"] = static_cast<int>(eval.predictions[i]);
        lines += row.dump();
        lines += '\n';
    }
    write_file(rd.reports_dir() / "predictions.jsonl", lines);

    bool labeled = !examples.empty() &&
                   std::all_of(examples.begin(), examples.end(),
                               [](const Example& e) { return e.label.has_value(); });
    if (labeled) {
        std::vector<double> s1;
        std::vector<Label> labels;
        for (size_t i = 0; i < examples.size(); ++i) {
            s1.push_back(eval.scores[i].s1);
            labels.push_back(*examples[i].label);
        }
        json summary;
        summary["accuracy"] = accuracy(eval.predictions, labels);
        summary["auc"] = auc_roc(s1, labels);
        summary["count"] = examples.size();
        write_file(rd.reports_dir() / "evaluation.json", summary.dump(2) + "\n");
        std::cout << "acc=" << summary["accuracy"] << " auc=" << summary["auc"] << " on "
                  << examples.size() << " memes\n";
    } else {
        std::cout << "wrote predictions for " << examples.size() << " memes\n";
    }
    return 0;
}

int cmd_ablate(const ConfigOverrides& overrides, const std::string& run_dir,
               const std::string& grid_spec) {
    RunConfig config = overrides.resolve();
    RunDirectory rd = open_run_dir(run_dir, config);

    std::vector<AblationCell> cells = parse_ablation_grid(config, grid_spec);
    Dataset train_set = load_dataset(config.train_manifest, Split::train);
    Dataset test_set = load_dataset(config.test_manifest, Split::test);
    AnswerCache cache(config.cache_path);

    AblationTable table = run_ablation(cells, train_set, test_set, cache);
    write_file(rd.reports_dir() / "ablation.json", table.to_json());
    write_file(rd.reports_dir() / "ablation.txt", table.render_text());
    std::cout << table.render_text();
    return 0;
}

int cmd_report(const std::string& in_dir) {
    std::filesystem::path dir(in_dir);
    if (std::filesystem::exists(dir / "reports")) {
        dir /= "reports";
    }
    bool found = false;
    if (std::filesystem::exists(dir / "metrics.json")) {
        MetricsReport report = metrics_report_from_json(read_file(dir / "metrics.json"));
        std::cout << render_metrics_table(
            std::vector<std::string>{report.config_fingerprint},
            std::vector<MetricsReport>{report});
        found = true;
    }
    if (std::filesystem::exists(dir / "ablation.json")) {
        json doc = json::parse(read_file(dir / "ablation.json"));
        AblationTable table;
        for (const auto& entry : doc) {
            table.row_labels.push_back(entry.at("label").get<std::string>());
            table.reports.push_back(
                metrics_report_from_json(entry.at("report").dump()));
        }
        std::cout << table.render_text();
        found = true;
    }
    if (!found) {
        throw std::runtime_error("no metrics.json or ablation.json under " + in_dir);
    }
    return 0;
}

const std::vector<std::string>& known_subcommands() {
    static const std::vector<std::string> names = {"convert", "preprocess", "caption",
                                                   "train",   "evaluate",   "ablate",
                                                   "report"};
    return names;
}

} // namespace

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"probing-based captioning and hateful meme classification pipeline",
                 "procap"};
    app.require_subcommand(0, 1);

    if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
        const auto& known = known_subcommands();
        if (std::find(known.begin(), known.end(), args[0]) == known.end()) {
            std::cerr << "error: unknown subcommand '" << args[0] << "'\n";
            return 2;
        }
    }

    ConvertArgs convert_args;
    CLI::App* convert = app.add_subcommand("convert", "convert a raw dataset release to a manifest");
    convert->add_option("--dataset", convert_args.dataset, "fhm|harm|mami")->required();
    convert->add_option("--in", convert_args.in_path, "raw release file")->required();
    convert->add_option("--out", convert_args.out_path, "manifest to write")->required();
    convert->add_option("--split", convert_args.split, "train|test");

    PreprocessArgs preprocess_args;
    CLI::App* preprocess = app.add_subcommand("preprocess", "inpaint detected meme text");
    preprocess->add_option("--manifest", preprocess_args.manifest)->required();
    preprocess->add_option("--out-dir", preprocess_args.out_dir)->required();
    preprocess->add_option("--fill", preprocess_args.fill, "median-ring|median-image");
    preprocess->add_option("--ocr", preprocess_args.ocr_sidecar, "fixture OCR sidecar JSON");
    preprocess->add_option("--split", preprocess_args.split, "train|test");

    CaptionArgs caption_args;
    CLI::App* caption = app.add_subcommand("caption", "generate probing captions");
    caption->add_option("--manifest", caption_args.manifest)->required();
    caption->add_option("--backend", caption_args.backend, "url | fixture:path | local:command")
        ->required();
    caption->add_option("--cache", caption_args.cache, "answer cache file")->required();
    caption->add_option("--questions", caption_args.questions, "all|content_only|focus list");
    caption->add_option("--length-penalty", caption_args.length_penalty);
    caption->add_option("--max-answer-tokens", caption_args.max_answer_tokens);
    caption->add_option("--jobs", caption_args.jobs, "concurrent in-flight memes");
    caption->add_option("--split", caption_args.split, "train|test");
    caption->add_flag("--inference", caption_args.inference, "allow unlabeled test records");

    ConfigOverrides train_overrides;
    std::string train_run_dir;
    CLI::App* train_cmd = app.add_subcommand("train", "train a classification head");
    add_config_options(train_cmd, train_overrides);
    train_cmd->add_option("--run-dir", train_run_dir);

    ConfigOverrides eval_overrides;
    std::string eval_run_dir;
    std::string eval_checkpoint;
    bool eval_inference = false;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score a test manifest");
    add_config_options(evaluate_cmd, eval_overrides);
    evaluate_cmd->add_option("--run-dir", eval_run_dir);
    evaluate_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint directory")
        ->required();
    evaluate_cmd->add_flag("--inference", eval_inference, "allow unlabeled test records");

    ConfigOverrides ablate_overrides;
    std::string ablate_run_dir;
    std::string grid_spec;
    CLI::App* ablate_cmd = app.add_subcommand("ablate", "run a question/penalty grid");
    add_config_options(ablate_cmd, ablate_overrides);
    ablate_cmd->add_option("--run-dir", ablate_run_dir);
    ablate_cmd->add_option("--grid", grid_spec, "subset=...;penalty=...")->required();

    std::string report_in;
    CLI::App* report_cmd = app.add_subcommand("report", "render stored reports");
    report_cmd->add_option("--in", report_in, "run or reports directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed)); // CLI11 consumes args back to front
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (convert->parsed()) {
            return cmd_convert(convert_args);
        }
        if (preprocess->parsed()) {
            return cmd_preprocess(preprocess_args);
        }
        if (caption->parsed()) {
            return cmd_caption(caption_args);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_overrides, train_run_dir);
        }
        if (evaluate_cmd->parsed()) {
            return cmd_evaluate(eval_overrides, eval_run_dir, eval_checkpoint, eval_inference);
        }
        if (ablate_cmd->parsed()) {
            return cmd_ablate(ablate_overrides, ablate_run_dir, grid_spec);
        }
        if (report_cmd->parsed()) {
            return cmd_report(report_in);
        }
        std::cout << app.help();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace procap::cli
