#include "procap/ablation.hpp"

#include "synthetic.hpp"

#include <set>

#include "doctest.h"

using namespace procap;
using procap::testing::SyntheticCorpus;

TEST_CASE("grid construction mirrors the results-table rows") {
    RunConfig base = testing::desk_config(HeadKind::prompt);
    std::vector<AblationCell> cells =
        build_ablation_grid(base, {"content_only", "all"}, {1.0, 2.0, 3.0});
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].label == "No Centric");
    CHECK(cells[0].config.question_subset == "content_only");
    CHECK(cells[0].config.length_penalty == 1.0);
    CHECK(cells[1].label == "Penalty = 1");
    CHECK(cells[2].label == "Penalty = 2");
    CHECK(cells[3].label == "Penalty = 3");
    CHECK(cells[3].config.length_penalty == 3.0);

    std::set<std::string> fingerprints;
    for (const AblationCell& cell : cells) {
        fingerprints.insert(cell.config.fingerprint());
    }
    CHECK(fingerprints.size() == 4);
}

TEST_CASE("single-focus rows use the capitalized focus name") {
    RunConfig base = testing::desk_config(HeadKind::prompt);
    std::vector<AblationCell> cells = build_ablation_grid(base, {"race", "gender"}, {2.0});
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].label == "Race");
    CHECK(cells[1].label == "Gender");
    CHECK(cells[0].config.length_penalty == 2.0);
}

TEST_CASE("grid spec string parses subsets and penalties") {
    RunConfig base = testing::desk_config(HeadKind::prompt);
    std::vector<AblationCell> cells =
        parse_ablation_grid(base, "subset=content_only,all;penalty=1,2,3");
    CHECK(cells.size() == 4);
    CHECK_THROWS_AS(parse_ablation_grid(base, "bogus"), ConfigError);
    CHECK_THROWS_AS(parse_ablation_grid(base, "wrong=1"), ConfigError);
}

TEST_CASE("empty grid produces an empty table") {
    RunConfig base = testing::desk_config(HeadKind::prompt);
    std::vector<AblationCell> cells = build_ablation_grid(base, {}, {1.0, 2.0});
    CHECK(cells.empty());
    SyntheticCorpus corpus = testing::make_separable_corpus(4, 4, 2);
    AnswerCache cache;
    AblationTable table = run_ablation(cells, corpus.train_set, corpus.test_set, cache);
    CHECK(table.reports.empty());
    CHECK(table.render_text() == "");
    CHECK(table.to_json() == "[]\n");
}

TEST_CASE("running a cell without its cached captions is an error") {
    RunConfig base = testing::desk_config(HeadKind::prompt);
    std::vector<AblationCell> cells = build_ablation_grid(base, {"all"}, {2.0});
    SyntheticCorpus corpus = testing::make_separable_corpus(4, 4, 3);
    AnswerCache cache; // penalty 2 never captioned
    CHECK_THROWS_WITH_AS(run_ablation(cells, corpus.train_set, corpus.test_set, cache),
                         doctest::Contains("missing caption"), std::runtime_error);
}

TEST_CASE("content-only cells reuse content rows captioned under the same decode params") {
    SyntheticCorpus corpus = testing::make_separable_corpus(8, 4, 4);
    RunConfig base = testing::desk_config(HeadKind::prompt);
    base.question_subset = "all";
    base.length_penalty = 1.0;
    base.resolve();
    AnswerCache cache;
    testing::caption_corpus(corpus, base, cache); // full bank at penalty 1
    size_t rows_after_full = cache.size();

    // The content_only cell shares the (meme, content, lp1) rows: building its
    // examples needs no backend and adds no rows.
    RunConfig content_only = base;
    content_only.question_subset = "content_only";
    std::vector<Example> examples = build_examples(corpus.train_set, cache, content_only);
    CHECK(examples.size() == corpus.train_set.records.size());
    CHECK(cache.size() == rows_after_full);
    for (const Example& example : examples) {
        CHECK(!example.caption.empty());
    }
}

TEST_CASE("the full desk grid yields four rows with distinct fingerprints") {
    SyntheticCorpus corpus = testing::make_separable_corpus(16, 8, 5);
    RunConfig base = testing::desk_config(HeadKind::prompt);
    base.seeds = {0};
    base.epochs = 2;
    base.resolve();

    std::vector<AblationCell> cells =
        parse_ablation_grid(base, "subset=content_only,all;penalty=1,2,3");
    AnswerCache cache;
    for (const AblationCell& cell : cells) {
        testing::caption_corpus(corpus, cell.config, cache);
    }
    AblationTable table = run_ablation(cells, corpus.train_set, corpus.test_set, cache);
    REQUIRE(table.reports.size() == 4);
    CHECK(table.row_labels ==
          std::vector<std::string>{"No Centric", "Penalty = 1", "Penalty = 2", "Penalty = 3"});

    std::set<std::string> fingerprints;
    for (const MetricsReport& report : table.reports) {
        fingerprints.insert(report.config_fingerprint);
    }
    CHECK(fingerprints.size() == 4);

    std::string text = table.render_text();
    CHECK(text.find("Ans. Length") != std::string::npos);
    CHECK(text.find("No Centric") != std::string::npos);
    CHECK(text.find("Penalty = 3") != std::string::npos);
}
