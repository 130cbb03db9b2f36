#pragma once

#include "procap/metrics.hpp"
#include "procap/run_config.hpp"
#include "procap/train.hpp"

#include <string>
#include <vector>

namespace procap {

struct AblationCell {
    std::string label;
    RunConfig config;
};

// Grid spec grammar: "subset=<s1,s2,...>;penalty=<p1,p2,...>" where subsets
// are question specs ("all", "content_only" or target foci). "all" crosses
// with every penalty ("Penalty = N" rows); any other subset is pinned to the
// first penalty, since its row in the results table has no length dimension
// ("No Centric" for content_only, the capitalized focus otherwise).
std::vector<AblationCell> build_ablation_grid(const RunConfig& base,
                                              const std::vector<std::string>& subsets,
                                              const std::vector<double>& penalties);

std::vector<AblationCell> parse_ablation_grid(const RunConfig& base, const std::string& spec);

struct AblationTable {
    std::vector<std::string> row_labels;
    std::vector<MetricsReport> reports;

    std::string to_json() const;
    std::string render_text() const;
};

// Trains and evaluates every cell against the shared caption cache. A cell
// whose captions are absent from the cache is an error.
AblationTable run_ablation(const std::vector<AblationCell>& cells, const Dataset& train_set,
                           const Dataset& test_set, const AnswerCache& cache);

} // namespace procap
