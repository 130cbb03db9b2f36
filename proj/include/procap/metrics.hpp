#pragma once

#include "procap/dataset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace procap {

// Exact pairwise ranking statistic (Mann-Whitney): the mean over all
// (positive, negative) pairs of 1 for a win, 0.5 for a tie, 0 otherwise.
// Computed from sorted tie groups with integer counts, so the value matches
// a brute-force pair loop bit for bit. Requires both classes present.
double auc_roc(std::span<const double> scores_s1, std::span<const Label> labels);

double accuracy(std::span<const Label> predictions, std::span<const Label> labels);

struct SeedMetrics {
    uint64_t seed = 0;
    double auc = 0.0;
    double accuracy = 0.0;
};

struct MetricsReport {
    std::string config_fingerprint;
    std::vector<SeedMetrics> per_seed;
    double mean_auc = 0.0;
    double std_auc = 0.0; // population standard deviation
    double mean_acc = 0.0;
    double std_acc = 0.0;
};

// Arithmetic mean and population standard deviation over per-seed results.
MetricsReport aggregate_runs(std::span<const SeedMetrics> per_seed);

std::string metrics_report_to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const std::string& text);

// Console table: one row per report, "label | AUC. | Acc." with mean +/- std
// rendered as percentages. The corner header names the row dimension
// ("Ans. Length" for the length-penalty ablation layout).
std::string render_metrics_table(std::span<const std::string> row_labels,
                                 std::span<const MetricsReport> reports,
                                 const std::string& corner = "Model");

} // namespace procap
