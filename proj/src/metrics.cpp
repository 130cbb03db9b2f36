#include "procap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

double auc_roc(std::span<const double> scores_s1, std::span<const Label> labels) {
    if (scores_s1.size() != labels.size()) {
        throw std::invalid_argument("auc_roc: scores and labels differ in length");
    }
    uint64_t positives = 0;
    uint64_t negatives = 0;
    for (Label label : labels) {
        (label == Label::hateful ? positives : negatives) += 1;
    }
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("auc_roc is undefined for single-class input");
    }

    std::vector<size_t> order(labels.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores_s1[a] < scores_s1[b]; });

    uint64_t wins = 0; // positive strictly above negative
    uint64_t ties = 0;
    uint64_t negatives_below = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        uint64_t group_pos = 0;
        uint64_t group_neg = 0;
        while (j < order.size() && scores_s1[order[j]] == scores_s1[order[i]]) {
            (labels[order[j]] == Label::hateful ? group_pos : group_neg) += 1;
            ++j;
        }
        wins += group_pos * negatives_below;
        ties += group_pos * group_neg;
        negatives_below += group_neg;
        i = j;
    }
    return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
           static_cast<double>(positives * negatives);
}

double accuracy(std::span<const Label> predictions, std::span<const Label> labels) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: predictions and labels differ in length");
    }
    if (predictions.empty()) {
        throw std::invalid_argument("accuracy is undefined for empty input");
    }
    size_t correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

namespace {

std::pair<double, double> mean_and_population_std(std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

} // namespace

MetricsReport aggregate_runs(std::span<const SeedMetrics> per_seed) {
    if (per_seed.empty()) {
        throw std::invalid_argument("aggregate_runs requires at least one seed result");
    }
    MetricsReport report;
    report.per_seed.assign(per_seed.begin(), per_seed.end());
    std::vector<double> aucs;
    std::vector<double> accs;
    for (const SeedMetrics& m : per_seed) {
        aucs.push_back(m.auc);
        accs.push_back(m.accuracy);
    }
    std::tie(report.mean_auc, report.std_auc) = mean_and_population_std(aucs);
    std::tie(report.mean_acc, report.std_acc) = mean_and_population_std(accs);
    return report;
}

std::string metrics_report_to_json(const MetricsReport& report) {
    json doc;
    doc["config_fingerprint"] = report.config_fingerprint;
    doc["per_seed"] = json::array();
    for (const SeedMetrics& m : report.per_seed) {
        doc["per_seed"].push_back(
            json{{"seed", m.seed}, {"auc", m.auc}, {"accuracy", m.accuracy}});
    }
    doc["mean_auc"] = report.mean_auc;
    doc["std_auc"] = report.std_auc; // population standard deviation
    doc["mean_acc"] = report.mean_acc;
    doc["std_acc"] = report.std_acc;
    return doc.dump(2) + "\n";
}

MetricsReport metrics_report_from_json(const std::string& text) {
    json doc = json::parse(text);
    MetricsReport report;
    report.config_fingerprint = doc.at("config_fingerprint").get<std::string>();
    for (const auto& entry : doc.at("per_seed")) {
        SeedMetrics m;
        m.seed = entry.at("seed").get<uint64_t>();
        m.auc = entry.at("auc").get<double>();
        m.accuracy = entry.at("accuracy").get<double>();
        report.per_seed.push_back(m);
    }
    report.mean_auc = doc.at("mean_auc").get<double>();
    report.std_auc = doc.at("std_auc").get<double>();
    report.mean_acc = doc.at("mean_acc").get<double>();
    report.std_acc = doc.at("std_acc").get<double>();
    return report;
}

std::string render_metrics_table(std::span<const std::string> row_labels,
                                 std::span<const MetricsReport> reports,
                                 const std::string& corner) {
    if (row_labels.size() != reports.size()) {
        throw std::invalid_argument("table labels and reports differ in length");
    }
    size_t label_width = corner.size();
    for (const std::string& label : row_labels) {
        label_width = std::max(label_width, label.size());
    }
    auto cell = [](double mean, double std) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.2f +/- %.2f", mean * 100.0, std * 100.0);
        return std::string(buf);
    };
    std::string out;
    auto row = [&](const std::string& label, const std::string& auc, const std::string& acc) {
        out += label;
        out.append(label_width - label.size(), ' ');
        out += " | ";
        out += auc;
        out.append(auc.size() < 16 ? 16 - auc.size() : 0, ' ');
        out += " | ";
        out += acc;
        out += "\n";
    };
    row(corner, "AUC.", "Acc.");
    out.append(label_width + 42, '-');
    out += "\n";
    for (size_t i = 0; i < reports.size(); ++i) {
        row(row_labels[i], cell(reports[i].mean_auc, reports[i].std_auc),
            cell(reports[i].mean_acc, reports[i].std_acc));
    }
    return out;
}

} // namespace procap
