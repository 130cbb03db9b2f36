#include "procap/ablation.hpp"

#include <cctype>
#include <sstream>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

namespace {

std::string subset_row_label(const std::string& subset) {
    if (subset == "content_only") {
        return "No Centric";
    }
    std::string label = subset;
    if (!label.empty()) {
        label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    }
    return label;
}

std::string penalty_row_label(double penalty) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out << "Penalty = " << penalty;
    return out.str();
}

} // namespace

std::vector<AblationCell> build_ablation_grid(const RunConfig& base,
                                              const std::vector<std::string>& subsets,
                                              const std::vector<double>& penalties) {
    std::vector<AblationCell> cells;
    for (const std::string& subset : subsets) {
        if (subset == "all") {
            for (double penalty : penalties) {
                AblationCell cell;
                cell.label = penalty_row_label(penalty);
                cell.config = base;
                cell.config.question_subset = subset;
                cell.config.length_penalty = penalty;
                cells.push_back(std::move(cell));
            }
        } else {
            if (penalties.empty()) {
                continue;
            }
            AblationCell cell;
            cell.label = subset_row_label(subset);
            cell.config = base;
            cell.config.question_subset = subset;
            cell.config.length_penalty = penalties.front();
            cells.push_back(std::move(cell));
        }
    }
    for (AblationCell& cell : cells) {
        cell.config.resolve();
    }
    return cells;
}

std::vector<AblationCell> parse_ablation_grid(const RunConfig& base, const std::string& spec) {
    std::vector<std::string> subsets;
    std::vector<double> penalties;
    for (const std::string& clause : split(spec, ';')) {
        std::vector<std::string> kv = split(clause, '=');
        if (kv.size() != 2) {
            throw ConfigError("grid clause must look like key=v1,v2: '" + clause + "'");
        }
        std::string key = trim(kv[0]);
        if (key == "subset") {
            for (const std::string& v : split(kv[1], ',')) {
                std::string name = trim(v);
                if (!name.empty()) {
                    subsets.push_back(name);
                }
            }
        } else if (key == "penalty") {
            for (const std::string& v : split(kv[1], ',')) {
                std::string name = trim(v);
                if (!name.empty()) {
                    penalties.push_back(std::stod(name));
                }
            }
        } else {
            throw ConfigError("unknown grid key: " + key);
        }
    }
    if (penalties.empty()) {
        penalties.push_back(base.length_penalty);
    }
    return build_ablation_grid(base, subsets, penalties);
}

std::string AblationTable::to_json() const {
    json doc = json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
        json entry;
        entry["label"] = row_labels[i];
        entry["report"] = json::parse(metrics_report_to_json(reports[i]));
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string AblationTable::render_text() const {
    if (reports.empty()) {
        return "";
    }
    return render_metrics_table(row_labels, reports, "Ans. Length");
}

AblationTable run_ablation(const std::vector<AblationCell>& cells, const Dataset& train_set,
                           const Dataset& test_set, const AnswerCache& cache) {
    AblationTable table;
    for (const AblationCell& cell : cells) {
        std::vector<Example> train_examples;
        std::vector<Example> test_examples;
        try {
            train_examples = build_examples(train_set, cache, cell.config);
            test_examples = build_examples(test_set, cache, cell.config);
        } catch (const std::exception& e) {
            throw std::runtime_error("ablation cell '" + cell.label +
                                     "': " + e.what());
        }
        table.row_labels.push_back(cell.label);
        table.reports.push_back(
            run_experiment(cell.config, train_examples, test_examples));
    }
    return table;
}

} // namespace procap
