#include "procap/dataset.hpp"

#include "procap/util.hpp"

#include <fstream>
#include <unordered_set>

#include "json.hpp"

namespace procap {

using json = nlohmann::ordered_json;

std::string split_name(Split split) {
    return split == Split::train ? "train" : "test";
}

Split parse_split(const std::string& name) {
    if (name == "train") {
        return Split::train;
    }
    if (name == "test") {
        return Split::test;
    }
    throw ConfigError("unknown split: " + name);
}

namespace {

Label parse_label(const json& value, const std::string& id) {
    if (value.is_number_integer()) {
        int v = value.get<int>();
        if (v == 0) {
            return Label::non_hateful;
        }
        if (v == 1) {
            return Label::hateful;
        }
    }
    throw std::runtime_error("record '" + id + "': unknown label value " + value.dump());
}

MemeRecord parse_record(const json& obj, Split split, bool allow_unlabeled, size_t line_no) {
    const std::string where = "manifest line " + std::to_string(line_no);
    if (!obj.is_object()) {
        throw std::runtime_error(where + ": record is not a JSON object");
    }
    for (const char* field : {"id", "img", "text"}) {
        if (!obj.contains(field)) {
            throw std::runtime_error(where + ": record missing required field '" +
                                     std::string(field) + "'");
        }
    }
    MemeRecord rec;
    if (obj.at("id").is_string()) {
        rec.id = obj.at("id").get<std::string>();
    } else if (obj.at("id").is_number_integer()) {
        rec.id = std::to_string(obj.at("id").get<long long>());
    } else {
        throw std::runtime_error(where + ": id must be a string or integer");
    }
    if (rec.id.empty()) {
        throw std::runtime_error(where + ": id must be nonempty");
    }
    rec.image_ref = obj.at("img").get<std::string>();
    rec.text = obj.at("text").get<std::string>();
    rec.split = split;
    if (obj.contains("label") && !obj.at("label").is_null()) {
        rec.label = parse_label(obj.at("label"), rec.id);
    } else if (split != Split::test || !allow_unlabeled) {
        throw std::runtime_error("record '" + rec.id +
                                 "': record missing required field 'label'");
    }
    if (obj.contains("tags") && !obj.at("tags").is_null()) {
        for (const auto& tag : obj.at("tags")) {
            rec.tags.push_back(tag.get<std::string>());
        }
    }
    return rec;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& manifest_path, Split split,
                     bool allow_unlabeled) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    }
    Dataset dataset;
    dataset.name = manifest_path.stem().string();
    std::unordered_set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                     ": malformed JSON: " + e.what());
        }
        MemeRecord rec = parse_record(obj, split, allow_unlabeled, line_no);
        if (!seen.insert(rec.id).second) {
            throw std::runtime_error("duplicate id '" + rec.id + "' in manifest " +
                                     manifest_path.string());
        }
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& manifest_path) {
    std::string out;
    for (const MemeRecord& rec : dataset.records) {
        json obj;
        obj["id"] = rec.id;
        obj["img"] = rec.image_ref;
        obj["text"] = rec.text;
        if (rec.label) {
            obj["label"] = static_cast<int>(*rec.label);
        }
        if (!rec.tags.empty()) {
            obj["tags"] = rec.tags;
        }
        out += obj.dump();
        out += '\n';
    }
    write_file(manifest_path, out);
}

SplitStats split_stats(const Dataset& dataset) {
    SplitStats stats;
    for (const MemeRecord& rec : dataset.records) {
        if (!rec.label) {
            ++stats.unlabeled;
        } else if (*rec.label == Label::hateful) {
            ++stats.hateful;
        } else {
            ++stats.non_hateful;
        }
    }
    return stats;
}

namespace {

std::string file_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

Dataset convert_fhm(const std::filesystem::path& raw_path, Split split) {
    // The raw release is already JSONL with {id, img, label, text}; this is a
    // field-for-field mapping plus validation.
    return load_dataset(raw_path, split);
}

Dataset convert_harm(const std::filesystem::path& raw_path, Split split) {
    std::ifstream in(raw_path);
    if (!in) {
        throw std::runtime_error("cannot open raw file: " + raw_path.string());
    }
    Dataset dataset;
    dataset.name = raw_path.stem().string();
    std::string line;
    size_t line_no = 0;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        json obj = json::parse(line);
        MemeRecord rec;
        rec.split = split;
        rec.image_ref = obj.at("image").get<std::string>();
        rec.id = file_stem(rec.image_ref);
        rec.text = obj.at("text").get<std::string>();
        bool labeled = false;
        for (const auto& raw_label : obj.at("labels")) {
            std::string name = to_lower(raw_label.get<std::string>());
            for (char& c : name) {
                if (c == '_') {
                    c = ' ';
                }
            }
            if (name == "not harmful") {
                rec.label = Label::non_hateful;
                labeled = true;
            } else if (name == "somewhat harmful" || name == "partially harmful" ||
                       name == "very harmful" || name == "harmful") {
                rec.label = Label::hateful;
                labeled = true;
            }
        }
        if (!labeled) {
            throw std::runtime_error("harm line " + std::to_string(line_no) +
                                     ": no harm-level label found");
        }
        if (!seen.insert(rec.id).second) {
            throw std::runtime_error("duplicate id '" + rec.id + "' in " + raw_path.string());
        }
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

Dataset convert_mami(const std::filesystem::path& raw_path, Split split) {
    std::ifstream in(raw_path);
    if (!in) {
        throw std::runtime_error("cannot open raw file: " + raw_path.string());
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty MAMI file: " + raw_path.string());
    }
    std::vector<std::string> columns = ::procap::split(trim(header), '\t');
    int file_col = -1;
    int label_col = -1;
    int text_col = -1;
    for (size_t i = 0; i < columns.size(); ++i) {
        std::string name = to_lower(trim(columns[i]));
        if (name == "file_name") {
            file_col = static_cast<int>(i);
        } else if (name == "misogynous") {
            label_col = static_cast<int>(i);
        } else if (name == "text transcription" || name == "text") {
            text_col = static_cast<int>(i);
        }
    }
    if (file_col < 0 || label_col < 0 || text_col < 0) {
        throw std::runtime_error("MAMI header must name file_name, misogynous and a text column");
    }
    Dataset dataset;
    dataset.name = raw_path.stem().string();
    std::string line;
    size_t line_no = 1;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::vector<std::string> cells = ::procap::split(line, '\t');
        size_t needed = static_cast<size_t>(std::max({file_col, label_col, text_col})) + 1;
        if (cells.size() < needed) {
            throw std::runtime_error("MAMI line " + std::to_string(line_no) +
                                     ": expected at least " + std::to_string(needed) +
                                     " tab-separated columns");
        }
        MemeRecord rec;
        rec.split = split;
        rec.image_ref = trim(cells[static_cast<size_t>(file_col)]);
        rec.id = file_stem(rec.image_ref);
        rec.text = trim(cells[static_cast<size_t>(text_col)]);
        std::string label = trim(cells[static_cast<size_t>(label_col)]);
        if (label == "0") {
            rec.label = Label::non_hateful;
        } else if (label == "1") {
            rec.label = Label::hateful;
        } else {
            throw std::runtime_error("MAMI line " + std::to_string(line_no) +
                                     ": unknown misogynous value '" + label + "'");
        }
        if (!seen.insert(rec.id).second) {
            throw std::runtime_error("duplicate id '" + rec.id + "' in " + raw_path.string());
        }
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

} // namespace

Dataset convert_raw(const std::string& dataset_kind, const std::filesystem::path& raw_path,
                    Split split) {
    if (dataset_kind == "fhm") {
        return convert_fhm(raw_path, split);
    }
    if (dataset_kind == "harm") {
        return convert_harm(raw_path, split);
    }
    if (dataset_kind == "mami") {
        return convert_mami(raw_path, split);
    }
    throw ConfigError("unknown dataset kind: " + dataset_kind);
}

} // namespace procap
