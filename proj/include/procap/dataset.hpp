#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace procap {

enum class Label { non_hateful = 0, hateful = 1 };

enum class Split { train, test };

std::string split_name(Split split);
Split parse_split(const std::string& name);

struct MemeRecord {
    std::string id;
    std::string image_ref;             // path to the image file
    std::string text;                  // overlaid meme text
    std::optional<Label> label;        // absent only for unlabeled inference
    std::vector<std::string> tags;     // augmented image tags, may be empty
    Split split = Split::train;
};

struct Dataset {
    std::string name;
    std::vector<MemeRecord> records;
};

struct SplitStats {
    size_t hateful = 0;
    size_t non_hateful = 0;
    size_t unlabeled = 0;

    size_t total() const { return hateful + non_hateful + unlabeled; }
    bool operator==(const SplitStats&) const = default;
};

// Loads a newline-delimited JSON manifest ({id, img, text, label, tags?} per
// line) and tags every record with `split`. Malformed lines, duplicate ids,
// unknown label values and missing required fields are errors, never skipped.
// Records without a label are accepted only when split == test and
// allow_unlabeled is set.
Dataset load_dataset(const std::filesystem::path& manifest_path, Split split,
                     bool allow_unlabeled = false);

void write_dataset(const Dataset& dataset, const std::filesystem::path& manifest_path);

SplitStats split_stats(const Dataset& dataset);

// Converters from the raw benchmark releases to the manifest format.
// fhm:  JSONL with {id, img, label, text}.
// harm: JSONL with {image, labels: [...], text}; the harm levels
//       ("somewhat harmful" / "very harmful" / "partially harmful") are
//       merged into the hateful class, "not harmful" maps to non-hateful.
// mami: TSV with a header naming file_name, misogynous and a text column.
Dataset convert_raw(const std::string& dataset_kind, const std::filesystem::path& raw_path,
                    Split split);

} // namespace procap
