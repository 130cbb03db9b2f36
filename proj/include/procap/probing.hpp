#pragma once

#include "procap/caption_cache.hpp"
#include "procap/dataset.hpp"
#include "procap/questions.hpp"
#include "procap/tokenizer.hpp"
#include "procap/vqa_backend.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace procap {

struct ProcapAnswer {
    std::string text;
    bool suppressed = false;
};

// Per-meme probing result: the raw backend answers plus the validation
// verdicts that decide which target answers survive into the caption.
struct ProCap {
    std::string meme_id;
    std::map<Focus, ProcapAnswer> answers;
    bool person_present = true;
    bool animal_present = true;
    std::string params_fingerprint;
};

struct CaptionBudgets {
    size_t joint_budget = 65;      // meme text + content answer, in tokens
    size_t per_answer_budget = 20; // each target answer, in tokens
};

// VQA prompt for one question: "Question: {text} Answer:".
std::string build_prompt(const ProbingQuestion& question);

// Existence verdict from a validation answer. Case- and
// punctuation-insensitive; false iff the normalized answer starts with the
// word "no" or is one of {"none", "nobody", "no one", "nothing", ""}.
bool validate_presence(const std::string& answer);

// Asks one question through the cache: a hit returns the stored answer
// without touching the backend, a miss queries the backend and records the
// result keyed by (meme_id, focus, params fingerprint).
std::string ask(VqaBackend& backend, AnswerCache& cache, const VqaRequest& request);

// Runs the question bank against one meme. Validation questions are asked
// first; person-dependent questions are only asked when a person was
// confirmed, the animal question only when an animal was. Gated answers are
// recorded as suppressed rather than dropped. The bank must include both
// validation questions whenever it includes a person-dependent or animal
// focus.
ProCap generate_procap(const MemeRecord& meme, const std::string& image_b64,
                       const std::vector<ProbingQuestion>& bank, VqaBackend& backend,
                       AnswerCache& cache, const DecodeParams& params);

// Rebuilds a ProCap from cache rows alone; empty when any bank focus is
// missing for (meme, params).
std::optional<ProCap> procap_from_cache(const std::string& meme_id,
                                        const std::vector<ProbingQuestion>& bank,
                                        const AnswerCache& cache, const DecodeParams& params);

// Assembles the caption: content answer first (truncated so that
// tokens(meme_text) + tokens(content) fits the joint budget), then retained
// target answers in bank-table order, each truncated to the per-answer
// budget. Every nonempty segment ends with a period; segments are joined by
// single spaces. Suppressed answers contribute nothing.
std::string render_procap(const ProCap& procap, const std::string& meme_text,
                          const Tokenizer& tokenizer, const CaptionBudgets& budgets);

// Pads augmented image tags at the end of a textual meme representation.
std::string augment_tags(const std::string& text, const std::vector<std::string>& tags);

struct CaptionRunReport {
    size_t processed = 0;
    size_t failed = 0;
    size_t backend_calls = 0;
    std::vector<std::string> failures; // "meme_id: message"
};

// Captions a whole dataset, reading image bytes from each record's image
// path (missing files caption from an empty image payload when the backend
// is a fixture). Distinct memes may be processed by `jobs` workers; cache
// rows are committed in manifest order by the single writer thread.
CaptionRunReport caption_dataset(const Dataset& dataset, const std::vector<ProbingQuestion>& bank,
                                 VqaBackend& backend, AnswerCache& cache,
                                 const DecodeParams& params, int jobs = 1);

} // namespace procap
