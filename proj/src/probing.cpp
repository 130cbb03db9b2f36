#include "procap/probing.hpp"

#include "procap/util.hpp"

#include <algorithm>
#include <cctype>
#include <future>

namespace procap {

std::string build_prompt(const ProbingQuestion& question) {
    if (question.text.empty()) {
        throw std::invalid_argument("probing question text must be nonempty");
    }
    return "Question: " + question.text + " Answer:";
}

bool validate_presence(const std::string& answer) {
    std::string normalized;
    normalized.reserve(answer.size());
    bool pending_space = false;
    for (char raw : answer) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            if (pending_space && !normalized.empty()) {
                normalized.push_back(' ');
            }
            pending_space = false;
            normalized.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    if (normalized.empty()) {
        return false;
    }
    if (normalized == "no" || normalized.rfind("no ", 0) == 0) {
        return false;
    }
    if (normalized == "none" || normalized == "nobody" || normalized == "no one" ||
        normalized == "nothing") {
        return false;
    }
    return true;
}

std::string ask(VqaBackend& backend, AnswerCache& cache, const VqaRequest& request) {
    if (auto hit = cache.lookup(request.meme_id, request.focus, request.params.fingerprint())) {
        return hit->answer;
    }
    std::string answer = trim(backend.answer(request));
    CacheRow row;
    row.meme_id = request.meme_id;
    row.focus = request.focus;
    row.params_fingerprint = request.params.fingerprint();
    row.answer = answer;
    row.suppressed = false;
    cache.insert(row);
    return answer;
}

namespace {

const ProbingQuestion* find_question(const std::vector<ProbingQuestion>& bank, Focus focus) {
    auto it = std::find_if(bank.begin(), bank.end(),
                           [&](const ProbingQuestion& q) { return q.focus == focus; });
    return it == bank.end() ? nullptr : &*it;
}

void check_bank_precondition(const std::vector<ProbingQuestion>& bank) {
    bool gated = std::any_of(bank.begin(), bank.end(), [](const ProbingQuestion& q) {
        return is_person_dependent(q.focus) || q.focus == Focus::animal;
    });
    if (gated && (find_question(bank, Focus::val_person) == nullptr ||
                  find_question(bank, Focus::val_animal) == nullptr)) {
        throw std::invalid_argument(
            "question bank with person-dependent or animal foci must include both "
            "validation questions");
    }
}

struct ProbeResult {
    ProCap procap;
    std::vector<CacheRow> rows; // in ask order, suppressed rows included
    size_t backend_calls = 0;
};

// Pure worker: reads the cache snapshot, never writes it. The caller commits
// the returned rows.
ProbeResult probe_meme(const MemeRecord& meme, const std::string& image_b64,
                       const std::vector<ProbingQuestion>& bank, VqaBackend& backend,
                       const AnswerCache& cache, const DecodeParams& params) {
    params.validate();
    check_bank_precondition(bank);
    const std::string fp = params.fingerprint();

    ProbeResult result;
    result.procap.meme_id = meme.id;
    result.procap.params_fingerprint = fp;

    auto ask_one = [&](const ProbingQuestion& question) -> std::string {
        if (auto hit = cache.lookup(meme.id, question.focus, fp)) {
            result.rows.push_back(*hit);
            return hit->answer;
        }
        VqaRequest request{meme.id, question.focus, image_b64, build_prompt(question), params};
        std::string answer = trim(backend.answer(request));
        result.rows.push_back({meme.id, question.focus, fp, answer, false});
        ++result.backend_calls;
        return answer;
    };
    auto suppress_one = [&](Focus focus) {
        if (auto hit = cache.lookup(meme.id, focus, fp)) {
            result.rows.push_back(*hit);
            result.procap.answers[focus] = {hit->answer, true};
        } else {
            result.rows.push_back({meme.id, focus, fp, "", true});
            result.procap.answers[focus] = {"", true};
        }
    };

    // Validation questions run first so the gate is known before any target
    // question spends a backend call.
    if (const ProbingQuestion* q = find_question(bank, Focus::val_person)) {
        std::string answer = ask_one(*q);
        result.procap.answers[q->focus] = {answer, false};
        result.procap.person_present = validate_presence(answer);
    }
    if (const ProbingQuestion* q = find_question(bank, Focus::val_animal)) {
        std::string answer = ask_one(*q);
        result.procap.answers[q->focus] = {answer, false};
        result.procap.animal_present = validate_presence(answer);
    }
    for (const ProbingQuestion& question : bank) {
        if (question.role == QuestionRole::validation) {
            continue;
        }
        bool retained = true;
        if (is_person_dependent(question.focus)) {
            retained = result.procap.person_present;
        } else if (question.focus == Focus::animal) {
            retained = result.procap.animal_present;
        }
        if (!retained) {
            suppress_one(question.focus);
            continue;
        }
        std::string answer = ask_one(question);
        result.procap.answers[question.focus] = {answer, false};
    }
    return result;
}

} // namespace

ProCap generate_procap(const MemeRecord& meme, const std::string& image_b64,
                       const std::vector<ProbingQuestion>& bank, VqaBackend& backend,
                       AnswerCache& cache, const DecodeParams& params) {
    ProbeResult result = probe_meme(meme, image_b64, bank, backend, cache, params);
    for (const CacheRow& row : result.rows) {
        cache.insert(row);
    }
    return std::move(result.procap);
}

std::optional<ProCap> procap_from_cache(const std::string& meme_id,
                                        const std::vector<ProbingQuestion>& bank,
                                        const AnswerCache& cache, const DecodeParams& params) {
    const std::string fp = params.fingerprint();
    ProCap procap;
    procap.meme_id = meme_id;
    procap.params_fingerprint = fp;
    for (const ProbingQuestion& question : bank) {
        auto row = cache.lookup(meme_id, question.focus, fp);
        if (!row) {
            return std::nullopt;
        }
        procap.answers[question.focus] = {row->answer, row->suppressed};
        if (question.focus == Focus::val_person) {
            procap.person_present = validate_presence(row->answer);
        } else if (question.focus == Focus::val_animal) {
            procap.animal_present = validate_presence(row->answer);
        }
    }
    return procap;
}

std::string render_procap(const ProCap& procap, const std::string& meme_text,
                          const Tokenizer& tokenizer, const CaptionBudgets& budgets) {
    std::vector<std::string> segments;
    auto push_segment = [&](std::string text) {
        text = trim(text);
        if (text.empty()) {
            return;
        }
        if (text.back() != '.') {
            text.push_back('.');
        }
        segments.push_back(std::move(text));
    };

    if (auto it = procap.answers.find(Focus::content);
        it != procap.answers.end() && !it->second.suppressed) {
        size_t text_tokens = tokenizer.count(meme_text);
        size_t content_budget =
            budgets.joint_budget > text_tokens ? budgets.joint_budget - text_tokens : 0;
        push_segment(tokenizer.truncate(it->second.text, content_budget));
    }
    for (const ProbingQuestion& question : default_question_bank()) {
        if (question.role != QuestionRole::target) {
            continue;
        }
        auto it = procap.answers.find(question.focus);
        if (it == procap.answers.end() || it->second.suppressed) {
            continue;
        }
        push_segment(tokenizer.truncate(it->second.text, budgets.per_answer_budget));
    }

    std::string caption;
    for (size_t i = 0; i < segments.size(); ++i) {
        if (i > 0) {
            caption.push_back(' ');
        }
        caption += segments[i];
    }
    return caption;
}

std::string augment_tags(const std::string& text, const std::vector<std::string>& tags) {
    std::string out = text;
    for (const std::string& tag : tags) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += tag;
    }
    return out;
}

CaptionRunReport caption_dataset(const Dataset& dataset, const std::vector<ProbingQuestion>& bank,
                                 VqaBackend& backend, AnswerCache& cache,
                                 const DecodeParams& params, int jobs) {
    params.validate();
    check_bank_precondition(bank);
    if (jobs < 1) {
        jobs = 1;
    }
    const bool image_optional = dynamic_cast<FixtureVqaBackend*>(&backend) != nullptr;

    CaptionRunReport report;
    for (size_t base = 0; base < dataset.records.size(); base += static_cast<size_t>(jobs)) {
        size_t batch = std::min(dataset.records.size() - base, static_cast<size_t>(jobs));
        std::vector<std::future<ProbeResult>> futures;
        futures.reserve(batch);
        for (size_t k = 0; k < batch; ++k) {
            size_t index = base + k;
            futures.push_back(std::async(
                batch > 1 ? std::launch::async : std::launch::deferred, [&, index]() {
                    const MemeRecord& meme = dataset.records[index];
                    std::string image_b64;
                    try {
                        image_b64 = base64_encode(read_file(meme.image_ref));
                    } catch (const std::exception&) {
                        if (!image_optional) {
                            throw;
                        }
                    }
                    return probe_meme(meme, image_b64, bank, backend, cache, params);
                }));
        }
        // Single-writer commit in manifest order keeps the cache file stable.
        for (size_t k = 0; k < batch; ++k) {
            const MemeRecord& meme = dataset.records[base + k];
            try {
                ProbeResult result = futures[k].get();
                for (const CacheRow& row : result.rows) {
                    cache.insert(row);
                }
                report.backend_calls += result.backend_calls;
                ++report.processed;
            } catch (const std::exception& e) {
                ++report.failed;
                report.failures.push_back(meme.id + ": " + e.what());
            }
        }
    }
    cache.flush();
    return report;
}

} // namespace procap
