#include "procap/questions.hpp"

#include "procap/util.hpp"

#include <algorithm>

namespace procap {

std::string focus_name(Focus focus) {
    switch (focus) {
        case Focus::content: return "content";
        case Focus::race: return "race";
        case Focus::gender: return "gender";
        case Focus::religion: return "religion";
        case Focus::nationality: return "nationality";
        case Focus::disability: return "disability";
        case Focus::animal: return "animal";
        case Focus::val_person: return "val_person";
        case Focus::val_animal: return "val_animal";
    }
    throw std::runtime_error("invalid focus value");
}

Focus parse_focus(const std::string& name) {
    for (Focus f : {Focus::content, Focus::race, Focus::gender, Focus::religion,
                    Focus::nationality, Focus::disability, Focus::animal,
                    Focus::val_person, Focus::val_animal}) {
        if (focus_name(f) == name) {
            return f;
        }
    }
    throw ConfigError("unknown focus: " + name);
}

const std::vector<ProbingQuestion>& default_question_bank() {
    static const std::vector<ProbingQuestion> bank = {
        {Focus::content, "what is shown in the image?", QuestionRole::content},
        {Focus::race, "What is the race of the person in the image?", QuestionRole::target},
        {Focus::gender, "What is the gender of the person in the image?", QuestionRole::target},
        {Focus::religion, "What is the religion of the person in the image?",
         QuestionRole::target},
        {Focus::nationality, "Which country does the person in the image come from?",
         QuestionRole::target},
        {Focus::disability, "Are there disabled people in the image?", QuestionRole::target},
        {Focus::animal, "What animal is in the image?", QuestionRole::target},
        {Focus::val_person, "Is there a person in the image?", QuestionRole::validation},
        {Focus::val_animal, "Is there an animal in the image?", QuestionRole::validation},
    };
    return bank;
}

bool is_person_dependent(Focus focus) {
    switch (focus) {
        case Focus::race:
        case Focus::gender:
        case Focus::religion:
        case Focus::nationality:
        case Focus::disability:
            return true;
        default:
            return false;
    }
}

std::vector<ProbingQuestion> question_subset(const std::string& spec) {
    const std::vector<ProbingQuestion>& all = default_question_bank();
    if (spec == "all") {
        return all;
    }
    auto find = [&](Focus focus) {
        auto it = std::find_if(all.begin(), all.end(),
                               [&](const ProbingQuestion& q) { return q.focus == focus; });
        return *it;
    };
    if (spec == "content_only") {
        return {find(Focus::content)};
    }
    std::vector<ProbingQuestion> bank;
    bool needs_validation = false;
    for (const std::string& part : split(spec, ',')) {
        std::string name = trim(part);
        if (name.empty()) {
            continue;
        }
        Focus focus = parse_focus(name);
        if (focus == Focus::val_person || focus == Focus::val_animal) {
            continue; // added below when required
        }
        if (is_person_dependent(focus) || focus == Focus::animal) {
            needs_validation = true;
        }
        bank.push_back(find(focus));
    }
    if (bank.empty()) {
        throw ConfigError("empty question subset: " + spec);
    }
    if (needs_validation) {
        bank.push_back(find(Focus::val_person));
        bank.push_back(find(Focus::val_animal));
    }
    return bank;
}

} // namespace procap
