#pragma once

#include <string>
#include <vector>

namespace procap {

enum class Focus {
    content,
    race,
    gender,
    religion,
    nationality,
    disability,
    animal,
    val_person,
    val_animal,
};

enum class QuestionRole { content, target, validation };

struct ProbingQuestion {
    Focus focus;
    std::string text;
    QuestionRole role;
};

std::string focus_name(Focus focus);
Focus parse_focus(const std::string& name);

// The fixed nine-question bank: one content question, six vulnerable-target
// questions, two yes/no existence checks used for gating.
const std::vector<ProbingQuestion>& default_question_bank();

// Resolves a question-subset spec into a bank. Accepted values: "all",
// "content_only", or a comma-separated list of target foci (validation
// questions are added automatically whenever a person-dependent or animal
// focus is requested).
std::vector<ProbingQuestion> question_subset(const std::string& spec);

bool is_person_dependent(Focus focus);

} // namespace procap
