#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "econlab/budget_tasks.hpp"
#include "econlab/games.hpp"

namespace econlab {

enum class PersonaKind {
    none,
    male,
    female,
    young,
    elderly,
    elementary,
    college,
    asian,
    african_american,
    occupation,
};

std::string to_string(PersonaKind k);
PersonaKind persona_from_string(const std::string& s);

struct PersonaSpec {
    PersonaKind kind = PersonaKind::none;
    std::string occupation_name;   // required iff kind == occupation
    std::string occupation_tasks;  // core/supplemental task description
};

enum class CaseKind { risk, social, games };
std::string to_string(CaseKind c);
CaseKind case_from_string(const std::string& s);
Domain domain_of(CaseKind c);  // risk/social only

enum class DialogueType { multi_turn, single_turn };
std::string to_string(DialogueType d);
DialogueType dialogue_from_string(const std::string& s);

std::string to_string(AnswerType a);
AnswerType answer_type_from_string(const std::string& s);

// One experimental cell: what is varied against the baseline.
struct Condition {
    std::string name = "baseline";
    CaseKind case_kind = CaseKind::risk;
    std::optional<Scenario> scenario;   // games only
    PersonaSpec persona;
    std::optional<double> temperature;  // provider default when unset
    bool incentive = true;
    int stake_multiplier = 1;  // scales every displayed return; 1, 10, 100, 1000
    bool include_example = true;
    DialogueType dialogue = DialogueType::multi_turn;
    AnswerType answer_type = AnswerType::open;
};

void validate(const Condition& c);

struct RenderedPrompt {
    std::string system;
    std::vector<std::string> user_turns;
};

// Shortest decimal rendering with at most two places: 0.8, 0.25, 800.
std::string format_amount(double value);

// Loads template files under a root directory, caches them, and substitutes
// {name} tokens. Unknown tokens are an error; unrelated braces are preserved.
class TemplateStore {
public:
    explicit TemplateStore(std::filesystem::path root);

    // Resolution order: ECONLAB_TEMPLATES env var, ./templates, the path
    // compiled in at build time.
    static TemplateStore locate();

    const std::filesystem::path& root() const { return root_; }

    // Raw file body ("risk/question" -> <root>/risk/question.txt) with one
    // trailing newline stripped.
    const std::string& raw(const std::string& name) const;

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const;

    // Key/value asset: lines of the form `key = value`.
    const std::map<std::string, std::string>& table(const std::string& name) const;

private:
    std::filesystem::path root_;
    mutable std::map<std::string, std::string> cache_;
    mutable std::map<std::string, std::map<std::string, std::string>> tables_;
};

class PromptRenderer {
public:
    explicit PromptRenderer(const TemplateStore& store) : store_(&store) {}

    std::string render_system(const Condition& c) const;

    // User message for one budget round; the first round carries the intro,
    // example, and schema paragraphs, later rounds only question + closing.
    std::string render_round_user(const Condition& c, const BudgetRound& round,
                                  bool first_round) const;

    // All 25 rounds as one numbered user message.
    std::string render_single_turn(const Condition& c,
                                   const std::vector<BudgetRound>& rounds) const;

    // Game conversation: system plus the opener and scenario messages.
    RenderedPrompt render_game(const Condition& c, Scenario scenario) const;

private:
    std::string role_block(const Condition& c) const;
    std::string budget_prefix(const Condition& c) const;  // intro/example/format
    std::string budget_question(const Condition& c, const BudgetRound& round) const;

    const TemplateStore* store_;
};

}  // namespace econlab
