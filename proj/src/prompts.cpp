#include "econlab/prompts.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace econlab {

namespace {

const char* kPersonaNames[] = {"none",       "male",    "female",
                               "young",      "elderly", "elementary",
                               "college",    "asian",   "african_american",
                               "occupation"};

std::string join_paragraphs(const std::vector<std::string>& paragraphs) {
    std::string out;
    for (const auto& p : paragraphs) {
        if (p.empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += p;
    }
    return out;
}

std::string article_for(const std::string& noun) {
    if (noun.empty()) return "a";
    switch (std::tolower(static_cast<unsigned char>(noun.front()))) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
        default: return "a";
    }
}

}  // namespace

std::string to_string(PersonaKind k) {
    return kPersonaNames[static_cast<int>(k)];
}

PersonaKind persona_from_string(const std::string& s) {
    for (int i = 0; i < 10; ++i)
        if (s == kPersonaNames[i]) return static_cast<PersonaKind>(i);
    throw std::invalid_argument("unknown persona: " + s);
}

std::string to_string(CaseKind c) {
    switch (c) {
        case CaseKind::risk: return "risk";
        case CaseKind::social: return "social";
        case CaseKind::games: return "games";
    }
    throw std::invalid_argument("unknown case kind");
}

CaseKind case_from_string(const std::string& s) {
    if (s == "risk") return CaseKind::risk;
    if (s == "social") return CaseKind::social;
    if (s == "games") return CaseKind::games;
    throw std::invalid_argument("unknown case kind: " + s);
}

Domain domain_of(CaseKind c) {
    if (c == CaseKind::risk) return Domain::risk;
    if (c == CaseKind::social) return Domain::social;
    throw std::invalid_argument("games case has no budget domain");
}

std::string to_string(DialogueType d) {
    return d == DialogueType::multi_turn ? "multi_turn" : "single_turn";
}

DialogueType dialogue_from_string(const std::string& s) {
    if (s == "multi_turn") return DialogueType::multi_turn;
    if (s == "single_turn") return DialogueType::single_turn;
    throw std::invalid_argument("unknown dialogue type: " + s);
}

std::string to_string(AnswerType a) {
    return a == AnswerType::open ? "open" : "choice";
}

AnswerType answer_type_from_string(const std::string& s) {
    if (s == "open") return AnswerType::open;
    if (s == "choice") return AnswerType::choice;
    throw std::invalid_argument("unknown answer type: " + s);
}

void validate(const Condition& c) {
    if (c.name.empty()) throw std::invalid_argument("condition needs a name");
    if (c.persona.kind == PersonaKind::occupation && c.persona.occupation_name.empty())
        throw std::invalid_argument("occupation persona needs a name");
    if (c.stake_multiplier != 1 && c.stake_multiplier != 10 &&
        c.stake_multiplier != 100 && c.stake_multiplier != 1000)
        throw std::invalid_argument("stake multiplier must be 1, 10, 100 or 1000");
    if (c.temperature && (*c.temperature < 0.0 || *c.temperature > 2.0))
        throw std::invalid_argument("temperature out of range");
    if (c.case_kind == CaseKind::games) {
        if (c.stake_multiplier != 1 || !c.incentive || !c.include_example ||
            c.dialogue != DialogueType::multi_turn)
            throw std::invalid_argument(
                "game conditions vary only persona and answer type");
    } else if (c.scenario) {
        throw std::invalid_argument("budget conditions take no scenario");
    }
}

std::string format_amount(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

TemplateStore::TemplateStore(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_))
        throw std::runtime_error("template directory not found: " + root_.string());
}

TemplateStore TemplateStore::locate() {
    if (const char* env = std::getenv("ECONLAB_TEMPLATES"))
        return TemplateStore(env);
    if (std::filesystem::is_directory("templates"))
        return TemplateStore("templates");
#ifdef ECONLAB_DEFAULT_TEMPLATES
    return TemplateStore(ECONLAB_DEFAULT_TEMPLATES);
#else
    throw std::runtime_error(
        "no template directory: set ECONLAB_TEMPLATES or run from the repo root");
#endif
}

const std::string& TemplateStore::raw(const std::string& name) const {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    const auto path = root_ / (name + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing template: " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    std::string text = body.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return cache_.emplace(name, std::move(text)).first->second;
}

std::string TemplateStore::render(
    const std::string& name, const std::map<std::string, std::string>& values) const {
    std::string text = raw(name);
    for (const auto& [key, value] : values) {
        const std::string token = "{" + key + "}";
        std::size_t pos = 0;
        while ((pos = text.find(token, pos)) != std::string::npos) {
            text.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    // Flag tokens that were never supplied; literal braces (the JSON schema)
    // never form a {lower_snake} token, so they pass through.
    std::size_t open = 0;
    while ((open = text.find('{', open)) != std::string::npos) {
        const std::size_t close = text.find('}', open + 1);
        if (close == std::string::npos) break;
        const std::string inner = text.substr(open + 1, close - open - 1);
        if (!inner.empty() &&
            inner.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") == std::string::npos)
            throw std::runtime_error("unreplaced placeholder {" + inner + "} in " + name);
        ++open;
    }
    return text;
}

const std::map<std::string, std::string>& TemplateStore::table(
    const std::string& name) const {
    auto it = tables_.find(name);
    if (it != tables_.end()) return it->second;
    std::map<std::string, std::string> entries;
    std::istringstream in(raw(name) + "\n");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto sep = line.find(" = ");
        if (sep == std::string::npos)
            throw std::runtime_error("malformed table line in " + name + ": " + line);
        entries.emplace(line.substr(0, sep), line.substr(sep + 3));
    }
    return tables_.emplace(name, std::move(entries)).first->second;
}

std::string PromptRenderer::role_block(const Condition& c) const {
    const bool games = c.case_kind == CaseKind::games;
    const std::string base = games ? "personas/games" : "personas/budget";
    if (c.persona.kind != PersonaKind::occupation)
        return store_->table(base).at(to_string(c.persona.kind));
    std::string tasks = c.persona.occupation_tasks;
    if (tasks.empty()) tasks = store_->raw("personas/" + c.persona.occupation_name);
    return store_->render(base + "_occupation",
                          {{"article", article_for(c.persona.occupation_name)},
                           {"occupation_name", c.persona.occupation_name},
                           {"occupation_tasks", tasks}});
}

std::string PromptRenderer::render_system(const Condition& c) const {
    validate(c);
    if (c.case_kind == CaseKind::games) return role_block(c);
    const std::string domain = to_string(domain_of(c.case_kind));
    std::string payment;
    if (c.incentive) payment = store_->raw("budget/payment_sentence") + " ";
    // Removing the incentive also rewords the objective: both domains then use
    // the "solutions that you like most" phrasing.
    const std::string objective =
        c.incentive ? store_->raw(domain + "/objective")
                    : store_->raw("budget/objective_no_incentive");
    const std::string body = store_->render(
        "budget/system",
        {{"payment_sentence", payment}, {"objective", objective}});
    const std::string role = role_block(c);
    // Occupation personas insert a multi-paragraph task block; everything else
    // is a single opening sentence.
    const char* sep = c.persona.kind == PersonaKind::occupation ? "\n\n" : " ";
    return role + sep + body;
}

std::string PromptRenderer::budget_prefix(const Condition& c) const {
    const std::string domain = to_string(domain_of(c.case_kind));
    const bool choice = c.answer_type == AnswerType::choice;
    std::vector<std::string> paragraphs;
    paragraphs.push_back(store_->raw(domain + (choice ? "/intro_choice" : "/intro")));
    if (c.include_example) {
        // Stake scaling touches the per-round returns only; the worked example
        // always shows the base figures.
        paragraphs.push_back(
            store_->render(domain + "/example", {{"example_return_a", "0.8"},
                                                 {"example_return_b", "0.2"},
                                                 {"example_payoff_a", "72"},
                                                 {"example_payoff_b", "2"}}));
    }
    const AnswerFields fields = answer_fields(domain_of(c.case_kind));
    paragraphs.push_back(store_->render(
        "budget/format", {{"field_a", fields.field_a}, {"field_b", fields.field_b}}));
    return join_paragraphs(paragraphs);
}

std::string PromptRenderer::budget_question(const Condition& c,
                                            const BudgetRound& round) const {
    const std::string domain = to_string(domain_of(c.case_kind));
    const bool choice = c.answer_type == AnswerType::choice;
    return store_->render(
        domain + (choice ? "/question_choice" : "/question"),
        {{"return_a", format_amount(round.return_a * c.stake_multiplier)},
         {"return_b", format_amount(round.return_b * c.stake_multiplier)}});
}

std::string PromptRenderer::render_round_user(const Condition& c,
                                              const BudgetRound& round,
                                              bool first_round) const {
    validate(c);
    const std::string domain = to_string(domain_of(c.case_kind));
    const bool choice = c.answer_type == AnswerType::choice;
    const std::string closing =
        store_->raw(domain + (choice ? "/closing_choice" : "/closing"));
    if (first_round)
        return join_paragraphs({budget_prefix(c), budget_question(c, round), closing});
    return join_paragraphs({budget_question(c, round), closing});
}

std::string PromptRenderer::render_single_turn(
    const Condition& c, const std::vector<BudgetRound>& rounds) const {
    validate(c);
    if (rounds.size() != kRoundsPerSimulation)
        throw std::invalid_argument("single-turn rendering expects 25 rounds");
    const std::string domain = to_string(domain_of(c.case_kind));
    std::vector<std::string> paragraphs{budget_prefix(c)};
    for (std::size_t i = 0; i < rounds.size(); ++i)
        paragraphs.push_back(std::to_string(i + 1) + ". " +
                             budget_question(c, rounds[i]));
    paragraphs.push_back(store_->raw(domain + "/closing_single"));
    return join_paragraphs(paragraphs);
}

RenderedPrompt PromptRenderer::render_game(const Condition& c, Scenario scenario) const {
    validate(c);
    if (c.case_kind != CaseKind::games)
        throw std::invalid_argument("render_game needs a games condition");
    const GameScenario spec = scenario_spec(scenario);
    std::string options;
    for (double v : option_grid(spec)) {
        if (!options.empty()) options += ", ";
        options += "(" + format_amount(v) + ")";
    }
    std::map<std::string, std::string> values{{"options", options}};
    switch (scenario) {
        case Scenario::dictator:
        case Scenario::ultimatum_proposer:
        case Scenario::ultimatum_responder:
            values["example_keep"] = "60";
            values["example_give"] = "40";
            break;
        case Scenario::public_goods:
            values["example_contribution"] = "12";
            values["example_total"] = "20";
            values["example_payoff"] = "18";
            break;
        case Scenario::bomb_risk:
            values["example_boxes"] = "60";
            break;
    }
    const std::string suffix = c.answer_type == AnswerType::choice ? "_choice" : "";
    RenderedPrompt out;
    out.system = render_system(c);
    out.user_turns.push_back(store_->raw("games/opener"));
    out.user_turns.push_back(
        store_->render("games/" + to_string(scenario) + suffix, values));
    return out;
}

}  // namespace econlab
