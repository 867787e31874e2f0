#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "econlab/prompts.hpp"

using namespace econlab;

namespace {

std::string golden(const std::string& name) {
    const auto path = std::filesystem::path(ECONLAB_GOLDEN_DIR) / name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing golden file ", path.string());
    std::ostringstream body;
    body << in.rdbuf();
    std::string text = body.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

const TemplateStore& store() {
    static TemplateStore s{std::filesystem::path(ECONLAB_TEMPLATE_DIR)};
    return s;
}

Condition budget_baseline(CaseKind kind) {
    Condition c;
    c.name = "baseline";
    c.case_kind = kind;
    return c;
}

BudgetRound example_round(Domain d) { return {d, 1, 0.8, 0.2, 100.0}; }

}  // namespace

TEST_CASE("baseline renderings match the golden transcriptions") {
    const PromptRenderer renderer(store());

    const Condition risk = budget_baseline(CaseKind::risk);
    CHECK(renderer.render_system(risk) == golden("risk_system.txt"));
    CHECK(renderer.render_round_user(risk, example_round(Domain::risk), true) ==
          golden("risk_round1_user.txt"));
    CHECK(renderer.render_round_user(risk, example_round(Domain::risk), false) ==
          golden("risk_round2_user.txt"));

    const Condition social = budget_baseline(CaseKind::social);
    CHECK(renderer.render_system(social) == golden("social_system.txt"));
    CHECK(renderer.render_round_user(social, example_round(Domain::social), true) ==
          golden("social_round1_user.txt"));
    CHECK(renderer.render_round_user(social, example_round(Domain::social), false) ==
          golden("social_round2_user.txt"));
}

TEST_CASE("game renderings match the golden transcriptions") {
    const PromptRenderer renderer(store());
    Condition c;
    c.name = "baseline";
    c.case_kind = CaseKind::games;

    for (Scenario s : all_scenarios()) {
        const RenderedPrompt open = renderer.render_game(c, s);
        CHECK(open.system == golden("games_system.txt"));
        REQUIRE(open.user_turns.size() == 2);
        CHECK(open.user_turns[0] == golden("games_opener.txt"));
        CHECK(open.user_turns[1] == golden("game_" + to_string(s) + "_user.txt"));

        Condition choice = c;
        choice.answer_type = AnswerType::choice;
        const RenderedPrompt picked = renderer.render_game(choice, s);
        CHECK(picked.user_turns[1] ==
              golden("game_" + to_string(s) + "_choice_user.txt"));
    }
}

TEST_CASE("single-turn dialogue packs all 25 rounds into one user message") {
    const PromptRenderer renderer(store());
    std::vector<BudgetRound> risk_rounds, social_rounds;
    for (int i = 1; i <= 25; ++i) {
        risk_rounds.push_back({Domain::risk, i, 0.8, 0.2, 100.0});
        social_rounds.push_back({Domain::social, i, 0.8, 0.2, 100.0});
    }

    Condition risk = budget_baseline(CaseKind::risk);
    risk.dialogue = DialogueType::single_turn;
    CHECK(renderer.render_single_turn(risk, risk_rounds) ==
          golden("risk_single_turn_user.txt"));

    Condition social = budget_baseline(CaseKind::social);
    social.dialogue = DialogueType::single_turn;
    CHECK(renderer.render_single_turn(social, social_rounds) ==
          golden("social_single_turn_user.txt"));

    CHECK_THROWS_AS(renderer.render_single_turn(risk, {example_round(Domain::risk)}),
                    std::invalid_argument);
}

TEST_CASE("multiple-choice variant swaps intro, question, and closing") {
    const PromptRenderer renderer(store());

    Condition risk = budget_baseline(CaseKind::risk);
    risk.answer_type = AnswerType::choice;
    CHECK(renderer.render_round_user(risk, example_round(Domain::risk), true) ==
          golden("risk_choice_round1_user.txt"));
    // the system message does not change
    CHECK(renderer.render_system(risk) == golden("risk_system.txt"));

    Condition social = budget_baseline(CaseKind::social);
    social.answer_type = AnswerType::choice;
    CHECK(renderer.render_round_user(social, example_round(Domain::social), true) ==
          golden("social_choice_round1_user.txt"));
}

TEST_CASE("removing the incentive drops the payment sentence and the goal") {
    const PromptRenderer renderer(store());
    Condition c = budget_baseline(CaseKind::risk);
    c.incentive = false;
    CHECK(renderer.render_system(c) == golden("risk_no_incentive_system.txt"));
    // both domains share the no-incentive wording
    c.case_kind = CaseKind::social;
    CHECK(renderer.render_system(c) == golden("risk_no_incentive_system.txt"));
}

TEST_CASE("stake multiplier scales the round questions but not the example") {
    const PromptRenderer renderer(store());
    Condition c = budget_baseline(CaseKind::risk);
    c.stake_multiplier = 10;
    CHECK(renderer.render_round_user(c, example_round(Domain::risk), false) ==
          golden("risk_stake10_round2_user.txt"));

    const std::string first =
        renderer.render_round_user(c, example_round(Domain::risk), true);
    CHECK(first.find("returns 8 dollars") != std::string::npos);
    CHECK(first.find("returns 2 dollars") != std::string::npos);
    // the worked example keeps its base figures
    CHECK(first.find("returns 0.8 dollars") != std::string::npos);
    CHECK(first.find("90*0.8=72 dollars") != std::string::npos);
}

TEST_CASE("omitting the example removes exactly that paragraph") {
    const PromptRenderer renderer(store());
    Condition c = budget_baseline(CaseKind::risk);
    c.include_example = false;
    const std::string text =
        renderer.render_round_user(c, example_round(Domain::risk), true);
    CHECK(text.find("Here is an example") == std::string::npos);
    CHECK(text.find("In every round, you have 100 points") == 0);
    CHECK(text.find("What is your allocation?") != std::string::npos);
}

TEST_CASE("personas replace the opening role sentence") {
    const PromptRenderer renderer(store());
    Condition c = budget_baseline(CaseKind::risk);
    c.persona.kind = PersonaKind::male;
    CHECK(renderer.render_system(c) == golden("risk_male_system.txt"));

    Condition games;
    games.name = "mathematician";
    games.case_kind = CaseKind::games;
    games.persona.kind = PersonaKind::occupation;
    games.persona.occupation_name = "mathematician";
    CHECK(renderer.render_system(games) == golden("games_mathematician_system.txt"));
}

TEST_CASE("format_amount renders shortest decimals") {
    CHECK(format_amount(0.8) == "0.8");
    CHECK(format_amount(0.25) == "0.25");
    CHECK(format_amount(8.0) == "8");
    CHECK(format_amount(800.0) == "800");
    CHECK(format_amount(2.5) == "2.5");
    CHECK(format_amount(0.5) == "0.5");
}

TEST_CASE("condition validation rejects malformed cells") {
    Condition c = budget_baseline(CaseKind::risk);
    c.stake_multiplier = 7;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);

    c = budget_baseline(CaseKind::risk);
    c.name.clear();
    CHECK_THROWS_AS(validate(c), std::invalid_argument);

    c = budget_baseline(CaseKind::risk);
    c.persona.kind = PersonaKind::occupation;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);

    c = budget_baseline(CaseKind::risk);
    c.temperature = 3.5;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);

    c = budget_baseline(CaseKind::risk);
    c.scenario = Scenario::dictator;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);

    Condition games;
    games.case_kind = CaseKind::games;
    games.stake_multiplier = 10;
    CHECK_THROWS_AS(validate(games), std::invalid_argument);
    games.stake_multiplier = 1;
    games.dialogue = DialogueType::single_turn;
    CHECK_THROWS_AS(validate(games), std::invalid_argument);
}

TEST_CASE("template store substitution and failure modes") {
    const auto root = std::filesystem::temp_directory_path() / "econlab_tpl_test";
    std::filesystem::create_directories(root);
    {
        std::ofstream out(root / "greet.txt");
        out << "Hello {name}, the schema is {\"x\": float}.\n";
    }
    {
        std::ofstream out(root / "pairs.txt");
        out << "a = first\nb = second value\n";
    }
    const TemplateStore tpl(root);

    CHECK(tpl.render("greet", {{"name", "Ada"}}) ==
          "Hello Ada, the schema is {\"x\": float}.");
    CHECK_THROWS_AS(tpl.render("greet", {}), std::runtime_error);
    CHECK_THROWS_AS(tpl.raw("absent"), std::runtime_error);

    const auto& table = tpl.table("pairs");
    CHECK(table.at("a") == "first");
    CHECK(table.at("b") == "second value");

    CHECK_THROWS_AS(TemplateStore("/nonexistent/econlab/tpl"), std::runtime_error);
}
