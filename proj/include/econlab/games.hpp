#pragma once

#include <string>
#include <utility>
#include <vector>

namespace econlab {

enum class Scenario {
    dictator,
    ultimatum_proposer,
    ultimatum_responder,
    public_goods,
    bomb_risk,
};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);
const std::vector<Scenario>& all_scenarios();

enum class AnswerType { open, choice };

struct GameScenario {
    Scenario id = Scenario::dictator;
    double feasible_min = 0.0;
    double feasible_max = 100.0;
    double option_step = 5.0;      // spacing of the 21-option grid
    double interval_length = 100.0;  // decision-interval length, for dispersion scaling
    bool dollar_amount = true;     // answers are highlighted as [[$x]] vs [[x]]
};

GameScenario scenario_spec(Scenario id);

// The 21 multiple-choice options, feasible_min through feasible_max.
std::vector<double> option_grid(const GameScenario& s);

struct GameDecision {
    Scenario scenario = Scenario::dictator;
    double value = 0.0;
};

// Payoffs. Dictator and ultimatum return {own, other} / {proposer, responder}.
std::pair<double, double> payoff_dictator(double given);
std::pair<double, double> payoff_ultimatum(double offer, double min_accept);
double payoff_public_goods(double own_contribution, double total_contributions);
double payoff_bomb(double boxes_opened, bool bomb_in_opened);
double expected_payoff_bomb(double boxes_opened);

struct DecisionValidity {
    bool valid = false;
    std::string reason;
};

// Range check for open answers; range plus grid membership for choice answers.
DecisionValidity validate_decision(const GameScenario& s, double value,
                                   AnswerType answer_type);

}  // namespace econlab
