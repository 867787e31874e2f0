#include "econlab/games.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace econlab {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::dictator: return "dictator";
        case Scenario::ultimatum_proposer: return "ultimatum_proposer";
        case Scenario::ultimatum_responder: return "ultimatum_responder";
        case Scenario::public_goods: return "public_goods";
        case Scenario::bomb_risk: return "bomb_risk";
    }
    throw std::invalid_argument("unknown scenario");
}

Scenario scenario_from_string(const std::string& s) {
    for (Scenario sc : all_scenarios())
        if (to_string(sc) == s) return sc;
    throw std::invalid_argument("unknown scenario: " + s);
}

const std::vector<Scenario>& all_scenarios() {
    static const std::vector<Scenario> scenarios{
        Scenario::dictator, Scenario::ultimatum_proposer,
        Scenario::ultimatum_responder, Scenario::public_goods,
        Scenario::bomb_risk};
    return scenarios;
}

GameScenario scenario_spec(Scenario id) {
    switch (id) {
        case Scenario::dictator:
            return {id, 0.0, 100.0, 5.0, 100.0, true};
        case Scenario::ultimatum_proposer:
            return {id, 0.0, 100.0, 5.0, 100.0, true};
        case Scenario::ultimatum_responder:
            return {id, 0.0, 100.0, 5.0, 100.0, true};
        case Scenario::public_goods:
            return {id, 0.0, 20.0, 1.0, 20.0, true};
        case Scenario::bomb_risk:
            return {id, 0.0, 100.0, 5.0, 100.0, false};
    }
    throw std::invalid_argument("unknown scenario");
}

std::vector<double> option_grid(const GameScenario& s) {
    std::vector<double> grid;
    for (double v = s.feasible_min; v <= s.feasible_max + 1e-9; v += s.option_step)
        grid.push_back(v);
    return grid;
}

std::pair<double, double> payoff_dictator(double given) {
    return {100.0 - given, given};
}

std::pair<double, double> payoff_ultimatum(double offer, double min_accept) {
    if (offer >= min_accept) return {100.0 - offer, offer};
    return {0.0, 0.0};
}

double payoff_public_goods(double own_contribution, double total_contributions) {
    return (20.0 - own_contribution) + 0.5 * total_contributions;
}

double payoff_bomb(double boxes_opened, bool bomb_in_opened) {
    return bomb_in_opened ? 0.0 : boxes_opened;
}

double expected_payoff_bomb(double boxes_opened) {
    return boxes_opened * (1.0 - boxes_opened / 100.0);
}

DecisionValidity validate_decision(const GameScenario& s, double value,
                                   AnswerType answer_type) {
    if (!std::isfinite(value)) return {false, "value is not finite"};
    if (value < s.feasible_min || value > s.feasible_max) {
        std::ostringstream why;
        why << "value " << value << " outside [" << s.feasible_min << ", "
            << s.feasible_max << "]";
        return {false, why.str()};
    }
    if (answer_type == AnswerType::choice) {
        const double steps = (value - s.feasible_min) / s.option_step;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            std::ostringstream why;
            why << "value " << value << " not on the " << s.option_step
                << "-spaced option grid";
            return {false, why.str()};
        }
    }
    return {true, ""};
}

}  // namespace econlab
