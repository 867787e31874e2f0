#include "econlab/mock_agents.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "econlab/budget_tasks.hpp"
#include "econlab/games.hpp"
#include "econlab/rng.hpp"

namespace econlab {

namespace {

std::string fmt_points(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

MalformedMode malformed_mode_from_string(const std::string& s) {
    if (s == "no_fence") return MalformedMode::no_fence;
    if (s == "refusal") return MalformedMode::refusal;
    if (s == "bad_sum") return MalformedMode::bad_sum;
    if (s == "out_of_range") return MalformedMode::out_of_range;
    if (s == "empty_reply") return MalformedMode::empty_reply;
    throw std::invalid_argument("unknown malformed mode: " + s);
}

// All "returns X dollars" / "returns X dollars" figures in prompt order.
std::vector<double> displayed_returns(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    static const std::string kReturns = "returns ";
    while ((pos = text.find(kReturns, pos)) != std::string::npos) {
        const char* start = text.c_str() + pos + kReturns.size();
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        const auto after = static_cast<std::size_t>(end - text.c_str());
        if (end != start && text.compare(after, 8, " dollars") == 0)
            values.push_back(v);
        pos += kReturns.size();
    }
    return values;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string malformed_budget_reply(MalformedMode mode, const AnswerFields& fields) {
    switch (mode) {
        case MalformedMode::no_fence:
            return "I would invest 60 points in the first and 40 in the second.";
        case MalformedMode::refusal:
            return "As an AI language model, I cannot participate in this task.";
        case MalformedMode::bad_sum:
            return "```json\n{\n\"" + fields.field_a + "\": 70,\n\"" +
                   fields.field_b + "\": 40\n}\n```";
        case MalformedMode::out_of_range:
            return "```json\n{\n\"" + fields.field_a + "\": -10,\n\"" +
                   fields.field_b + "\": 110\n}\n```";
        case MalformedMode::empty_reply:
            return "";
    }
    return "";
}

std::string malformed_game_reply(MalformedMode mode, const GameScenario& spec) {
    switch (mode) {
        case MalformedMode::no_fence:
            return "I think a fair amount would be 40 dollars.";
        case MalformedMode::refusal:
            return "As an AI language model, I am not capable of making decisions "
                   "on my own.";
        case MalformedMode::bad_sum:
            return "I pick [[half]] of it.";
        case MalformedMode::out_of_range:
            return "My choice is [[" + fmt_points(spec.feasible_max * 1.5) + "]].";
        case MalformedMode::empty_reply:
            return "";
    }
    return "";
}

}  // namespace

MockSpec mock_spec_from_string(const std::string& text) {
    MockSpec spec;
    std::string name = text;
    std::string arg;
    if (const auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    if (name == "corner_maximizer") {
        spec.policy = MockPolicy::corner_maximizer;
    } else if (name == "uniform_random") {
        spec.policy = MockPolicy::uniform_random;
    } else if (name == "fixed_midpoint") {
        spec.policy = MockPolicy::fixed_midpoint;
    } else if (name == "cobb_douglas") {
        spec.policy = MockPolicy::cobb_douglas;
        if (!arg.empty()) spec.share = std::stod(arg);
        if (spec.share < 0.0 || spec.share > 1.0)
            throw std::invalid_argument("cobb_douglas share must be in [0, 1]");
    } else if (name == "malformed") {
        spec.policy = MockPolicy::malformed;
        if (!arg.empty()) spec.mode = malformed_mode_from_string(arg);
    } else {
        throw std::invalid_argument("unknown mock policy: " + text);
    }
    return spec;
}

ScriptedAgent::ScriptedAgent(MockSpec spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {}

bool ScriptedAgent::fault_due() {
    if (spec_.fault_request > 0 && decision_requests_ >= spec_.fault_request &&
        faults_served_ < spec_.fault_times) {
        ++faults_served_;
        return true;
    }
    return false;
}

std::string ScriptedAgent::complete(const std::vector<Message>& messages) {
    const Message* last_user = nullptr;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) {
            last_user = &*it;
            break;
        }
    }
    if (!last_user) throw FatalChatError("no user message to answer");
    const std::string& text = last_user->text;

    const bool budget_question =
        text.find("What is your allocation?") != std::string::npos ||
        (text.find("Which is the best?") != std::string::npos &&
         text.find("points") != std::string::npos);
    if (budget_question) {
        ++decision_requests_;
        return budget_reply(text);
    }
    if (text.find("highlight") != std::string::npos &&
        text.find("[[") != std::string::npos) {
        ++decision_requests_;
        return game_reply(text);
    }
    return "Sure, let's get started.";
}

std::string ScriptedAgent::budget_reply(const std::string& text) {
    const Domain domain = text.find("Asset A") != std::string::npos
                              ? Domain::risk
                              : Domain::social;
    const AnswerFields fields = answer_fields(domain);
    if (spec_.policy == MockPolicy::malformed)
        return malformed_budget_reply(spec_.mode, fields);
    if (fault_due()) return malformed_budget_reply(spec_.fault_mode, fields);

    std::size_t questions = count_occurrences(text, "What is your allocation?") +
                            count_occurrences(text, "Which is the best?");
    if (questions == 0) questions = 1;
    // The figures of the current question(s) are the trailing ones; anything
    // before them belongs to the demonstration example.
    const std::vector<double> returns = displayed_returns(text);
    if (returns.size() < 2 * questions)
        throw FatalChatError("could not read the displayed returns");
    const std::size_t offset = returns.size() - 2 * questions;

    std::string reply;
    for (std::size_t q = 0; q < questions; ++q) {
        double points_a = 0.0;
        switch (spec_.policy) {
            case MockPolicy::corner_maximizer: {
                const double ra = returns[offset + 2 * q];
                const double rb = returns[offset + 2 * q + 1];
                points_a = ra >= rb ? 100.0 : 0.0;
                break;
            }
            case MockPolicy::uniform_random:
                points_a = uniform01(rng_) * 100.0;
                break;
            case MockPolicy::fixed_midpoint:
                points_a = 50.0;
                break;
            case MockPolicy::cobb_douglas:
                points_a = 100.0 * spec_.share;
                break;
            case MockPolicy::malformed:
                break;  // handled above
        }
        if (!reply.empty()) reply += "\n\n";
        reply += "```json\n{\n\"" + fields.field_a + "\": " + fmt_points(points_a) +
                 ",\n\"" + fields.field_b + "\": " + fmt_points(100.0 - points_a) +
                 "\n}\n```";
    }
    return reply;
}

std::string ScriptedAgent::game_reply(const std::string& text) {
    Scenario scenario = Scenario::dictator;
    if (text.find("public good game") != std::string::npos)
        scenario = Scenario::public_goods;
    else if (text.find("100 boxes") != std::string::npos)
        scenario = Scenario::bomb_risk;
    else if (text.find("You are the Proposer") != std::string::npos)
        scenario = Scenario::ultimatum_proposer;
    else if (text.find("You are the Responder") != std::string::npos)
        scenario = Scenario::ultimatum_responder;
    const GameScenario spec = scenario_spec(scenario);

    if (spec_.policy == MockPolicy::malformed)
        return malformed_game_reply(spec_.mode, spec);
    if (fault_due()) return malformed_game_reply(spec_.fault_mode, spec);

    const bool choice = text.find("The 21 options are") != std::string::npos;
    double value = 0.0;
    switch (spec_.policy) {
        case MockPolicy::corner_maximizer:
            // Own-payoff maximum: give/contribute/accept-threshold zero, and
            // the expected-value peak of 50 boxes in the bomb game.
            value = scenario == Scenario::bomb_risk ? 50.0 : spec.feasible_min;
            break;
        case MockPolicy::uniform_random:
            if (choice) {
                const auto grid = option_grid(spec);
                value = grid[uniform_index(rng_, grid.size())];
            } else {
                const double span = spec.feasible_max - spec.feasible_min;
                value = spec.feasible_min +
                        static_cast<double>(uniform_index(
                            rng_, static_cast<std::size_t>(span) + 1));
            }
            break;
        case MockPolicy::fixed_midpoint:
            value = spec.feasible_min + (spec.feasible_max - spec.feasible_min) / 2.0;
            break;
        case MockPolicy::cobb_douglas:
            value = spec_.share * spec.feasible_max;
            if (choice)
                value = std::round(value / spec.option_step) * spec.option_step;
            break;
        case MockPolicy::malformed:
            break;  // handled above
    }
    const std::string amount = fmt_points(value);
    if (spec.dollar_amount && scenario != Scenario::public_goods)
        return "I choose [[$" + amount + "]].";
    return "I choose [[" + amount + "]].";
}

FlakyClient::FlakyClient(std::unique_ptr<ChatClient> inner, int failures)
    : inner_(std::move(inner)), remaining_failures_(failures) {}

std::string FlakyClient::complete(const std::vector<Message>& messages) {
    ++attempts_;
    if (remaining_failures_ > 0) {
        --remaining_failures_;
        throw TransientChatError("simulated rate limit (HTTP 429)");
    }
    return inner_->complete(messages);
}

}  // namespace econlab
