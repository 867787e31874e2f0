#include "econlab/simulation.hpp"

#include <stdexcept>

#include "econlab/parsing.hpp"

namespace econlab {

namespace {

Validity to_validity(ParseStatus s) {
    switch (s) {
        case ParseStatus::valid: return Validity::valid;
        case ParseStatus::refusal: return Validity::refusal;
        case ParseStatus::format: return Validity::format;
        case ParseStatus::constraint: return Validity::constraint;
    }
    return Validity::format;
}

struct Exchange {
    bool ok = false;
    std::string reply;
    std::vector<ParseOutcome> outcomes;
};

}  // namespace

SimulationResult run_simulation(const PromptRenderer& renderer,
                                const SimulationSpec& spec, ChatClient& client,
                                const RuntimeOptions& options,
                                TranscriptWriter* sink) {
    const Condition& c = spec.condition;
    validate(c);

    SimulationResult result;
    result.simulation_id = spec.simulation_id;
    result.condition_name = c.name;
    result.scenario = c.scenario;
    result.model_id = spec.model_id;
    result.seed = spec.seed;

    std::vector<Message> context;
    const auto record = [&](Role role, const std::string& text, int round,
                            std::optional<Validity> validity) {
        if (sink) sink->write_turn({role, text, iso8601_now(), round, validity});
    };

    context.push_back({Role::system, renderer.render_system(c)});
    record(Role::system, context.back().text, 0, std::nullopt);

    // Sends `user_text`, parses the reply with `judge`, and retries the same
    // question while the reply is invalid (dropping or keeping the failed
    // exchange per options). Returns false when the retry budget runs out.
    const auto ask = [&](const std::string& user_text, int round,
                         auto&& judge) -> bool {
        for (int attempt = 0; attempt <= options.max_retries_per_round; ++attempt) {
            record(Role::user, user_text, round, std::nullopt);
            std::vector<Message> request = context;
            request.push_back({Role::user, user_text});
            const ChatOutcome outcome = chat(client, request, options.transport_retry);
            if (!outcome.ok) {
                record(Role::assistant, outcome.text, round,
                       Validity::transport_error);
                result.invalid.bump(Validity::transport_error);
                continue;
            }
            const Validity validity = judge(outcome.text);
            record(Role::assistant, outcome.text, round, validity);
            if (validity == Validity::valid) {
                context.push_back({Role::user, user_text});
                context.push_back({Role::assistant, outcome.text});
                return true;
            }
            result.invalid.bump(validity);
            if (options.keep_invalid_context) {
                context.push_back({Role::user, user_text});
                context.push_back({Role::assistant, outcome.text});
            }
        }
        return false;
    };

    if (c.case_kind == CaseKind::games) {
        if (!c.scenario)
            throw std::invalid_argument("games simulation needs a scenario");
        const RenderedPrompt prompt = renderer.render_game(c, *c.scenario);
        const GameScenario scenario = scenario_spec(*c.scenario);
        // Conversation opener; any reply is acceptable.
        const bool opened = ask(prompt.user_turns.at(0), 0,
                                [](const std::string&) { return Validity::valid; });
        if (!opened) {
            if (sink) sink->write_result(result);
            return result;
        }
        const bool answered =
            ask(prompt.user_turns.at(1), 1, [&](const std::string& reply) {
                const ParseOutcome outcome =
                    extract_bracket_value(reply, scenario, c.answer_type);
                if (outcome.status == ParseStatus::valid)
                    result.game_decision = outcome.game->value;
                return to_validity(outcome.status);
            });
        result.completed = answered;
        if (sink) sink->write_result(result);
        return result;
    }

    const AnswerFields fields = answer_fields(domain_of(c.case_kind));
    if (spec.rounds.empty())
        throw std::invalid_argument("budget simulation needs rounds");

    if (c.dialogue == DialogueType::single_turn) {
        std::vector<Allocation> batch;
        const bool answered = ask(
            renderer.render_single_turn(c, spec.rounds), 1,
            [&](const std::string& reply) {
                const auto outcomes =
                    extract_json_allocation(reply, fields, spec.rounds.size());
                for (const auto& o : outcomes)
                    if (o.status != ParseStatus::valid) return to_validity(o.status);
                batch.clear();
                for (const auto& o : outcomes) batch.push_back(*o.allocation);
                return Validity::valid;
            });
        if (answered) result.allocations = std::move(batch);
        result.completed = answered;
        if (sink) sink->write_result(result);
        return result;
    }

    for (std::size_t i = 0; i < spec.rounds.size(); ++i) {
        Allocation allocation;
        const bool answered = ask(
            renderer.render_round_user(c, spec.rounds[i], i == 0),
            static_cast<int>(i + 1), [&](const std::string& reply) {
                const auto outcomes = extract_json_allocation(reply, fields, 1);
                if (outcomes.front().status == ParseStatus::valid)
                    allocation = *outcomes.front().allocation;
                return to_validity(outcomes.front().status);
            });
        if (!answered) {
            result.completed = false;
            if (sink) sink->write_result(result);
            return result;
        }
        result.allocations.push_back(allocation);
    }
    result.completed = true;
    if (sink) sink->write_result(result);
    return result;
}

}  // namespace econlab
