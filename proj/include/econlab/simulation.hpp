#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "econlab/budget_tasks.hpp"
#include "econlab/chat_client.hpp"
#include "econlab/prompts.hpp"
#include "econlab/transcript.hpp"

namespace econlab {

struct RuntimeOptions {
    int max_retries_per_round = 10;
    RetryPolicy transport_retry;
    // Whether retries of an invalid round keep the invalid exchange in the
    // forwarded conversation. Default: drop it and re-ask the same question.
    bool keep_invalid_context = false;
};

struct SimulationSpec {
    Condition condition;
    std::vector<BudgetRound> rounds;  // budget cases
    std::string simulation_id;
    std::string model_id;
    std::uint64_t seed = 0;
};

// Drives one conversation to completion: renders prompts, calls the client,
// parses and validates each reply, retries invalid rounds up to the per-round
// cap, and (optionally) streams every turn to `sink`. Exhausting retries
// marks the result incomplete; already-valid earlier rounds are kept.
SimulationResult run_simulation(const PromptRenderer& renderer,
                                const SimulationSpec& spec, ChatClient& client,
                                const RuntimeOptions& options,
                                TranscriptWriter* sink = nullptr);

}  // namespace econlab
