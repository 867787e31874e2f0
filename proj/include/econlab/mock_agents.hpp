#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>

#include "econlab/chat_client.hpp"

namespace econlab {

enum class MockPolicy {
    corner_maximizer,  // everything on the displayed higher-return side
    uniform_random,    // points_a ~ uniform[0, 100]; games: uniform feasible value
    fixed_midpoint,    // 50/50; games: midpoint of the feasible range
    cobb_douglas,      // constant point share `share` on side A
    malformed,         // always broken, per `mode`
};

enum class MalformedMode { no_fence, refusal, bad_sum, out_of_range, empty_reply };

struct MockSpec {
    MockPolicy policy = MockPolicy::uniform_random;
    double share = 0.5;                            // cobb_douglas
    MalformedMode mode = MalformedMode::no_fence;  // malformed
    // Optional fault injection for otherwise well-behaved policies: answer
    // badly the first `fault_times` times decision request number
    // `fault_request` comes around (retries of the same round count again).
    int fault_request = 0;  // 1-based; 0 disables
    int fault_times = 0;
    MalformedMode fault_mode = MalformedMode::no_fence;
};

// Accepts "uniform_random", "cobb_douglas:0.3", "malformed:refusal", ...
MockSpec mock_spec_from_string(const std::string& text);

// Deterministic stand-in for a model. It reads the task out of the rendered
// prompt (domain, displayed returns, scenario, single- vs multi-turn) and
// answers in the wire format a model would use.
class ScriptedAgent : public ChatClient {
public:
    ScriptedAgent(MockSpec spec, std::uint64_t seed);
    std::string complete(const std::vector<Message>& messages) override;

private:
    std::string budget_reply(const std::string& user_text);
    std::string game_reply(const std::string& user_text);
    bool fault_due();

    MockSpec spec_;
    std::mt19937_64 rng_;
    int decision_requests_ = 0;
    int faults_served_ = 0;
};

// Fails the first `failures` requests with a retryable transport error, then
// delegates. For exercising the backoff path without a network.
class FlakyClient : public ChatClient {
public:
    FlakyClient(std::unique_ptr<ChatClient> inner, int failures);
    std::string complete(const std::vector<Message>& messages) override;

    int attempts() const { return attempts_; }

private:
    std::unique_ptr<ChatClient> inner_;
    int remaining_failures_;
    int attempts_ = 0;
};

}  // namespace econlab
