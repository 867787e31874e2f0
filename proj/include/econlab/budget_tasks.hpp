#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "econlab/choice_data.hpp"

namespace econlab {

enum class Domain { risk, social };

std::string to_string(Domain d);
Domain domain_from_string(const std::string& s);

inline constexpr int kRoundsPerSimulation = 25;
inline constexpr double kEndowmentPoints = 100.0;

// One decision round: 100 points split across two assets (risk) or two
// recipients (social), each side paying `return_*` dollars per point.
struct BudgetRound {
    Domain domain = Domain::risk;
    int round_index = 0;  // 1-based
    double return_a = 0.0;
    double return_b = 0.0;
    double endowment = kEndowmentPoints;
};

struct Allocation {
    double points_a = 0.0;
    double points_b = 0.0;
};

struct TaskGenConfig {
    double return_min = 0.1;
    double return_max = 1.0;
    // Minimum required ratio max(return_a, return_b) / min(return_a, return_b);
    // pairs below it are redrawn. 1 accepts every draw.
    double min_ratio = 1.0;
    std::uint64_t seed = 0;
};

void validate(const TaskGenConfig& config);

std::vector<BudgetRound> generate_rounds(Domain domain, const TaskGenConfig& config);

// Names of the two JSON answer fields for a budget domain.
struct AnswerFields {
    std::string field_a;
    std::string field_b;
};
AnswerFields answer_fields(Domain d);

// Maps a round plus an allocation to a unit-expenditure observation:
// quantities are dollar returns per side, prices are 1 / (100 * return).
// Throws std::invalid_argument if the allocation is negative or does not
// exhaust the endowment.
Observation to_observation(const BudgetRound& round, const Allocation& alloc);

void write_rounds_jsonl(const std::filesystem::path& path,
                        const std::vector<BudgetRound>& rounds);
std::vector<BudgetRound> read_rounds_jsonl(const std::filesystem::path& path);

}  // namespace econlab
