#pragma once

#include <optional>
#include <string>
#include <vector>

#include "econlab/budget_tasks.hpp"
#include "econlab/games.hpp"

namespace econlab {

enum class ParseStatus { valid, refusal, format, constraint };

std::string to_string(ParseStatus s);

struct ParseOutcome {
    ParseStatus status = ParseStatus::format;
    std::optional<Allocation> allocation;
    std::optional<GameDecision> game;
    std::string detail;
};

inline constexpr double kAllocationSumTolerance = 1e-6;

// Pulls `expected_count` ```json blocks out of a completion and reads the two
// answer fields from each. Wrong block count, unparseable JSON, or missing /
// non-numeric fields classify as `format`; negative points or a sum away from
// 100 classify as `constraint`; a refusal with no extractable block classifies
// as `refusal`. On success the outcomes are in block order, all `valid`. On
// failure a single outcome describes the first problem.
std::vector<ParseOutcome> extract_json_allocation(const std::string& text,
                                                  const AnswerFields& fields,
                                                  std::size_t expected_count);

// Reads the first [[...]] value (optional $, optional decimals) and validates
// it against the scenario. No extractable bracket classifies as `refusal` or
// `format`; an out-of-range or off-grid value classifies as `constraint`.
ParseOutcome extract_bracket_value(const std::string& text,
                                   const GameScenario& scenario,
                                   AnswerType answer_type);

// Conservative refusal battery. Callers consult it only after decision
// extraction failed, so a refusal preamble followed by a usable answer never
// masks the answer.
bool classify_refusal(const std::string& text);

}  // namespace econlab
