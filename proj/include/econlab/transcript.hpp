#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econlab/budget_tasks.hpp"
#include "econlab/chat_client.hpp"
#include "econlab/games.hpp"

namespace econlab {

enum class Validity { valid, refusal, format, constraint, transport_error };

std::string to_string(Validity v);
Validity validity_from_string(const std::string& s);

struct Turn {
    Role role = Role::user;
    std::string text;
    std::string timestamp;  // ISO 8601 UTC
    int round_index = 0;    // 0 for preamble turns (system, game opener)
    std::optional<Validity> validity;  // assistant turns only
};

struct InvalidCounts {
    int refusal = 0;
    int format = 0;
    int constraint = 0;
    int transport_error = 0;

    int total() const { return refusal + format + constraint + transport_error; }
    void bump(Validity v);
};

struct SimulationResult {
    std::string simulation_id;
    std::string condition_name;
    std::optional<Scenario> scenario;
    std::string model_id;
    std::uint64_t seed = 0;
    bool completed = false;
    std::vector<Allocation> allocations;     // budget cases, one per round
    std::optional<double> game_decision;     // games case
    InvalidCounts invalid;
};

nlohmann::json to_json(const SimulationResult& r);
SimulationResult result_from_json(const nlohmann::json& j);

struct Transcript {
    std::string simulation_id;
    nlohmann::json condition;  // snapshot of the rendered condition
    std::string model_id;
    std::uint64_t seed = 0;
    std::vector<Turn> turns;
    std::optional<SimulationResult> result;
};

std::string iso8601_now();

// Append-only JSONL sink: one `meta` record, then `turn` records as the
// conversation happens, then one `result` record. Each line is flushed so a
// killed run leaves a readable prefix.
class TranscriptWriter {
public:
    TranscriptWriter(const std::filesystem::path& path, std::string simulation_id,
                     nlohmann::json condition_snapshot, std::string model_id,
                     std::uint64_t seed);

    void write_turn(const Turn& turn);
    void write_result(const SimulationResult& result);

private:
    std::ofstream out_;
};

Transcript read_transcript(const std::filesystem::path& path);

// The persisted result record, if the file has one (a finished simulation).
std::optional<SimulationResult> read_result(const std::filesystem::path& path);

}  // namespace econlab
