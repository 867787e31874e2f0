#include "econlab/transcript.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace econlab {

std::string to_string(Validity v) {
    switch (v) {
        case Validity::valid: return "valid";
        case Validity::refusal: return "refusal";
        case Validity::format: return "format";
        case Validity::constraint: return "constraint";
        case Validity::transport_error: return "transport_error";
    }
    return "format";
}

Validity validity_from_string(const std::string& s) {
    if (s == "valid") return Validity::valid;
    if (s == "refusal") return Validity::refusal;
    if (s == "format") return Validity::format;
    if (s == "constraint") return Validity::constraint;
    if (s == "transport_error") return Validity::transport_error;
    throw std::invalid_argument("unknown validity: " + s);
}

void InvalidCounts::bump(Validity v) {
    switch (v) {
        case Validity::valid: break;
        case Validity::refusal: ++refusal; break;
        case Validity::format: ++format; break;
        case Validity::constraint: ++constraint; break;
        case Validity::transport_error: ++transport_error; break;
    }
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t secs = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&secs, &utc);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                  utc.tm_min, utc.tm_sec);
    return buf;
}

nlohmann::json to_json(const SimulationResult& r) {
    nlohmann::json j{{"simulation_id", r.simulation_id},
                     {"condition", r.condition_name},
                     {"model", r.model_id},
                     {"seed", r.seed},
                     {"completed", r.completed},
                     {"invalid",
                      {{"refusal", r.invalid.refusal},
                       {"format", r.invalid.format},
                       {"constraint", r.invalid.constraint},
                       {"transport_error", r.invalid.transport_error}}}};
    if (r.scenario) j["scenario"] = to_string(*r.scenario);
    if (r.game_decision) j["decision"] = *r.game_decision;
    if (!r.allocations.empty()) {
        auto& list = j["allocations"] = nlohmann::json::array();
        for (const auto& a : r.allocations)
            list.push_back({a.points_a, a.points_b});
    }
    return j;
}

SimulationResult result_from_json(const nlohmann::json& j) {
    SimulationResult r;
    r.simulation_id = j.at("simulation_id").get<std::string>();
    r.condition_name = j.at("condition").get<std::string>();
    r.model_id = j.at("model").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.completed = j.at("completed").get<bool>();
    if (j.contains("scenario"))
        r.scenario = scenario_from_string(j["scenario"].get<std::string>());
    if (j.contains("decision")) r.game_decision = j["decision"].get<double>();
    if (j.contains("allocations"))
        for (const auto& a : j["allocations"])
            r.allocations.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    const auto& inv = j.at("invalid");
    r.invalid.refusal = inv.at("refusal").get<int>();
    r.invalid.format = inv.at("format").get<int>();
    r.invalid.constraint = inv.at("constraint").get<int>();
    r.invalid.transport_error = inv.at("transport_error").get<int>();
    return r;
}

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path,
                                   std::string simulation_id,
                                   nlohmann::json condition_snapshot,
                                   std::string model_id, std::uint64_t seed) {
    std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write transcript " + path.string());
    nlohmann::json meta{{"type", "meta"},
                        {"schema", 1},
                        {"simulation_id", std::move(simulation_id)},
                        {"condition", std::move(condition_snapshot)},
                        {"model", std::move(model_id)},
                        {"seed", seed},
                        {"created", iso8601_now()}};
    out_ << meta.dump() << '\n';
    out_.flush();
}

void TranscriptWriter::write_turn(const Turn& turn) {
    nlohmann::json j{{"type", "turn"},
                     {"role", to_string(turn.role)},
                     {"round", turn.round_index},
                     {"text", turn.text},
                     {"ts", turn.timestamp}};
    if (turn.validity) j["validity"] = to_string(*turn.validity);
    out_ << j.dump() << '\n';
    out_.flush();
}

void TranscriptWriter::write_result(const SimulationResult& result) {
    nlohmann::json j = to_json(result);
    j["type"] = "result";
    out_ << j.dump() << '\n';
    out_.flush();
}

Transcript read_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read transcript " + path.string());
    Transcript t;
    std::string line;
    bool saw_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            break;  // torn tail line from a killed run
        }
        const std::string type = j.value("type", "");
        if (type == "meta") {
            t.simulation_id = j.at("simulation_id").get<std::string>();
            t.condition = j.at("condition");
            t.model_id = j.at("model").get<std::string>();
            t.seed = j.at("seed").get<std::uint64_t>();
            saw_meta = true;
        } else if (type == "turn") {
            Turn turn;
            turn.role = role_from_string(j.at("role").get<std::string>());
            turn.round_index = j.at("round").get<int>();
            turn.text = j.at("text").get<std::string>();
            turn.timestamp = j.value("ts", "");
            if (j.contains("validity"))
                turn.validity = validity_from_string(j["validity"].get<std::string>());
            t.turns.push_back(std::move(turn));
        } else if (type == "result") {
            t.result = result_from_json(j);
        }
    }
    if (!saw_meta)
        throw std::runtime_error("transcript missing meta record: " + path.string());
    return t;
}

std::optional<SimulationResult> read_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::optional<SimulationResult> result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;  // torn tail: treat the simulation as unfinished
        }
        if (j.value("type", "") == "result") result = result_from_json(j);
    }
    return result;
}

}  // namespace econlab
