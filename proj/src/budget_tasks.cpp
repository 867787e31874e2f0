#include "econlab/budget_tasks.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "econlab/rng.hpp"

namespace econlab {

std::string to_string(Domain d) {
    return d == Domain::risk ? "risk" : "social";
}

Domain domain_from_string(const std::string& s) {
    if (s == "risk") return Domain::risk;
    if (s == "social") return Domain::social;
    throw std::invalid_argument("unknown domain: " + s);
}

void validate(const TaskGenConfig& config) {
    if (!(config.return_min > 0.0))
        throw std::invalid_argument("return_min must be positive");
    if (!(config.return_max >= config.return_min))
        throw std::invalid_argument("return_max must be >= return_min");
    if (!(config.min_ratio >= 1.0))
        throw std::invalid_argument("min_ratio must be >= 1");
    if (config.min_ratio > config.return_max / config.return_min)
        throw std::invalid_argument("min_ratio unreachable for the return range");
}

std::vector<BudgetRound> generate_rounds(Domain domain, const TaskGenConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    std::vector<BudgetRound> rounds;
    rounds.reserve(kRoundsPerSimulation);
    for (int i = 1; i <= kRoundsPerSimulation; ++i) {
        double ra = 0.0, rb = 0.0;
        do {
            ra = uniform_range(rng, config.return_min, config.return_max);
            rb = uniform_range(rng, config.return_min, config.return_max);
        } while (std::max(ra, rb) < config.min_ratio * std::min(ra, rb));
        rounds.push_back({domain, i, ra, rb, kEndowmentPoints});
    }
    return rounds;
}

AnswerFields answer_fields(Domain d) {
    if (d == Domain::risk)
        return {"Points for investing Asset A", "Points for investing Asset B"};
    return {"Points allocated to yourself", "Points allocated to the other one"};
}

Observation to_observation(const BudgetRound& round, const Allocation& alloc) {
    if (!(round.return_a > 0.0) || !(round.return_b > 0.0))
        throw std::invalid_argument("round returns must be positive");
    if (alloc.points_a < 0.0 || alloc.points_b < 0.0)
        throw std::invalid_argument("allocation points must be non-negative");
    if (std::abs(alloc.points_a + alloc.points_b - round.endowment) > 1e-6)
        throw std::invalid_argument("allocation must exhaust the endowment");
    // Unit-expenditure normalization: price of a point's return on side s is
    // 1 / (endowment * return_s), so p . x == 1 for every feasible bundle.
    Observation obs;
    obs.quantities = {alloc.points_a * round.return_a, alloc.points_b * round.return_b};
    obs.prices = {1.0 / (round.endowment * round.return_a),
                  1.0 / (round.endowment * round.return_b)};
    return obs;
}

void write_rounds_jsonl(const std::filesystem::path& path,
                        const std::vector<BudgetRound>& rounds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& r : rounds) {
        nlohmann::json j{{"domain", to_string(r.domain)},
                         {"index", r.round_index},
                         {"return_a", r.return_a},
                         {"return_b", r.return_b},
                         {"endowment", r.endowment}};
        out << j.dump() << '\n';
    }
}

std::vector<BudgetRound> read_rounds_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<BudgetRound> rounds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        rounds.push_back({domain_from_string(j.at("domain").get<std::string>()),
                          j.at("index").get<int>(), j.at("return_a").get<double>(),
                          j.at("return_b").get<double>(),
                          j.value("endowment", kEndowmentPoints)});
    }
    return rounds;
}

}  // namespace econlab
