#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econlab/budget_tasks.hpp"
#include "econlab/mock_agents.hpp"
#include "econlab/prompts.hpp"
#include "econlab/simulation.hpp"

namespace econlab {

enum class TaskSharing { per_sim, shared };
std::string to_string(TaskSharing t);
TaskSharing task_sharing_from_string(const std::string& s);

struct CampaignProvider {
    enum class Kind { mock, http } kind = Kind::mock;
    std::string name = "default";
    MockSpec mock;
    ProviderConfig http;
};

struct CampaignConfig {
    CaseKind case_kind = CaseKind::risk;
    std::vector<Scenario> scenarios;  // games case; defaults to all five
    std::vector<Condition> conditions;
    int n_sims = 100;
    std::uint64_t campaign_seed = 0;
    std::filesystem::path output_dir;
    TaskGenConfig task_gen;
    TaskSharing task_sharing = TaskSharing::per_sim;
    CampaignProvider provider;
    std::map<std::string, CampaignProvider> providers;  // selectable via --provider
    RuntimeOptions runtime;
    int parallelism = 4;
    // Optional reference datasets consumed by the analysis stage.
    std::map<std::string, std::filesystem::path> reference_paths;
};

struct CampaignOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
    std::optional<std::string> provider_name;
    std::optional<std::string> mock_policy;
    std::optional<std::filesystem::path> output_dir;
};

CampaignConfig load_campaign_config(const std::filesystem::path& path,
                                    const CampaignOverrides& overrides = {});

// Stable hash of the determinism-relevant parts of a config; recorded in the
// manifest and checked on resume.
std::string config_fingerprint(const CampaignConfig& config);

nlohmann::json condition_snapshot(const Condition& c);
Condition condition_from_snapshot(const nlohmann::json& j);

// Campaign directory layout:
//   manifest.json
//   tasks/shared.jsonl              (task_sharing = shared)
//   tasks/sim_0001.jsonl ...        (task_sharing = per_sim)
//   transcripts/<condition>/[<scenario>/]sim_0001.jsonl ...
//   analysis/report.json, report.md, cdf_*.csv
class CampaignRunner {
public:
    CampaignRunner(CampaignConfig config, const TemplateStore& templates);

    const CampaignConfig& config() const { return config_; }

    // Writes manifest and task files. Idempotent: existing task files are
    // kept (and validated against the manifest fingerprint).
    void generate();

    // Runs every (condition [, scenario], sim) cell, skipping cells whose
    // transcript already holds a result record. Returns all results in
    // deterministic cell order.
    std::vector<SimulationResult> run();

    std::vector<BudgetRound> rounds_for_sim(int sim_index) const;
    std::filesystem::path transcript_path(const Condition& c,
                                          std::optional<Scenario> scenario,
                                          int sim_index) const;
    std::uint64_t sim_seed(const Condition& c, std::optional<Scenario> scenario,
                           int sim_index) const;

private:
    struct Cell {
        const Condition* condition;
        std::optional<Scenario> scenario;
        int sim_index;  // 1-based
    };
    std::vector<Cell> cells() const;
    std::unique_ptr<ChatClient> make_client(std::uint64_t seed, double temperature) const;
    SimulationResult run_cell(const Cell& cell);

    CampaignConfig config_;
    const TemplateStore* templates_;
};

// Loads every persisted result of a campaign, keyed by condition name (and
// scenario for games), in simulation order.
std::map<std::string, std::vector<SimulationResult>>
load_campaign_results(const std::filesystem::path& campaign_dir);

nlohmann::json read_manifest(const std::filesystem::path& campaign_dir);

}  // namespace econlab
