#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econlab/stats.hpp"

namespace econlab {

struct AnalysisOptions {
    double alpha = 0.05;
    TTestVariant t_variant = TTestVariant::pooled;
    int turing_draws = 10000;
    std::uint64_t turing_seed = 20240001;
    // Override the reference datasets recorded in the campaign manifest.
    std::optional<std::filesystem::path> human_budget_csv;  // domain,value rows
    std::optional<std::filesystem::path> human_games_csv;   // scenario,value rows
};

// Builds the full analysis for a finished campaign: per-condition summary
// stats, condition-vs-baseline tests with 95% CIs, the FDR-adjusted p-value
// family with sensitivity shares, invalid-rate accounting, CDF tables, and
// (when reference data is available) Turing outcomes and the normalized
// cross-scenario dispersion.
nlohmann::json analyze_campaign(const std::filesystem::path& campaign_dir,
                                const AnalysisOptions& options = {});

// Renders analysis/report.md and analysis/cdf_*.csv from analysis/report.json.
// Pure function of the JSON, so re-running is byte-stable.
void write_report_files(const std::filesystem::path& campaign_dir,
                        const nlohmann::json& report);

// reference CSV loaders (single value column keyed by domain/scenario name)
std::map<std::string, std::vector<double>>
read_reference_csv(const std::filesystem::path& path);

}  // namespace econlab
