#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "econlab/games.hpp"

namespace econlab {

double mean_of(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);      // ddof = 1
double population_stddev(std::span<const double> xs);  // ddof = 0

enum class TTestVariant { pooled, welch };

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double std_error = 0.0;  // of the mean difference
    TTestVariant variant = TTestVariant::pooled;
    std::string detail;  // set for degenerate zero-variance inputs
};

// Two-sided two-sample t test. Zero pooled variance degenerates to p = 1 for
// equal means and p = 0 otherwise (flagged in `detail`).
TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   TTestVariant variant = TTestVariant::pooled);

// Two-sided two-proportion z test with pooled variance; p = 1 when the pooled
// proportion is degenerate (0 or 1).
double proportion_test(int successes_a, int n_a, int successes_b, int n_b);

// Benjamini-Hochberg step-up adjustment; input order is preserved.
std::vector<double> fdr_adjust(const std::vector<double>& raw_p);

struct PValueCell {
    double raw = 1.0;
    double adjusted = 1.0;
};

// Dense model x measure x condition grid of p values forming one
// multiple-comparison family.
class PValueGrid {
public:
    PValueGrid(std::vector<std::string> models, std::vector<std::string> measures,
               std::vector<std::string> conditions);

    void set_raw(const std::string& model, const std::string& measure,
                 const std::string& condition, double raw_p);
    // Runs the FDR adjustment across the whole family. Throws if a cell is
    // still unset.
    void adjust();

    const PValueCell& at(const std::string& model, const std::string& measure,
                         const std::string& condition) const;
    bool complete() const;

    const std::vector<std::string>& models() const { return models_; }
    const std::vector<std::string>& measures() const { return measures_; }
    const std::vector<std::string>& conditions() const { return conditions_; }

private:
    std::size_t index(const std::string& model, const std::string& measure,
                      const std::string& condition) const;

    std::vector<std::string> models_, measures_, conditions_;
    std::vector<PValueCell> cells_;
    std::vector<bool> set_;
    bool adjusted_ = false;
};

struct SensitivityReport {
    double lambda = 0.0;  // share of significant cells across the whole grid
    std::map<std::string, double> lambda_by_measure;
    double alpha = 0.05;
};

// lambda(S) = mean over the grid of 1{adjusted p < alpha}, per the
// prompt-sensitivity measure; requires a complete, adjusted grid.
SensitivityReport sensitivity(const PValueGrid& grid, double alpha = 0.05);

struct TuringOutcome {
    double p_llm_more_likely = 0.0;
    double p_equal = 0.0;
    double p_human_more_likely = 0.0;
    int n_draws = 0;
    bool passed = false;
};

// Resampling Turing-style test: per draw, one value from each sample; the
// empirical frequency in the human sample (on values rounded to
// `round_decimals` places) decides which draw looks more human. Passes when
// the machine value is at least as likely in over half the draws. Draws use
// per-index substreams, so the outcome is schedule-independent.
TuringOutcome turing_test(std::span<const double> llm,
                          std::span<const double> human, int n_draws,
                          std::uint64_t seed, int round_decimals = 3);

// Mean over scenarios of population SD / decision-interval length.
double normalized_std(const std::map<Scenario, std::vector<double>>& by_scenario,
                      const std::vector<Scenario>& scenarios);

}  // namespace econlab
