#include "econlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "econlab/campaign.hpp"
#include "econlab/revealed_pref.hpp"
#include "econlab/rng.hpp"

namespace econlab {

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string sim_file_name(int sim_index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sim_%04d.jsonl", sim_index);
    return buf;
}

// Everything the report needs about one condition cell (condition for the
// budget cases, condition x scenario for games), tallied straight from the
// transcripts.
struct CellData {
    std::string key;
    std::string condition_name;
    std::optional<Scenario> scenario;
    int n_sims = 0;       // transcripts with a result record
    int n_completed = 0;
    std::vector<double> values;  // ccei per completed sim, or game decisions
    InvalidCounts invalid;
    int valid_turns = 0;

    int assistant_turns() const { return valid_turns + invalid.total(); }
    double invalid_rate() const {
        const int turns = assistant_turns();
        return turns == 0 ? 0.0 : static_cast<double>(invalid.total()) / turns;
    }
};

nlohmann::json summary_json(const CellData& cell, const char* value_name) {
    nlohmann::json j{{"key", cell.key},
                     {"condition", cell.condition_name},
                     {"n_sims", cell.n_sims},
                     {"n_completed", cell.n_completed},
                     {"completion_rate",
                      cell.n_sims == 0
                          ? 0.0
                          : static_cast<double>(cell.n_completed) / cell.n_sims},
                     {"assistant_turns", cell.assistant_turns()},
                     {"invalid",
                      {{"refusal", cell.invalid.refusal},
                       {"format", cell.invalid.format},
                       {"constraint", cell.invalid.constraint},
                       {"transport_error", cell.invalid.transport_error},
                       {"total", cell.invalid.total()},
                       {"rate", cell.invalid_rate()}}}};
    if (cell.scenario) j["scenario"] = to_string(*cell.scenario);
    nlohmann::json v{{"n", cell.values.size()}};
    if (!cell.values.empty()) {
        v["mean"] = mean_of(cell.values);
        v["min"] = *std::min_element(cell.values.begin(), cell.values.end());
        v["max"] = *std::max_element(cell.values.begin(), cell.values.end());
        if (cell.values.size() >= 2) v["std"] = sample_stddev(cell.values);
        v["population_std"] = population_stddev(cell.values);
    }
    j[value_name] = std::move(v);
    return j;
}

nlohmann::json cdf_json(const std::vector<double>& values) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < sorted.size(); ++i)
        points.push_back({sorted[i], static_cast<double>(i + 1) / sorted.size()});
    return points;
}

struct Comparison {
    std::string key;      // condition key under test
    std::string measure;  // "ccei" or a scenario id
    TTestResult test;     // condition minus baseline
    double ci_low = 0.0, ci_high = 0.0;
};

Comparison compare(const std::string& key, const std::string& measure,
                   const std::vector<double>& condition_values,
                   const std::vector<double>& baseline_values,
                   const AnalysisOptions& options) {
    if (condition_values.size() < 2 || baseline_values.size() < 2)
        throw std::runtime_error("not enough completed simulations to compare " +
                                 key + " on " + measure);
    Comparison c;
    c.key = key;
    c.measure = measure;
    c.test = t_test(condition_values, baseline_values, options.t_variant);
    const double diff = c.test.mean_a - c.test.mean_b;
    if (c.test.std_error > 0.0) {
        const boost::math::students_t dist(c.test.degrees_of_freedom);
        const double margin =
            boost::math::quantile(dist, 1.0 - options.alpha / 2) * c.test.std_error;
        c.ci_low = diff - margin;
        c.ci_high = diff + margin;
    } else {
        c.ci_low = c.ci_high = diff;
    }
    return c;
}

nlohmann::json comparison_json(const Comparison& c) {
    nlohmann::json j{{"key", c.key},
                     {"measure", c.measure},
                     {"diff", c.test.mean_a - c.test.mean_b},
                     {"ci_low", c.ci_low},
                     {"ci_high", c.ci_high},
                     {"t", c.test.t_statistic},
                     {"df", c.test.degrees_of_freedom},
                     {"p_raw", c.test.p_value}};
    if (!c.test.detail.empty()) j["detail"] = c.test.detail;
    return j;
}

nlohmann::json turing_json(const std::string& key, const TuringOutcome& t) {
    return {{"key", key},
            {"p_llm_more_likely", t.p_llm_more_likely},
            {"p_equal", t.p_equal},
            {"p_human_more_likely", t.p_human_more_likely},
            {"n_draws", t.n_draws},
            {"passed", t.passed}};
}

std::map<std::string, std::vector<double>> load_reference(
    const std::optional<std::filesystem::path>& override_path,
    const nlohmann::json& manifest, const char* manifest_key) {
    if (override_path) return read_reference_csv(*override_path);
    if (manifest.contains("reference") &&
        manifest["reference"].contains(manifest_key))
        return read_reference_csv(
            manifest["reference"][manifest_key].get<std::string>());
    return {};
}

// Reads every persisted simulation of one condition cell, tallying result
// values and per-turn validity.
CellData read_cell(const std::filesystem::path& campaign_dir,
                   const std::string& key, int n_sims, bool games,
                   const std::vector<std::vector<BudgetRound>>* tasks_by_sim) {
    CellData cell;
    cell.key = key;
    for (int i = 1; i <= n_sims; ++i) {
        const auto path = campaign_dir / "transcripts" / key / sim_file_name(i);
        if (!std::filesystem::exists(path)) continue;
        const Transcript transcript = read_transcript(path);
        if (!transcript.result) continue;
        const SimulationResult& result = *transcript.result;
        cell.condition_name = result.condition_name;
        cell.scenario = result.scenario;
        ++cell.n_sims;
        if (result.completed) ++cell.n_completed;
        cell.invalid.refusal += result.invalid.refusal;
        cell.invalid.format += result.invalid.format;
        cell.invalid.constraint += result.invalid.constraint;
        cell.invalid.transport_error += result.invalid.transport_error;
        for (const Turn& turn : transcript.turns)
            if (turn.validity && *turn.validity == Validity::valid)
                ++cell.valid_turns;

        if (games) {
            if (result.completed && result.game_decision)
                cell.values.push_back(*result.game_decision);
        } else if (result.completed) {
            const auto& rounds = (*tasks_by_sim)[tasks_by_sim->size() == 1
                                                     ? 0
                                                     : static_cast<std::size_t>(i - 1)];
            if (result.allocations.size() != rounds.size())
                throw std::runtime_error("result/task length mismatch in " +
                                         path.string());
            ChoiceDataset data;
            for (std::size_t r = 0; r < rounds.size(); ++r)
                data.observations.push_back(
                    to_observation(rounds[r], result.allocations[r]));
            cell.values.push_back(ccei(data).value);
        }
    }
    return cell;
}

}  // namespace

std::map<std::string, std::vector<double>> read_reference_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read reference " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty reference file " + path.string());
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.substr(comma + 1) != "value")
        throw std::runtime_error(
            "reference header must be <group>,value: " + path.string());

    std::map<std::string, std::vector<double>> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto sep = line.find(',');
        if (sep == std::string::npos)
            throw std::runtime_error("bad reference row at line " +
                                     std::to_string(line_no));
        std::size_t used = 0;
        const double value = std::stod(line.substr(sep + 1), &used);
        out[line.substr(0, sep)].push_back(value);
    }
    if (out.empty())
        throw std::runtime_error("reference file has no rows: " + path.string());
    return out;
}

nlohmann::json analyze_campaign(const std::filesystem::path& campaign_dir,
                                const AnalysisOptions& options) {
    const nlohmann::json manifest = read_manifest(campaign_dir);
    const CaseKind case_kind =
        case_from_string(manifest.at("case").get<std::string>());
    const bool games = case_kind == CaseKind::games;
    const int n_sims = manifest.at("n_sims").get<int>();
    const std::string model = manifest.value("model", "unknown");

    std::vector<std::string> condition_names;
    for (const auto& c : manifest.at("conditions"))
        condition_names.push_back(c.at("name").get<std::string>());
    if (condition_names.empty())
        throw std::runtime_error("manifest lists no conditions");
    std::vector<Scenario> scenarios;
    if (games)
        for (const auto& s : manifest.at("scenarios"))
            scenarios.push_back(scenario_from_string(s.get<std::string>()));

    // Budget tasks, indexed by simulation (one entry when shared).
    std::vector<std::vector<BudgetRound>> tasks_by_sim;
    if (!games) {
        const bool shared =
            manifest.value("task_sharing", "per_sim") == std::string("shared");
        if (shared) {
            tasks_by_sim.push_back(
                read_rounds_jsonl(campaign_dir / "tasks" / "shared.jsonl"));
        } else {
            for (int i = 1; i <= n_sims; ++i)
                tasks_by_sim.push_back(read_rounds_jsonl(
                    campaign_dir / "tasks" / sim_file_name(i)));
        }
    }

    // Cell keys in manifest order: <condition> or <condition>/<scenario>.
    std::vector<CellData> cells;
    for (const auto& name : condition_names) {
        if (games) {
            for (Scenario s : scenarios)
                cells.push_back(read_cell(campaign_dir, name + "/" + to_string(s),
                                          n_sims, games, nullptr));
        } else {
            cells.push_back(
                read_cell(campaign_dir, name, n_sims, games, &tasks_by_sim));
        }
    }

    const char* value_name = games ? "decision" : "ccei";
    nlohmann::json report{
        {"schema", 1},
        {"campaign",
         {{"case", to_string(case_kind)},
          {"model", model},
          {"n_sims", n_sims},
          {"fingerprint", manifest.value("fingerprint", "")},
          {"baseline", condition_names.front()}}},
        {"options",
         {{"alpha", options.alpha},
          {"t_test", options.t_variant == TTestVariant::pooled ? "pooled" : "welch"},
          {"turing_draws", options.turing_draws},
          {"turing_seed", options.turing_seed}}}};

    auto& summaries = report["conditions"] = nlohmann::json::array();
    for (const auto& cell : cells) summaries.push_back(summary_json(cell, value_name));

    auto& cdf = report["cdf"] = nlohmann::json::array();
    for (const auto& cell : cells)
        if (!cell.values.empty())
            cdf.push_back({{"key", cell.key}, {"points", cdf_json(cell.values)}});

    if (!games) {
        // Discriminatory power of the budget design itself.
        const std::uint64_t seed = mix_seed(
            manifest.value("campaign_seed", 0ull), hash_str("bronars"));
        const auto& rounds = tasks_by_sim.front();
        const auto power = bronars_power(100, rounds, seed);
        std::vector<double> values;
        int passing = 0;
        for (const auto& r : power) {
            values.push_back(r.value);
            if (r.garp_at_one) ++passing;
        }
        report["bronars"] = {{"n_agents", power.size()},
                             {"mean_ccei", mean_of(values)},
                             {"std_ccei", sample_stddev(values)},
                             {"garp_pass_rate",
                              static_cast<double>(passing) / power.size()}};
    }

    // Condition-vs-baseline tests, FDR-corrected as one family.
    if (condition_names.size() >= 2) {
        const auto cell_of = [&](const std::string& key) -> const CellData& {
            for (const auto& c : cells)
                if (c.key == key) return c;
            throw std::logic_error("unknown cell " + key);
        };
        std::vector<std::string> measures;
        if (games)
            for (Scenario s : scenarios) measures.push_back(to_string(s));
        else
            measures.emplace_back("ccei");
        const std::vector<std::string> tested(condition_names.begin() + 1,
                                              condition_names.end());

        PValueGrid grid({model}, measures, tested);
        std::vector<Comparison> comparisons;
        for (const auto& name : tested) {
            if (games) {
                for (Scenario s : scenarios) {
                    const auto& base = cell_of(condition_names.front() + "/" +
                                               to_string(s));
                    const auto& cond = cell_of(name + "/" + to_string(s));
                    comparisons.push_back(compare(cond.key, to_string(s),
                                                  cond.values, base.values,
                                                  options));
                    grid.set_raw(model, to_string(s), name,
                                 comparisons.back().test.p_value);
                }
            } else {
                const auto& base = cell_of(condition_names.front());
                const auto& cond = cell_of(name);
                comparisons.push_back(
                    compare(cond.key, "ccei", cond.values, base.values, options));
                grid.set_raw(model, "ccei", name,
                             comparisons.back().test.p_value);
            }
        }
        grid.adjust();

        auto& comp = report["comparisons"] = nlohmann::json::array();
        for (const auto& c : comparisons) {
            nlohmann::json j = comparison_json(c);
            const std::string cond_name =
                games ? c.key.substr(0, c.key.find('/')) : c.key;
            j["p_adjusted"] = grid.at(model, c.measure, cond_name).adjusted;
            comp.push_back(std::move(j));
        }

        const SensitivityReport sens = sensitivity(grid, options.alpha);
        nlohmann::json by_measure = nlohmann::json::object();
        for (const auto& [measure, lambda] : sens.lambda_by_measure)
            by_measure[measure] = lambda;
        report["sensitivity"] = {{"alpha", sens.alpha},
                                 {"lambda", sens.lambda},
                                 {"lambda_by_measure", std::move(by_measure)},
                                 {"n_tests", comparisons.size()}};
    }

    // Reference-based sections.
    const auto reference =
        games ? load_reference(options.human_games_csv, manifest, "human_games")
              : load_reference(options.human_budget_csv, manifest, "human_budget");
    if (!reference.empty()) {
        auto& turing = report["turing"] = nlohmann::json::array();
        for (const auto& cell : cells) {
            const std::string ref_key =
                games ? to_string(*cell.scenario)
                      : to_string(domain_of(case_kind));
            const auto it = reference.find(ref_key);
            if (it == reference.end() || cell.values.empty()) continue;
            const TuringOutcome outcome =
                turing_test(cell.values, it->second, options.turing_draws,
                            mix_seed(options.turing_seed, hash_str(cell.key)));
            turing.push_back(turing_json(cell.key, outcome));
        }
    }

    if (games) {
        auto& dispersion = report["normalized_std"] = nlohmann::json::array();
        for (const auto& name : condition_names) {
            std::map<Scenario, std::vector<double>> by_scenario;
            bool complete = true;
            for (Scenario s : scenarios) {
                for (const auto& cell : cells)
                    if (cell.key == name + "/" + to_string(s))
                        by_scenario[s] = cell.values;
                if (by_scenario[s].empty()) complete = false;
            }
            nlohmann::json j{{"key", name}};
            if (complete)
                j["value"] = normalized_std(by_scenario, scenarios);
            else
                j["value"] = nullptr;
            dispersion.push_back(std::move(j));
        }
        if (!reference.empty()) {
            std::map<Scenario, std::vector<double>> by_scenario;
            bool complete = true;
            for (Scenario s : scenarios) {
                const auto it = reference.find(to_string(s));
                if (it == reference.end() || it->second.empty()) {
                    complete = false;
                    break;
                }
                by_scenario[s] = it->second;
            }
            if (complete)
                report["normalized_std_human"] =
                    normalized_std(by_scenario, scenarios);
        }
    }

    return report;
}

void write_report_files(const std::filesystem::path& campaign_dir,
                        const nlohmann::json& report) {
    const auto dir = campaign_dir / "analysis";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "report.json");
        out << report.dump(2) << '\n';
    }

    for (const auto& entry : report.value("cdf", nlohmann::json::array())) {
        std::string name = entry.at("key").get<std::string>();
        std::replace(name.begin(), name.end(), '/', '_');
        std::ofstream out(dir / ("cdf_" + name + ".csv"));
        out << "value,cumulative_fraction\n";
        for (const auto& point : entry.at("points"))
            out << fmt(point[0].get<double>(), "%.12g") << ','
                << fmt(point[1].get<double>(), "%.12g") << '\n';
    }

    const bool games = report.at("campaign").at("case") == "games";
    const char* value_name = games ? "decision" : "ccei";
    std::ostringstream md;
    md << "# Campaign analysis\n\n";
    md << "Case: " << report["campaign"]["case"].get<std::string>()
       << "; model: " << report["campaign"]["model"].get<std::string>()
       << "; simulations per cell: " << report["campaign"]["n_sims"].get<int>()
       << "; baseline: " << report["campaign"]["baseline"].get<std::string>()
       << ".\n";

    md << "\n## Condition summaries\n\n";
    md << "| cell | sims | completed | mean " << value_name
       << " | std | invalid rate |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& s : report.at("conditions")) {
        const auto& v = s.at(value_name);
        md << "| " << s["key"].get<std::string>() << " | " << s["n_sims"].get<int>()
           << " | " << s["n_completed"].get<int>() << " | "
           << (v.contains("mean") ? fmt(v["mean"].get<double>()) : "-") << " | "
           << (v.contains("std") ? fmt(v["std"].get<double>()) : "-") << " | "
           << fmt(s["invalid"]["rate"].get<double>()) << " |\n";
    }

    md << "\n## Invalid responses\n\n";
    md << "| cell | assistant turns | refusal | format | constraint | transport |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& s : report.at("conditions"))
        md << "| " << s["key"].get<std::string>() << " | "
           << s["assistant_turns"].get<int>() << " | "
           << s["invalid"]["refusal"].get<int>() << " | "
           << s["invalid"]["format"].get<int>() << " | "
           << s["invalid"]["constraint"].get<int>() << " | "
           << s["invalid"]["transport_error"].get<int>() << " |\n";

    if (report.contains("bronars")) {
        const auto& b = report["bronars"];
        md << "\n## Task discriminatory power\n\n"
           << "Random agents (n = " << b["n_agents"].get<std::size_t>()
           << ") on these budgets: mean CCEI " << fmt(b["mean_ccei"].get<double>())
           << " (std " << fmt(b["std_ccei"].get<double>()) << "), GARP pass rate "
           << fmt(b["garp_pass_rate"].get<double>()) << ".\n";
    }

    if (report.contains("comparisons")) {
        md << "\n## Baseline comparisons\n\n";
        md << "| cell | measure | diff | 95% CI | t | p (raw) | p (adj) |\n";
        md << "|---|---|---|---|---|---|---|\n";
        for (const auto& c : report["comparisons"])
            md << "| " << c["key"].get<std::string>() << " | "
               << c["measure"].get<std::string>() << " | "
               << fmt(c["diff"].get<double>()) << " | ["
               << fmt(c["ci_low"].get<double>()) << ", "
               << fmt(c["ci_high"].get<double>()) << "] | "
               << fmt(c["t"].get<double>(), "%.3f") << " | "
               << fmt(c["p_raw"].get<double>(), "%.4g") << " | "
               << fmt(c["p_adjusted"].get<double>(), "%.4g") << " |\n";
    }

    if (report.contains("sensitivity")) {
        const auto& s = report["sensitivity"];
        md << "\n## Prompt sensitivity\n\n"
           << "lambda = " << fmt(s["lambda"].get<double>() * 100.0, "%.1f")
           << "% of " << s["n_tests"].get<std::size_t>()
           << " adjusted tests significant at alpha = "
           << fmt(s["alpha"].get<double>(), "%.2f") << ".\n";
        if (s["lambda_by_measure"].size() > 1) {
            md << "\n| measure | lambda |\n|---|---|\n";
            for (const auto& [measure, lambda] : s["lambda_by_measure"].items())
                md << "| " << measure << " | "
                   << fmt(lambda.get<double>() * 100.0, "%.1f") << "% |\n";
        }
    }

    if (report.contains("turing")) {
        md << "\n## Turing tests against the human reference\n\n";
        md << "| cell | P(llm more likely) | P(equal) | P(human more likely) | passed |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& t : report["turing"])
            md << "| " << t["key"].get<std::string>() << " | "
               << fmt(t["p_llm_more_likely"].get<double>()) << " | "
               << fmt(t["p_equal"].get<double>()) << " | "
               << fmt(t["p_human_more_likely"].get<double>()) << " | "
               << (t["passed"].get<bool>() ? "yes" : "no") << " |\n";
    }

    if (report.contains("normalized_std")) {
        md << "\n## Cross-scenario dispersion\n\n";
        md << "| condition | normalized std |\n|---|---|\n";
        for (const auto& d : report["normalized_std"])
            md << "| " << d["key"].get<std::string>() << " | "
               << (d["value"].is_null() ? std::string("-")
                                        : fmt(d["value"].get<double>(), "%.3f"))
               << " |\n";
        if (report.contains("normalized_std_human"))
            md << "| human reference | "
               << fmt(report["normalized_std_human"].get<double>(), "%.3f")
               << " |\n";
    }

    std::ofstream out(dir / "report.md");
    out << md.str();
}

}  // namespace econlab
