// Acceptance gate: one self-contained check per release criterion, printed as
// a single [PASS]/[FAIL] line each. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "econlab/analysis.hpp"
#include "econlab/budget_tasks.hpp"
#include "econlab/campaign.hpp"
#include "econlab/chat_client.hpp"
#include "econlab/choice_data.hpp"
#include "econlab/games.hpp"
#include "econlab/mock_agents.hpp"
#include "econlab/parsing.hpp"
#include "econlab/prompts.hpp"
#include "econlab/revealed_pref.hpp"
#include "econlab/rng.hpp"
#include "econlab/simulation.hpp"
#include "econlab/stats.hpp"
#include "econlab/transcript.hpp"

using namespace econlab;

namespace {

void require(bool condition, const std::string& what) {
    if (!condition) throw std::runtime_error(what);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "cannot open " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

// Golden files carry one trailing newline that the renderer output does not.
std::string golden(const std::string& name) {
    std::string text = read_file(std::filesystem::path(ECONLAB_GOLDEN_DIR) / name);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

const TemplateStore& templates() {
    static TemplateStore store{std::filesystem::path(ECONLAB_TEMPLATE_DIR)};
    return store;
}

RuntimeOptions fast_runtime() {
    RuntimeOptions options;
    options.max_retries_per_round = 2;
    options.transport_retry = {2, 0.001, false};
    return options;
}

// Runs one budget simulation with a scripted agent and scores the allocations.
CceiResult pipeline_ccei(const std::vector<BudgetRound>& rounds, const MockSpec& spec,
                         std::uint64_t agent_seed, std::uint64_t sim_seed) {
    const PromptRenderer renderer(templates());
    SimulationSpec sim;
    sim.condition = Condition{};
    sim.rounds = rounds;
    sim.simulation_id = "acceptance";
    sim.model_id = "mock";
    sim.seed = sim_seed;
    ScriptedAgent agent(spec, agent_seed);
    const SimulationResult result =
        run_simulation(renderer, sim, agent, fast_runtime());
    require(result.completed, "scripted simulation did not complete");
    require(result.allocations.size() == rounds.size(),
            "unexpected allocation count");
    ChoiceDataset data;
    for (std::size_t i = 0; i < rounds.size(); ++i)
        data.observations.push_back(to_observation(rounds[i], result.allocations[i]));
    return ccei(data);
}

std::vector<double> ccei_values(const std::vector<CceiResult>& results) {
    std::vector<double> values;
    values.reserve(results.size());
    for (const auto& r : results) values.push_back(r.value);
    return values;
}

// Reference Benjamini-Hochberg: sort ascending, take suffix minima of
// min(1, m * p / rank), and map the values back to the input order.
std::vector<double> brute_force_bh(const std::vector<double>& raw) {
    const std::size_t m = raw.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    std::vector<double> adjusted(m, 0.0);
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double stepped =
            std::min(1.0, raw[order[k]] * static_cast<double>(m) /
                              static_cast<double>(k + 1));
        running = std::min(running, stepped);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

struct FixtureLabel {
    std::string file, parser, group, answer_type, status, value_a, value_b;
};

std::vector<FixtureLabel> load_fixture_labels() {
    const auto path = std::filesystem::path(ECONLAB_FIXTURE_DIR) / "labels.csv";
    std::ifstream in(path);
    require(in.good(), "missing " + path.string());
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "empty labels.csv");
    require(line == "file,parser,group,answer_type,status,value_a,value_b",
            "unexpected labels.csv header");
    std::vector<FixtureLabel> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream split(line);
        while (std::getline(split, field, ',')) fields.push_back(field);
        while (fields.size() < 7) fields.emplace_back();
        labels.push_back(
            {fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], fields[6]});
    }
    return labels;
}

std::string join_results(const std::vector<SimulationResult>& results) {
    std::string out;
    for (const auto& r : results) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

CampaignConfig determinism_config(const std::filesystem::path& dir, int parallelism) {
    CampaignConfig config;
    config.case_kind = CaseKind::risk;
    config.conditions = {Condition{}};
    config.n_sims = 4;
    config.campaign_seed = 424242;
    config.output_dir = dir;
    config.task_gen = {0.1, 1.0, 1.0, 0};
    config.provider.kind = CampaignProvider::Kind::mock;
    config.provider.mock = mock_spec_from_string("uniform_random");
    config.runtime = fast_runtime();
    config.parallelism = parallelism;
    return config;
}

// ---------------------------------------------------------------------------

// 1. Exact CCEI on the worked dataset; enumeration agrees with bisection.
void check_ccei_exactness() {
    const Stopwatch clock;
    ChoiceDataset worked;
    worked.observations.push_back({{2.0, 1.0}, {2.0, 1.0}});
    worked.observations.push_back({{1.0, 2.0}, {1.0, 2.0}});
    const CceiResult r = ccei(worked);
    require(r.value == 0.8, "worked dataset CCEI is not exactly 0.8");
    require(!r.garp_at_one, "worked dataset should violate GARP at full efficiency");
    require(r.violation.has_value(), "violating pair not reported");

    std::mt19937_64 rng(mix_seed(2026, hash_str("ccei-agreement")));
    int violating = 0, rational = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ChoiceDataset data;
        for (int i = 0; i < 5; ++i) {
            Observation obs;
            for (int g = 0; g < 2; ++g) obs.prices.push_back(uniform_range(rng, 0.1, 2.0));
            for (int g = 0; g < 2; ++g)
                obs.quantities.push_back(uniform_range(rng, 0.1, 10.0));
            data.observations.push_back(obs);
        }
        const double exact = ccei(data).value;
        const double bisected = ccei_bisect(data, 1e-8);
        require(std::abs(exact - bisected) <= 1e-6,
                "enumeration and bisection disagree beyond 1e-6");
        (exact < 1.0 ? violating : rational) += 1;
    }
    require(violating > 0 && rational > 0,
            "random datasets did not exercise both outcomes");
    require(clock.seconds() < 10.0, "exceeded the 10 s budget");
}

// 2. Rationalizable scripted agents always come out fully consistent.
void check_rationalizability() {
    MockSpec cobb;
    cobb.policy = MockPolicy::cobb_douglas;
    cobb.share = 0.4;
    MockSpec corner;
    corner.policy = MockPolicy::corner_maximizer;

    const MockSpec agents[] = {cobb, corner};
    for (int which = 0; which < 2; ++which) {
        for (int sim = 1; sim <= 100; ++sim) {
            TaskGenConfig task_gen;
            task_gen.seed = mix_seed(9001, static_cast<std::uint64_t>(which), sim);
            const auto rounds = generate_rounds(Domain::risk, task_gen);
            const CceiResult r = pipeline_ccei(rounds, agents[which],
                                               mix_seed(77, which, sim), sim);
            require(r.value == 1.0 && r.garp_at_one,
                    "rational agent scored below 1.0 in simulation " +
                        std::to_string(sim));
        }
    }
}

// 3. The random-choice benchmark has real statistical power.
void check_random_choice_power() {
    const Stopwatch clock;
    TaskGenConfig task_gen;
    task_gen.seed = 20240315;
    const auto rounds = generate_rounds(Domain::risk, task_gen);
    const auto values = ccei_values(bronars_power(100, rounds, 97531));
    require(values.size() == 100, "expected 100 random agents");
    const double mean = mean_of(values);
    require(mean < 0.95, "mean random-agent CCEI not below 0.95");
    const std::vector<double> degenerate(values.size(), 1.0);
    const TTestResult t = t_test(values, degenerate, TTestVariant::pooled);
    require(t.p_value < 0.01, "t test against the rational sample not significant");
    require(clock.seconds() < 30.0, "exceeded the 30 s budget");
}

// 4. The full prompt -> chat -> parse -> score pipeline reproduces the direct
//    random-choice distribution.
void check_pipeline_equivalence() {
    int rejections = 0;
    for (int k = 1; k <= 10; ++k) {
        TaskGenConfig task_gen;
        task_gen.seed = mix_seed(5000, k);
        const auto rounds = generate_rounds(Domain::risk, task_gen);

        const auto direct = ccei_values(bronars_power(40, rounds, mix_seed(6000, k)));

        MockSpec uniform;
        uniform.policy = MockPolicy::uniform_random;
        std::vector<double> piped;
        for (int sim = 1; sim <= 40; ++sim)
            piped.push_back(
                pipeline_ccei(rounds, uniform, mix_seed(7000, k, sim), sim).value);

        const TTestResult t = t_test(direct, piped, TTestVariant::pooled);
        if (t.p_value <= 0.05) ++rejections;
    }
    require(rejections <= 1, "distributions differed in " +
                                 std::to_string(rejections) + " of 10 seeds");
}

// 5. Baseline prompt renderings are byte-identical to the golden files.
void check_prompt_fidelity() {
    const PromptRenderer renderer(templates());
    const BudgetRound example_risk{Domain::risk, 1, 0.8, 0.2, 100.0};
    const BudgetRound example_social{Domain::social, 1, 0.8, 0.2, 100.0};

    Condition risk;
    risk.case_kind = CaseKind::risk;
    require(renderer.render_system(risk) == golden("risk_system.txt"),
            "risk system message drifted");
    require(renderer.render_round_user(risk, example_risk, true) ==
                golden("risk_round1_user.txt"),
            "risk first-round message drifted");
    require(renderer.render_round_user(risk, example_risk, false) ==
                golden("risk_round2_user.txt"),
            "risk follow-up round message drifted");

    Condition social;
    social.case_kind = CaseKind::social;
    require(renderer.render_system(social) == golden("social_system.txt"),
            "social system message drifted");
    require(renderer.render_round_user(social, example_social, true) ==
                golden("social_round1_user.txt"),
            "social first-round message drifted");
    require(renderer.render_round_user(social, example_social, false) ==
                golden("social_round2_user.txt"),
            "social follow-up round message drifted");

    Condition games;
    games.case_kind = CaseKind::games;
    for (Scenario s : all_scenarios()) {
        const RenderedPrompt prompt = renderer.render_game(games, s);
        require(prompt.system == golden("games_system.txt"),
                "games system message drifted");
        require(prompt.user_turns.size() == 2, "game conversation shape changed");
        require(prompt.user_turns[0] == golden("games_opener.txt"),
                "games opener drifted");
        require(prompt.user_turns[1] == golden("game_" + to_string(s) + "_user.txt"),
                to_string(s) + " scenario message drifted");
    }
}

// 6. Every labeled completion fixture classifies exactly as annotated.
void check_parser_taxonomy() {
    const auto labels = load_fixture_labels();
    require(!labels.empty(), "empty fixture corpus");
    std::map<std::string, std::set<std::string>> seen;
    for (const auto& label : labels) {
        const std::string text =
            read_file(std::filesystem::path(ECONLAB_FIXTURE_DIR) / label.file);
        std::string got;
        if (label.parser == "json") {
            const auto outcomes = extract_json_allocation(
                text, answer_fields(domain_from_string(label.group)), 1);
            require(outcomes.size() == 1, label.file + ": expected one outcome");
            got = to_string(outcomes.front().status);
            if (label.status == "valid") {
                require(outcomes.front().allocation.has_value(),
                        label.file + ": valid reply lost its allocation");
                require(std::abs(outcomes.front().allocation->points_a -
                                 std::stod(label.value_a)) <= 1e-9,
                        label.file + ": wrong extracted points");
            }
        } else {
            const auto spec = scenario_spec(scenario_from_string(label.group));
            const auto outcome = extract_bracket_value(
                text, spec, answer_type_from_string(label.answer_type));
            got = to_string(outcome.status);
            if (label.status == "valid") {
                require(outcome.game.has_value(),
                        label.file + ": valid reply lost its decision");
                require(outcome.game->value == std::stod(label.value_a),
                        label.file + ": wrong extracted decision");
            }
        }
        require(got == label.status,
                label.file + ": classified " + got + ", labeled " + label.status);
        seen[label.parser].insert(label.status);
    }
    for (const char* parser : {"json", "bracket"})
        for (const char* status : {"valid", "refusal", "format", "constraint"})
            require(seen[parser].count(status) == 1,
                    std::string(parser) + " corpus missing status " + status);
}

// 7. The FDR adjustment equals a brute-force reimplementation.
void check_fdr_adjustment() {
    const std::vector<double> quad = fdr_adjust({0.01, 0.02, 0.03, 0.04});
    for (double v : quad)
        require(v == 0.04, "ascending-quadruple case is not exactly 0.04");

    std::mt19937_64 rng(mix_seed(2026, hash_str("fdr")));
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 12);
        std::vector<double> raw(n);
        for (auto& p : raw) p = uniform01(rng);
        const auto ours = fdr_adjust(raw);
        const auto reference = brute_force_bh(raw);
        for (std::size_t i = 0; i < n; ++i)
            require(std::abs(ours[i] - reference[i]) <= 1e-12,
                    "adjusted p diverges from the brute-force definition");
    }
}

// 8. Sensitivity share on synthetic grids: 6 of 8 significant cells -> 0.75,
//    no significant cells -> 0.
void check_sensitivity_share() {
    const std::vector<std::string> models{"model_a", "model_b"};
    const std::vector<std::string> measures{"measure_1", "measure_2"};
    const std::vector<std::string> conditions{"cond_1", "cond_2"};

    PValueGrid grid(models, measures, conditions);
    for (const auto& model : models)
        for (const auto& measure : measures)
            for (const auto& condition : conditions) {
                const bool insignificant = measure == "measure_2" && condition == "cond_2";
                grid.set_raw(model, measure, condition, insignificant ? 0.9 : 1e-6);
            }
    grid.adjust();
    const SensitivityReport report = sensitivity(grid, 0.05);
    require(report.lambda == 0.75, "6-of-8 grid share is not exactly 0.75");
    require(report.lambda_by_measure.at("measure_1") == 1.0 &&
                report.lambda_by_measure.at("measure_2") == 0.5,
            "per-measure shares wrong");

    PValueGrid quiet(models, measures, conditions);
    for (const auto& model : models)
        for (const auto& measure : measures)
            for (const auto& condition : conditions)
                quiet.set_raw(model, measure, condition, 0.9);
    quiet.adjust();
    require(sensitivity(quiet, 0.05).lambda == 0.0,
            "all-insignificant grid share is not 0");
}

// 9. The resampling comparison is symmetric (and passes) on human-vs-human data.
void check_turing_calibration() {
    const auto reference = read_reference_csv(
        std::filesystem::path(ECONLAB_DATA_DIR) / "human_budget_reference.csv");
    const auto& human = reference.at("risk");
    require(human.size() >= 30, "reference sample unexpectedly small");
    for (int k = 1; k <= 20; ++k) {
        const TuringOutcome outcome =
            turing_test(human, human, 10000, mix_seed(31337, k));
        require(outcome.n_draws == 10000, "draw count not honored");
        const double total =
            outcome.p_llm_more_likely + outcome.p_equal + outcome.p_human_more_likely;
        require(std::abs(total - 1.0) <= 1e-12, "draw proportions do not sum to 1");
        require(std::abs(outcome.p_llm_more_likely - outcome.p_human_more_likely) <=
                    0.03,
                "asymmetric outcome on identical samples (seed " +
                    std::to_string(k) + ")");
        require(outcome.passed, "identical samples failed the comparison");
    }
}

// 10. Normalized dispersion: 0.1 on the hand-computed case, 0.231 on the
//     shipped game reference data.
void check_normalized_dispersion() {
    const std::map<Scenario, std::vector<double>> hand{
        {Scenario::dictator, {40.0, 60.0}},
        {Scenario::public_goods, {8.0, 12.0}},
    };
    const double simple =
        normalized_std(hand, {Scenario::dictator, Scenario::public_goods});
    require(simple == 0.1, "hand-computed case is not exactly 0.1");

    const auto reference = read_reference_csv(
        std::filesystem::path(ECONLAB_DATA_DIR) / "human_games_reference.csv");
    std::map<Scenario, std::vector<double>> by_scenario;
    for (const auto& [name, values] : reference)
        by_scenario[scenario_from_string(name)] = values;
    const double human = normalized_std(by_scenario, all_scenarios());
    require(std::abs(human - 0.231) <= 1e-12,
            "game reference dispersion is not 0.231");
}

// 11. Same config + mock agents -> byte-identical decisions, regardless of
//     parallelism; deleting or tearing transcripts and re-running recovers the
//     same result set.
void check_determinism_and_resume() {
    namespace fs = std::filesystem;
    const fs::path base =
        fs::temp_directory_path() / "econlab_acceptance" /
        std::to_string(
            std::chrono::steady_clock::now().time_since_epoch().count());
    fs::remove_all(base);
    const fs::path dir_a = base / "a";
    const fs::path dir_b = base / "b";

    CampaignRunner runner_a(determinism_config(dir_a, 2), templates());
    runner_a.generate();
    const std::string first = join_results(runner_a.run());

    CampaignRunner runner_b(determinism_config(dir_b, 1), templates());
    runner_b.generate();
    const std::string second = join_results(runner_b.run());
    require(first == second,
            "identical configs produced different decisions across schedules");

    // Simulate a killed run: one transcript gone, one cut mid-record.
    const Condition& condition = runner_a.config().conditions.front();
    fs::remove(runner_a.transcript_path(condition, std::nullopt, 2));
    const fs::path torn = runner_a.transcript_path(condition, std::nullopt, 3);
    std::string body = read_file(torn);
    const auto cut = body.find_last_of('\n', body.size() - 2);
    require(cut != std::string::npos, "transcript too short to tear");
    body.resize(cut + 1);
    body += "{\"type\": \"resu";
    std::ofstream(torn, std::ios::binary | std::ios::trunc) << body;

    CampaignRunner resumed(determinism_config(dir_a, 2), templates());
    resumed.generate();
    const std::string recovered = join_results(resumed.run());
    require(recovered == first, "resume after a kill changed the results");

    fs::remove_all(base);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> body;
    };
    const std::vector<Criterion> criteria{
        {"exact CCEI on the worked dataset, enumeration vs bisection",
         check_ccei_exactness},
        {"rationalizable scripted agents always score CCEI 1.0",
         check_rationalizability},
        {"random-choice benchmark separates from rational scores",
         check_random_choice_power},
        {"end-to-end pipeline matches the direct random-choice distribution",
         check_pipeline_equivalence},
        {"baseline prompt renderings match the golden files byte-for-byte",
         check_prompt_fidelity},
        {"labeled completion corpus classifies 100% correctly",
         check_parser_taxonomy},
        {"FDR adjustment matches the brute-force definition",
         check_fdr_adjustment},
        {"sensitivity share: 6-of-8 grid gives 0.75, quiet grid gives 0",
         check_sensitivity_share},
        {"resampling comparison is symmetric on human-vs-human data",
         check_turing_calibration},
        {"normalized dispersion: hand case 0.1, game reference 0.231",
         check_normalized_dispersion},
        {"campaign determinism across schedules and kill-resume recovery",
         check_determinism_and_resume},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i].body();
            std::printf("[PASS] %2zu. %s\n", i + 1, criteria[i].name);
        } catch (const std::exception& e) {
            std::printf("[FAIL] %2zu. %s: %s\n", i + 1, criteria[i].name, e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
