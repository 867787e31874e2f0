#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "econlab/analysis.hpp"
#include "econlab/campaign.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string campaign_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int parallelism = 0;
    std::string provider;
    std::string mock_policy;
    std::string templates_dir;
};

void add_campaign_options(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* config = cmd->add_option("--config", args.config_path,
                                   "campaign configuration (JSON)");
    if (needs_config) config->required();
    cmd->add_option("--campaign", args.campaign_dir,
                    "campaign directory (overrides the config's output_dir)");
    cmd->add_option("--seed", args.seed, "override the campaign seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--parallelism", args.parallelism,
                    "concurrent simulations");
    cmd->add_option("--provider", args.provider,
                    "named provider from the config's `providers` table");
    cmd->add_option("--mock", args.mock_policy,
                    "run against a scripted agent, e.g. uniform_random or "
                    "cobb_douglas:0.3");
    cmd->add_option("--templates", args.templates_dir,
                    "prompt template directory");
}

econlab::CampaignConfig make_config(const CommonArgs& args) {
    econlab::CampaignOverrides overrides;
    if (args.seed_set) overrides.seed = args.seed;
    if (args.parallelism > 0) overrides.parallelism = args.parallelism;
    if (!args.provider.empty()) overrides.provider_name = args.provider;
    if (!args.mock_policy.empty()) overrides.mock_policy = args.mock_policy;
    if (!args.campaign_dir.empty()) overrides.output_dir = args.campaign_dir;
    return econlab::load_campaign_config(args.config_path, overrides);
}

econlab::TemplateStore make_templates(const CommonArgs& args) {
    if (!args.templates_dir.empty())
        return econlab::TemplateStore(args.templates_dir);
    return econlab::TemplateStore::locate();
}

int cmd_generate(const CommonArgs& args) {
    const auto config = make_config(args);
    const auto templates = make_templates(args);
    econlab::CampaignRunner runner(config, templates);
    runner.generate();
    std::cout << "campaign prepared in " << config.output_dir.string()
              << " (fingerprint " << econlab::config_fingerprint(config)
              << ")\n";
    return 0;
}

int cmd_run(const CommonArgs& args) {
    const auto config = make_config(args);
    const auto templates = make_templates(args);
    econlab::CampaignRunner runner(config, templates);
    const auto results = runner.run();
    std::size_t completed = 0;
    int invalid_turns = 0;
    for (const auto& r : results) {
        if (r.completed) ++completed;
        invalid_turns += r.invalid.total();
    }
    std::cout << results.size() << " simulations (" << completed
              << " completed, " << invalid_turns
              << " invalid assistant turns) in " << config.output_dir.string()
              << "\n";
    if (completed < results.size()) {
        std::cout << "incomplete:\n";
        for (const auto& r : results)
            if (!r.completed) std::cout << "  " << r.simulation_id << "\n";
        return 2;
    }
    return 0;
}

int cmd_analyze(const CommonArgs& args, const econlab::AnalysisOptions& options) {
    const auto report = econlab::analyze_campaign(args.campaign_dir, options);
    econlab::write_report_files(args.campaign_dir, report);
    std::cout << "wrote " << args.campaign_dir << "/analysis/report.{json,md}\n";
    return 0;
}

int cmd_report(const CommonArgs& args) {
    const auto path =
        std::filesystem::path(args.campaign_dir) / "analysis" / "report.json";
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("no analysis at " + path.string() +
                                 "; run `econlab analyze` first");
    const auto report = nlohmann::json::parse(in);
    econlab::write_report_files(args.campaign_dir, report);
    std::cout << "re-rendered " << args.campaign_dir
              << "/analysis/report.md and CDF tables\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "budgetary-rationality and behavioral-game experiment harness"};
    app.require_subcommand(1);

    CommonArgs args;
    econlab::AnalysisOptions analysis;
    bool welch = false;
    std::string budget_reference, games_reference;

    auto* generate = app.add_subcommand(
        "generate", "write the campaign manifest and task files");
    add_campaign_options(generate, args, true);

    auto* run = app.add_subcommand(
        "run", "run every simulation cell (resumes a partial campaign)");
    add_campaign_options(run, args, true);

    auto* analyze =
        app.add_subcommand("analyze", "compute the full analysis for a campaign");
    analyze->add_option("--campaign", args.campaign_dir, "campaign directory")
        ->required();
    analyze->add_option("--alpha", analysis.alpha, "significance level");
    analyze->add_flag("--welch", welch, "Welch t-test instead of pooled");
    analyze->add_option("--turing-draws", analysis.turing_draws,
                        "resampling draws per Turing test");
    analyze->add_option("--turing-seed", analysis.turing_seed,
                        "seed for the Turing resampling");
    analyze->add_option("--budget-reference", budget_reference,
                        "human CCEI reference CSV (domain,value)");
    analyze->add_option("--games-reference", games_reference,
                        "human decision reference CSV (scenario,value)");

    auto* report = app.add_subcommand(
        "report", "re-render markdown and CDF tables from analysis/report.json");
    report->add_option("--campaign", args.campaign_dir, "campaign directory")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(args);
        if (run->parsed()) return cmd_run(args);
        if (analyze->parsed()) {
            if (welch) analysis.t_variant = econlab::TTestVariant::welch;
            if (!budget_reference.empty())
                analysis.human_budget_csv = budget_reference;
            if (!games_reference.empty())
                analysis.human_games_csv = games_reference;
            return cmd_analyze(args, analysis);
        }
        if (report->parsed()) return cmd_report(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
