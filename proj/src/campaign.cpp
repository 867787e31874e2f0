#include "econlab/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "econlab/rng.hpp"

namespace econlab {

namespace {

std::string sim_file_name(int sim_index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sim_%04d.jsonl", sim_index);
    return buf;
}

bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string mock_model_id(const MockSpec& spec) {
    switch (spec.policy) {
        case MockPolicy::corner_maximizer: return "mock:corner_maximizer";
        case MockPolicy::uniform_random: return "mock:uniform_random";
        case MockPolicy::fixed_midpoint: return "mock:fixed_midpoint";
        case MockPolicy::cobb_douglas: return "mock:cobb_douglas";
        case MockPolicy::malformed: return "mock:malformed";
    }
    return "mock";
}

Condition parse_condition(const nlohmann::json& j, CaseKind case_kind) {
    Condition c;
    c.case_kind = case_kind;
    c.name = j.at("name").get<std::string>();
    if (j.contains("persona")) {
        c.persona.kind = persona_from_string(j["persona"].get<std::string>());
        if (c.persona.kind == PersonaKind::occupation) {
            c.persona.occupation_name = j.at("occupation").get<std::string>();
            c.persona.occupation_tasks = j.value("occupation_tasks", "");
        }
    }
    if (j.contains("temperature")) c.temperature = j["temperature"].get<double>();
    c.incentive = j.value("incentive", true);
    c.stake_multiplier = j.value("stake", 1);
    c.include_example = j.value("include_example", true);
    if (j.contains("dialogue"))
        c.dialogue = dialogue_from_string(j["dialogue"].get<std::string>());
    if (j.contains("answer_type"))
        c.answer_type = answer_type_from_string(j["answer_type"].get<std::string>());
    validate(c);
    return c;
}

CampaignProvider parse_provider(const nlohmann::json& j, const std::string& name) {
    CampaignProvider p;
    p.name = name;
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
        p.kind = CampaignProvider::Kind::mock;
        p.mock = mock_spec_from_string(j.value("policy", "uniform_random"));
    } else if (kind == "http") {
        p.kind = CampaignProvider::Kind::http;
        p.http.endpoint_url = j.at("endpoint_url").get<std::string>();
        p.http.model_id = j.at("model_id").get<std::string>();
        if (j.contains("chat_path"))
            p.http.chat_path = j["chat_path"].get<std::string>();
        p.http.temperature =
            j.value("temperature", default_temperature(p.http.model_id));
        p.http.credential_env_var = j.value("credential_env_var", "OPENAI_API_KEY");
        p.http.request_timeout_s = j.value("request_timeout_s", 120.0);
    } else {
        throw std::invalid_argument("unknown provider kind: " + kind);
    }
    return p;
}

}  // namespace

std::string to_string(TaskSharing t) {
    return t == TaskSharing::per_sim ? "per_sim" : "shared";
}

TaskSharing task_sharing_from_string(const std::string& s) {
    if (s == "per_sim") return TaskSharing::per_sim;
    if (s == "shared") return TaskSharing::shared;
    throw std::invalid_argument("unknown task_sharing: " + s);
}

nlohmann::json condition_snapshot(const Condition& c) {
    nlohmann::json j{{"name", c.name},
                     {"case", to_string(c.case_kind)},
                     {"persona", to_string(c.persona.kind)},
                     {"incentive", c.incentive},
                     {"stake", c.stake_multiplier},
                     {"include_example", c.include_example},
                     {"dialogue", to_string(c.dialogue)},
                     {"answer_type", to_string(c.answer_type)}};
    if (c.persona.kind == PersonaKind::occupation) {
        j["occupation"] = c.persona.occupation_name;
        if (!c.persona.occupation_tasks.empty())
            j["occupation_tasks"] = c.persona.occupation_tasks;
    }
    if (c.temperature) j["temperature"] = *c.temperature;
    if (c.scenario) j["scenario"] = to_string(*c.scenario);
    return j;
}

Condition condition_from_snapshot(const nlohmann::json& j) {
    Condition c = parse_condition(j, case_from_string(j.at("case").get<std::string>()));
    if (j.contains("scenario"))
        c.scenario = scenario_from_string(j["scenario"].get<std::string>());
    return c;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path,
                                    const CampaignOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed config " + path.string() + ": " + e.what());
    }

    CampaignConfig cfg;
    cfg.case_kind = case_from_string(j.at("case").get<std::string>());
    cfg.n_sims = j.value("n_sims", 100);
    if (cfg.n_sims < 1) throw std::runtime_error("n_sims must be >= 1");
    cfg.campaign_seed = j.value("campaign_seed", 0ull);
    cfg.output_dir = j.value("output_dir", std::string("campaign"));
    if (j.contains("task_sharing"))
        cfg.task_sharing =
            task_sharing_from_string(j["task_sharing"].get<std::string>());
    if (j.contains("task_gen")) {
        const auto& tg = j["task_gen"];
        cfg.task_gen.return_min = tg.value("return_min", 0.1);
        cfg.task_gen.return_max = tg.value("return_max", 1.0);
        cfg.task_gen.min_ratio = tg.value("min_ratio", 1.0);
    }
    cfg.parallelism = j.value("parallelism", 4);
    if (cfg.parallelism < 1) cfg.parallelism = 1;
    if (j.contains("runtime")) {
        const auto& rt = j["runtime"];
        cfg.runtime.max_retries_per_round = rt.value("max_retries_per_round", 10);
        cfg.runtime.keep_invalid_context =
            rt.value("retry_context", std::string("drop")) == "keep";
        cfg.runtime.transport_retry.max_attempts = rt.value("transport_max_attempts", 5);
        cfg.runtime.transport_retry.initial_delay_s =
            rt.value("transport_initial_delay_s", 0.5);
    }

    if (cfg.case_kind == CaseKind::games) {
        if (j.contains("scenarios"))
            for (const auto& s : j["scenarios"])
                cfg.scenarios.push_back(scenario_from_string(s.get<std::string>()));
        else
            cfg.scenarios = all_scenarios();
    }

    for (const auto& cj : j.value("conditions", nlohmann::json::array()))
        cfg.conditions.push_back(parse_condition(cj, cfg.case_kind));
    if (cfg.conditions.empty())
        throw std::runtime_error("config lists no conditions");
    for (const auto& c : cfg.conditions) {
        if (!safe_name(c.name))
            throw std::runtime_error("condition name not filesystem-safe: " + c.name);
        if (1 < std::count_if(cfg.conditions.begin(), cfg.conditions.end(),
                              [&](const Condition& o) { return o.name == c.name; }))
            throw std::runtime_error("duplicate condition name: " + c.name);
    }

    if (j.contains("providers"))
        for (const auto& [name, pj] : j["providers"].items())
            cfg.providers.emplace(name, parse_provider(pj, name));
    if (j.contains("provider")) {
        if (j["provider"].is_string()) {
            const auto name = j["provider"].get<std::string>();
            if (!cfg.providers.count(name))
                throw std::runtime_error("provider not defined: " + name);
            cfg.provider = cfg.providers.at(name);
        } else {
            cfg.provider = parse_provider(j["provider"], "default");
        }
    } else if (!cfg.providers.empty()) {
        cfg.provider = cfg.providers.begin()->second;
    }

    if (j.contains("reference")) {
        for (const auto& [key, pj] : j["reference"].items()) {
            std::filesystem::path ref = pj.get<std::string>();
            if (ref.is_relative()) ref = path.parent_path() / ref;
            if (!std::filesystem::exists(ref))
                throw std::runtime_error("reference file missing: " + ref.string());
            cfg.reference_paths[key] = ref;
        }
    }

    if (overrides.seed) cfg.campaign_seed = *overrides.seed;
    if (overrides.parallelism) cfg.parallelism = std::max(1, *overrides.parallelism);
    if (overrides.provider_name) {
        if (!cfg.providers.count(*overrides.provider_name))
            throw std::runtime_error("provider not defined: " + *overrides.provider_name);
        cfg.provider = cfg.providers.at(*overrides.provider_name);
    }
    if (overrides.mock_policy) {
        cfg.provider.kind = CampaignProvider::Kind::mock;
        cfg.provider.name = "mock-override";
        cfg.provider.mock = mock_spec_from_string(*overrides.mock_policy);
    }
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    return cfg;
}

std::string config_fingerprint(const CampaignConfig& config) {
    nlohmann::json j{{"case", to_string(config.case_kind)},
                     {"seed", config.campaign_seed},
                     {"n_sims", config.n_sims},
                     {"task_sharing", to_string(config.task_sharing)},
                     {"task_gen",
                      {{"return_min", config.task_gen.return_min},
                       {"return_max", config.task_gen.return_max},
                       {"min_ratio", config.task_gen.min_ratio}}},
                     {"max_retries", config.runtime.max_retries_per_round},
                     {"keep_invalid_context", config.runtime.keep_invalid_context}};
    auto& conds = j["conditions"] = nlohmann::json::array();
    for (const auto& c : config.conditions) conds.push_back(condition_snapshot(c));
    auto& scens = j["scenarios"] = nlohmann::json::array();
    for (Scenario s : config.scenarios) scens.push_back(to_string(s));
    j["model"] = config.provider.kind == CampaignProvider::Kind::mock
                     ? mock_model_id(config.provider.mock)
                     : config.provider.http.model_id;
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_str(j.dump())));
    return buf;
}

CampaignRunner::CampaignRunner(CampaignConfig config, const TemplateStore& templates)
    : config_(std::move(config)), templates_(&templates) {}

std::vector<BudgetRound> CampaignRunner::rounds_for_sim(int sim_index) const {
    if (config_.case_kind == CaseKind::games) return {};
    const auto tasks = config_.output_dir / "tasks";
    const auto file = config_.task_sharing == TaskSharing::shared
                          ? tasks / "shared.jsonl"
                          : tasks / sim_file_name(sim_index);
    return read_rounds_jsonl(file);
}

std::filesystem::path CampaignRunner::transcript_path(
    const Condition& c, std::optional<Scenario> scenario, int sim_index) const {
    auto dir = config_.output_dir / "transcripts" / c.name;
    if (scenario) dir /= to_string(*scenario);
    return dir / sim_file_name(sim_index);
}

std::uint64_t CampaignRunner::sim_seed(const Condition& c,
                                       std::optional<Scenario> scenario,
                                       int sim_index) const {
    std::string key = c.name;
    if (scenario) key += "/" + to_string(*scenario);
    return mix_seed(mix_seed(config_.campaign_seed, hash_str(key)),
                    static_cast<std::uint64_t>(sim_index));
}

void CampaignRunner::generate() {
    std::filesystem::create_directories(config_.output_dir / "tasks");
    std::filesystem::create_directories(config_.output_dir / "transcripts");

    const std::string fingerprint = config_fingerprint(config_);
    const auto manifest_path = config_.output_dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        const auto existing = read_manifest(config_.output_dir);
        const auto recorded = existing.value("fingerprint", "");
        if (recorded != fingerprint)
            throw std::runtime_error(
                "campaign directory was generated from a different config "
                "(fingerprint " + recorded + " != " + fingerprint + ")");
    } else {
        nlohmann::json manifest{{"schema", 1},
                                {"case", to_string(config_.case_kind)},
                                {"fingerprint", fingerprint},
                                {"campaign_seed", config_.campaign_seed},
                                {"n_sims", config_.n_sims},
                                {"task_sharing", to_string(config_.task_sharing)},
                                {"created", iso8601_now()}};
        manifest["model"] = config_.provider.kind == CampaignProvider::Kind::mock
                                ? mock_model_id(config_.provider.mock)
                                : config_.provider.http.model_id;
        auto& conds = manifest["conditions"] = nlohmann::json::array();
        for (const auto& c : config_.conditions)
            conds.push_back(condition_snapshot(c));
        auto& scens = manifest["scenarios"] = nlohmann::json::array();
        for (Scenario s : config_.scenarios) scens.push_back(to_string(s));
        auto& refs = manifest["reference"] = nlohmann::json::object();
        for (const auto& [key, ref] : config_.reference_paths)
            refs[key] = std::filesystem::absolute(ref).string();
        std::ofstream out(manifest_path);
        out << manifest.dump(2) << '\n';
    }

    if (config_.case_kind == CaseKind::games) return;
    const Domain domain = domain_of(config_.case_kind);
    const auto write_tasks = [&](const std::filesystem::path& file,
                                 std::uint64_t tag) {
        if (std::filesystem::exists(file)) return;  // resume keeps prior draws
        TaskGenConfig gen = config_.task_gen;
        gen.seed = mix_seed(config_.campaign_seed, hash_str("tasks"), tag);
        write_rounds_jsonl(file, generate_rounds(domain, gen));
    };
    if (config_.task_sharing == TaskSharing::shared) {
        write_tasks(config_.output_dir / "tasks" / "shared.jsonl", 0);
    } else {
        for (int i = 1; i <= config_.n_sims; ++i)
            write_tasks(config_.output_dir / "tasks" / sim_file_name(i),
                        static_cast<std::uint64_t>(i));
    }
}

std::vector<CampaignRunner::Cell> CampaignRunner::cells() const {
    std::vector<Cell> out;
    for (const auto& c : config_.conditions) {
        if (config_.case_kind == CaseKind::games) {
            for (Scenario s : config_.scenarios)
                for (int i = 1; i <= config_.n_sims; ++i) out.push_back({&c, s, i});
        } else {
            for (int i = 1; i <= config_.n_sims; ++i)
                out.push_back({&c, std::nullopt, i});
        }
    }
    return out;
}

std::unique_ptr<ChatClient> CampaignRunner::make_client(std::uint64_t seed,
                                                        double temperature) const {
    if (config_.provider.kind == CampaignProvider::Kind::mock)
        return std::make_unique<ScriptedAgent>(config_.provider.mock, seed);
    ProviderConfig http = config_.provider.http;
    http.temperature = temperature;
    http.request_seed = seed;
    return std::make_unique<HttpChatClient>(http);
}

SimulationResult CampaignRunner::run_cell(const Cell& cell) {
    Condition condition = *cell.condition;
    condition.scenario = cell.scenario;

    const std::uint64_t seed = sim_seed(condition, cell.scenario, cell.sim_index);
    const double temperature = condition.temperature.value_or(
        config_.provider.kind == CampaignProvider::Kind::http
            ? config_.provider.http.temperature
            : 1.0);
    const auto client = make_client(seed, temperature);

    SimulationSpec spec;
    spec.condition = condition;
    if (config_.case_kind != CaseKind::games)
        spec.rounds = rounds_for_sim(cell.sim_index);
    spec.simulation_id = condition.name +
                         (cell.scenario ? "/" + to_string(*cell.scenario) : "") +
                         "/" + sim_file_name(cell.sim_index);
    spec.model_id = config_.provider.kind == CampaignProvider::Kind::mock
                        ? mock_model_id(config_.provider.mock)
                        : config_.provider.http.model_id;
    spec.seed = seed;

    TranscriptWriter sink(transcript_path(condition, cell.scenario, cell.sim_index),
                          spec.simulation_id, condition_snapshot(condition),
                          spec.model_id, seed);
    PromptRenderer renderer(*templates_);
    return run_simulation(renderer, spec, *client, config_.runtime, &sink);
}

std::vector<SimulationResult> CampaignRunner::run() {
    generate();
    const std::vector<Cell> all = cells();
    std::vector<SimulationResult> results(all.size());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= all.size()) return;
            {
                std::lock_guard lock(error_mutex);
                if (first_error) return;
            }
            try {
                const auto path = transcript_path(*all[i].condition,
                                                  all[i].scenario, all[i].sim_index);
                if (auto persisted = read_result(path)) {
                    results[i] = std::move(*persisted);
                } else {
                    results[i] = run_cell(all[i]);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const int threads = std::min<int>(config_.parallelism,
                                      static_cast<int>(all.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

nlohmann::json read_manifest(const std::filesystem::path& campaign_dir) {
    std::ifstream in(campaign_dir / "manifest.json");
    if (!in)
        throw std::runtime_error("missing manifest in " + campaign_dir.string());
    return nlohmann::json::parse(in);
}

std::map<std::string, std::vector<SimulationResult>>
load_campaign_results(const std::filesystem::path& campaign_dir) {
    const auto manifest = read_manifest(campaign_dir);
    const int n_sims = manifest.at("n_sims").get<int>();
    std::map<std::string, std::vector<SimulationResult>> out;
    for (const auto& cond : manifest.at("conditions")) {
        const auto name = cond.at("name").get<std::string>();
        std::vector<std::string> keys;
        if (manifest.at("case").get<std::string>() == "games") {
            for (const auto& s : manifest.at("scenarios"))
                keys.push_back(name + "/" + s.get<std::string>());
        } else {
            keys.push_back(name);
        }
        for (const auto& key : keys) {
            auto& bucket = out[key];
            for (int i = 1; i <= n_sims; ++i) {
                const auto path =
                    campaign_dir / "transcripts" / key / sim_file_name(i);
                if (auto result = read_result(path))
                    bucket.push_back(std::move(*result));
            }
        }
    }
    return out;
}

}  // namespace econlab
