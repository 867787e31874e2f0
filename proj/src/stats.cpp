#include "econlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "econlab/rng.hpp"

namespace econlab {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

namespace {

double sum_sq_dev(std::span<const double> xs, double mean) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss;
}

}  // namespace

double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample stddev needs n >= 2");
    return std::sqrt(sum_sq_dev(xs, mean_of(xs)) / (xs.size() - 1));
}

double population_stddev(std::span<const double> xs) {
    return std::sqrt(sum_sq_dev(xs, mean_of(xs)) / xs.size());
}

TTestResult t_test(std::span<const double> a, std::span<const double> b,
                   TTestVariant variant) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("t test needs n >= 2 per group");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    TTestResult r;
    r.variant = variant;
    r.mean_a = mean_of(a);
    r.mean_b = mean_of(b);
    const double va = sum_sq_dev(a, r.mean_a) / (na - 1);
    const double vb = sum_sq_dev(b, r.mean_b) / (nb - 1);

    if (variant == TTestVariant::pooled) {
        const double pooled =
            ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2);
        r.std_error = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        r.degrees_of_freedom = na + nb - 2;
    } else {
        r.std_error = std::sqrt(va / na + vb / nb);
        if (r.std_error > 0.0) {
            const double qa = va / na, qb = vb / nb;
            r.degrees_of_freedom =
                (qa + qb) * (qa + qb) /
                (qa * qa / (na - 1) + qb * qb / (nb - 1));
        } else {
            r.degrees_of_freedom = na + nb - 2;
        }
    }

    if (r.std_error == 0.0) {
        r.detail = "zero variance in both groups";
        r.t_statistic = 0.0;
        r.p_value = r.mean_a == r.mean_b ? 1.0 : 0.0;
        return r;
    }

    r.t_statistic = (r.mean_a - r.mean_b) / r.std_error;
    const boost::math::students_t dist(r.degrees_of_freedom);
    r.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(r.t_statistic));
    return r;
}

double proportion_test(int successes_a, int n_a, int successes_b, int n_b) {
    if (n_a < 1 || n_b < 1) throw std::invalid_argument("empty group");
    if (successes_a < 0 || successes_a > n_a || successes_b < 0 ||
        successes_b > n_b)
        throw std::invalid_argument("success count out of range");
    const double pa = static_cast<double>(successes_a) / n_a;
    const double pb = static_cast<double>(successes_b) / n_b;
    const double pooled =
        static_cast<double>(successes_a + successes_b) / (n_a + n_b);
    const double se =
        std::sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b));
    if (se == 0.0) return 1.0;  // all successes or all failures overall
    const double z = (pa - pb) / se;
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

std::vector<double> fdr_adjust(const std::vector<double>& raw_p) {
    const std::size_t m = raw_p.size();
    for (double p : raw_p)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("p value outside [0, 1]");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return raw_p[i] < raw_p[j]; });

    std::vector<double> adjusted(m);
    double running_min = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double scaled = raw_p[order[k]] * m / (k + 1);
        running_min = std::min(running_min, scaled);
        adjusted[order[k]] = running_min;
    }
    return adjusted;
}

PValueGrid::PValueGrid(std::vector<std::string> models,
                       std::vector<std::string> measures,
                       std::vector<std::string> conditions)
    : models_(std::move(models)),
      measures_(std::move(measures)),
      conditions_(std::move(conditions)) {
    if (models_.empty() || measures_.empty() || conditions_.empty())
        throw std::invalid_argument("grid axes must be non-empty");
    cells_.resize(models_.size() * measures_.size() * conditions_.size());
    set_.assign(cells_.size(), false);
}

std::size_t PValueGrid::index(const std::string& model,
                              const std::string& measure,
                              const std::string& condition) const {
    const auto find = [](const std::vector<std::string>& axis,
                         const std::string& key) {
        const auto it = std::find(axis.begin(), axis.end(), key);
        if (it == axis.end())
            throw std::out_of_range("unknown grid key: " + key);
        return static_cast<std::size_t>(it - axis.begin());
    };
    return (find(models_, model) * measures_.size() + find(measures_, measure)) *
               conditions_.size() +
           find(conditions_, condition);
}

void PValueGrid::set_raw(const std::string& model, const std::string& measure,
                         const std::string& condition, double raw_p) {
    const std::size_t i = index(model, measure, condition);
    cells_[i].raw = raw_p;
    set_[i] = true;
    adjusted_ = false;
}

void PValueGrid::adjust() {
    if (!complete())
        throw std::logic_error("grid has unset cells; cannot adjust");
    std::vector<double> raw(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) raw[i] = cells_[i].raw;
    const auto adj = fdr_adjust(raw);
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i].adjusted = adj[i];
    adjusted_ = true;
}

const PValueCell& PValueGrid::at(const std::string& model,
                                 const std::string& measure,
                                 const std::string& condition) const {
    return cells_[index(model, measure, condition)];
}

bool PValueGrid::complete() const {
    return std::all_of(set_.begin(), set_.end(), [](bool b) { return b; });
}

SensitivityReport sensitivity(const PValueGrid& grid, double alpha) {
    SensitivityReport report;
    report.alpha = alpha;
    if (!grid.complete())
        throw std::logic_error("grid has unset cells; cannot score sensitivity");

    std::size_t significant = 0, total = 0;
    for (const auto& measure : grid.measures()) {
        std::size_t m_sig = 0, m_total = 0;
        for (const auto& model : grid.models())
            for (const auto& cond : grid.conditions()) {
                ++m_total;
                if (grid.at(model, measure, cond).adjusted < alpha) ++m_sig;
            }
        report.lambda_by_measure[measure] =
            static_cast<double>(m_sig) / m_total;
        significant += m_sig;
        total += m_total;
    }
    report.lambda = static_cast<double>(significant) / total;
    return report;
}

TuringOutcome turing_test(std::span<const double> llm,
                          std::span<const double> human, int n_draws,
                          std::uint64_t seed, int round_decimals) {
    if (llm.empty() || human.empty())
        throw std::invalid_argument("turing test needs non-empty samples");
    if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");

    const double scale = std::pow(10.0, round_decimals);
    const auto key = [&](double v) { return std::llround(v * scale); };

    std::map<long long, int> human_freq;
    for (double v : human) ++human_freq[key(v)];
    const auto freq = [&](long long k) {
        const auto it = human_freq.find(k);
        return it == human_freq.end() ? 0 : it->second;
    };

    TuringOutcome out;
    out.n_draws = n_draws;
    int llm_more = 0, equal = 0, human_more = 0;
    for (int d = 0; d < n_draws; ++d) {
        std::mt19937_64 gen(mix_seed(seed, static_cast<std::uint64_t>(d)));
        const double lv = llm[uniform_index(gen, llm.size())];
        const double hv = human[uniform_index(gen, human.size())];
        const int fl = freq(key(lv));
        const int fh = freq(key(hv));
        if (fl > fh)
            ++llm_more;
        else if (fl == fh)
            ++equal;
        else
            ++human_more;
    }
    out.p_llm_more_likely = static_cast<double>(llm_more) / n_draws;
    out.p_equal = static_cast<double>(equal) / n_draws;
    out.p_human_more_likely = static_cast<double>(human_more) / n_draws;
    out.passed = out.p_llm_more_likely + out.p_equal > 0.5;
    return out;
}

double normalized_std(const std::map<Scenario, std::vector<double>>& by_scenario,
                      const std::vector<Scenario>& scenarios) {
    if (scenarios.empty()) throw std::invalid_argument("no scenarios");
    double sum = 0.0;
    for (Scenario s : scenarios) {
        const auto it = by_scenario.find(s);
        if (it == by_scenario.end() || it->second.empty())
            throw std::invalid_argument("missing decisions for scenario " +
                                        to_string(s));
        sum += population_stddev(it->second) / scenario_spec(s).interval_length;
    }
    return sum / scenarios.size();
}

}  // namespace econlab
