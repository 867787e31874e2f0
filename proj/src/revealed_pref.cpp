#include "econlab/revealed_pref.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "econlab/rng.hpp"

namespace econlab {

BoolMatrix::BoolMatrix(std::size_t n)
    : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

bool BoolMatrix::get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u;
}

void BoolMatrix::set(std::size_t i, std::size_t j, bool value) {
    std::uint64_t& word = bits_[i * words_ + j / 64];
    const std::uint64_t mask = 1ull << (j % 64);
    if (value)
        word |= mask;
    else
        word &= ~mask;
}

void BoolMatrix::close() {
    for (std::size_t i = 0; i < n_; ++i) set(i, i);
    for (std::size_t k = 0; k < n_; ++k) {
        const std::uint64_t* row_k = &bits_[k * words_];
        for (std::size_t i = 0; i < n_; ++i) {
            if (!get(i, k)) continue;
            std::uint64_t* row_i = &bits_[i * words_];
            for (std::size_t w = 0; w < words_; ++w) row_i[w] |= row_k[w];
        }
    }
}

bool BoolMatrix::intersects_rowwise(const BoolMatrix& other) const {
    return first_rowwise_intersection(other).has_value();
}

std::optional<std::pair<std::size_t, std::size_t>>
BoolMatrix::first_rowwise_intersection(const BoolMatrix& other) const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t w = 0; w < words_; ++w) {
            const std::uint64_t hit = bits_[i * words_ + w] & other.bits_[i * words_ + w];
            if (hit)
                return std::make_pair(i, w * 64 + static_cast<std::size_t>(
                                                      __builtin_ctzll(hit)));
        }
    }
    return std::nullopt;
}

namespace {

// Expenditure ratios R[i][j] = (p_i . x_j) / (p_i . x_i). All level
// comparisons reuse these exact doubles, so evaluating GARP at a breakpoint
// e = R[a][b] has well-defined equality semantics.
struct Ratios {
    std::size_t n = 0;
    std::vector<double> r;  // row-major

    double at(std::size_t i, std::size_t j) const { return r[i * n + j]; }
};

Ratios make_ratios(const ChoiceDataset& data) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("empty choice dataset");
    const std::size_t goods = data.observations.front().prices.size();
    for (const auto& o : data.observations) {
        if (o.prices.size() != goods || o.quantities.size() != goods)
            throw std::invalid_argument("observations differ in goods count");
        bool nonzero = false;
        for (std::size_t g = 0; g < goods; ++g) {
            if (!(o.prices[g] > 0.0))
                throw std::invalid_argument("prices must be positive");
            if (o.quantities[g] < 0.0)
                throw std::invalid_argument("quantities must be non-negative");
            nonzero = nonzero || o.quantities[g] > 0.0;
        }
        if (!nonzero)
            throw std::invalid_argument("zero bundle has no expenditure ratio");
    }
    std::vector<double> spend(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = data.observations[i].prices;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& x = data.observations[j].quantities;
            double e = 0.0;
            for (std::size_t g = 0; g < goods; ++g) e += p[g] * x[g];
            spend[i * n + j] = e;
        }
    }
    Ratios out;
    out.n = n;
    out.r.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.r[i * n + j] = spend[i * n + j] / spend[i * n + i];
    return out;
}

struct GarpCheck {
    bool satisfied = true;
    std::optional<std::pair<std::size_t, std::size_t>> violation;
};

GarpCheck garp_at(const Ratios& ratios, double e) {
    const std::size_t n = ratios.n;
    BoolMatrix weak(n);
    BoolMatrix strict_t(n);  // strict_t[i][j]: x_i strictly affordable at (j, e)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (e >= ratios.at(i, j)) weak.set(i, j);
            if (e > ratios.at(j, i)) strict_t.set(i, j);
        }
    }
    weak.close();
    GarpCheck out;
    out.violation = weak.first_rowwise_intersection(strict_t);
    out.satisfied = !out.violation.has_value();
    return out;
}

}  // namespace

RelationMatrices direct_relations(const ChoiceDataset& data, double e) {
    if (e < 0.0) throw std::invalid_argument("efficiency level must be >= 0");
    const Ratios ratios = make_ratios(data);
    RelationMatrices out;
    out.n = ratios.n;
    out.r0 = BoolMatrix(ratios.n);
    out.p0 = BoolMatrix(ratios.n);
    for (std::size_t i = 0; i < ratios.n; ++i) {
        for (std::size_t j = 0; j < ratios.n; ++j) {
            if (e >= ratios.at(i, j)) out.r0.set(i, j);
            if (e > ratios.at(i, j)) out.p0.set(i, j);
        }
    }
    out.r = out.r0;
    out.r.close();
    return out;
}

bool garp_satisfied(const ChoiceDataset& data, double e) {
    if (e < 0.0) throw std::invalid_argument("efficiency level must be >= 0");
    return garp_at(make_ratios(data), e).satisfied;
}

CceiResult ccei(const ChoiceDataset& data) {
    const Ratios ratios = make_ratios(data);

    CceiResult out;
    const GarpCheck at_one = garp_at(ratios, 1.0);
    out.garp_at_one = at_one.satisfied;
    out.violation = at_one.violation;
    if (at_one.satisfied) {
        out.value = 1.0;
        return out;
    }

    // Candidate levels: every ratio in (0, 1]. GARP(e) is monotone in e and
    // constant between consecutive ratios, so the supremum is a candidate.
    std::vector<double> candidates;
    candidates.reserve(ratios.r.size());
    for (double v : ratios.r)
        if (v > 0.0 && v <= 1.0) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    // Largest satisfied candidate b, with `above` the smallest failing one.
    double above = 1.0;
    for (double b : candidates) {
        if (b == 1.0) continue;  // already failed above
        if (garp_at(ratios, b).satisfied) {
            // GARP can still hold on the open interval (b, above) when the
            // failure at `above` needs the weak edge that appears exactly
            // there; the supremum is then `above` itself.
            const double mid = b + (above - b) / 2.0;
            out.value = garp_at(ratios, mid).satisfied ? above : b;
            return out;
        }
        above = b;
    }
    // All positive candidates failed; GARP still holds below the smallest one.
    const double mid = above / 2.0;
    out.value = garp_at(ratios, mid).satisfied ? above : 0.0;
    return out;
}

double ccei_bisect(const ChoiceDataset& data, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const Ratios ratios = make_ratios(data);
    if (garp_at(ratios, 1.0).satisfied) return 1.0;
    double lo = 0.0, hi = 1.0;  // GARP always holds at 0
    while (hi - lo > tol) {
        const double mid = lo + (hi - lo) / 2.0;
        if (garp_at(ratios, mid).satisfied)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::vector<CceiResult> bronars_power(std::size_t n_agents,
                                      const std::vector<BudgetRound>& rounds,
                                      std::uint64_t seed) {
    if (n_agents > 0 && rounds.empty())
        throw std::invalid_argument("bronars_power needs at least one round");
    std::vector<CceiResult> out;
    out.reserve(n_agents);
    for (std::size_t agent = 0; agent < n_agents; ++agent) {
        std::mt19937_64 rng(mix_seed(seed, agent));
        ChoiceDataset data;
        data.observations.reserve(rounds.size());
        for (const auto& round : rounds) {
            const double points_a = uniform01(rng) * round.endowment;
            data.observations.push_back(
                to_observation(round, {points_a, round.endowment - points_a}));
        }
        out.push_back(ccei(data));
    }
    return out;
}

}  // namespace econlab
