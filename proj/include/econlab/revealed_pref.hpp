#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "econlab/budget_tasks.hpp"
#include "econlab/choice_data.hpp"

namespace econlab {

// Square boolean matrix stored as 64-bit row blocks so the transitive
// closure runs on whole rows.
class BoolMatrix {
public:
    BoolMatrix() = default;
    explicit BoolMatrix(std::size_t n);

    std::size_t size() const { return n_; }
    bool get(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, bool value = true);

    // Reflexive-transitive closure (in place).
    void close();

    // True if row i and `other`'s row i share a set bit for any i.
    bool intersects_rowwise(const BoolMatrix& other) const;
    std::optional<std::pair<std::size_t, std::size_t>>
    first_rowwise_intersection(const BoolMatrix& other) const;

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;  // row-major blocks
};

// Direct and closed revealed-preference relations at efficiency level e.
struct RelationMatrices {
    std::size_t n = 0;
    BoolMatrix r0;  // e * (p_i . x_i) >= p_i . x_j
    BoolMatrix p0;  // e * (p_i . x_i) >  p_i . x_j
    BoolMatrix r;   // reflexive-transitive closure of r0
};

struct CceiResult {
    double value = 0.0;
    bool garp_at_one = false;
    // A violating pair (i, j) at e = 1: x_i is revealed preferred to x_j
    // while x_j was strictly affordable when x_j was chosen.
    std::optional<std::pair<std::size_t, std::size_t>> violation;
};

RelationMatrices direct_relations(const ChoiceDataset& data, double e);

bool garp_satisfied(const ChoiceDataset& data, double e);

// Exact CCEI: the largest e in [0, 1] at which the data satisfy GARP,
// found over the finite breakpoint set {(p_i.x_j) / (p_i.x_i)} plus 1.
CceiResult ccei(const ChoiceDataset& data);

// Independent check: bisection on e to within `tol`. Returns a lower bound
// of the exact value (the last level at which GARP held).
double ccei_bisect(const ChoiceDataset& data, double tol = 1e-6);

// Bronars-style power check: agents allocating points_a ~ uniform[0, 100]
// per round, each agent on its own substream of `seed`.
std::vector<CceiResult> bronars_power(std::size_t n_agents,
                                      const std::vector<BudgetRound>& rounds,
                                      std::uint64_t seed);

}  // namespace econlab
