#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace econlab {

// One price-quantity observation. Prices and quantities have the same length
// (two goods for the budget tasks, but nothing below depends on that).
struct Observation {
    std::vector<double> prices;
    std::vector<double> quantities;
};

struct ChoiceDataset {
    std::vector<Observation> observations;

    std::size_t size() const { return observations.size(); }
    bool empty() const { return observations.empty(); }
};

// CSV round-trip: header `round,price_a,price_b,qty_a,qty_b` for two goods.
void write_choice_csv(const std::filesystem::path& path, const ChoiceDataset& data);
ChoiceDataset read_choice_csv(const std::filesystem::path& path);

}  // namespace econlab
