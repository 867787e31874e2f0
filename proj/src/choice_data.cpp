#include "econlab/choice_data.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace econlab {

void write_choice_csv(const std::filesystem::path& path, const ChoiceDataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "round,price_a,price_b,qty_a,qty_b\n";
    out.precision(17);
    for (std::size_t i = 0; i < data.observations.size(); ++i) {
        const auto& o = data.observations[i];
        if (o.prices.size() != 2 || o.quantities.size() != 2)
            throw std::invalid_argument("choice CSV supports two goods");
        out << (i + 1) << ',' << o.prices[0] << ',' << o.prices[1] << ','
            << o.quantities[0] << ',' << o.quantities[1] << '\n';
    }
}

ChoiceDataset read_choice_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    ChoiceDataset data;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ','))
            values.push_back(std::stod(field));
        if (values.size() != 5)
            throw std::runtime_error("malformed choice CSV row: " + line);
        data.observations.push_back({{values[1], values[2]}, {values[3], values[4]}});
    }
    return data;
}

}  // namespace econlab
