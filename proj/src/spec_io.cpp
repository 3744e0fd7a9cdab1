#include "dspectra/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace dspectra {

DyadicMeasure measure_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "dirac") {
        return make_dirac(rational_from_string(j.at("position").get<std::string>()),
                          j.at("resolution").get<int>());
    }
    if (type == "uniform") {
        return make_uniform(j.at("resolution").get<int>());
    }
    if (type == "sparse") {
        std::vector<std::uint64_t> cells = j.at("cells").get<std::vector<std::uint64_t>>();
        DyadicMeasure mu = make_sparse(cells, j.at("resolution").get<int>());
        if (j.contains("weights")) {
            auto ws = j.at("weights").get<std::vector<std::string>>();
            if (ws.size() != cells.size())
                throw std::invalid_argument("sparse measure: weights/cells length mismatch");
            mu.atoms.clear();
            for (std::size_t i = 0; i < cells.size(); ++i)
                mu.atoms.emplace_back(cells[i], rational_from_string(ws[i]));
            mu.normalize_sort();
        }
        return mu;
    }
    if (type == "cantor") {
        auto pattern = j.at("pattern").get<std::vector<unsigned>>();
        return make_cantor(pattern, static_cast<int>(pattern.size()));
    }
    if (type == "riesz") {
        return make_riesz_sampled(j.at("kmax").get<int>(), j.at("resolution").get<int>());
    }
    if (type == "liouville") {
        std::vector<std::pair<std::uint64_t, int>> levels;
        for (const auto& lv : j.at("levels"))
            levels.emplace_back(lv.at(0).get<std::uint64_t>(), lv.at(1).get<int>());
        return make_liouville_truncation(levels, j.at("resolution").get<int>()).measure;
    }
    if (type == "convolve_power") {
        DyadicMeasure base = measure_from_json(j.at("base"));
        int power = j.at("power").get<int>();
        if (power < 1) throw std::invalid_argument("convolve_power: power must be >= 1");
        DyadicMeasure acc = base;
        for (int m = 2; m <= power; ++m) acc = coarsen(convolve(acc, base), base.resolution);
        return acc;
    }
    throw std::invalid_argument("unknown measure type: " + type);
}

DyadicMeasure measure_from_arg(const std::string& arg) {
    std::string text;
    if (!arg.empty() && arg.front() == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot open measure spec: " + arg);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return measure_from_json(json::parse(text));
}

json measure_to_json(const DyadicMeasure& mu) {
    json atoms = json::array();
    for (const auto& [c, w] : mu.atoms) atoms.push_back({{"cell", c}, {"weight", rational_to_string(w)}});
    return {{"resolution", mu.resolution},
            {"float_sampled", mu.float_sampled},
            {"total_mass", rational_to_string(mu.total_mass())},
            {"total_variation", rational_to_string(mu.total_variation())},
            {"atoms", atoms}};
}

std::string measure_to_csv(const DyadicMeasure& mu) {
    std::ostringstream out;
    out << "index,numerator,denominator\n";
    for (const auto& [c, w] : mu.atoms) out << c << "," << num(w).str() << "," << den(w).str() << "\n";
    return out.str();
}

DyadicMeasure random_sparse_measure(std::uint64_t seed, int K, std::uint64_t max_cells) {
    if (max_cells == 0) throw std::invalid_argument("random_sparse_measure: max_cells must be positive");
    std::mt19937_64 rng(seed);
    std::uint64_t cells = std::uint64_t(1) << K;
    std::uint64_t count = 1 + rng() % max_cells;
    if (count > cells) count = cells;
    std::set<std::uint64_t> support;
    while (support.size() < count) support.insert(rng() % cells);
    DyadicMeasure mu;
    mu.resolution = K;
    BigInt total = 0;
    std::vector<std::pair<std::uint64_t, BigInt>> raw;
    for (auto c : support) {
        BigInt w(1 + rng() % 1000);
        raw.emplace_back(c, w);
        total += w;
    }
    for (const auto& [c, w] : raw) mu.atoms.emplace_back(c, Rational(w, total));
    return mu;
}

void write_atomic(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write: " + tmp);
        out << contents;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename into place: " + path);
}

}  // namespace dspectra
