#include "dspectra/fourier.hpp"

#include <algorithm>
#include <stdexcept>

#include "dspectra/phase.hpp"
#include "dspectra/testfn.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dspectra {

std::complex<double> fourier_stieltjes_at(const DyadicMeasure& mu, long long n) {
    // phases reduced on the grid: atom c contributes e^{-2 pi i n c / 2^K}
    std::complex<double> s{0.0, 0.0};
    const std::uint64_t cells = mu.cell_count();
    for (const auto& [c, w] : mu.atoms) {
        // n*c mod 2^K without overflow via rationals only when needed
        unsigned long long prod;
        if (!__builtin_mul_overflow(static_cast<unsigned long long>(n < 0 ? -n : n), c, &prod)) {
            unsigned long long r = prod & (cells - 1);
            double ang = -2.0 * M_PI * static_cast<double>(r) / static_cast<double>(cells);
            if (n < 0) ang = -ang;
            s += to_double(w) * std::complex<double>(std::cos(ang), std::sin(ang));
        } else {
            s += to_double(w) * unit_phase(Rational(n) * Rational(BigInt(c), BigInt(cells)));
        }
    }
    return s;
}

SpectrumTable fourier_stieltjes_serial(const DyadicMeasure& mu, long long N) {
    SpectrumTable t;
    t.N = N;
    t.source = "serial";
    t.vals.resize(static_cast<std::size_t>(2 * N + 1));
    for (long long n = -N; n <= N; ++n)
        t.vals[static_cast<std::size_t>(n + N)] = fourier_stieltjes_at(mu, n);
    return t;
}

SpectrumTable fourier_stieltjes(const DyadicMeasure& mu, long long N) {
    SpectrumTable t;
    t.N = N;
    t.source = "parallel";
    t.vals.resize(static_cast<std::size_t>(2 * N + 1));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long n = -N; n <= N; ++n)
        t.vals[static_cast<std::size_t>(n + N)] = fourier_stieltjes_at(mu, n);
    return t;
}

RieszTable riesz_exact_coeffs(int k_max) {
    if (k_max < 0 || k_max > 20)
        throw std::invalid_argument("riesz_exact_coeffs: k_max must lie in [0, 20]");
    RieszTable t;
    t.k_max = k_max;
    long long reach = 0;
    long long p = 3;
    for (int k = 1; k <= k_max; ++k) {
        reach += p;
        p *= 3;
    }
    t.window = reach;
    // Product expansion: each factor contributes 1 or (e^{i 3^k t} + e^{-i 3^k t})/2.
    t.coeffs[0] = Rational(1);
    p = 3;
    for (int k = 1; k <= k_max; ++k) {
        std::map<long long, Rational> next;
        for (const auto& [f, c] : t.coeffs) {
            next[f] += c;
            next[f + p] += c / 2;
            next[f - p] += c / 2;
        }
        t.coeffs = std::move(next);
        p *= 3;
    }
    std::erase_if(t.coeffs, [](const auto& kv) { return kv.second == 0; });
    return t;
}

std::vector<long long> level_set(const RieszTable& table, const Rational& q) {
    std::vector<long long> out;
    for (const auto& [n, c] : table.coeffs)
        if (c == q) out.push_back(n);
    if (q == 0)
        throw std::invalid_argument("level_set: zero level of a sparse symbolic table is cofinite");
    return out;
}

std::vector<long long> level_set(const SpectrumTable& table, double q, double tol) {
    std::vector<long long> out;
    for (long long n = -table.N; n <= table.N; ++n)
        if (std::abs(std::abs(table.at(n)) - q) <= tol) out.push_back(n);
    return out;
}

std::vector<RangeValue> range_closure_report(const RieszTable& table) {
    std::map<Rational, std::size_t> census;
    for (const auto& [n, c] : table.coeffs) ++census[c];
    // frequencies off the sparse support carry value 0
    std::size_t zero_count = 0;
    if (BigInt(table.coeffs.size()) < BigInt(2) * table.window + 1)
        zero_count = static_cast<std::size_t>(2 * table.window + 1 - static_cast<long long>(table.coeffs.size()));
    std::vector<RangeValue> out;
    if (zero_count) out.push_back({Rational(0), zero_count});
    for (const auto& [v, m] : census) out.push_back({v, m});
    std::sort(out.begin(), out.end(), [](const RangeValue& a, const RangeValue& b) { return a.value < b.value; });
    return out;
}

std::vector<std::pair<double, std::size_t>> range_closure_report(const SpectrumTable& table, double tol) {
    std::vector<double> vals;
    vals.reserve(table.vals.size());
    for (const auto& v : table.vals) vals.push_back(std::abs(v));
    std::sort(vals.begin(), vals.end());
    std::vector<std::pair<double, std::size_t>> out;
    for (double v : vals) {
        if (!out.empty() && v - out.back().first <= tol)
            ++out.back().second;
        else
            out.emplace_back(v, 1);
    }
    return out;
}

CoeffTable conjugate_multiplier(const CoeffTable& table) {
    CoeffTable out;
    for (const auto& [j, c] : table) {
        double sgn = j > 0 ? 1.0 : (j < 0 ? -1.0 : 0.0);
        std::complex<double> v = std::complex<double>(0.0, -sgn) * c;
        if (v != std::complex<double>{0.0, 0.0}) out[j] = v;
    }
    return out;
}

DecayReport spectral_decay_experiment(const DyadicMeasure& mu, int m_max, long long N,
                                      const Rational& beta, const Rational& alpha,
                                      const Rational& rho, const Rational& eta) {
    if (!mu.is_positive() || mu.total_mass() != 1)
        throw std::invalid_argument("spectral_decay_experiment: probability measure required");
    DecayReport rep;
    DyadicMeasure power = mu;
    const int baseK = mu.resolution;
    for (int m = 1; m <= m_max; ++m) {
        if (m > 1) {
            power = convolve(power, mu);
            power = coarsen(power, baseK);  // cap memory; mass-exact
        }
        DecayRow row;
        row.m = m;
        SpectrumTable t = fourier_stieltjes(power, N);
        // frequencies divisible by 2^K are the zero frequency of the grid
        // group: every grid probability measure has transform 1 there
        const long long period = 1LL << baseK;
        for (long long n = -N; n <= N; ++n) {
            if (n % period == 0) continue;
            row.sup_offzero = std::max(row.sup_offzero, std::abs(t.at(n)));
        }
        try {
            Prop2Report p2 = prop2_pipeline(power, beta, alpha, rho, eta);
            row.prop2_bound = p2.bound;
            row.prop2_ok = p2.ok;
            row.prop2_failure = p2.failed_stage;
        } catch (const std::exception& ex) {
            row.prop2_failure = ex.what();
        }
        rep.rows.push_back(row);
    }
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        rep.ledger.check("sup_strictly_decreasing_m" + std::to_string(i + 1),
                         rep.rows[i].sup_offzero, "<", rep.rows[i - 1].sup_offzero);
    if (!rep.rows.empty()) {
        double floor_val = 0.5 * rep.rows.front().prop2_bound;
        for (std::size_t i = 0; i < rep.rows.size(); ++i)
            rep.ledger.check("bound_above_half_initial_m" + std::to_string(i + 1),
                             rep.rows[i].prop2_bound, ">=", floor_val);
    }
    return rep;
}

}  // namespace dspectra
