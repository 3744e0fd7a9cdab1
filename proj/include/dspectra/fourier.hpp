#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dspectra/measure.hpp"
#include "dspectra/report.hpp"

namespace dspectra {

/// Fourier-Stieltjes coefficients over the window [-N, N].
struct SpectrumTable {
    long long N = 0;
    std::vector<std::complex<double>> vals;  // index n + N
    std::string source;

    std::complex<double> at(long long n) const { return vals[static_cast<std::size_t>(n + N)]; }
};

SpectrumTable fourier_stieltjes(const DyadicMeasure& mu, long long N);
SpectrumTable fourier_stieltjes_serial(const DyadicMeasure& mu, long long N);
std::complex<double> fourier_stieltjes_at(const DyadicMeasure& mu, long long n);

/// Exact Riesz-product coefficient table: mu^(sum_{k in S} e_k 3^k) = 2^{-#S}
/// for S subset of {1..k_max} and signs e_k, zero off these frequencies.
struct RieszTable {
    int k_max = 0;
    long long window = 0;  // frequencies reach (3^{k_max+1} - 1)/2
    std::map<long long, Rational> coeffs;  // nonzero entries only; includes 0 -> 1

    Rational at(long long n) const {
        auto it = coeffs.find(n);
        return it == coeffs.end() ? Rational(0) : it->second;
    }
};
RieszTable riesz_exact_coeffs(int k_max);

std::vector<long long> level_set(const RieszTable& table, const Rational& q);
std::vector<long long> level_set(const SpectrumTable& table, double q, double tol);

struct RangeValue {
    Rational value;
    std::size_t multiplicity;
};
std::vector<RangeValue> range_closure_report(const RieszTable& table);
std::vector<std::pair<double, std::size_t>> range_closure_report(const SpectrumTable& table, double tol);

/// f^(j) -> -i sgn(j) f^(j); trigonometric conjugation on coefficient tables.
using CoeffTable = std::map<long long, std::complex<double>>;
CoeffTable conjugate_multiplier(const CoeffTable& table);

struct DecayRow {
    int m = 0;
    double sup_offzero = 0;   // sup over 1 <= |n| <= N of |mu^{*m}^(n)|
    double prop2_bound = 0;   // pipeline lower bound for mu^{*m}
    bool prop2_ok = false;
    std::string prop2_failure;
};
struct DecayReport {
    std::vector<DecayRow> rows;
    Ledger ledger;
};
DecayReport spectral_decay_experiment(const DyadicMeasure& mu, int m_max, long long N,
                                      const Rational& beta, const Rational& alpha,
                                      const Rational& rho, const Rational& eta);

}  // namespace dspectra
