#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dspectra/martingale.hpp"
#include "dspectra/measure.hpp"
#include "dspectra/report.hpp"

namespace dspectra {

/// Piecewise-constant function on the circle. Right-continuous; values[i]
/// holds on [breaks[i], breaks[i+1]) with the last piece wrapping to
/// breaks[0] + 1. Breakpoints are sorted rationals in [0, 1).
struct StepFunction {
    std::vector<Rational> breaks;
    std::vector<Rational> values;

    Rational integral() const;
    Rational l1_norm() const;
    Rational linf_norm() const;
    Rational value_at(const Rational& t) const;
    /// Integral of |f| over a union of disjoint intervals [a, b) in [0, 1).
    Rational l1_over(const std::vector<std::pair<Rational, Rational>>& intervals) const;
};

/// The two-plateau mean-zero step function of width 2^-n. The `reflected`
/// orientation is t -> h(-t); both appear in the source arguments.
struct TestFunctionHn {
    int n = 0;
    Rational eps;
    bool reflected = false;

    struct Block {
        Rational lo, hi;  // on the real line before wrapping; lo < hi
        Rational value;
    };
    std::vector<Block> blocks() const;
    StepFunction as_step() const;

    Rational l1_closed_form() const;    // 1/2 - eps^2 2^{2n+1}
    Rational linf_closed_form() const;  // 2^{2n}(2^{-n-1} + eps)
    Rational support_length() const;    // 2^-n
};

TestFunctionHn make_hn(int n, const Rational& eps, bool reflected = false);

StepFunction convolve_hn(const TestFunctionHn& h, const DyadicMeasure& mu);

std::complex<double> hn_fourier(const TestFunctionHn& h, long long j);

/// Three-atom distributional derivative of h_n.
struct AtomList {
    std::vector<std::pair<Rational, Rational>> atoms;  // (position mod 1, mass)
    std::complex<double> fourier(long long j) const;
};
AtomList hn_derivative_measure(const TestFunctionHn& h);

struct BandEnergies {
    double low = 0;        // sum over |j| < a 2^{2n/3}
    double high_lo = 0;    // summed part over b 2^{2n} < |j| <= cutoff
    double high_hi = 0;    // summed part + analytic tail majorant
    long long low_cut = 0;   // largest |j| strictly inside the low band
    long long high_cut = 0;  // smallest |j| strictly above the high band edge
};
BandEnergies band_tail_energies(const TestFunctionHn& h, double a, double b,
                                long long extra_terms = 0);

struct BandObjects {
    long long j_lo = 0, j_hi = 0;  // in-band positive frequencies [j_lo, j_hi]
    std::vector<std::pair<long long, std::complex<double>>> phi;  // out-of-band, |j| <= N_max
    std::vector<std::pair<long long, std::complex<double>>> p;    // analytic in-band polynomial
};
BandObjects band_projection_and_polynomial(const TestFunctionHn& h, double a, double b,
                                           long long N_max);

/// Structural check of the in-band analytic polynomial: p^(j) = 2 h^(j) for
/// in-band j > 0 and vanishes elsewhere. Evaluated by sampling, usable even
/// when the band is too wide to tabulate.
struct BandSupportCheck {
    bool no_negative_frequencies = true;
    bool out_of_band_zero = true;
    bool in_band_matches = true;
    long long j_lo = 0, j_hi = 0;
};
BandSupportCheck band_support_check(const TestFunctionHn& h, double a, double b,
                                    long long sample_window = 512, int random_samples = 64,
                                    std::uint64_t seed = 1);

struct Prop2Report {
    // inputs
    Rational beta, alpha, rho, eta;
    // pipeline outcome
    bool ok = false;
    std::string failed_stage;
    bool negated = false;
    int k = 0;
    std::vector<std::uint64_t> cover_cells;  // D_k (level-k indices)
    int n = 0;
    Rational eps;
    bool orientation_reflected = false;  // descent side used the reflected h
    std::vector<std::pair<Rational, Rational>> e_set;  // E as intervals
    Rational c_beta;         // finite-scale c_beta of the input
    bool premise_holds = false;
    Rational diff_sum;       // sum over chosen side of |m(w0) - m(w1)|
    // chain values
    Rational achieved;       // ||h_n * mu||_1, exact
    Rational q_e;            // integral over E of |h_n * mu|
    Rational q_e_k;          // same with mu_k
    Rational mu_r_term;      // 2^n eps * mu_r(enlarged cover), both readings recorded
    Rational q_percell;
    Rational q_agg;
    double q_final_numeric = 0;
    double bound = 0;        // 2^-6 (2^{a+1}-1)^2 ((1-rho)/4)^2 (1/2) c_beta
    Ledger ledger;
};

Prop2Report prop2_pipeline(const DyadicMeasure& mu, const Rational& beta, const Rational& alpha,
                           const Rational& rho, const Rational& eta);

struct BandNormReport {
    bool ok = false;
    std::string failed_stage;
    int n = 0;
    double mu_p_l1 = 0;      // ||mu * p_n||_1 (grid quadrature)
    double p_l1 = 0;         // ||p_n||_1
    double ratio = 0;
    double quadrature_error_bound = 0;
    double c1_measured = 0;  // ||h~||_1 / ||h||_1 on the actual input
    double c2_measured = 0;  // ||phi~||_2 / ||phi||_2
    double reference = 0;    // (C'(beta) c_beta - eta) / (1 + C1 + (1 + C2) eta)
    bool ab_warning = false; // 18/b + 8 pi^2 a^3 >= eta^2
    Ledger ledger;
};
BandNormReport band_norm_experiment(const DyadicMeasure& mu, const Rational& beta,
                                    const Rational& alpha, const Rational& rho, double a, double b,
                                    const Rational& eta);

}  // namespace dspectra
