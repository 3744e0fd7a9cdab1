#pragma once

#include <cstdint>
#include <vector>

#include "dspectra/measure.hpp"
#include "dspectra/report.hpp"

namespace dspectra {

int rademacher(int i, const Rational& t);
int walsh_eval(const std::vector<int>& A, const Rational& t);

/// Walsh-Stieltjes coefficients grouped by max A = n. Group n is indexed by
/// the subset B = A \ {n} of {1..n-1} via b = sum_{i in B} 2^{(n-1)-i}; the
/// empty-set coefficient is stored separately.
struct WalshExpansion {
    int n_max = 0;
    Rational empty_coeff;
    std::vector<std::vector<Rational>> groups;  // groups[n-1] has size 2^{n-1}
};
WalshExpansion walsh_coeffs(const DyadicMeasure& mu, int n_max);

/// Haar coefficients at level n: c(w) = m(w0) - m(w1) over the 2^n cells,
/// ordered by cell position (group index j in [2^n, 2^{n+1})).
std::vector<Rational> haar_coeffs(const DyadicMeasure& mu, int n);

/// The exact linear map from the Walsh group {max A = n+1} to the level-n Haar
/// coefficients: a 2^n x 2^n matrix equal to 2^-n times a sign matrix, hence a
/// contraction in both l1 and l-infinity.
std::vector<std::vector<Rational>> walsh_haar_matrix(int n);

Rational lorentz_norm(const std::vector<Rational>& a, const BigInt& k);

Rational g_lambda(const WalshExpansion& exp, int n, const Rational& lambda);

struct Theorem9Row {
    int n = 0;
    Rational haar_w;   // ||(c_j) group n||_{W(2^{lambda n})}
    Rational walsh_w;  // ||(mu^(A)) max A = n+1||_{W(2^{lambda n})}
    bool exceeds_threshold = false;
};
struct Theorem9Report {
    std::vector<Theorem9Row> rows;
    Rational threshold;  // theta_C * c_beta
    int exceed_count = 0;
    Ledger ledger;
};
Theorem9Report theorem9_statistic(const DyadicMeasure& mu, const Rational& beta,
                                  const Rational& lambda, int n_lo, int n_hi,
                                  const Rational& theta_C = Rational(-1));

struct Remark10Aggregates {
    Rational s1;  // sum over levels of non-turbulent |m(w)|
    Rational s2;  // sum over levels of |m(w0) - m(w1)| over nonzero vertices
    Rational s3;  // sum of Haar-group Lorentz norms
    Rational s4;  // sum of Walsh-group Lorentz norms
    Rational ratio_reference;  // beta' * k * c_beta
};
Remark10Aggregates remark10_aggregates(const DyadicMeasure& mu, const Rational& beta_prime, int k,
                                       const Rational& alpha);

struct DimensionBoundRow {
    int n = 0;
    Rational statistic;
};
struct DimensionBoundReport {
    std::vector<DimensionBoundRow> rows;
    double fitted_slope = 0;   // slope of log2(statistic) per level (positive entries)
    double implied_bound = 0;  // lambda / (lambda + 1)
    bool trend_vanishing = false;
    std::string note;          // finite-scale diagnostic, never a proof
};
DimensionBoundReport dimension_bound_check(const DyadicMeasure& mu, const Rational& lambda,
                                           int n_lo, int n_hi);

}  // namespace dspectra
