#include "dspectra/walsh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dspectra/martingale.hpp"
#include "dspectra/phase.hpp"

namespace dspectra {

int rademacher(int i, const Rational& t) {
    if (i < 1) throw std::invalid_argument("rademacher: index starts at 1");
    Rational x = frac_part(t) * pow2(i);
    BigInt fl = num(x) / den(x);
    return (fl & 1) != 0 ? -1 : 1;
}

int walsh_eval(const std::vector<int>& A, const Rational& t) {
    int s = 1;
    for (int i : A) s *= rademacher(i, t);
    return s;
}

namespace {

// In-place exact Hadamard transform: y[a] = sum_c (-1)^{popcount(a & c)} v[c].
void fwht(std::vector<Rational>& y) {
    const std::size_t n = y.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                Rational a = y[j], b = y[j + h];
                y[j] = a + b;
                y[j + h] = a - b;
            }
        }
    }
}

BigInt ceil_rational(const Rational& x) {
    BigInt n = num(x), d = den(x);
    if (n >= 0) return (n + d - 1) / d;
    return -((-n) / d);
}

}  // namespace

WalshExpansion walsh_coeffs(const DyadicMeasure& mu, int n_max) {
    if (n_max < 1 || n_max > 24) throw std::invalid_argument("walsh_coeffs: n_max must lie in [1, 24]");
    if (n_max > mu.resolution)
        throw std::invalid_argument("walsh_coeffs: n_max exceeds the measure resolution");
    DyadicMeasure level = coarsen(mu, n_max);
    std::vector<Rational> y(std::size_t(1) << n_max, Rational(0));
    for (const auto& [c, w] : level.atoms) y[static_cast<std::size_t>(c)] = w;
    fwht(y);
    // w_A sits at index a~ = sum_{i in A} 2^{n_max - i}; for max A = n this is
    // (2b + 1) << (n_max - n) with b the subset index of A \ {n}.
    WalshExpansion exp;
    exp.n_max = n_max;
    exp.empty_coeff = y[0];
    exp.groups.resize(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        auto& g = exp.groups[static_cast<std::size_t>(n - 1)];
        g.resize(std::size_t(1) << (n - 1));
        for (std::uint64_t b = 0; b < g.size(); ++b)
            g[b] = y[static_cast<std::size_t>((2 * b + 1) << (n_max - n))];
    }
    return exp;
}

std::vector<Rational> haar_coeffs(const DyadicMeasure& mu, int n) {
    if (n < 0 || n > 24) throw std::invalid_argument("haar_coeffs: level must lie in [0, 24]");
    if (n + 1 > mu.resolution)
        throw std::invalid_argument("haar_coeffs: level n needs children at level n + 1");
    DyadicMeasure level = coarsen(mu, n + 1);
    std::vector<Rational> c(std::size_t(1) << n, Rational(0));
    for (const auto& [cell, w] : level.atoms) {
        if (cell & 1)
            c[static_cast<std::size_t>(cell >> 1)] -= w;
        else
            c[static_cast<std::size_t>(cell >> 1)] += w;
    }
    return c;
}

std::vector<std::vector<Rational>> walsh_haar_matrix(int n) {
    if (n < 0 || n > 12) throw std::invalid_argument("walsh_haar_matrix: level must lie in [0, 12]");
    const std::size_t size = std::size_t(1) << n;
    const Rational scale = pow2(-n);
    std::vector<std::vector<Rational>> m(size, std::vector<Rational>(size));
    for (std::size_t w = 0; w < size; ++w)
        for (std::size_t b = 0; b < size; ++b)
            m[w][b] = (std::popcount(w & b) & 1) ? -scale : scale;
    return m;
}

Rational lorentz_norm(const std::vector<Rational>& a, const BigInt& k) {
    if (k <= 0) return Rational(0);
    std::vector<Rational> mags;
    mags.reserve(a.size());
    for (const auto& v : a) mags.push_back(rational_abs(v));
    std::size_t take = mags.size();
    if (BigInt(take) > k) take = k.convert_to<std::size_t>();
    std::partial_sort(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(take), mags.end(),
                      [](const Rational& x, const Rational& y) { return x > y; });
    Rational s(0);
    for (std::size_t i = 0; i < take; ++i) s += mags[i];
    return s;
}

Rational g_lambda(const WalshExpansion& exp, int n, const Rational& lambda) {
    if (n < 1 || n > exp.n_max) throw std::invalid_argument("g_lambda: group index out of range");
    return lorentz_norm(exp.groups[static_cast<std::size_t>(n - 1)], floor_pow2(lambda * n));
}

Theorem9Report theorem9_statistic(const DyadicMeasure& mu, const Rational& beta,
                                  const Rational& lambda, int n_lo, int n_hi,
                                  const Rational& theta_C) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("theorem9_statistic: bad level range");
    if (n_hi + 1 > mu.resolution)
        throw std::invalid_argument("theorem9_statistic: n_hi + 1 exceeds the measure resolution");
    Theorem9Report rep;
    Rational lambda_cap = beta / (1 - beta);
    if (lambda_cap > 1) lambda_cap = 1;
    rep.ledger.check("lambda_admissible", to_double(lambda), "<", to_double(lambda_cap));

    Rational c_beta = c_beta_estimate(mu, beta, mu.resolution);
    Rational theta = theta_C;
    if (theta < 0) {
        // Default constant from the martingale lower-bound pipeline with
        // alpha ~ -sqrt(beta) and rho = -alpha.
        double s = std::sqrt(to_double(beta));
        Rational alpha = -Rational(BigInt(static_cast<long long>(std::llround(s * 1e6))), 1000000);
        Rational rho = -alpha;
        Rational g = pow2_minus_one_lower(alpha + 1);
        theta = pow2(-6) * g * g * rpow((1 - rho) / 4, 2) / 2;
    }
    rep.threshold = theta * c_beta;
    rep.ledger.info("c_beta", to_double(c_beta));
    rep.ledger.info("threshold", to_double(rep.threshold));

    WalshExpansion exp = walsh_coeffs(mu, n_hi + 1);
    for (int n = n_lo; n <= n_hi; ++n) {
        BigInt W = floor_pow2(lambda * n);
        Theorem9Row row;
        row.n = n;
        row.haar_w = lorentz_norm(haar_coeffs(mu, n), W);
        row.walsh_w = lorentz_norm(exp.groups[static_cast<std::size_t>(n)], W);
        row.exceeds_threshold = row.haar_w > rep.threshold;
        if (row.exceeds_threshold) ++rep.exceed_count;
        rep.ledger.check("walsh_dominates_haar_n" + std::to_string(n), to_double(row.walsh_w), ">=",
                         to_double(row.haar_w));
        rep.rows.push_back(std::move(row));
    }
    rep.ledger.check("some_level_exceeds", rep.exceed_count, ">=", 1);
    return rep;
}

Remark10Aggregates remark10_aggregates(const DyadicMeasure& mu, const Rational& beta_prime, int k,
                                       const Rational& alpha) {
    if (k < 1 || k >= mu.resolution)
        throw std::invalid_argument("remark10_aggregates: need 1 <= k < resolution");
    Remark10Aggregates agg;
    agg.s1 = agg.s2 = agg.s3 = agg.s4 = Rational(0);
    MartingaleTree tree = build_tree(mu);
    WalshExpansion exp = walsh_coeffs(mu, k);

    int n0 = static_cast<int>(ceil_rational((1 - beta_prime) * k).convert_to<long long>());
    if (n0 < 1) n0 = 1;
    for (int n = n0; n <= k; ++n) {
        VertexClassification cls = classify(tree, n, alpha);
        std::vector<std::uint64_t> turb = cls.turbulent;
        std::sort(turb.begin(), turb.end());
        for (const auto& [cell, m] : tree.levels[static_cast<std::size_t>(n)]) {
            if (!std::binary_search(turb.begin(), turb.end(), cell)) agg.s1 += rational_abs(m);
            agg.s2 += rational_abs(tree.mass_at(n + 1, 2 * cell) - tree.mass_at(n + 1, 2 * cell + 1));
        }
        BigInt W = floor_pow2(beta_prime * n);
        agg.s3 += lorentz_norm(haar_coeffs(mu, n - 1), W);
        agg.s4 += lorentz_norm(exp.groups[static_cast<std::size_t>(n - 1)], W);
    }
    agg.ratio_reference = beta_prime * k * c_beta_estimate(mu, beta_prime, k);
    return agg;
}

DimensionBoundReport dimension_bound_check(const DyadicMeasure& mu, const Rational& lambda,
                                           int n_lo, int n_hi) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("dimension_bound_check: bad level range");
    if (n_hi + 1 > mu.resolution)
        throw std::invalid_argument("dimension_bound_check: n_hi + 1 exceeds the measure resolution");
    DimensionBoundReport rep;
    rep.implied_bound = to_double(lambda / (lambda + 1));
    WalshExpansion exp = walsh_coeffs(mu, n_hi + 1);
    std::vector<std::pair<double, double>> pts;  // (n, log2 statistic)
    for (int n = n_lo; n <= n_hi; ++n) {
        DimensionBoundRow row;
        row.n = n;
        row.statistic = lorentz_norm(exp.groups[static_cast<std::size_t>(n)], floor_pow2(lambda * n));
        if (row.statistic > 0) pts.emplace_back(double(n), std::log2(to_double(row.statistic)));
        rep.rows.push_back(std::move(row));
    }
    if (pts.empty()) {
        rep.trend_vanishing = true;
        rep.fitted_slope = 0;
    } else if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double m = pts.size() * sxx - sx * sx;
        rep.fitted_slope = m == 0 ? 0 : (pts.size() * sxy - sx * sy) / m;
        rep.trend_vanishing = rep.fitted_slope < 0;
    }
    rep.note = "finite-scale slope of the grouped Walsh statistic; a decreasing trend is "
               "consistent with, but does not prove, a dimension bound of lambda/(lambda+1)";
    return rep;
}

}  // namespace dspectra
