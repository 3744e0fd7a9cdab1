#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "dspectra/measure.hpp"
#include "dspectra/spec_io.hpp"
#include "dspectra/walsh.hpp"

using namespace dspectra;

namespace {

Rational level_parseval_rhs(const DyadicMeasure& mu, int n) {
    Rational s(0);
    for (const auto& [c, w] : coarsen(mu, n).atoms) s += w * w;
    return s * pow2(n);
}

Rational expansion_square_sum(const WalshExpansion& e) {
    Rational s = e.empty_coeff * e.empty_coeff;
    for (const auto& g : e.groups)
        for (const auto& v : g) s += v * v;
    return s;
}

std::vector<Rational> mat_apply(const std::vector<std::vector<Rational>>& m,
                            const std::vector<Rational>& x) {
    std::vector<Rational> y(m.size(), Rational(0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += m[i][j] * x[j];
    return y;
}

Rational l1(const std::vector<Rational>& v) {
    Rational s(0);
    for (const auto& x : v) s += rational_abs(x);
    return s;
}

Rational linf(const std::vector<Rational>& v) {
    Rational m(0);
    for (const auto& x : v) m = std::max(m, rational_abs(x));
    return m;
}

}  // namespace

TEST_CASE("rademacher and walsh evaluation") {
    CHECK(rademacher(1, Rational(0)) == 1);
    CHECK(rademacher(1, Rational(1, 2)) == -1);
    CHECK(walsh_eval({}, Rational(7, 16)) == 1);
    CHECK(walsh_eval({1, 2}, Rational(3, 4)) == 1);
    CHECK(walsh_eval({2}, Rational(3, 4)) == -1);
    CHECK_THROWS(rademacher(0, Rational(0)));
}

TEST_CASE("walsh coefficients of basic measures") {
    WalshExpansion u = walsh_coeffs(make_uniform(8), 6);
    CHECK(u.empty_coeff == 1);
    for (const auto& g : u.groups)
        for (const auto& v : g) CHECK(v == 0);

    WalshExpansion d = walsh_coeffs(make_dirac(Rational(0), 8), 6);
    CHECK(d.empty_coeff == 1);
    for (const auto& g : d.groups)
        for (const auto& v : g) CHECK(v == 1);

    DyadicMeasure two;
    two.resolution = 4;
    two.atoms = {{0, Rational(1, 2)}, {8, Rational(1, 2)}};
    WalshExpansion t = walsh_coeffs(two, 3);
    CHECK(t.empty_coeff == 1);
    CHECK(t.groups[0][0] == 0);  // the level-1 coefficient

    // coefficients agree with direct integration of the Walsh functions
    DyadicMeasure mu = random_sparse_measure(51, 8, 30);
    WalshExpansion e = walsh_coeffs(mu, 5);
    std::vector<int> A{1, 3, 5};  // group max A = 5, subset index for {1,3}
    Rational direct(0);
    for (const auto& [c, w] : mu.atoms) direct += w * walsh_eval(A, Rational(c, std::uint64_t(1) << 8));
    std::size_t b = (1u << 3) | (1u << 1);  // bits (5-1)-1 and (5-1)-3
    CHECK(e.groups[4][b] == direct);
}

TEST_CASE("parseval identity for dyadic groups") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        DyadicMeasure mu = random_sparse_measure(600 + s, 12, 40);
        for (int n : {4, 8, 12})
            CHECK(expansion_square_sum(walsh_coeffs(mu, n)) == level_parseval_rhs(mu, n));
    }
}

TEST_CASE("haar coefficients") {
    std::vector<Rational> hu = haar_coeffs(make_uniform(6), 3);
    for (const auto& v : hu) CHECK(v == 0);

    std::vector<Rational> hd = haar_coeffs(make_dirac(Rational(0), 6), 3);
    CHECK(hd[0] == 1);
    for (std::size_t i = 1; i < hd.size(); ++i) CHECK(hd[i] == 0);

    DyadicMeasure mu = random_sparse_measure(61, 9, 40);
    int n = 5;
    std::vector<Rational> c = haar_coeffs(mu, n);
    for (std::uint64_t w = 0; w < (std::uint64_t(1) << n); ++w) {
        Rational direct(0);
        for (const auto& [cell, wt] : mu.atoms) {
            std::uint64_t parent = cell >> (9 - n);
            if (parent != w) continue;
            bool left = ((cell >> (9 - n - 1)) & 1) == 0;
            direct += left ? wt : -wt;
        }
        CHECK(c[w] == direct);
    }
}

TEST_CASE("walsh-to-haar matrix") {
    auto m1 = walsh_haar_matrix(0);
    REQUIRE(m1.size() == 1);
    CHECK(rational_abs(m1[0][0]) == 1);

    std::mt19937_64 rng(5);
    for (int n : {1, 2, 3, 5, 8}) {
        for (int trial = 0; trial < (n <= 3 ? 100 : 20); ++trial) {
            DyadicMeasure mu = random_sparse_measure(rng(), n + 2, 20);
            std::vector<Rational> haar = haar_coeffs(mu, n);
            WalshExpansion e = walsh_coeffs(mu, n + 1);
            std::vector<Rational> mapped = mat_apply(walsh_haar_matrix(n), e.groups[static_cast<std::size_t>(n)]);
            CHECK(mapped == haar);
        }
    }
}

TEST_CASE("matrix contraction in l1, linf and all W(k)") {
    std::mt19937_64 rng(9);
    auto m = walsh_haar_matrix(4);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Rational> x(16);
        for (auto& v : x) v = Rational(static_cast<long long>(rng() % 2001) - 1000, 1000);
        std::vector<Rational> y = mat_apply(m, x);
        CHECK(l1(y) <= l1(x));
        CHECK(linf(y) <= linf(x));
        for (int k = 1; k <= 16; ++k)
            CHECK(lorentz_norm(y, BigInt(k)) <= lorentz_norm(x, BigInt(k)));
    }
}

TEST_CASE("lorentz norm") {
    std::vector<Rational> a{Rational(3), Rational(1), Rational(2)};
    CHECK(lorentz_norm(a, BigInt(2)) == 5);
    CHECK(lorentz_norm(a, BigInt(10)) == 6);

    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t len = 1 + rng() % 16;
        std::vector<Rational> v(len);
        for (auto& x : v) x = Rational(static_cast<long long>(rng() % 401) - 200, 100);
        for (std::size_t k = 1; k <= len; ++k) {
            // brute-force best k-subset
            Rational best(0);
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << len); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
                Rational s(0);
                for (std::size_t i = 0; i < len; ++i)
                    if (mask & (std::uint64_t(1) << i)) s += rational_abs(v[i]);
                best = std::max(best, s);
            }
            CHECK(lorentz_norm(v, BigInt(static_cast<long long>(k))) == best);
            if (k > 1)
                CHECK(lorentz_norm(v, BigInt(static_cast<long long>(k))) >=
                      lorentz_norm(v, BigInt(static_cast<long long>(k - 1))));
        }
    }
}

TEST_CASE("largest-coefficients statistic") {
    WalshExpansion u = walsh_coeffs(make_uniform(13), 12);
    WalshExpansion d = walsh_coeffs(make_dirac(Rational(0), 13), 12);
    for (int n = 1; n <= 12; ++n) {
        CHECK(g_lambda(u, n, Rational(1, 2)) == 0);
        BigInt cap = floor_pow2(Rational(n, 2));
        BigInt group_size = BigInt(1) << (n - 1);
        CHECK(g_lambda(d, n, Rational(1, 2)) == Rational(cap > group_size ? group_size : cap));
    }
}

TEST_CASE("grouped coefficient statistics across levels") {
    Theorem9Report dd = theorem9_statistic(make_dirac(Rational(0), 13), Rational(1, 2),
                                           Rational(1, 2), 2, 10);
    for (const auto& row : dd.rows) CHECK(row.haar_w == 1);
    CHECK(dd.ledger.all_pass());

    Theorem9Report uu = theorem9_statistic(make_uniform(13), Rational(1, 2), Rational(1, 2), 2, 10);
    for (const auto& row : uu.rows) {
        CHECK(row.haar_w == 0);
        CHECK(row.walsh_w == 0);
    }
    CHECK(to_double(uu.threshold) < 1e-3);  // vacuous: concentration mass is tiny

    std::vector<unsigned> pattern;
    for (int i = 0; i < 12; ++i) {
        pattern.push_back(3);
        pattern.push_back(1);
    }
    DyadicMeasure cant = make_cantor(pattern, 24);
    Theorem9Report cc = theorem9_statistic(coarsen(cant, 13), Rational(1, 2), Rational(1, 2), 4, 11);
    CHECK(cc.exceed_count >= 4);
    for (const auto& row : cc.rows) CHECK(row.walsh_w >= row.haar_w);
}

TEST_CASE("level-range aggregates") {
    Remark10Aggregates da = remark10_aggregates(make_dirac(Rational(0), 13), Rational(1, 2), 12,
                                                Rational(-1, 2));
    CHECK(da.s2 == 7);  // levels 6..12 each contribute |1 - 0| = 1

    Remark10Aggregates ua = remark10_aggregates(make_uniform(13), Rational(1, 2), 12,
                                                Rational(-1, 2));
    CHECK(ua.s2 == 0);

    DyadicMeasure mu = random_sparse_measure(71, 11, 50);
    Remark10Aggregates ra = remark10_aggregates(mu, Rational(1, 2), 10, Rational(-1, 2));
    CHECK(ra.s3 <= ra.s4);
    CHECK(ra.ratio_reference > 0);
}

TEST_CASE("dimension trend diagnostic") {
    DimensionBoundReport ur = dimension_bound_check(make_uniform(13), Rational(1, 2), 2, 10);
    CHECK(ur.trend_vanishing);
    CHECK(ur.implied_bound == doctest::Approx(1.0 / 3.0));

    DimensionBoundReport dr = dimension_bound_check(make_dirac(Rational(0), 13), Rational(1, 2), 2, 10);
    CHECK_FALSE(dr.trend_vanishing);

    std::vector<unsigned> pattern;
    for (int i = 0; i < 12; ++i) {
        pattern.push_back(3);
        pattern.push_back(1);
    }
    DimensionBoundReport cr = dimension_bound_check(coarsen(make_cantor(pattern, 24), 13),
                                                    Rational(1, 2), 4, 11);
    CHECK(cr.rows.size() == 8);
    CHECK_FALSE(cr.note.empty());
}
