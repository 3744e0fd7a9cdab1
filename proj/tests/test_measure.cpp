#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "dspectra/fourier.hpp"
#include "dspectra/martingale.hpp"
#include "dspectra/measure.hpp"
#include "dspectra/spec_io.hpp"

using namespace dspectra;

namespace {

bool same_atoms(const DyadicMeasure& a, const DyadicMeasure& b) {
    return a.resolution == b.resolution && a.atoms == b.atoms;
}

bool is_prime_u(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("dirac constructor") {
    DyadicMeasure d0 = make_dirac(Rational(0), 4);
    REQUIRE(d0.atoms.size() == 1);
    CHECK(d0.atoms[0].first == 0);
    CHECK(d0.atoms[0].second == 1);

    DyadicMeasure dh = make_dirac(Rational(1, 2), 1);
    REQUIRE(dh.atoms.size() == 1);
    CHECK(dh.atoms[0].first == 1);

    CHECK(make_dirac(Rational(0), 10).total_variation() == 1);
    CHECK_THROWS(make_dirac(Rational(1, 3), 4));
}

TEST_CASE("uniform constructor and Haar invariance") {
    DyadicMeasure u = make_uniform(2);
    REQUIRE(u.atoms.size() == 4);
    for (const auto& [c, w] : u.atoms) CHECK(w == Rational(1, 4));

    DyadicMeasure shifted = convolve(u, make_dirac(Rational(3, 8), 3));
    CHECK(same_atoms(coarsen(shifted, 2), u));

    CHECK(std::abs(fourier_stieltjes_at(u, 0) - std::complex<double>{1.0, 0.0}) < 1e-15);
}

TEST_CASE("sparse constructor") {
    int k = 10;
    Rational beta(1, 2);
    std::uint64_t count = std::uint64_t(1) << 5;  // 2^{ceil(beta k)}
    std::vector<std::uint64_t> cells;
    for (std::uint64_t c = 0; c < count; ++c) cells.push_back(c);
    DyadicMeasure mu = make_sparse(cells, k);
    ClassMembership m = check_class_membership(mu, beta, k);
    CHECK(m.member);

    CHECK(same_atoms(make_sparse({0}, 6), make_dirac(Rational(0), 6)));
    CHECK_THROWS(make_sparse({}, 4));

    // square positions: few enough cells that a beta-dimensional family covers
    // all the mass once floor(2^{beta k}) reaches the support size
    std::vector<std::uint64_t> squares;
    for (std::uint64_t j = 0; j * j <= 16; ++j) squares.push_back(j * j);
    DyadicMeasure sq = make_sparse(squares, 16);
    CHECK(c_beta_estimate(sq, Rational(1, 4), 16) == 1);
}

TEST_CASE("cantor constructor") {
    CHECK(same_atoms(make_cantor({3, 3, 3}, 3), make_uniform(3)));
    CHECK(same_atoms(make_cantor({1, 1, 1, 1}, 4), make_dirac(Rational(0), 4)));

    int d = 5;
    std::vector<unsigned> pattern;
    for (int i = 0; i < d; ++i) {
        pattern.push_back(3);
        pattern.push_back(1);
    }
    DyadicMeasure c = make_cantor(pattern, 2 * d);
    CHECK(c.atoms.size() == (std::size_t(1) << d));
    for (const auto& [cell, w] : c.atoms) CHECK(w == pow2(-d));

    CHECK_THROWS(make_cantor({3, 0, 3}, 3));
}

TEST_CASE("riesz sampled constructor") {
    DyadicMeasure flat = make_riesz_sampled(0, 8);
    REQUIRE(flat.atoms.size() == 256);
    CHECK(std::abs(to_double(flat.total_mass()) - 1.0) < 1e-12);

    DyadicMeasure mu = make_riesz_sampled(2, 12);
    CHECK(mu.float_sampled);
    CHECK(mu.is_positive());
    CHECK(std::abs(to_double(mu.total_mass()) - 1.0) < 1e-12);
    CHECK(std::abs(fourier_stieltjes_at(mu, 3) - std::complex<double>{0.5, 0.0}) < 1e-3);
    CHECK(std::abs(fourier_stieltjes_at(mu, 12) - std::complex<double>{0.25, 0.0}) < 1e-3);

    CHECK_THROWS(make_riesz_sampled(5, 8));
}

TEST_CASE("liouville truncation") {
    CHECK(same_atoms(make_liouville_truncation({}, 6).measure, make_uniform(6)));

    // one level: brute-force oracle over cells
    int K = 12;
    LiouvilleResult one = make_liouville_truncation({{5, 1}}, K);
    std::vector<std::uint64_t> oracle;
    for (std::uint64_t c = 0; c < (std::uint64_t(1) << K); ++c) {
        Rational lo(c, std::uint64_t(1) << K), hi(c + 1, std::uint64_t(1) << K);
        bool hit = false;
        for (std::uint64_t p = 5; p <= 10 && !hit; ++p) {
            if (!is_prime_u(p)) continue;
            Rational r(1, BigInt(p) * p * p);
            for (std::uint64_t j = 0; j <= p && !hit; ++j) {
                Rational center(j, p);
                if (center - r < hi && lo <= center + r) hit = true;
            }
        }
        if (hit) oracle.push_back(c);
    }
    REQUIRE(one.measure.atoms.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(one.measure.atoms[i].first == oracle[i]);

    LiouvilleResult two = make_liouville_truncation({{5, 1}, {11, 2}}, K);
    CHECK(two.measure.atoms.size() < one.measure.atoms.size());
    CHECK(two.surviving_cells_per_level.size() == 2);
}

TEST_CASE("convolution identities") {
    DyadicMeasure mu = random_sparse_measure(3, 8, 20);
    CHECK(same_atoms(convolve(make_dirac(Rational(0), 8), mu), mu));

    DyadicMeasure ab = convolve(make_dirac(Rational(3, 16), 4), make_dirac(Rational(15, 16), 4));
    CHECK(same_atoms(ab, make_dirac(Rational(2, 16), 4)));
}

TEST_CASE("convolution theorem at random frequencies") {
    DyadicMeasure mu = random_sparse_measure(17, 12, 40);
    DyadicMeasure nu = random_sparse_measure(23, 12, 40);
    DyadicMeasure conv = convolve(mu, nu);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        long long n = static_cast<long long>(rng() % 20000) - 10000;
        auto lhs = fourier_stieltjes_at(conv, n);
        auto rhs = fourier_stieltjes_at(mu, n) * fourier_stieltjes_at(nu, n);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("mass conservation on random measures") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        DyadicMeasure mu = random_sparse_measure(1000 + s, 8, 10);
        DyadicMeasure nu = random_sparse_measure(9000 + s, 8, 10);
        CHECK(convolve(mu, nu).total_mass() == mu.total_mass() * nu.total_mass());
        CHECK(coarsen(mu, 5).total_mass() == mu.total_mass());

        std::vector<std::uint64_t> mask;
        for (const auto& [c, w] : mu.atoms)
            if (c % 2 == 0) mask.push_back(c);
        std::vector<std::uint64_t> comask;
        for (const auto& [c, w] : mu.atoms)
            if (c % 2 == 1) comask.push_back(c);
        CHECK(restrict_cells(mu, mask).total_mass() + restrict_cells(mu, comask).total_mass() ==
              mu.total_mass());
    }
}

TEST_CASE("jordan split, coarsen, restrict, scale") {
    DyadicMeasure mu;
    mu.resolution = 1;
    mu.atoms = {{0, Rational(1)}, {1, Rational(-2)}};
    auto [pos, neg] = jordan_split(mu);
    CHECK(pos.atoms == decltype(pos.atoms){{0, Rational(1)}});
    CHECK(neg.atoms == decltype(neg.atoms){{1, Rational(2)}});
    CHECK(pos.total_variation() + neg.total_variation() == mu.total_variation());

    CHECK(same_atoms(coarsen(make_uniform(4), 2), make_uniform(2)));

    DyadicMeasure r = random_sparse_measure(77, 6, 12);
    std::vector<std::uint64_t> all;
    for (std::uint64_t c = 0; c < 64; ++c) all.push_back(c);
    CHECK(same_atoms(restrict_cells(r, all), r));

    CHECK(scale(r, Rational(3)).total_mass() == 3 * r.total_mass());
}

TEST_CASE("parallel convolution matches serial reference") {
    DyadicMeasure mu = random_sparse_measure(41, 10, 200);
    DyadicMeasure nu = random_sparse_measure(43, 10, 200);
    CHECK(same_atoms(convolve(mu, nu), convolve_serial(mu, nu)));
}

TEST_CASE("interval list intersection vs pointwise oracle") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto random_list = [&rng]() {
            std::vector<RatInterval> v;
            int n = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) {
                Rational a(rng() % 64, 64), b(rng() % 64, 64);
                if (b < a) std::swap(a, b);
                v.push_back({a, b});
            }
            return v;
        };
        auto a = normalize_intervals(random_list());
        auto b = normalize_intervals(random_list());
        auto both = intersect_interval_lists(a, b);
        auto covered = [](const std::vector<RatInterval>& v, const Rational& x) {
            for (const auto& iv : v)
                if (iv.lo <= x && x <= iv.hi) return true;
            return false;
        };
        for (std::uint64_t j = 0; j <= 128; ++j) {
            Rational x(j, 128);
            CHECK(covered(both, x) == (covered(a, x) && covered(b, x)));
        }
    }
}

TEST_CASE("measure specs round-trip through JSON") {
    DyadicMeasure c = measure_from_arg(R"({"type":"cantor","pattern":[3,1,3]})");
    CHECK(c.resolution == 3);
    DyadicMeasure d = measure_from_arg(R"({"type":"dirac","position":"1/4","resolution":4})");
    CHECK(d.atoms.size() == 1);
    DyadicMeasure p = measure_from_arg(
        R"({"type":"convolve_power","power":2,"base":{"type":"sparse","cells":[0,1,4],"resolution":6}})");
    CHECK(p.total_mass() == 1);
    CHECK_THROWS(measure_from_arg(R"({"type":"nope"})"));
}
