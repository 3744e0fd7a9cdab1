// End-to-end acceptance checks; one printed verdict per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dspectra/fourier.hpp"
#include "dspectra/martingale.hpp"
#include "dspectra/measure.hpp"
#include "dspectra/spec_io.hpp"
#include "dspectra/testfn.hpp"
#include "dspectra/walsh.hpp"

using namespace dspectra;

namespace {

int failures = 0;

struct Criterion {
    const char* name;
    double budget_s;
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
    void finish() {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > budget_s && ok) {
            ok = false;
            detail = "runtime " + std::to_string(secs) + "s over budget";
        }
        std::printf("%-44s %s  (%.2fs)%s%s\n", name, ok ? "pass" : "FAIL", secs,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        if (!ok) ++failures;
    }
};

DyadicMeasure alternating_cantor(int half_depth) {
    std::vector<unsigned> pattern;
    for (int i = 0; i < half_depth; ++i) {
        pattern.push_back(3);
        pattern.push_back(1);
    }
    return make_cantor(pattern, 2 * half_depth);
}

void criterion_riesz() {
    Criterion c{"1 riesz coefficient range and quarter set", 1.0};
    RieszTable t = riesz_exact_coeffs(7);
    std::set<Rational> range;
    for (const auto& rv : range_closure_report(t)) range.insert(rv.value);
    std::set<Rational> expect{Rational(0)};
    for (int m = 0; m <= 7; ++m) expect.insert(pow2(-m));
    c.require(range == expect, "value census mismatch");

    std::set<long long> quarter;
    for (long long v : level_set(t, Rational(1, 4))) quarter.insert(v);
    std::set<long long> qexpect;
    long long p3[8];
    p3[0] = 1;
    for (int i = 1; i <= 7; ++i) p3[i] = 3 * p3[i - 1];
    for (int k1 = 1; k1 <= 7; ++k1)
        for (int k2 = k1 + 1; k2 <= 7; ++k2)
            for (int s1 : {-1, 1})
                for (int s2 : {-1, 1}) qexpect.insert(s1 * p3[k1] + s2 * p3[k2]);
    c.require(quarter == qexpect, "quarter level set mismatch");
    c.finish();
}

void criterion_hn() {
    Criterion c{"2 two-plateau norm and mean identities", 1.0};
    std::mt19937_64 rng(42);
    for (int t = 0; t < 50; ++t) {
        int n = 1 + static_cast<int>(rng() % 14);
        Rational eps = Rational(1 + rng() % 63, 64) * pow2(-n - 1);
        TestFunctionHn h = make_hn(n, eps);
        StepFunction s = h.as_step();
        c.require(s.integral() == 0, "mean not zero");
        // the epsilon^2 correction to 1/2 carries a minus sign: the plateau of
        // larger magnitude sits on the shorter block once the mean vanishes
        c.require(s.l1_norm() == Rational(1, 2) - eps * eps * pow2(2 * n + 1),
                  "L1 closed form violated at n=" + std::to_string(n));
        c.require(s.linf_norm() <= pow2(n), "Linf bound violated");
    }
    c.finish();
}

void criterion_calm_levels() {
    Criterion c{"3 calm-level search property suite", 10.0};
    Rational beta(1, 2), alpha(-3, 4), rho(3, 4);
    const int k = 20;
    const double floor_level = 0.9 * (1.0 - 0.5 / (0.75 * 0.75)) * k;
    for (std::uint64_t s = 0; s < 200 && c.ok; ++s) {
        DyadicMeasure mu = random_sparse_measure(20260800 + s, k, std::uint64_t(1) << 10);
        MountainRiverResult res = mountain_river_search(mu, beta, alpha, rho, k);
        c.require(res.found, "no calm level, seed " + std::to_string(s));
        if (!res.found) break;
        c.require(double(res.n) > floor_level, "level too early, seed " + std::to_string(s));
        c.require(res.turbulent_mass < rho * mu.total_variation(), "turbulent mass too large");
        SrCounts sc = s_r_counts(build_tree(mu), alpha, res.r, k);
        c.require(sc.lhs == sc.rhs, "level-sum identity broken, seed " + std::to_string(s));
    }
    c.finish();
}

void criterion_witness_bound() {
    Criterion c{"4 convolution witness lower bound", 30.0};
    auto run = [&c](const DyadicMeasure& mu, const Rational& beta, const std::string& tag) {
        Prop2Report rep = prop2_pipeline(mu, beta, Rational(-3, 4), Rational(3, 4), Rational(1, 100));
        c.require(rep.failed_stage.empty(), tag + ": " + rep.failed_stage);
        if (!rep.failed_stage.empty()) return;
        c.require(rep.ok, tag + ": bound or chain step failed");
        c.require(rep.ledger.all_pass(), tag + ": chain ledger failure");
    };
    run(alternating_cantor(12), Rational(17, 32), "cantor-24");
    for (std::uint64_t s = 0; s < 20 && c.ok; ++s)
        run(random_sparse_measure(777 + s, 20, 12), Rational(1, 2), "sparse seed " + std::to_string(s));
    c.finish();
}

void criterion_bands() {
    Criterion c{"5 frequency-band energy bounds", 60.0};
    const double a = 0.04, b = 1e4;
    for (int n = 8; n <= 12; ++n) {
        TestFunctionHn h = make_hn(n, pow2(-n - 4));
        BandEnergies e = band_tail_energies(h, a, b);
        c.require(e.low < 8 * M_PI * M_PI * a * a * a, "low band energy, n=" + std::to_string(n));
        c.require(e.high_hi < 18.0 / b, "high band energy, n=" + std::to_string(n));
        BandSupportCheck s = band_support_check(h, a, b);
        c.require(s.no_negative_frequencies && s.out_of_band_zero && s.in_band_matches,
                  "analytic polynomial support, n=" + std::to_string(n));
    }
    c.finish();
}

void criterion_decay() {
    Criterion c{"6 spectral decay vs stable lower bound", 60.0};
    DyadicMeasure sq = make_sparse({0, 1, 4, 9}, 12);
    DecayReport rep = spectral_decay_experiment(sq, 4, 4096, Rational(1, 2), Rational(-3, 4),
                                                Rational(3, 4), Rational(1, 100));
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        c.require(rep.rows[i].sup_offzero < rep.rows[i - 1].sup_offzero,
                  "sup not strictly decreasing at m=" + std::to_string(i + 1));
    for (const auto& row : rep.rows)
        c.require(row.prop2_bound >= 0.5 * rep.rows[0].prop2_bound,
                  "lower bound dipped at m=" + std::to_string(row.m));
    c.finish();
}

void criterion_walsh() {
    Criterion c{"7 walsh/haar transform suite", 30.0};
    std::mt19937_64 rng(77);
    // exact Parseval
    for (int t = 0; t < 10 && c.ok; ++t) {
        DyadicMeasure mu = random_sparse_measure(rng(), 12, 40);
        Rational lhs = Rational(0);
        WalshExpansion e = walsh_coeffs(mu, 12);
        lhs += e.empty_coeff * e.empty_coeff;
        for (const auto& g : e.groups)
            for (const auto& v : g) lhs += v * v;
        Rational rhs(0);
        for (const auto& [cell, w] : mu.atoms) rhs += w * w;
        c.require(lhs == rhs * pow2(12), "group Parseval identity");
    }
    // matrix reproduces the level coefficients
    for (int n = 1; n <= 8 && c.ok; ++n) {
        auto m = walsh_haar_matrix(n);
        for (int t = 0; t < 100 && c.ok; ++t) {
            DyadicMeasure mu = random_sparse_measure(rng(), n + 2, 24);
            WalshExpansion e = walsh_coeffs(mu, n + 1);
            std::vector<Rational> mapped(m.size(), Rational(0));
            const auto& g = e.groups[static_cast<std::size_t>(n)];
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = 0; j < g.size(); ++j) mapped[i] += m[i][j] * g[j];
            c.require(mapped == haar_coeffs(mu, n), "matrix map, level " + std::to_string(n));
        }
    }
    // contraction on random vectors
    auto m4 = walsh_haar_matrix(4);
    for (int t = 0; t < 1000 && c.ok; ++t) {
        std::vector<Rational> x(16), y(16, Rational(0));
        Rational x1(0), xi(0);
        for (auto& v : x) v = Rational(static_cast<long long>(rng() % 2001) - 1000, 1000);
        for (std::size_t i = 0; i < 16; ++i)
            for (std::size_t j = 0; j < 16; ++j) y[i] += m4[i][j] * x[j];
        Rational y1(0), yi(0);
        for (const auto& v : x) {
            x1 += rational_abs(v);
            xi = std::max(xi, rational_abs(v));
        }
        for (const auto& v : y) {
            y1 += rational_abs(v);
            yi = std::max(yi, rational_abs(v));
        }
        c.require(y1 <= x1 && yi <= xi, "l1/linf contraction");
        for (int k = 1; k <= 16 && c.ok; k += 3)
            c.require(lorentz_norm(y, BigInt(k)) <= lorentz_norm(x, BigInt(k)),
                      "rearrangement-norm contraction");
    }
    // lorentz norm vs subset oracle
    for (int t = 0; t < 10 && c.ok; ++t) {
        std::size_t len = 1 + rng() % 16;
        std::vector<Rational> v(len);
        for (auto& x : v) x = Rational(static_cast<long long>(rng() % 401) - 200, 100);
        for (std::size_t k = 1; k <= len; ++k) {
            Rational best(0);
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << len); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcountll(mask)) != k) continue;
                Rational s(0);
                for (std::size_t i = 0; i < len; ++i)
                    if (mask & (std::uint64_t(1) << i)) s += rational_abs(v[i]);
                best = std::max(best, s);
            }
            c.require(lorentz_norm(v, BigInt(static_cast<long long>(k))) == best, "subset oracle");
        }
    }
    c.finish();
}

void criterion_oracles() {
    Criterion c{"8 independent-oracle equivalences", 30.0};
    std::mt19937_64 rng(88);
    // greedy cell-mass estimate vs exhaustive subsets
    for (int t = 0; t < 20 && c.ok; ++t) {
        DyadicMeasure mu = random_sparse_measure(rng(), 12, 14);
        for (int k : {6, 9, 12}) {
            Rational beta(1 + t % 3, 4);
            DyadicMeasure level = coarsen(abs_measure(mu), k);
            BigInt cap_big = floor_pow2(beta * k);
            std::size_t n = level.atoms.size();
            std::size_t cap = cap_big > BigInt(n) ? n : cap_big.convert_to<std::size_t>();
            Rational best(0);
            for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcountll(mask)) > cap) continue;
                Rational s(0);
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (std::uint64_t(1) << i)) s += level.atoms[i].second;
                best = std::max(best, s);
            }
            c.require(c_beta_estimate(mu, beta, k) == best, "subset oracle at k=" + std::to_string(k));
        }
    }
    // exact step integration vs dense Riemann sums
    for (int t = 0; t < 5 && c.ok; ++t) {
        TestFunctionHn h = make_hn(2 + static_cast<int>(rng() % 4), pow2(-10));
        StepFunction f = convolve_hn(h, random_sparse_measure(rng(), 6, 6));
        const int Kd = 13;
        Rational riemann(0);
        for (std::uint64_t i = 0; i < (std::uint64_t(1) << Kd); ++i)
            riemann += rational_abs(f.value_at(Rational(i, std::uint64_t(1) << Kd))) * pow2(-Kd);
        Rational tol = Rational(2 * static_cast<long long>(f.breaks.size())) * f.linf_norm() * pow2(-Kd);
        c.require(rational_abs(f.l1_norm() - riemann) <= tol, "dense Riemann sum disagrees");
    }
    // transform of a convolution factorizes
    DyadicMeasure mu = random_sparse_measure(rng(), 12, 40);
    DyadicMeasure nu = random_sparse_measure(rng(), 12, 40);
    DyadicMeasure conv = convolve(mu, nu);
    for (int t = 0; t < 50 && c.ok; ++t) {
        long long n = static_cast<long long>(rng() % 20000) - 10000;
        auto lhs = fourier_stieltjes_at(conv, n);
        auto rhs = fourier_stieltjes_at(mu, n) * fourier_stieltjes_at(nu, n);
        c.require(std::abs(lhs - rhs) < 1e-12, "transform factorization beyond tolerance");
    }
    c.finish();
}

}  // namespace

int main() {
    criterion_riesz();
    criterion_hn();
    criterion_calm_levels();
    criterion_witness_bound();
    criterion_bands();
    criterion_decay();
    criterion_walsh();
    criterion_oracles();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
