#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dspectra/rational.hpp"

namespace dspectra {

/// Signed atomic measure on the 2^-K grid of the circle. Atoms sit at the left
/// endpoints j*2^-K of the dyadic cells; only nonzero weights are stored,
/// sorted by cell index.
struct DyadicMeasure {
    int resolution = 0;  // K: grid has 2^K cells
    std::vector<std::pair<std::uint64_t, Rational>> atoms;
    // Constructors that sample transcendental densities (Riesz) set this; it
    // downgrades downstream exact assertions to toleranced ones.
    bool float_sampled = false;

    std::uint64_t cell_count() const { return std::uint64_t(1) << resolution; }

    Rational total_variation() const;
    Rational total_mass() const;
    bool is_positive() const;
    Rational weight_at(std::uint64_t cell) const;

    void normalize_sort();  // sort by index, merge duplicates, drop zeros
};

DyadicMeasure make_dirac(const Rational& position, int K);
DyadicMeasure make_uniform(int K);
DyadicMeasure make_sparse(const std::vector<std::uint64_t>& support, int K);
// Per-level child-keep mask: mask[level] & 1 -> keep left child, & 2 -> keep right.
DyadicMeasure make_cantor(const std::vector<unsigned>& branch_pattern, int depth);
DyadicMeasure make_riesz_sampled(int k_max, int K);
// Finite truncation of the Liouville-type intersection set: levels are
// (M, exponent); the level-k constraint is union over primes p in [M, 2M] of
// { x : ||p x|| <= p^{-1-k} }.
struct LiouvilleResult {
    DyadicMeasure measure;
    std::vector<std::size_t> surviving_cells_per_level;
};
LiouvilleResult make_liouville_truncation(const std::vector<std::pair<std::uint64_t, int>>& levels, int K);

DyadicMeasure convolve(const DyadicMeasure& mu, const DyadicMeasure& nu);
DyadicMeasure coarsen(const DyadicMeasure& mu, int K_new);
DyadicMeasure restrict_cells(const DyadicMeasure& mu, const std::vector<std::uint64_t>& cells);
std::pair<DyadicMeasure, DyadicMeasure> jordan_split(const DyadicMeasure& mu);
DyadicMeasure scale(const DyadicMeasure& mu, const Rational& c);
DyadicMeasure abs_measure(const DyadicMeasure& mu);
DyadicMeasure negate(const DyadicMeasure& mu);

// Serial reference for the OpenMP convolution kernel; kept for tests/bench.
DyadicMeasure convolve_serial(const DyadicMeasure& mu, const DyadicMeasure& nu);

// Exact interval arithmetic on the circle: closed intervals [lo, hi] given as
// rationals, possibly wrapping. Used by the Liouville constructor and tested
// against a brute-force oracle.
struct RatInterval {
    Rational lo, hi;  // non-wrapping after normalization to [0,1)
};
std::vector<RatInterval> intersect_interval_lists(const std::vector<RatInterval>& a,
                                                  const std::vector<RatInterval>& b);
std::vector<RatInterval> normalize_intervals(std::vector<RatInterval> v);

}  // namespace dspectra
