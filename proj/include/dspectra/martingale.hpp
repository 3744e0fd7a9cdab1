#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dspectra/measure.hpp"

namespace dspectra {

/// Dyadic martingale of a measure: cell masses m(omega) over the binary tree
/// of dyadic intervals, one sparse array per level. Level n holds the 2^n
/// cells of length 2^-n; only nonzero masses are stored.
struct MartingaleTree {
    int depth = 0;
    std::vector<std::vector<std::pair<std::uint64_t, Rational>>> levels;  // levels[n]

    Rational mass_at(int n, std::uint64_t cell) const;
};

MartingaleTree build_tree(const DyadicMeasure& mu);

/// Partition of the nonzero vertices of one level: turbulent vertices (both
/// children below 2^alpha of the parent), descent (m(w0) > m(w1)), ascent
/// (m(w0) < m(w1)). Zero-mass vertices form the implicit class Z_n of size
/// 2^n - (stored vertices).
struct VertexClassification {
    int level = 0;
    Rational alpha;
    std::vector<std::uint64_t> turbulent;  // Xi_n
    std::vector<std::uint64_t> descent;    // A_n
    std::vector<std::uint64_t> ascent;     // B_n
    std::uint64_t zero_count = 0;          // #Z_n

    Rational turbulent_mass(const MartingaleTree& tree) const;
};

VertexClassification classify(const MartingaleTree& tree, int n, const Rational& alpha);

/// Per-leaf counts of turbulent proper ancestors in levels r+1..k-1.
struct SrCounts {
    std::vector<std::pair<std::uint64_t, int>> counts;  // (leaf cell, S_r)
    Rational lhs;  // sum over levels of turbulent mass
    Rational rhs;  // sum over leaves of m * S_r
};
SrCounts s_r_counts(const MartingaleTree& tree, const Rational& alpha, int r, int k);

struct MountainRiverResult {
    bool found = false;
    int n = -1;
    Rational turbulent_mass;
    Rational theta_used;          // r/k
    int r = 0;
    Rational rho_prime;
    std::vector<Rational> turbulent_mass_by_level;  // levels r+1..k-1
    std::string failure;
};
MountainRiverResult mountain_river_search(const DyadicMeasure& mu, const Rational& beta,
                                          const Rational& alpha, const Rational& rho, int k);

struct ClassMembership {
    bool member = false;
    BigInt nonzero_count;
};
ClassMembership check_class_membership(const DyadicMeasure& mu, const Rational& beta, int k);

/// Finite-scale c_beta: sum of the floor(2^{beta k}) largest level-k cell
/// masses of |mu|. Greedy is optimal because level-k cells are disjoint.
Rational c_beta_estimate(const DyadicMeasure& mu, const Rational& beta, int k);

struct CoverFamily {
    int k = 0;                         // cell length d = 2^-k
    std::vector<std::uint64_t> cells;  // D
    Rational delta;                    // margin
    Rational tau;
    Rational beta;
    Rational nu1_mass;                 // sum of nu1 over D
    Rational nu2_margin_mass;          // nu2 of the delta-enlargement of D
};
struct CoverFailure {
    // per-scale name of the binding constraint
    std::vector<std::pair<int, std::string>> binding;
};
struct CoverResult {
    std::optional<CoverFamily> family;
    CoverFailure failure;
};
// margin_cells: enlargement radius in units of level-k cells (1 = one cell
// width, the default delta = d).
CoverResult select_cover(const DyadicMeasure& nu1, const DyadicMeasure& nu2, const Rational& beta,
                         const Rational& tau, std::uint64_t margin_cells = 1);

// Single-scale attempt; precondition checks are the caller's job. Used by
// select_cover and by the witness pipeline (prop2), which needs a scale-dependent
// margin.
CoverResult cover_at_scale(const DyadicMeasure& nu1, const DyadicMeasure& nu2, const Rational& beta,
                           const Rational& tau, int k, std::uint64_t margin_cells);

struct MeasureSplit {
    DyadicMeasure positive_part;       // mu_p
    DyadicMeasure remainder;           // mu_r = |mu| off the carrier
    std::vector<std::uint64_t> carrier;  // A_eta, level-K cells
    Rational eta;
    bool negated = false;  // worked with -mu because the negative part dominated
};
MeasureSplit isolate_positive_part(const DyadicMeasure& mu, const Rational& beta, const Rational& eta);

}  // namespace dspectra
