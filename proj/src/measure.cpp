#include "dspectra/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dspectra {

void DyadicMeasure::normalize_sort() {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::uint64_t, Rational>> out;
    out.reserve(atoms.size());
    for (auto& a : atoms) {
        if (!out.empty() && out.back().first == a.first)
            out.back().second += a.second;
        else
            out.push_back(std::move(a));
    }
    std::erase_if(out, [](const auto& a) { return a.second == 0; });
    atoms = std::move(out);
}

Rational DyadicMeasure::total_variation() const {
    Rational s(0);
    for (const auto& [c, w] : atoms) s += rational_abs(w);
    return s;
}

Rational DyadicMeasure::total_mass() const {
    Rational s(0);
    for (const auto& [c, w] : atoms) s += w;
    return s;
}

bool DyadicMeasure::is_positive() const {
    for (const auto& [c, w] : atoms)
        if (w < 0) return false;
    return true;
}

Rational DyadicMeasure::weight_at(std::uint64_t cell) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), cell,
                               [](const auto& a, std::uint64_t c) { return a.first < c; });
    if (it != atoms.end() && it->first == cell) return it->second;
    return Rational(0);
}

DyadicMeasure make_dirac(const Rational& position, int K) {
    Rational scaled = position * pow2(K);
    if (den(scaled) != 1)
        throw std::invalid_argument("make_dirac: position " + rational_to_string(position) +
                                    " is not a multiple of 2^-" + std::to_string(K));
    BigInt cell = num(scaled) % (BigInt(1) << K);
    if (cell < 0) cell += BigInt(1) << K;
    DyadicMeasure mu;
    mu.resolution = K;
    mu.atoms.emplace_back(cell.convert_to<std::uint64_t>(), Rational(1));
    return mu;
}

DyadicMeasure make_uniform(int K) {
    DyadicMeasure mu;
    mu.resolution = K;
    const std::uint64_t n = std::uint64_t(1) << K;
    const Rational w = pow2(-K);
    mu.atoms.reserve(n);
    for (std::uint64_t j = 0; j < n; ++j) mu.atoms.emplace_back(j, w);
    return mu;
}

DyadicMeasure make_sparse(const std::vector<std::uint64_t>& support, int K) {
    if (support.empty()) throw std::invalid_argument("make_sparse: empty support");
    std::vector<std::uint64_t> cells = support;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (auto c : cells)
        if (c >= (std::uint64_t(1) << K))
            throw std::invalid_argument("make_sparse: cell index out of range");
    DyadicMeasure mu;
    mu.resolution = K;
    const Rational w(1, BigInt(cells.size()));
    for (auto c : cells) mu.atoms.emplace_back(c, w);
    return mu;
}

DyadicMeasure make_cantor(const std::vector<unsigned>& branch_pattern, int depth) {
    if (static_cast<int>(branch_pattern.size()) != depth)
        throw std::invalid_argument("make_cantor: pattern length must equal depth");
    // Cells surviving so far, with equal mass split at each level.
    std::vector<std::uint64_t> cells{0};
    Rational mass(1);
    for (int lvl = 0; lvl < depth; ++lvl) {
        unsigned keep = branch_pattern[lvl] & 3u;
        if (keep == 0) throw std::invalid_argument("make_cantor: level " + std::to_string(lvl) +
                                                   " kills all mass");
        std::vector<std::uint64_t> next;
        next.reserve(cells.size() * 2);
        for (auto c : cells) {
            if (keep & 1u) next.push_back(c << 1);
            if (keep & 2u) next.push_back((c << 1) | 1u);
        }
        if (keep == 3u) mass /= 2;
        cells = std::move(next);
    }
    DyadicMeasure mu;
    mu.resolution = depth;
    for (auto c : cells) mu.atoms.emplace_back(c, mass);
    return mu;
}

DyadicMeasure make_riesz_sampled(int k_max, int K) {
    // Oscillation must be resolved on the grid: 3^{k_max} <= 2^{K-4}.
    double reach = std::pow(3.0, k_max);
    if (K < 4 || reach > std::ldexp(1.0, K - 4))
        throw std::invalid_argument("make_riesz_sampled: resolution too coarse for k_max");
    const std::uint64_t n = std::uint64_t(1) << K;
    std::vector<double> w(n);
    const double twopi = 2.0 * M_PI;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long j = 0; j < static_cast<long long>(n); ++j) {
        double t = static_cast<double>(j) / static_cast<double>(n);
        double prod = 1.0;
        double f = 3.0;
        for (int k = 1; k <= k_max; ++k) {
            prod *= 1.0 + std::cos(f * twopi * t);
            f *= 3.0;
        }
        w[j] = prod;
    }
    // Exact normalization: weights become rationals with a common rational sum.
    DyadicMeasure mu;
    mu.resolution = K;
    mu.float_sampled = true;
    Rational total(0);
    std::vector<Rational> rw(n);
    for (std::uint64_t j = 0; j < n; ++j) {
        rw[j] = Rational(w[j]);  // exact binary expansion of the double
        total += rw[j];
    }
    for (std::uint64_t j = 0; j < n; ++j)
        if (rw[j] != 0) mu.atoms.emplace_back(j, rw[j] / total);
    return mu;
}

std::vector<RatInterval> normalize_intervals(std::vector<RatInterval> v) {
    std::vector<RatInterval> flat;
    for (auto& iv : v) {
        Rational lo = iv.lo, hi = iv.hi;
        // shift lo into [0,1)
        BigInt fl = num(lo) >= 0 ? num(lo) / den(lo) : -((-num(lo) + den(lo) - 1) / den(lo));
        lo -= Rational(fl);
        hi -= Rational(fl);
        if (hi > 1) {  // wraps: split
            flat.push_back({lo, Rational(1)});
            flat.push_back({Rational(0), hi - 1});
        } else {
            flat.push_back({lo, hi});
        }
    }
    std::sort(flat.begin(), flat.end(), [](const RatInterval& a, const RatInterval& b) { return a.lo < b.lo; });
    std::vector<RatInterval> merged;
    for (auto& iv : flat) {
        if (!merged.empty() && iv.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, iv.hi);
        else
            merged.push_back(iv);
    }
    return merged;
}

std::vector<RatInterval> intersect_interval_lists(const std::vector<RatInterval>& a,
                                                  const std::vector<RatInterval>& b) {
    std::vector<RatInterval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        Rational lo = std::max(a[i].lo, b[j].lo);
        Rational hi = std::min(a[i].hi, b[j].hi);
        if (lo <= hi) out.push_back({lo, hi});
        if (a[i].hi < b[j].hi)
            ++i;
        else
            ++j;
    }
    return out;
}

namespace {
bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}
}  // namespace

LiouvilleResult make_liouville_truncation(const std::vector<std::pair<std::uint64_t, int>>& levels, int K) {
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (!(levels[i].first < 2 * levels[i].first && 2 * levels[i].first < levels[i + 1].first))
            throw std::invalid_argument("make_liouville_truncation: bands must satisfy M_i < 2M_i < M_{i+1}");

    std::vector<RatInterval> current{{Rational(0), Rational(1)}};
    LiouvilleResult res;
    const std::uint64_t ncells = std::uint64_t(1) << K;

    auto count_cells = [&](const std::vector<RatInterval>& ivs) {
        std::size_t cnt = 0;
        for (std::uint64_t c = 0; c < ncells; ++c) {
            Rational lo(c, ncells), hi(c + 1, ncells);
            for (const auto& iv : ivs)
                if (iv.lo < hi && lo <= iv.hi) {
                    ++cnt;
                    break;
                }
        }
        return cnt;
    };

    int level_idx = 0;
    for (const auto& [M, k] : levels) {
        std::vector<RatInterval> level_set;
        bool any_prime = false;
        for (std::uint64_t p = M; p <= 2 * M; ++p) {
            if (!is_prime(p)) continue;
            any_prime = true;
            // ||p x|| <= p^{-1-k}  <=>  x within p^{-2-k} of j/p
            Rational radius(1, boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(k) + 2));
            for (std::uint64_t j = 0; j <= p; ++j) {
                Rational center{BigInt(j), BigInt(p)};
                level_set.push_back({Rational(center - radius), Rational(center + radius)});
            }
        }
        if (!any_prime)
            throw std::invalid_argument("make_liouville_truncation: no prime in [" + std::to_string(M) +
                                        ", " + std::to_string(2 * M) + "]");
        level_set = normalize_intervals(level_set);
        current = normalize_intervals(intersect_interval_lists(current, level_set));
        std::size_t cnt = count_cells(current);
        res.surviving_cells_per_level.push_back(cnt);
        if (cnt == 0)
            throw std::invalid_argument("make_liouville_truncation: intersection emptied at level " +
                                        std::to_string(level_idx));
        ++level_idx;
    }

    std::vector<std::uint64_t> support;
    for (std::uint64_t c = 0; c < ncells; ++c) {
        Rational lo(c, ncells), hi(c + 1, ncells);
        for (const auto& iv : current)
            if (iv.lo < hi && lo <= iv.hi) {
                support.push_back(c);
                break;
            }
    }
    res.measure = make_sparse(support, K);
    return res;
}

namespace {
// Align two measures to a common (coarser) resolution.
std::pair<DyadicMeasure, DyadicMeasure> align(const DyadicMeasure& mu, const DyadicMeasure& nu) {
    if (mu.resolution == nu.resolution) return {mu, nu};
    int K = std::min(mu.resolution, nu.resolution);
    return {coarsen(mu, K), coarsen(nu, K)};
}
}  // namespace

DyadicMeasure convolve_serial(const DyadicMeasure& mu_in, const DyadicMeasure& nu_in) {
    auto [mu, nu] = align(mu_in, nu_in);
    const std::uint64_t n = mu.cell_count();
    std::map<std::uint64_t, Rational> acc;
    for (const auto& [a, wa] : mu.atoms)
        for (const auto& [b, wb] : nu.atoms) {
            std::uint64_t c = (a + b) & (n - 1);
            acc[c] += wa * wb;
        }
    DyadicMeasure out;
    out.resolution = mu.resolution;
    out.float_sampled = mu.float_sampled || nu.float_sampled;
    for (auto& [c, w] : acc)
        if (w != 0) out.atoms.emplace_back(c, w);
    return out;
}

DyadicMeasure convolve(const DyadicMeasure& mu_in, const DyadicMeasure& nu_in) {
    auto [mu, nu] = align(mu_in, nu_in);
    const std::uint64_t n = mu.cell_count();
#ifdef _OPENMP
    const int nthreads = omp_get_max_threads();
#else
    const int nthreads = 1;
#endif
    std::vector<std::map<std::uint64_t, Rational>> partial(nthreads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(mu.atoms.size()); ++i) {
#ifdef _OPENMP
        auto& acc = partial[omp_get_thread_num()];
#else
        auto& acc = partial[0];
#endif
        const auto& [a, wa] = mu.atoms[i];
        for (const auto& [b, wb] : nu.atoms) {
            std::uint64_t c = (a + b) & (n - 1);
            acc[c] += wa * wb;
        }
    }
    // Ordered merge: rational addition is exact, so the result is independent
    // of the thread partition.
    std::map<std::uint64_t, Rational> acc;
    for (auto& part : partial)
        for (auto& [c, w] : part) acc[c] += w;
    DyadicMeasure out;
    out.resolution = mu.resolution;
    out.float_sampled = mu.float_sampled || nu.float_sampled;
    for (auto& [c, w] : acc)
        if (w != 0) out.atoms.emplace_back(c, w);
    return out;
}

DyadicMeasure coarsen(const DyadicMeasure& mu, int K_new) {
    if (K_new > mu.resolution)
        throw std::invalid_argument("coarsen: target resolution exceeds source");
    if (K_new == mu.resolution) return mu;
    const int shift = mu.resolution - K_new;
    DyadicMeasure out;
    out.resolution = K_new;
    out.float_sampled = mu.float_sampled;
    for (const auto& [c, w] : mu.atoms) {
        std::uint64_t cc = c >> shift;
        if (!out.atoms.empty() && out.atoms.back().first == cc)
            out.atoms.back().second += w;
        else
            out.atoms.emplace_back(cc, w);
    }
    std::erase_if(out.atoms, [](const auto& a) { return a.second == 0; });
    return out;
}

DyadicMeasure restrict_cells(const DyadicMeasure& mu, const std::vector<std::uint64_t>& cells) {
    std::vector<std::uint64_t> sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    DyadicMeasure out;
    out.resolution = mu.resolution;
    out.float_sampled = mu.float_sampled;
    for (const auto& [c, w] : mu.atoms)
        if (std::binary_search(sorted.begin(), sorted.end(), c)) out.atoms.emplace_back(c, w);
    return out;
}

std::pair<DyadicMeasure, DyadicMeasure> jordan_split(const DyadicMeasure& mu) {
    DyadicMeasure pos, neg;
    pos.resolution = neg.resolution = mu.resolution;
    pos.float_sampled = neg.float_sampled = mu.float_sampled;
    for (const auto& [c, w] : mu.atoms) {
        if (w > 0)
            pos.atoms.emplace_back(c, w);
        else
            neg.atoms.emplace_back(c, -w);
    }
    return {pos, neg};
}

DyadicMeasure scale(const DyadicMeasure& mu, const Rational& c) {
    DyadicMeasure out = mu;
    if (c == 0) {
        out.atoms.clear();
        return out;
    }
    for (auto& [cell, w] : out.atoms) w *= c;
    return out;
}

DyadicMeasure abs_measure(const DyadicMeasure& mu) {
    DyadicMeasure out = mu;
    for (auto& [c, w] : out.atoms) w = rational_abs(w);
    return out;
}

DyadicMeasure negate(const DyadicMeasure& mu) { return scale(mu, Rational(-1)); }

}  // namespace dspectra
