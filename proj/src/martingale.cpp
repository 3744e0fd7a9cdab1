#include "dspectra/martingale.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace dspectra {

Rational MartingaleTree::mass_at(int n, std::uint64_t cell) const {
    const auto& lvl = levels[n];
    auto it = std::lower_bound(lvl.begin(), lvl.end(), cell,
                               [](const auto& a, std::uint64_t c) { return a.first < c; });
    if (it != lvl.end() && it->first == cell) return it->second;
    return Rational(0);
}

MartingaleTree build_tree(const DyadicMeasure& mu) {
    MartingaleTree t;
    t.depth = mu.resolution;
    t.levels.resize(t.depth + 1);
    t.levels[t.depth] = mu.atoms;
    for (int n = t.depth - 1; n >= 0; --n) {
        auto& lvl = t.levels[n];
        for (const auto& [c, w] : t.levels[n + 1]) {
            std::uint64_t cc = c >> 1;
            if (!lvl.empty() && lvl.back().first == cc)
                lvl.back().second += w;
            else
                lvl.emplace_back(cc, w);
        }
        std::erase_if(lvl, [](const auto& a) { return a.second == 0; });
    }
    return t;
}

VertexClassification classify(const MartingaleTree& tree, int n, const Rational& alpha) {
    if (!(Rational(-1) < alpha && alpha < Rational(0)))
        throw std::invalid_argument("classify: alpha must lie in (-1, 0)");
    if (n >= tree.depth) throw std::invalid_argument("classify: level must be below tree depth");
    VertexClassification cls;
    cls.level = n;
    cls.alpha = alpha;
    const double da = to_double(alpha);
    // child < 2^alpha * parent, with a double log2 screen ahead of the exact test
    auto less2 = [&](const Rational& mc, const Rational& m) {
        if (mc == 0) return true;  // parent mass is positive here
        double lx = std::log2(to_double(mc)), ly = std::log2(to_double(m)) + da;
        if (lx < ly - 1e-9) return true;
        if (lx > ly + 1e-9) return false;
        return less_than_pow2_times(mc, alpha, m);
    };
    const auto& kids = tree.levels[n + 1];
    std::size_t j = 0;
    for (const auto& [c, m] : tree.levels[n]) {
        if (m < 0) throw std::invalid_argument("classify: negative mass; classification needs a positive measure");
        // levels are sorted by cell, so children appear in order
        while (j < kids.size() && (kids[j].first >> 1) < c) ++j;
        static const Rational zero(0);
        const Rational* m0 = &zero;
        const Rational* m1 = &zero;
        if (j < kids.size() && kids[j].first == (c << 1)) m0 = &kids[j++].second;
        if (j < kids.size() && kids[j].first == ((c << 1) | 1u)) m1 = &kids[j].second;
        bool turb = less2(*m0, m) && less2(*m1, m);
        if (turb)
            cls.turbulent.push_back(c);
        else if (*m0 > *m1)
            cls.descent.push_back(c);
        else if (*m0 < *m1)
            cls.ascent.push_back(c);
        else
            // exact tie with positive mass would be turbulent (1/2 < 2^alpha);
            // reaching here means m == 0, which the sparse levels never store
            throw std::logic_error("classify: non-turbulent tie with positive mass");
    }
    cls.zero_count = (std::uint64_t(1) << n) - tree.levels[n].size();
    return cls;
}

Rational VertexClassification::turbulent_mass(const MartingaleTree& tree) const {
    Rational s(0);
    for (auto c : turbulent) s += tree.mass_at(level, c);
    return s;
}

SrCounts s_r_counts(const MartingaleTree& tree, const Rational& alpha, int r, int k) {
    if (!(0 <= r && r <= k - 2 && k <= tree.depth))
        throw std::invalid_argument("s_r_counts: need 0 <= r <= k-2 <= depth-2");
    std::vector<std::vector<std::uint64_t>> turb(k);  // sorted, as classify emits them
    SrCounts out;
    out.lhs = 0;
    for (int n = r + 1; n <= k - 1; ++n) {
        auto cls = classify(tree, n, alpha);
        turb[n] = std::move(cls.turbulent);
        for (auto c : turb[n]) out.lhs += tree.mass_at(n, c);
    }
    out.rhs = 0;
    for (const auto& [leaf, m] : tree.levels[k]) {
        int s = 0;
        for (int n = r + 1; n <= k - 1; ++n)
            if (std::binary_search(turb[n].begin(), turb[n].end(), leaf >> (k - n))) ++s;
        out.counts.emplace_back(leaf, s);
        out.rhs += m * s;
    }
    return out;
}

ClassMembership check_class_membership(const DyadicMeasure& mu, const Rational& beta, int k) {
    if (k > mu.resolution) throw std::invalid_argument("check_class_membership: k exceeds resolution");
    DyadicMeasure c = coarsen(mu, k);
    ClassMembership res;
    res.nonzero_count = BigInt(c.atoms.size());
    // integer count <= 2^{beta k}  <=>  count <= floor(2^{beta k})
    res.member = res.nonzero_count <= floor_pow2(beta * k);
    return res;
}

MountainRiverResult mountain_river_search(const DyadicMeasure& mu, const Rational& beta,
                                          const Rational& alpha, const Rational& rho, int k) {
    MountainRiverResult res;
    if (!mu.is_positive()) throw std::invalid_argument("mountain_river_search: measure must be positive");
    if (!(alpha * rho + beta < 0))
        throw std::invalid_argument("mountain_river_search: need alpha*rho + beta < 0");
    auto membership = check_class_membership(mu, beta, k);
    if (!membership.member)
        throw std::invalid_argument("mountain_river_search: measure is not in M(beta, k); nonzero count " +
                                    membership.nonzero_count.str());

    // rho' strictly between the critical value -beta/alpha and rho (midpoint).
    Rational rho_crit = -beta / alpha;
    if (rho_crit < 0) rho_crit = 0;
    Rational rho_prime = (rho + rho_crit) / 2;
    if (rho_prime == 0) rho_prime = rho / 2;  // beta = 0 and rho_crit = 0 give rho/2 anyway
    res.rho_prime = rho_prime;

    // r = ceil( k (alpha rho' + beta) / (alpha rho') ), a value in (0, k).
    Rational ratio = (alpha * rho_prime + beta) / (alpha * rho_prime);
    Rational rk = ratio * k;
    BigInt r_num = num(rk), r_den = den(rk);
    BigInt r_big = r_num >= 0 ? BigInt((r_num + r_den - 1) / r_den) : BigInt(r_num / r_den);
    int r = r_big.convert_to<int>();
    if (r > k - 2) r = k - 2;  // keep a nonempty level window (r, k-1]
    if (r < 0) r = 0;
    res.r = r;
    res.theta_used = Rational(r, k);

    MartingaleTree tree = build_tree(coarsen(mu, k));
    const Rational norm = mu.total_variation();
    const Rational budget = rho * norm;
    for (int n = r + 1; n <= k - 1; ++n) {
        auto cls = classify(tree, n, alpha);
        Rational tm = cls.turbulent_mass(tree);
        res.turbulent_mass_by_level.push_back(tm);
        if (!res.found && tm < budget) {
            res.found = true;
            res.n = n;
            res.turbulent_mass = tm;
        }
    }
    if (!res.found)
        res.failure = r + 1 > k - 1 ? "empty level range (r+1 > k-1)"
                                    : "no level with turbulent mass below rho*||mu||";
    return res;
}

Rational c_beta_estimate(const DyadicMeasure& mu, const Rational& beta, int k) {
    if (k > mu.resolution) throw std::invalid_argument("c_beta_estimate: k exceeds resolution");
    DyadicMeasure c = coarsen(abs_measure(mu), k);
    std::vector<Rational> masses;
    masses.reserve(c.atoms.size());
    for (const auto& [cell, w] : c.atoms) masses.push_back(w);
    std::sort(masses.begin(), masses.end(), std::greater<Rational>());
    BigInt budget = floor_pow2(beta * k);
    std::size_t take = budget > BigInt(masses.size()) ? masses.size() : budget.convert_to<std::size_t>();
    Rational s(0);
    for (std::size_t i = 0; i < take; ++i) s += masses[i];
    return s;
}

CoverResult cover_at_scale(const DyadicMeasure& nu1, const DyadicMeasure& nu2, const Rational& beta,
                           const Rational& tau, int k, std::uint64_t margin_cells) {
    CoverResult res;
    DyadicMeasure a = coarsen(nu1, k), b = coarsen(nu2, k);
    // #D <= 2^{beta k}: largest admissible count
    BigInt max_count = floor_pow2(beta * k);
    if (max_count < 1) {
        res.failure.binding.emplace_back(k, "count budget empty");
        return res;
    }
    Rational target = c_beta_estimate(nu1, beta, k) / 2 - tau;

    std::vector<std::pair<std::uint64_t, Rational>> cells = a.atoms;
    std::sort(cells.begin(), cells.end(),
              [](const auto& x, const auto& y) { return x.second > y.second; });

    const std::uint64_t ncells = std::uint64_t(1) << k;
    const std::uint64_t margin = std::min<std::uint64_t>(margin_cells, ncells / 2);

    // prefix sums of the nu2 cell masses, for O(log) range queries
    std::vector<std::uint64_t> bcells;
    std::vector<Rational> bpre;
    bcells.reserve(b.atoms.size());
    bpre.reserve(b.atoms.size());
    {
        Rational acc(0);
        for (const auto& [c, w] : b.atoms) {
            bcells.push_back(c);
            acc += w;
            bpre.push_back(acc);
        }
    }
    auto mass_in = [&](std::uint64_t lo, std::uint64_t hi) -> Rational {
        std::size_t i = static_cast<std::size_t>(
            std::lower_bound(bcells.begin(), bcells.end(), lo) - bcells.begin());
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(bcells.begin(), bcells.end(), hi) - bcells.begin());
        if (i >= j) return Rational(0);
        return i == 0 ? bpre[j - 1] : Rational(bpre[j - 1] - bpre[i - 1]);
    };

    // covered delta-enlargement as disjoint inclusive cell intervals
    std::map<std::uint64_t, std::uint64_t> cov;
    auto uncovered_mass = [&](std::uint64_t lo, std::uint64_t hi) -> Rational {
        Rational m(0);
        std::uint64_t cur = lo;
        auto it = cov.upper_bound(lo);
        if (it != cov.begin()) {
            auto p = std::prev(it);
            if (p->second >= hi) return m;
            if (p->second >= lo) cur = p->second + 1;
        }
        for (; cur <= hi; ++it) {
            if (it == cov.end() || it->first > hi) {
                m += mass_in(cur, hi);
                break;
            }
            if (it->first > cur) m += mass_in(cur, it->first - 1);
            if (it->second >= hi) break;
            cur = it->second + 1;
        }
        return m;
    };
    auto insert_range = [&](std::uint64_t lo, std::uint64_t hi) {
        auto it = cov.upper_bound(lo);
        if (it != cov.begin()) {
            auto p = std::prev(it);
            if (p->second + 1 >= lo) {
                lo = p->first;
                hi = std::max(hi, p->second);
                cov.erase(p);
            }
        }
        for (auto it2 = cov.lower_bound(lo); it2 != cov.end() && it2->first <= hi + 1;) {
            hi = std::max(hi, it2->second);
            it2 = cov.erase(it2);
        }
        cov[lo] = hi;
    };

    Rational margin_mass(0), nu1_mass(0);
    std::vector<std::uint64_t> chosen;
    bool margin_rejected = false;
    for (const auto& [c, w] : cells) {
        if (BigInt(chosen.size()) >= max_count) break;
        // the enlargement of c wraps around the circle: at most two linear ranges
        std::uint64_t lo1, hi1, lo2 = 0, hi2 = 0;
        bool two = false;
        if (2 * margin + 1 >= ncells) {
            lo1 = 0;
            hi1 = ncells - 1;
        } else {
            lo1 = (c + ncells - margin) & (ncells - 1);
            hi1 = (c + margin) & (ncells - 1);
            if (lo1 > hi1) {
                two = true;
                lo2 = 0;
                hi2 = hi1;
                hi1 = ncells - 1;
            }
        }
        Rational added = uncovered_mass(lo1, hi1);
        if (two) added += uncovered_mass(lo2, hi2);
        if (!(margin_mass + added < tau)) {
            margin_rejected = true;
            continue;
        }
        insert_range(lo1, hi1);
        if (two) insert_range(lo2, hi2);
        margin_mass += added;
        nu1_mass += w;
        chosen.push_back(c);
    }
    if (nu1_mass > target) {
        CoverFamily fam;
        fam.k = k;
        fam.cells = chosen;
        std::sort(fam.cells.begin(), fam.cells.end());
        fam.delta = Rational(BigInt(margin)) * pow2(-k);
        fam.tau = tau;
        fam.beta = beta;
        fam.nu1_mass = nu1_mass;
        fam.nu2_margin_mass = margin_mass;
        res.family = fam;
        return res;
    }
    res.failure.binding.emplace_back(k, margin_rejected ? "nu2 margin budget" : "nu1 mass target");
    return res;
}

CoverResult select_cover(const DyadicMeasure& nu1, const DyadicMeasure& nu2, const Rational& beta,
                         const Rational& tau, std::uint64_t margin_cells) {
    if (!nu1.is_positive() || !nu2.is_positive())
        throw std::invalid_argument("select_cover: measures must be positive");
    if (!(Rational(0) <= beta && beta < 1))
        throw std::invalid_argument("select_cover: beta must lie in [0, 1)");
    {
        int Kc = std::min(nu1.resolution, nu2.resolution);
        DyadicMeasure a = coarsen(nu1, Kc), b = coarsen(nu2, Kc);
        for (const auto& [c, w] : a.atoms)
            if (b.weight_at(c) != 0)
                throw std::invalid_argument("select_cover: supports overlap at cell " + std::to_string(c) +
                                            "; mutual singularity at grid resolution required");
    }

    CoverResult res;
    const int K = std::min(nu1.resolution, nu2.resolution);
    for (int k = 1; k <= K; ++k) {
        CoverResult at = cover_at_scale(nu1, nu2, beta, tau, k, margin_cells);
        if (at.family) {
            res.family = at.family;
            return res;
        }
        for (auto& bnd : at.failure.binding) res.failure.binding.push_back(bnd);
    }
    return res;
}

MeasureSplit isolate_positive_part(const DyadicMeasure& mu, const Rational& beta, const Rational& eta) {
    const int K = mu.resolution;
    Rational cb = c_beta_estimate(mu, beta, K);
    if (cb == 0) throw std::invalid_argument("isolate_positive_part: c_beta estimate is zero");

    // Greedy c_beta-optimal family of level-K cells of |mu|.
    std::vector<std::pair<std::uint64_t, Rational>> by_abs = mu.atoms;
    std::sort(by_abs.begin(), by_abs.end(), [](const auto& x, const auto& y) {
        Rational ax = rational_abs(x.second), ay = rational_abs(y.second);
        if (ax != ay) return ax > ay;
        return x.first < y.first;
    });
    BigInt budget = floor_pow2(beta * K);
    std::size_t take = budget > BigInt(by_abs.size()) ? by_abs.size() : budget.convert_to<std::size_t>();

    Rational pos_mass(0), neg_mass(0);
    for (std::size_t i = 0; i < take; ++i) {
        if (by_abs[i].second >= 0)
            pos_mass += by_abs[i].second;
        else
            neg_mass -= by_abs[i].second;
    }
    MeasureSplit split;
    split.eta = eta;
    split.negated = neg_mass > pos_mass;
    DyadicMeasure work = split.negated ? negate(mu) : mu;
    for (std::size_t i = 0; i < take; ++i)
        if ((split.negated ? -by_abs[i].second : by_abs[i].second) >= 0)
            split.carrier.push_back(by_abs[i].first);
    std::sort(split.carrier.begin(), split.carrier.end());
    split.positive_part = restrict_cells(work, split.carrier);

    DyadicMeasure am = abs_measure(mu);
    std::vector<std::uint64_t> complement;
    for (const auto& [c, w] : am.atoms)
        if (!std::binary_search(split.carrier.begin(), split.carrier.end(), c)) complement.push_back(c);
    split.remainder = restrict_cells(am, complement);
    return split;
}

}  // namespace dspectra
