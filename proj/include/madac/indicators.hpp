#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "madac/core.hpp"
#include "madac/problems.hpp"
#include "madac/rng.hpp"

namespace madac {

struct ObjectiveSet {
    std::vector<Vec> vectors;
    bool normalized = false;
};

// Pareto dominance for minimization: u is no worse everywhere and
// strictly better somewhere.
inline bool dominates(const Vec& u, const Vec& v) {
    if (u.size() != v.size()) throw std::invalid_argument("dominates: dimension mismatch");
    bool strict = false;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j] > v[j]) return false;
        if (u[j] < v[j]) strict = true;
    }
    return strict;
}

// Mean over reference points of the distance to the nearest approximation
// point.
inline double igd(const ReferenceFront& reference, const std::vector<Vec>& approx) {
    if (reference.points.empty() || approx.empty())
        throw std::invalid_argument("igd: empty input set");
    double acc = 0.0;
    for (const Vec& r : reference.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec& a : approx) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j) {
                const double d = r[j] - a[j];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        acc += std::sqrt(best);
    }
    return acc / static_cast<double>(reference.points.size());
}

inline double igd(const ReferenceFront& reference, const ObjectiveSet& approx) {
    return igd(reference, approx.vectors);
}

// Monte Carlo estimate of the measure dominated by the set within the
// box [0, ref_point]. The seed pins the sample stream so repeated calls
// are reproducible.
inline double hypervolume(const std::vector<Vec>& set, const Vec& ref_point,
                          std::size_t mc_samples, std::uint64_t seed) {
    if (set.empty() || mc_samples == 0) return 0.0;
    const std::size_t m = ref_point.size();
    RngStream rng(seed);
    double box = 1.0;
    for (double r : ref_point) box *= r;
    Vec sample(m);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < mc_samples; ++s) {
        for (std::size_t j = 0; j < m; ++j) sample[j] = rng.uniform() * ref_point[j];
        for (const Vec& p : set) {
            bool dom = true;
            for (std::size_t j = 0; j < m; ++j) {
                if (p[j] > sample[j]) {
                    dom = false;
                    break;
                }
            }
            if (dom) {
                ++hits;
                break;
            }
        }
    }
    return box * static_cast<double>(hits) / static_cast<double>(mc_samples);
}

inline double hypervolume(const ObjectiveSet& set, const Vec& ref_point,
                          std::size_t mc_samples, std::uint64_t seed) {
    return hypervolume(set.vectors, ref_point, mc_samples, seed);
}

// Fraction of vectors not dominated by any other vector in the set.
inline double nd_ratio(const std::vector<Vec>& set) {
    if (set.empty()) throw std::invalid_argument("nd_ratio: empty set");
    std::size_t count = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < set.size() && !dominated; ++j)
            if (j != i && dominates(set[j], set[i])) dominated = true;
        if (!dominated) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(set.size());
}

inline double nd_ratio(const ObjectiveSet& set) { return nd_ratio(set.vectors); }

// Mean pairwise distance divided by scale. A singleton has no pairs and
// yields 0.
inline double avg_distance(const std::vector<Vec>& set, double scale) {
    if (set.empty()) throw std::invalid_argument("avg_distance: empty set");
    if (!(scale > 0.0)) throw std::invalid_argument("avg_distance: scale must be positive");
    if (set.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j) acc += euclidean(set[i], set[j]);
    const double pairs = 0.5 * static_cast<double>(set.size()) * static_cast<double>(set.size() - 1);
    return acc / pairs / scale;
}

inline double avg_distance(const ObjectiveSet& set, double scale) {
    return avg_distance(set.vectors, scale);
}

// Vicinity-distance sparsity: product of the distances to the m nearest
// other points. Crowded (duplicated) points score 0.
inline double vicinity_sparsity(std::size_t index, const std::vector<Vec>& set, int m) {
    if (set.size() <= static_cast<std::size_t>(m))
        throw std::invalid_argument("vicinity_sparsity: set needs more than m points");
    Vec dists;
    dists.reserve(set.size() - 1);
    for (std::size_t j = 0; j < set.size(); ++j)
        if (j != index) dists.push_back(euclidean(set[index], set[j]));
    std::partial_sort(dists.begin(), dists.begin() + m, dists.end());
    double prod = 1.0;
    for (int j = 0; j < m; ++j) prod *= dists[static_cast<std::size_t>(j)];
    return prod;
}

inline double vicinity_sparsity(std::size_t index, const ObjectiveSet& set, int m) {
    return vicinity_sparsity(index, set.vectors, m);
}

}  // namespace madac
