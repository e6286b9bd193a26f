#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "madac/core.hpp"
#include "madac/indicators.hpp"
#include "madac/lattice.hpp"
#include "madac/problems.hpp"
#include "madac/rng.hpp"

namespace madac {

enum class Operator { SBX, OP1, OP2, OP3, OP4 };

inline const char* operator_name(Operator op) {
    switch (op) {
        case Operator::SBX: return "SBX";
        case Operator::OP1: return "OP1";
        case Operator::OP2: return "OP2";
        case Operator::OP3: return "OP3";
        case Operator::OP4: return "OP4";
    }
    return "?";
}

struct Individual {
    Vec x;
    Vec f;
};

struct WeightSet {
    std::vector<Vec> weights;
    std::size_t size() const { return weights.size(); }
};

// Per-generation knobs; every field is an input the controlling agents
// may change between generations.
struct GenerationConfig {
    int neighborhood_size = 20;      // {15, 20, 25, 30}
    Operator op = Operator::SBX;
    double scaling_factor = 0.5;     // F in {0.4, 0.5, 0.6, 0.7}
    double k_factor = 0.5;           // fixed
    bool adapt_weights = false;
};

struct GenerationStats {
    int replacements = 0;
    int evaluations = 0;
    // (incumbent TCH, child TCH) on each sub-problem's own weight, in
    // sub-problem order; feeds fitness-improvement credit assignment.
    std::vector<std::pair<double, double>> tch_pairs;
};

// Das-Dennis weights for an exact lattice size N. Rejects sizes that no
// lattice resolution can produce, naming the nearest valid ones.
inline WeightSet generate_weights(int m, int N) {
    int H = 1;
    std::uint64_t count = 0, prev = 0;
    for (;; ++H) {
        count = choose(static_cast<std::uint64_t>(H + m - 1), static_cast<std::uint64_t>(m - 1));
        if (count >= static_cast<std::uint64_t>(N)) break;
        prev = count;
    }
    if (count != static_cast<std::uint64_t>(N))
        throw std::invalid_argument(
            "generate_weights: no simplex lattice of size " + std::to_string(N) + " for m=" +
            std::to_string(m) + "; nearest valid sizes are " + std::to_string(prev) + " and " +
            std::to_string(count));
    WeightSet ws;
    ws.weights = simplex_lattice(m, H);
    return ws;
}

// For each sub-problem, the indices of the Tn nearest weight vectors
// (self included), ascending by distance with ties broken by index.
inline std::vector<std::vector<int>> build_neighborhoods(const WeightSet& ws, int Tn) {
    const std::size_t N = ws.size();
    if (Tn < 1 || static_cast<std::size_t>(Tn) > N)
        throw std::invalid_argument("build_neighborhoods: Tn out of range");
    std::vector<std::vector<int>> out(N);
    std::vector<std::pair<double, int>> order(N);
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j)
            order[j] = {euclidean(ws.weights[i], ws.weights[j]), static_cast<int>(j)};
        std::sort(order.begin(), order.end());
        out[i].resize(static_cast<std::size_t>(Tn));
        for (int t = 0; t < Tn; ++t) out[i][static_cast<std::size_t>(t)] = order[static_cast<std::size_t>(t)].second;
    }
    return out;
}

// Tchebycheff aggregation g = max_j w_j * |f_j - z_j|.
inline double tch(const Vec& f, const Vec& w, const Vec& ideal) {
    double g = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        g = std::max(g, w[j] * std::fabs(f[j] - ideal[j]));
    return g;
}

inline Vec clamp_to_bounds(Vec x, const Vec& lower, const Vec& upper) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = clamp(x[i], lower[i], upper[i]);
    return x;
}

// Differential-evolution offspring. Parent counts are 2/4/5/3 for
// OP1/OP2/OP3/OP4; parents must be distinct picks from the neighborhood.
inline Vec de_offspring(Operator op, const Vec& base, const std::vector<const Vec*>& parents,
                        double F, double K, const Vec& lower, const Vec& upper) {
    const auto need = [op]() -> std::size_t {
        switch (op) {
            case Operator::OP1: return 2;
            case Operator::OP2: return 4;
            case Operator::OP3: return 5;
            case Operator::OP4: return 3;
            default: throw std::invalid_argument("de_offspring: SBX is not a DE operator");
        }
    }();
    if (parents.size() < need)
        throw std::invalid_argument("de_offspring: insufficient distinct parents");
    const std::size_t D = base.size();
    Vec child(D);
    for (std::size_t i = 0; i < D; ++i) {
        const auto r = [&](std::size_t idx) { return (*parents[idx])[i]; };
        double v = base[i];
        switch (op) {
            case Operator::OP1:
                v += F * (r(0) - r(1));
                break;
            case Operator::OP2:
                v += F * (r(0) - r(1)) + F * (r(2) - r(3));
                break;
            case Operator::OP3:
                v += K * (base[i] - r(0)) + F * (r(1) - r(2)) + F * (r(3) - r(4));
                break;
            case Operator::OP4:
                v += K * (base[i] - r(0)) + F * (r(1) - r(2));
                break;
            default: break;
        }
        child[i] = v;
    }
    return clamp_to_bounds(std::move(child), lower, upper);
}

// Simulated binary crossover, one child. Each coordinate crosses with
// probability 0.5 and the child side is chosen at random, so the
// per-coordinate expectation is the parent midpoint.
inline Vec sbx_offspring(const Vec& p1, const Vec& p2, const Vec& lower, const Vec& upper,
                         RngStream& rng, double eta = 20.0) {
    const std::size_t D = p1.size();
    Vec child(D);
    for (std::size_t i = 0; i < D; ++i) {
        double c1 = p1[i], c2 = p2[i];
        if (rng.uniform() < 0.5 && std::fabs(p1[i] - p2[i]) > 1e-14) {
            const double u = rng.uniform();
            const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                         : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
            c1 = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
            c2 = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
        }
        child[i] = rng.uniform() < 0.5 ? c1 : c2;
        child[i] = clamp(child[i], lower[i], upper[i]);
    }
    return child;
}

// Bounded polynomial mutation.
inline Vec polynomial_mutation(Vec x, double prob, const Vec& lower, const Vec& upper,
                               RngStream& rng, double eta = 20.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (rng.uniform() >= prob) continue;
        const double lo = lower[i], hi = upper[i];
        const double span = hi - lo;
        if (span <= 0.0) continue;
        const double d1 = (x[i] - lo) / span;
        const double d2 = (hi - x[i]) / span;
        const double u = rng.uniform();
        const double mpow = 1.0 / (eta + 1.0);
        double dq;
        if (u < 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, mpow) - 1.0;
        } else {
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, mpow);
        }
        x[i] = clamp(x[i] + dq * span, lo, hi);
    }
    return x;
}

// Full decomposition run state. Single writer; independent runs never
// share one of these.
struct DecompositionState {
    MopInstance instance;
    std::vector<Individual> population;
    WeightSet weights;
    std::vector<std::vector<int>> neighborhoods;
    int neighborhood_size = 0;
    Vec ideal;
    std::vector<Individual> elite;
    std::size_t elite_capacity = 0;
    long last_weight_adapt_step = 0;
    RngStream rng;

    DecompositionState() : rng(0) {}

    std::size_t N() const { return population.size(); }
};

namespace moead_detail {

inline std::vector<Vec> normalized_objectives(const DecompositionState& st,
                                              const std::vector<Individual>& pool) {
    std::vector<Vec> out;
    out.reserve(pool.size());
    for (const auto& ind : pool) out.push_back(normalize_objectives(st.instance, ind.f));
    return out;
}

// Sparsity of every member of `points` measured within `points`.
inline Vec sparsity_within(const std::vector<Vec>& points, int m) {
    Vec out(points.size(), std::numeric_limits<double>::infinity());
    if (points.size() <= static_cast<std::size_t>(m)) return out;
    for (std::size_t i = 0; i < points.size(); ++i)
        out[i] = vicinity_sparsity(i, points, m);
    return out;
}

// Removes the lowest-sparsity member until the archive fits its capacity,
// recomputing neighbor distances between removals on a cached matrix.
inline void prune_elite(DecompositionState& st) {
    if (st.elite.size() > st.elite_capacity) {
        const auto norm = normalized_objectives(st, st.elite);
        const std::size_t E = norm.size();
        std::vector<Vec> dist(E, Vec(E, 0.0));
        for (std::size_t i = 0; i < E; ++i)
            for (std::size_t j = i + 1; j < E; ++j)
                dist[i][j] = dist[j][i] = euclidean(norm[i], norm[j]);
        std::vector<char> alive(E, 1);
        std::size_t remaining = E;
        const int m = st.instance.m;
        while (remaining > st.elite_capacity) {
            double worst = std::numeric_limits<double>::infinity();
            std::size_t worst_idx = 0;
            Vec row;
            for (std::size_t i = 0; i < E; ++i) {
                if (!alive[i]) continue;
                row.clear();
                for (std::size_t j = 0; j < E; ++j)
                    if (alive[j] && j != i) row.push_back(dist[i][j]);
                double sl = std::numeric_limits<double>::infinity();
                if (row.size() >= static_cast<std::size_t>(m)) {
                    std::partial_sort(row.begin(), row.begin() + m, row.end());
                    sl = 1.0;
                    for (int t = 0; t < m; ++t) sl *= row[static_cast<std::size_t>(t)];
                }
                if (sl < worst) {
                    worst = sl;
                    worst_idx = i;
                }
            }
            alive[worst_idx] = 0;
            --remaining;
        }
        std::vector<Individual> kept;
        kept.reserve(remaining);
        for (std::size_t i = 0; i < E; ++i)
            if (alive[i]) kept.push_back(std::move(st.elite[i]));
        st.elite = std::move(kept);
    }
}

}  // namespace moead_detail

// Inserts candidates into the elite archive: dominated members leave,
// dominated candidates never enter, and overflow evicts the most crowded.
inline void update_elite(DecompositionState& st, const std::vector<Individual>& candidates) {
    for (const auto& cand : candidates) {
        bool dominated = false;
        for (const auto& e : st.elite) {
            if (dominates(e.f, cand.f)) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        std::erase_if(st.elite, [&](const Individual& e) { return dominates(cand.f, e.f); });
        st.elite.push_back(cand);
    }
    moead_detail::prune_elite(st);
}

inline DecompositionState make_decomposition_state(const MopInstance& inst, int N,
                                                   std::uint64_t seed, int initial_Tn = 20) {
    DecompositionState st;
    st.instance = inst;
    st.rng = RngStream(seed);
    st.weights = generate_weights(inst.m, N);
    st.neighborhoods = build_neighborhoods(st.weights, initial_Tn);
    st.neighborhood_size = initial_Tn;
    st.ideal.assign(static_cast<std::size_t>(inst.m), std::numeric_limits<double>::infinity());
    st.elite_capacity = static_cast<std::size_t>(std::ceil(1.5 * N));
    st.population.resize(static_cast<std::size_t>(N));
    for (auto& ind : st.population) {
        ind.x.resize(static_cast<std::size_t>(inst.D));
        for (int d = 0; d < inst.D; ++d)
            ind.x[static_cast<std::size_t>(d)] =
                st.rng.uniform(inst.lower[static_cast<std::size_t>(d)], inst.upper[static_cast<std::size_t>(d)]);
        ind.f = evaluate(inst, ind.x);
        for (int j = 0; j < inst.m; ++j)
            st.ideal[static_cast<std::size_t>(j)] =
                std::min(st.ideal[static_cast<std::size_t>(j)], ind.f[static_cast<std::size_t>(j)]);
    }
    update_elite(st, st.population);
    return st;
}

// One generation of Algorithm-style decomposition search under the given
// per-generation configuration. Neighborhoods are rebuilt lazily when the
// requested size differs from the current one.
inline GenerationStats step_generation(DecompositionState& st, const GenerationConfig& cfg,
                                       const std::function<Vec(const Vec&)>& eval_fn) {
    const std::size_t N = st.N();
    if (cfg.neighborhood_size != st.neighborhood_size) {
        st.neighborhoods = build_neighborhoods(st.weights, cfg.neighborhood_size);
        st.neighborhood_size = cfg.neighborhood_size;
    }
    GenerationStats stats;
    stats.tch_pairs.reserve(N);
    std::vector<Individual> children;
    children.reserve(N);
    const double pm_prob = 1.0 / static_cast<double>(st.instance.D);

    for (std::size_t i = 0; i < N; ++i) {
        const auto& hood = st.neighborhoods[i];
        Vec child_x;
        if (cfg.op == Operator::SBX) {
            const auto picks = st.rng.sample_without_replacement(hood.size(), 2);
            const Vec& p1 = st.population[static_cast<std::size_t>(hood[static_cast<std::size_t>(picks[0])])].x;
            const Vec& p2 = st.population[static_cast<std::size_t>(hood[static_cast<std::size_t>(picks[1])])].x;
            child_x = sbx_offspring(p1, p2, st.instance.lower, st.instance.upper, st.rng);
        } else {
            std::vector<int> others;
            others.reserve(hood.size());
            for (int idx : hood)
                if (idx != static_cast<int>(i)) others.push_back(idx);
            std::size_t need = 0;
            switch (cfg.op) {
                case Operator::OP1: need = 2; break;
                case Operator::OP2: need = 4; break;
                case Operator::OP3: need = 5; break;
                case Operator::OP4: need = 3; break;
                default: break;
            }
            assert(others.size() >= need);
            const auto picks = st.rng.sample_without_replacement(others.size(), need);
            std::vector<const Vec*> parents;
            parents.reserve(need);
            for (int p : picks)
                parents.push_back(&st.population[static_cast<std::size_t>(others[static_cast<std::size_t>(p)])].x);
            child_x = de_offspring(cfg.op, st.population[i].x, parents, cfg.scaling_factor,
                                   cfg.k_factor, st.instance.lower, st.instance.upper);
        }
        child_x = polynomial_mutation(std::move(child_x), pm_prob, st.instance.lower,
                                      st.instance.upper, st.rng);

        Individual child;
        child.x = std::move(child_x);
        child.f = eval_fn(child.x);
        ++stats.evaluations;

        for (int j = 0; j < st.instance.m; ++j)
            st.ideal[static_cast<std::size_t>(j)] =
                std::min(st.ideal[static_cast<std::size_t>(j)], child.f[static_cast<std::size_t>(j)]);

        const double incumbent_tch = tch(st.population[i].f, st.weights.weights[i], st.ideal);
        const double child_tch = tch(child.f, st.weights.weights[i], st.ideal);
        stats.tch_pairs.emplace_back(incumbent_tch, child_tch);

        for (int j : hood) {
            const std::size_t uj = static_cast<std::size_t>(j);
            const double g_old = tch(st.population[uj].f, st.weights.weights[uj], st.ideal);
            const double g_new = tch(child.f, st.weights.weights[uj], st.ideal);
            if (g_new < g_old) {
                st.population[uj] = child;
                ++stats.replacements;
            }
        }
        children.push_back(std::move(child));
    }
    update_elite(st, children);
    return stats;
}

// Adaptive weight adjustment: drop the most crowded 5% of sub-problems,
// then pull the sparsest elite members back in under freshly generated
// weights (w_j proportional to 1/(f_j - z_j)).
inline void adapt_weights(DecompositionState& st) {
    if (st.elite.empty()) throw std::logic_error("adapt_weights: elite archive is empty");
    const std::size_t N = st.N();
    const std::size_t nrem = static_cast<std::size_t>(0.05 * static_cast<double>(N));
    if (nrem == 0) return;
    const int m = st.instance.m;

    auto pop_norm = moead_detail::normalized_objectives(st, st.population);
    const Vec sl = moead_detail::sparsity_within(pop_norm, m);
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sl[a] < sl[b]; });
    std::vector<char> removed(N, 0);
    for (std::size_t r = 0; r < nrem; ++r) removed[order[r]] = 1;

    std::vector<Individual> removed_inds;
    std::vector<Vec> removed_weights;
    std::vector<Individual> pop;
    std::vector<Vec> weights;
    std::vector<Vec> norm;
    for (std::size_t i = 0; i < N; ++i) {
        if (removed[i]) {
            removed_inds.push_back(std::move(st.population[i]));
            removed_weights.push_back(std::move(st.weights.weights[i]));
        } else {
            pop.push_back(std::move(st.population[i]));
            weights.push_back(std::move(st.weights.weights[i]));
            norm.push_back(std::move(pop_norm[i]));
        }
    }

    auto sparsity_vs_pop = [&](const Vec& candidate) {
        if (norm.size() < static_cast<std::size_t>(m)) return std::numeric_limits<double>::infinity();
        Vec dists;
        dists.reserve(norm.size());
        for (const auto& p : norm) dists.push_back(euclidean(candidate, p));
        std::partial_sort(dists.begin(), dists.begin() + m, dists.end());
        double prod = 1.0;
        for (int t = 0; t < m; ++t) prod *= dists[static_cast<std::size_t>(t)];
        return prod;
    };

    auto new_weight_for = [&](const Vec& f) {
        Vec w(static_cast<std::size_t>(m));
        double total = 0.0;
        for (int j = 0; j < m; ++j) {
            const std::size_t uj = static_cast<std::size_t>(j);
            w[uj] = 1.0 / (f[uj] - st.ideal[uj] + 1e-6);
            total += w[uj];
        }
        for (auto& v : w) v /= total;
        return w;
    };

    // Each elite member enters at most once per adaptation; the archive
    // itself keeps everything it stored.
    const auto elite_norm = moead_detail::normalized_objectives(st, st.elite);
    std::vector<char> used(st.elite.size(), 0);
    std::size_t added = 0;
    while (added < nrem && pop.size() < N) {
        double best = -1.0;
        std::size_t best_idx = st.elite.size();
        for (std::size_t e = 0; e < st.elite.size(); ++e) {
            if (used[e]) continue;
            const double s = sparsity_vs_pop(elite_norm[e]);
            const double val = std::isinf(s) ? std::numeric_limits<double>::max() : s;
            if (val > best) {
                best = val;
                best_idx = e;
            }
        }
        if (best_idx == st.elite.size()) break;
        used[best_idx] = 1;
        Individual picked = st.elite[best_idx];
        weights.push_back(new_weight_for(picked.f));
        norm.push_back(normalize_objectives(st.instance, picked.f));
        pop.push_back(std::move(picked));
        ++added;
    }
    // Degenerate path: the elite ran dry; restore removed pairs, sparsest
    // first, until the population is whole again.
    for (std::size_t r = removed_inds.size(); pop.size() < N && r > 0; --r) {
        pop.push_back(std::move(removed_inds[r - 1]));
        weights.push_back(std::move(removed_weights[r - 1]));
        norm.push_back(normalize_objectives(st.instance, pop.back().f));
    }

    st.population = std::move(pop);
    st.weights.weights = std::move(weights);
    st.neighborhoods = build_neighborhoods(st.weights, st.neighborhood_size);
}

inline std::vector<Vec> population_objectives(const DecompositionState& st) {
    std::vector<Vec> out;
    out.reserve(st.N());
    for (const auto& ind : st.population) out.push_back(ind.f);
    return out;
}

}  // namespace madac
