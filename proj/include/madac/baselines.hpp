#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "madac/core.hpp"
#include "madac/env.hpp"
#include "madac/rng.hpp"

namespace madac {

// Controllers map observations to joint actions; stateful ones consume
// step feedback through observe().
class MamoController {
public:
    virtual ~MamoController() = default;
    virtual JointAction act(const Vec& obs, int t) = 0;
    virtual void observe(double reward, const MamoStepInfo& info) { (void)reward; (void)info; }
};

// Fixed configuration every step; never adapts weights.
class StaticController : public MamoController {
public:
    explicit StaticController(JointAction defaults) : action_(defaults) {
        action_.adapt_weights = false;
    }

    static StaticController original() {
        JointAction a;
        a.neighborhood_size = 20;
        a.op = Operator::SBX;
        a.scaling_factor = 0.5;
        return StaticController(a);
    }

    static StaticController with_operator(Operator op) {
        JointAction a;
        a.neighborhood_size = 20;
        a.op = op;
        a.scaling_factor = 0.5;
        return StaticController(a);
    }

    JointAction act(const Vec&, int) override { return action_; }

private:
    JointAction action_;
};

// Running statistics of one upper-confidence-bound bandit.
struct UcbArmStats {
    Vec q;                  // running mean reward per arm
    std::vector<long> n;    // pull counts
    long t = 0;
    double c = 1.0;

    explicit UcbArmStats(std::size_t arms, double exploration = 1.0)
        : q(arms, 0.0), n(arms, 0), c(exploration) {}
};

// Untried arms first (index order), then argmax of Q + c*sqrt(ln t / n).
inline int ucb_select(const UcbArmStats& stats) {
    for (std::size_t a = 0; a < stats.n.size(); ++a)
        if (stats.n[a] == 0) return static_cast<int>(a);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    const double logt = std::log(static_cast<double>(std::max<long>(stats.t, 1)));
    for (std::size_t a = 0; a < stats.q.size(); ++a) {
        const double score = stats.q[a] + stats.c * std::sqrt(logt / static_cast<double>(stats.n[a]));
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(a);
        }
    }
    return best;
}

inline void ucb_update(UcbArmStats& stats, int arm, double reward) {
    if (arm < 0 || arm >= static_cast<int>(stats.q.size()))
        throw std::out_of_range("ucb_update: bad arm");
    auto& count = stats.n[static_cast<std::size_t>(arm)];
    ++count;
    ++stats.t;
    auto& value = stats.q[static_cast<std::size_t>(arm)];
    value += (reward - value) / static_cast<double>(count);
}

// Four independent bandits, one per hyperparameter, all fed the shared
// team reward.
class MaUcbController : public MamoController {
public:
    MaUcbController() {
        for (int dim : mamo_action_dims()) agents_.emplace_back(static_cast<std::size_t>(dim));
    }

    const std::vector<UcbArmStats>& agents() const { return agents_; }

    JointAction act(const Vec&, int) override {
        for (std::size_t a = 0; a < agents_.size(); ++a)
            last_[a] = ucb_select(agents_[a]);
        return decode_joint_action(std::vector<int>(last_.begin(), last_.end()));
    }

    void observe(double reward, const MamoStepInfo&) override {
        for (std::size_t a = 0; a < agents_.size(); ++a) ucb_update(agents_[a], last_[a], reward);
    }

private:
    std::vector<UcbArmStats> agents_;
    std::array<int, kMamoAgents> last_{0, 0, 0, 0};
};

// Sliding-window credit state for rank-decayed operator selection.
struct FrrmabState {
    std::size_t window_capacity;
    double decay = 0.3;
    double scaling = 2.0;
    std::deque<std::pair<int, double>> window;  // (operator index 0..3, improvement rate)

    explicit FrrmabState(std::size_t capacity) : window_capacity(capacity) {}
};

inline void frrmab_credit(FrrmabState& st, int op_index, double parent_tch, double child_tch) {
    if (op_index < 0 || op_index > 3) throw std::out_of_range("frrmab_credit: bad operator index");
    double fir = 0.0;
    if (parent_tch > 0.0) fir = std::max((parent_tch - child_tch) / parent_tch, 0.0);
    st.window.emplace_back(op_index, fir);
    while (st.window.size() > st.window_capacity) st.window.pop_front();
}

// Rank-decayed fitness-rate credit plus an exploration bonus over window
// usage counts. An empty window falls back to a uniform draw.
inline int frrmab_select(const FrrmabState& st, RngStream& rng) {
    constexpr int kOps = 4;
    if (st.window.empty()) return rng.index(kOps);
    Vec reward(kOps, 0.0);
    std::vector<long> count(kOps, 0);
    for (const auto& [op, fir] : st.window) {
        reward[static_cast<std::size_t>(op)] += fir;
        ++count[static_cast<std::size_t>(op)];
    }
    std::vector<int> order(kOps);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return reward[static_cast<std::size_t>(a)] > reward[static_cast<std::size_t>(b)]; });
    Vec decayed(kOps, 0.0);
    double total = 0.0;
    for (int rank = 0; rank < kOps; ++rank) {
        const int op = order[static_cast<std::size_t>(rank)];
        decayed[static_cast<std::size_t>(op)] =
            std::pow(st.decay, static_cast<double>(rank)) * reward[static_cast<std::size_t>(op)];
        total += decayed[static_cast<std::size_t>(op)];
    }
    long used = 0;
    for (long c : count) used += c;
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int op = 0; op < kOps; ++op) {
        if (count[static_cast<std::size_t>(op)] == 0) return op;  // untried inside the window
        const double frr = total > 0.0 ? decayed[static_cast<std::size_t>(op)] / total : 0.0;
        const double score = frr + st.scaling * std::sqrt(2.0 * std::log(static_cast<double>(used)) /
                                                          static_cast<double>(count[static_cast<std::size_t>(op)]));
        if (score > best_score) {
            best_score = score;
            best = op;
        }
    }
    return best;
}

// Adaptive operator selection on top of otherwise-default settings.
class FrrmabController : public MamoController {
public:
    FrrmabController(int population_size, std::uint64_t seed)
        : state_(static_cast<std::size_t>(population_size / 2)), rng_(seed) {}

    const FrrmabState& state() const { return state_; }

    JointAction act(const Vec&, int) override {
        last_op_ = frrmab_select(state_, rng_);
        JointAction a;
        a.neighborhood_size = 20;
        a.op = static_cast<Operator>(static_cast<int>(Operator::OP1) + last_op_);
        a.scaling_factor = 0.5;
        return a;
    }

    void observe(double, const MamoStepInfo& info) override {
        for (const auto& [parent_tch, child_tch] : info.tch_pairs)
            frrmab_credit(state_, last_op_, parent_tch, child_tch);
    }

private:
    FrrmabState state_;
    RngStream rng_;
    int last_op_ = 0;
};

// Weight adaptation on a fixed schedule: every ceil(T/20) steps outside
// the final tenth of the episode; everything else stays at defaults.
inline JointAction awa_interval_action(int t, int T) {
    JointAction a;
    a.neighborhood_size = 20;
    a.op = Operator::SBX;
    a.scaling_factor = 0.5;
    const int interval = (T + 19) / 20;
    const int freeze_from = T - (T + 9) / 10;
    a.adapt_weights = t > 0 && t % interval == 0 && t <= freeze_from;
    return a;
}

class AwaIntervalController : public MamoController {
public:
    explicit AwaIntervalController(int horizon) : T_(horizon) {}
    JointAction act(const Vec&, int t) override { return awa_interval_action(t, T_); }

private:
    int T_;
};

}  // namespace madac
