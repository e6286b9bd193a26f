#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "madac/core.hpp"
#include "madac/indicators.hpp"
#include "madac/moead.hpp"
#include "madac/problems.hpp"
#include "madac/rng.hpp"

namespace madac {

// One discrete choice per agent. The operator slot also admits SBX so the
// plain baseline can drive the same environment; learned agents only ever
// emit OP1..OP4.
struct JointAction {
    bool adapt_weights = false;          // agent 1: N / T
    int neighborhood_size = 20;          // agent 2: 15 / 20 / 25 / 30
    Operator op = Operator::OP2;         // agent 3: OP1..OP4 (SBX for baselines)
    double scaling_factor = 0.5;         // agent 4: 0.4 / 0.5 / 0.6 / 0.7
};

inline constexpr int kMamoAgents = 4;
inline const std::vector<int>& mamo_action_dims() {
    static const std::vector<int> dims{2, 4, 4, 4};
    return dims;
}
inline constexpr int kNeighborhoodChoices[4] = {15, 20, 25, 30};
inline constexpr double kScalingChoices[4] = {0.4, 0.5, 0.6, 0.7};

inline JointAction decode_joint_action(const std::vector<int>& idx) {
    if (idx.size() != kMamoAgents) throw std::invalid_argument("decode_joint_action: need 4 indices");
    for (int a = 0; a < kMamoAgents; ++a)
        if (idx[static_cast<std::size_t>(a)] < 0 ||
            idx[static_cast<std::size_t>(a)] >= mamo_action_dims()[static_cast<std::size_t>(a)])
            throw std::out_of_range("decode_joint_action: index out of range for agent " + std::to_string(a));
    JointAction act;
    act.adapt_weights = idx[0] == 1;
    act.neighborhood_size = kNeighborhoodChoices[idx[1]];
    act.op = static_cast<Operator>(static_cast<int>(Operator::OP1) + idx[2]);
    act.scaling_factor = kScalingChoices[idx[3]];
    return act;
}

// Triangle reward bookkeeping: p tracks the normalized best-so-far
// improvement, and each new best pays the ring of the growing triangle.
struct RewardState {
    double f0 = 0.0;
    double f_best = 0.0;
    double p = 0.0;

    static RewardState from_initial(double f_initial) {
        RewardState rs;
        rs.f0 = f_initial;
        rs.f_best = f_initial;
        rs.p = 0.0;
        return rs;
    }
};

inline std::pair<double, RewardState> compute_reward(double igd_new, RewardState rs) {
    if (igd_new < 0.0) throw std::invalid_argument("compute_reward: negative metric");
    if (rs.f0 <= 0.0) return {0.0, rs};  // already on the front; degenerate episode
    if (igd_new < rs.f_best) {
        const double p_next = (rs.f0 - igd_new) / rs.f0;
        const double reward = 0.5 * (p_next * p_next - rs.p * rs.p);
        rs.p = p_next;
        rs.f_best = igd_new;
        return {reward, rs};
    }
    return {0.0, rs};
}

enum class RewardMode { Triangle, R1, R2, R3 };

inline RewardMode parse_reward_mode(const std::string& s) {
    if (s == "triangle") return RewardMode::Triangle;
    if (s == "r1") return RewardMode::R1;
    if (s == "r2") return RewardMode::R2;
    if (s == "r3") return RewardMode::R3;
    throw std::invalid_argument("unknown reward mode: " + s);
}

// Alternative step rewards used in ablation runs.
inline double alt_rewards(RewardMode mode, double f_prev, double f_new, double f_best,
                          double f_opt = 0.0) {
    switch (mode) {
        case RewardMode::R1:
            return std::max(f_prev - f_new, 0.0);
        case RewardMode::R2:
            if (f_new < f_best) return 10.0;
            if (f_new < f_prev) return 1.0;
            return 0.0;
        case RewardMode::R3: {
            if (f_new <= f_opt) return 1e6;
            return std::max((f_prev - f_new) / (f_new - f_opt), 0.0);
        }
        case RewardMode::Triangle:
            throw std::invalid_argument("alt_rewards: use compute_reward for the default mode");
    }
    return 0.0;
}

struct EpisodeSpec {
    MopInstance instance;
    int T = 300;       // 100 * m
    int N = 210;
    std::uint64_t seed = 0;
    RewardMode reward_mode = RewardMode::Triangle;
    std::size_t hv_samples = 10000;
};

inline EpisodeSpec make_episode_spec(const MopInstance& inst, std::uint64_t seed) {
    EpisodeSpec spec;
    spec.instance = inst;
    spec.T = 100 * inst.m;
    spec.N = 210;
    spec.seed = seed;
    return spec;
}

struct MamoStepInfo {
    double igd = 0.0;
    double hv = 0.0;
    double nd = 0.0;
    double dist = 0.0;
    int replacements = 0;
    bool weights_adapted = false;
    std::vector<std::pair<double, double>> tch_pairs;
};

struct MamoStepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;
    MamoStepInfo info;
};

inline constexpr int kMamoFeatures = 22;

// The contextual multi-agent environment wrapping one decomposition run.
// One generation per step; the observation is a fixed 22-feature vector
// and the reward follows the triangle scheme on IGD (or an alternative
// mode for ablations).
class MamoEnv {
public:
    explicit MamoEnv(const EpisodeSpec& spec) : spec_(spec) {}

    const EpisodeSpec& spec() const { return spec_; }
    int horizon() const { return spec_.T; }
    int steps_done() const { return t_; }
    bool done() const { return t_ >= spec_.T; }
    int num_agents() const { return kMamoAgents; }
    const std::vector<int>& action_dims() const { return mamo_action_dims(); }
    int observation_size() const { return kMamoFeatures; }
    const DecompositionState& state() const { return state_; }
    const ReferenceFront& reference_front() const { return front_; }
    double current_igd() const { return igd_hist_.back(); }
    double distance_scale() const { return dist_scale_; }
    const RewardState& reward_state() const { return reward_state_; }

    Vec reset() {
        const auto& inst = spec_.instance;
        state_ = make_decomposition_state(inst, spec_.N, spec_.seed);
        hv_rng_ = state_.rng.spawn();
        front_ = sample_reference_front(inst, inst.m == 3 ? 990 : 2000);
        dist_scale_ = sample_distance_scale();
        t_ = 0;
        stagnation_ = 0;
        hv_best_ = 0.0;
        state_.last_weight_adapt_step = 0;
        hv_hist_.clear();
        nd_hist_.clear();
        dist_hist_.clear();
        igd_hist_.clear();
        record_indicators();
        hv_best_ = hv_hist_.back();
        reward_state_ = RewardState::from_initial(igd(front_, population_objectives(state_)));
        igd_hist_.push_back(reward_state_.f0);
        return observation();
    }

    MamoStepResult step_indices(const std::vector<int>& idx) { return step(decode_joint_action(idx)); }

    MamoStepResult step(const JointAction& action) {
        if (done()) throw std::logic_error("MamoEnv::step called after episode end");
        if (igd_hist_.empty()) throw std::logic_error("MamoEnv::step called before reset");

        MamoStepResult res;
        if (action.adapt_weights && adaptation_allowed()) {
            adapt_weights(state_);
            state_.last_weight_adapt_step = t_;
            res.info.weights_adapted = true;
        }

        GenerationConfig cfg;
        // Tn choices assume the full-scale population; clamp for smaller ones.
        cfg.neighborhood_size = std::min(action.neighborhood_size, static_cast<int>(state_.N()));
        cfg.op = action.op;
        cfg.scaling_factor = action.scaling_factor;
        auto stats = step_generation(state_, cfg,
                                     [&](const Vec& x) { return evaluate(spec_.instance, x); });

        const double f_prev = igd_hist_.back();
        const double igd_new = igd(front_, population_objectives(state_));
        igd_hist_.push_back(igd_new);

        if (spec_.reward_mode == RewardMode::Triangle) {
            auto [r, rs] = compute_reward(igd_new, reward_state_);
            res.reward = r;
            reward_state_ = rs;
        } else {
            res.reward = alt_rewards(spec_.reward_mode, f_prev, igd_new, reward_state_.f_best);
            if (igd_new < reward_state_.f_best) reward_state_.f_best = igd_new;
        }

        ++t_;
        record_indicators();
        if (hv_hist_.back() > hv_best_)
            hv_best_ = hv_hist_.back();
        else
            ++stagnation_;

        res.info.igd = igd_new;
        res.info.hv = hv_hist_.back();
        res.info.nd = nd_hist_.back();
        res.info.dist = dist_hist_.back();
        res.info.replacements = stats.replacements;
        res.info.tch_pairs = std::move(stats.tch_pairs);
        res.done = done();
        res.observation = observation();
        return res;
    }

    // Feature layout: instance description, budget usage, then the three
    // population indicators with step deltas and short/long window stats.
    Vec observation() const {
        Vec f(kMamoFeatures, 0.0);
        const double T = static_cast<double>(spec_.T);
        f[0] = 1.0 / spec_.instance.m;
        f[1] = 1.0 / spec_.instance.D;
        f[2] = static_cast<double>(t_) / T;
        f[3] = static_cast<double>(stagnation_) / T;
        f[4] = hv_hist_.back();
        f[5] = nd_hist_.back();
        f[6] = dist_hist_.back();
        f[7] = hv_hist_.back() - previous(hv_hist_);
        f[8] = nd_hist_.back() - previous(nd_hist_);
        f[9] = dist_hist_.back() - previous(dist_hist_);
        const Vec h5 = last_window(hv_hist_, 5), n5 = last_window(nd_hist_, 5),
                  d5 = last_window(dist_hist_, 5);
        f[10] = mean_of(h5);
        f[11] = mean_of(n5);
        f[12] = mean_of(d5);
        f[13] = stdev_of(h5);
        f[14] = stdev_of(n5);
        f[15] = stdev_of(d5);
        f[16] = mean_of(hv_hist_);
        f[17] = mean_of(nd_hist_);
        f[18] = mean_of(dist_hist_);
        f[19] = stdev_of(hv_hist_);
        f[20] = stdev_of(nd_hist_);
        f[21] = stdev_of(dist_hist_);
        return f;
    }

    // Weight adjustment is honored only after a cool-down interval and
    // never in the last tenth of the episode.
    bool adaptation_allowed() const {
        const long interval = std::max<long>(10, (spec_.T + 19) / 20);
        if (t_ - state_.last_weight_adapt_step < interval) return false;
        const long freeze_from = spec_.T - (spec_.T + 9) / 10;
        return t_ <= freeze_from;
    }

private:
    double sample_distance_scale() {
        RngStream rng = state_.rng.spawn();
        const auto& inst = spec_.instance;
        const std::size_t samples = 1000;
        std::vector<Vec> pts;
        pts.reserve(samples);
        Vec x(static_cast<std::size_t>(inst.D));
        for (std::size_t s = 0; s < samples; ++s) {
            for (int d = 0; d < inst.D; ++d)
                x[static_cast<std::size_t>(d)] =
                    rng.uniform(inst.lower[static_cast<std::size_t>(d)], inst.upper[static_cast<std::size_t>(d)]);
            pts.push_back(normalize_objectives(inst, evaluate(inst, x)));
        }
        double best = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                best = std::max(best, euclidean(pts[i], pts[j]));
        return best > 0.0 ? best : 1.0;
    }

    void record_indicators() {
        std::vector<Vec> norm;
        norm.reserve(state_.N());
        for (const auto& ind : state_.population)
            norm.push_back(normalize_objectives(spec_.instance, ind.f));
        const std::size_t m = static_cast<std::size_t>(spec_.instance.m);
        Vec ref(m, 1.1);
        double box = 1.0;
        for (double r : ref) box *= r;
        hv_hist_.push_back(hypervolume(norm, ref, spec_.hv_samples, hv_rng_.next_u64()) / box);
        nd_hist_.push_back(nd_ratio(norm));
        dist_hist_.push_back(avg_distance(norm, dist_scale_));
    }

    static double previous(const Vec& hist) {
        return hist.size() >= 2 ? hist[hist.size() - 2] : 0.0;
    }

    // Last five values, zero-padded on the left for early steps.
    static Vec last_window(const Vec& hist, std::size_t len) {
        Vec out(len, 0.0);
        const std::size_t have = std::min(len, hist.size());
        for (std::size_t i = 0; i < have; ++i)
            out[len - 1 - i] = hist[hist.size() - 1 - i];
        return out;
    }

    EpisodeSpec spec_;
    DecompositionState state_;
    RngStream hv_rng_{0};
    ReferenceFront front_;
    RewardState reward_state_;
    double dist_scale_ = 1.0;
    int t_ = 0;
    int stagnation_ = 0;
    double hv_best_ = 0.0;
    Vec hv_hist_, nd_hist_, dist_hist_, igd_hist_;
};

}  // namespace madac
