#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "madac/core.hpp"
#include "madac/rng.hpp"

namespace madac {

struct SigmoidSpec {
    int dims = 3;
    std::vector<int> action_sizes;  // one entry per dimension; filled with 3s if empty
    int T = 10;
    std::uint64_t seed = 0;
};

struct SigmoidStepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;
};

// Synthetic configuration-tracking task: every dimension follows its own
// sigmoid curve over a short episode and each agent's action is scored by
// closeness to the curve. Instance parameters are redrawn at reset from
// normal distributions, so the policy must read them from the state.
class SigmoidEnv {
public:
    explicit SigmoidEnv(const SigmoidSpec& spec) : spec_(spec) {
        if (spec_.dims < 1) throw std::invalid_argument("SigmoidEnv: dims must be >= 1");
        if (spec_.action_sizes.empty()) spec_.action_sizes.assign(static_cast<std::size_t>(spec_.dims), 3);
        if (static_cast<int>(spec_.action_sizes.size()) != spec_.dims)
            throw std::invalid_argument("SigmoidEnv: one action size per dimension");
        for (int s : spec_.action_sizes)
            if (s < 2) throw std::invalid_argument("SigmoidEnv: action sizes must be >= 2");
    }

    const SigmoidSpec& spec() const { return spec_; }
    int horizon() const { return spec_.T; }
    int num_agents() const { return spec_.dims; }
    const std::vector<int>& action_dims() const { return spec_.action_sizes; }
    int observation_size() const { return 1 + 3 * spec_.dims; }
    bool done() const { return t_ >= spec_.T; }
    const Vec& slopes() const { return slope_; }
    const Vec& shifts() const { return shift_; }

    static double sig(double t, double slope, double shift) {
        return 1.0 / (1.0 + std::exp(-slope * (t - shift)));
    }

    Vec reset() {
        rng_ = RngStream(spec_.seed);
        const std::size_t d = static_cast<std::size_t>(spec_.dims);
        slope_.resize(d);
        shift_.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            shift_[j] = rng_.normal(static_cast<double>(spec_.T) / 2.0, static_cast<double>(spec_.T) / 4.0);
            slope_[j] = rng_.normal(0.0, 2.0);
        }
        t_ = 0;
        prev_action_.assign(d, 0.0);
        return observation();
    }

    SigmoidStepResult step_indices(const std::vector<int>& actions) { return step(actions); }

    SigmoidStepResult step(const std::vector<int>& actions) {
        if (done()) throw std::logic_error("SigmoidEnv::step called after episode end");
        if (static_cast<int>(actions.size()) != spec_.dims)
            throw std::invalid_argument("SigmoidEnv::step: one action per dimension");
        double reward = 1.0;
        for (std::size_t j = 0; j < actions.size(); ++j) {
            const int size = spec_.action_sizes[j];
            if (actions[j] < 0 || actions[j] >= size)
                throw std::out_of_range("SigmoidEnv::step: action out of range in dim " + std::to_string(j));
            const double a = static_cast<double>(actions[j]) / static_cast<double>(size - 1);
            reward *= 1.0 - std::fabs(sig(static_cast<double>(t_), slope_[j], shift_[j]) - a);
            prev_action_[j] = a;
        }
        ++t_;
        SigmoidStepResult res;
        res.reward = reward;
        res.done = done();
        res.observation = observation();
        return res;
    }

    // Remaining budget, the per-dimension curve parameters, then the
    // previous normalized actions.
    Vec observation() const {
        Vec obs;
        obs.reserve(static_cast<std::size_t>(observation_size()));
        obs.push_back(static_cast<double>(spec_.T - t_) / static_cast<double>(spec_.T));
        for (std::size_t j = 0; j < slope_.size(); ++j) {
            obs.push_back(slope_[j]);
            obs.push_back(shift_[j]);
        }
        for (double a : prev_action_) obs.push_back(a);
        return obs;
    }

private:
    SigmoidSpec spec_;
    RngStream rng_{0};
    Vec slope_, shift_;
    Vec prev_action_;
    int t_ = 0;
};

}  // namespace madac
