#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "madac/baselines.hpp"
#include "madac/core.hpp"
#include "madac/env.hpp"
#include "madac/marl.hpp"
#include "madac/sigmoid.hpp"
#include "madac/stats.hpp"

namespace madac {

struct TrajectoryStep {
    int t = 0;
    JointAction action;
    double reward = 0.0;
    MamoStepInfo info;
};

struct Trajectory {
    std::vector<Vec> observations;  // horizon + 1 entries
    std::vector<TrajectoryStep> steps;

    double total_reward() const {
        double acc = 0.0;
        for (const auto& s : steps) acc += s.reward;
        return acc;
    }

    Vec igd_curve() const {
        Vec out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(s.info.igd);
        return out;
    }
};

// Runs one full episode of a controller against a fresh environment.
inline Trajectory drive_episode(MamoEnv& env, MamoController& policy) {
    Trajectory traj;
    Vec obs = env.reset();
    traj.observations.push_back(obs);
    int t = 0;
    while (!env.done()) {
        const JointAction action = policy.act(obs, t);
        auto res = env.step(action);
        policy.observe(res.reward, res.info);
        TrajectoryStep step;
        step.t = t;
        step.action = action;
        step.reward = res.reward;
        step.info = std::move(res.info);
        traj.steps.push_back(std::move(step));
        obs = std::move(res.observation);
        traj.observations.push_back(obs);
        ++t;
    }
    return traj;
}

// Greedy learner adapter: each agent takes its own argmax action.
class LearnerController : public MamoController {
public:
    explicit LearnerController(const Learner& learner) : learner_(learner) {}
    JointAction act(const Vec& obs, int) override {
        return decode_joint_action(learner_.act_greedy(obs));
    }

private:
    const Learner& learner_;
};

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,adapt,neighborhood,operator,F,reward,igd,hv,nd_ratio,dist\n";
    char buf[256];
    for (const auto& s : traj.steps) {
        std::snprintf(buf, sizeof(buf), "%d,%c,%d,%s,%.3f,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t,
                      s.action.adapt_weights ? 'T' : 'N', s.action.neighborhood_size,
                      operator_name(s.action.op), s.action.scaling_factor, s.reward, s.info.igd,
                      s.info.hv, s.info.nd, s.info.dist);
        os << buf;
    }
}

inline void write_population_csv(std::ostream& os, const DecompositionState& st) {
    char buf[64];
    for (const auto& ind : st.population) {
        bool first = true;
        for (double v : ind.x) {
            std::snprintf(buf, sizeof(buf), first ? "%.17g" : ",%.17g", v);
            os << buf;
            first = false;
        }
        for (double v : ind.f) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        os << "\n";
    }
}

inline nlohmann::json run_result_to_json(const RunResult& r) {
    return nlohmann::json{{"method", r.method},
                          {"instance", r.instance},
                          {"seed", r.seed},
                          {"metric", r.metric},
                          {"final", r.final_value},
                          {"curve", r.curve}};
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult r;
    r.method = j.at("method").get<std::string>();
    r.instance = j.at("instance").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.metric = j.at("metric").get<std::string>();
    r.final_value = j.at("final").get<double>();
    r.curve = j.at("curve").get<Vec>();
    return r;
}

// One JSON record per line.
inline void write_records(std::ostream& os, const std::vector<RunResult>& results) {
    for (const auto& r : results) os << run_result_to_json(r).dump() << "\n";
}

inline std::vector<RunResult> read_records(std::istream& is) {
    std::vector<RunResult> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(run_result_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

}  // namespace madac
