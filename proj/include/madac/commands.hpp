#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "madac/baselines.hpp"
#include "madac/core.hpp"
#include "madac/driver.hpp"
#include "madac/env.hpp"
#include "madac/marl.hpp"
#include "madac/problems.hpp"
#include "madac/sigmoid.hpp"
#include "madac/stats.hpp"

namespace madac {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string env = "mamo";            // mamo | sigmoid
    std::string learner = "vdn";         // vdn | iql | dqn
    std::vector<std::string> train_set;  // explicit instance ids (mamo)
    std::vector<int> objectives;         // expands DTLZ2/WFG4/WFG6 x m (mamo)
    int dims = 3;                        // sigmoid
    int action_size = 3;                 // sigmoid
    long steps = 400000;
    std::uint64_t seed = 1;
    double lr = -1.0;                    // <0: mode default
    double gamma = 0.99;
    long buffer = -1;                    // <0: mode default
    int batch = 32;
    int target_every = 200;
    double eps_start = 1.0;
    double eps_end = 0.05;
    long eps_decay = 50000;
    int train_per_episode = 1;
    std::vector<int> hidden;             // empty: env/mode default
    long eval_every = -1;                // <0: steps/10
    int eval_episodes = -1;              // <0: env default
    std::vector<int> mask_agents;        // 1-based agent indices to fix at defaults
    long checkpoint_every = 100;         // episodes
    std::string reward = "triangle";
    std::size_t hv_samples = 10000;
    int population = 210;
    bool resume = false;
    std::string method_name;             // record label; default = learner mode
    std::string out_dir = "out/train";
};

struct SigmoidFactoryEnv {
    SigmoidEnv env;
    Vec reset() { return env.reset(); }
    SigmoidStepResult step_indices(const std::vector<int>& a) { return env.step_indices(a); }
    int horizon() const { return env.horizon(); }
    int observation_size() const { return env.observation_size(); }
    const std::vector<int>& action_dims() const { return env.action_dims(); }
};

namespace cmd_detail {

inline json options_json(const TrainOptions& o) {
    return json{{"env", o.env},
                {"learner", o.learner},
                {"train_set", o.train_set},
                {"objectives", o.objectives},
                {"dims", o.dims},
                {"action_size", o.action_size},
                {"steps", o.steps},
                {"seed", o.seed},
                {"lr", o.lr},
                {"gamma", o.gamma},
                {"buffer", o.buffer},
                {"batch", o.batch},
                {"target_every", o.target_every},
                {"eps_start", o.eps_start},
                {"eps_end", o.eps_end},
                {"eps_decay", o.eps_decay},
                {"train_per_episode", o.train_per_episode},
                {"hidden", o.hidden},
                {"eval_every", o.eval_every},
                {"eval_episodes", o.eval_episodes},
                {"mask_agents", o.mask_agents},
                {"checkpoint_every", o.checkpoint_every},
                {"reward", o.reward},
                {"hv_samples", o.hv_samples},
                {"population", o.population},
                {"method_name", o.method_name}};
}

inline void write_manifest(const fs::path& dir, const std::string& command, const json& config,
                           std::uint64_t seed, const json& seed_tree = json::object()) {
    json manifest{{"version", kVersion},
                  {"command", command},
                  {"config", config},
                  {"config_hash", hex64(fnv1a(config.dump()))},
                  {"base_seed", seed},
                  {"seed_tree", seed_tree}};
    std::ofstream os(dir / "manifest.json");
    os << manifest.dump(2) << "\n";
}

// Default indices fixed by the per-agent ablation masks: no weight
// adaptation, neighborhood 20, OP2, F = 0.5.
inline AgentMask mamo_mask(const std::vector<int>& agents_1based) {
    AgentMask mask;
    mask.fixed.assign(kMamoAgents, -1);
    static const int defaults[kMamoAgents] = {0, 1, 1, 1};
    for (int a : agents_1based) {
        if (a < 1 || a > kMamoAgents)
            throw std::invalid_argument("mask agent index must be in 1..4");
        mask.fixed[static_cast<std::size_t>(a - 1)] = defaults[a - 1];
    }
    return mask;
}

inline std::vector<MopInstance> resolve_train_set(const TrainOptions& o) {
    std::vector<MopInstance> set;
    if (!o.train_set.empty()) {
        for (const auto& id : o.train_set) set.push_back(parse_instance_id(id));
        return set;
    }
    std::vector<int> ms = o.objectives.empty() ? std::vector<int>{3} : o.objectives;
    for (int m : ms)
        for (Family f : {Family::DTLZ2, Family::WFG4, Family::WFG6})
            set.push_back(make_instance(f, m));
    return set;
}

}  // namespace cmd_detail

struct TrainArtifacts {
    fs::path checkpoint;
    fs::path checkpoint_meta;
    fs::path train_log;
    fs::path eval_log;
    long env_steps = 0;
    long episodes = 0;
};

// Seed 0 means "not chosen": one is drawn from OS entropy and logged so
// the run stays reconstructible.
inline std::uint64_t resolve_seed(std::uint64_t seed) {
    if (seed != 0) return seed;
    std::random_device rd;
    const std::uint64_t drawn =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::cout << "seed drawn from OS entropy: " << drawn << "\n";
    return drawn == 0 ? 1 : drawn;
}

inline TrainArtifacts cmd_train(const TrainOptions& opts_in) {
    TrainOptions o = opts_in;
    o.seed = resolve_seed(o.seed);
    const LearnerMode mode = parse_learner_mode(o.learner);
    const bool sigmoid = o.env == "sigmoid";
    if (!sigmoid && o.env != "mamo") throw std::invalid_argument("unknown env: " + o.env);

    if (o.lr < 0.0) o.lr = mode == LearnerMode::DQN ? 3e-4 : 1e-4;
    if (o.buffer < 0) o.buffer = mode == LearnerMode::DQN ? 50000 : 5000;
    if (o.hidden.empty())
        o.hidden = mode == LearnerMode::DQN ? std::vector<int>{128, 128, 128}
                   : sigmoid                ? std::vector<int>{32, 32}
                                            : std::vector<int>{64, 64};
    if (o.eval_every < 0) o.eval_every = o.steps / 10;
    if (o.eval_episodes < 0) o.eval_episodes = sigmoid ? 10 : 2;
    if (o.method_name.empty()) o.method_name = o.learner;

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    const json config = cmd_detail::options_json(o);
    // sub-streams are derived per purpose and counter, so listing the
    // domains pins the whole tree
    const json seed_tree{{"nets", "derive(seed ^ 'nets', net_index)"},
                         {"episode_env", "derive(seed ^ 'envi', episode)"},
                         {"rollout", "derive(seed ^ 'roll', episode)"},
                         {"batch", "derive(seed ^ 'batc', counter)"},
                         {"greedy_eval", "derive(seed ^ 'eval', tag)"}};
    cmd_detail::write_manifest(dir, "train", config, o.seed, seed_tree);

    TrainConfig cfg;
    cfg.mode = mode;
    cfg.total_env_steps = o.steps;
    cfg.seed = o.seed;
    cfg.lr = o.lr;
    cfg.gamma = o.gamma;
    cfg.buffer_capacity = static_cast<std::size_t>(o.buffer);
    cfg.batch_size = static_cast<std::size_t>(o.batch);
    cfg.target_update_every = o.target_every;
    cfg.epsilon = EpsilonSchedule{o.eps_start, o.eps_end, o.eps_decay};
    cfg.train_steps_per_episode = o.train_per_episode;
    cfg.hidden = o.hidden;
    cfg.eval_every = o.eval_every;
    cfg.eval_episodes = o.eval_episodes;

    std::vector<MopInstance> train_set;
    SigmoidSpec sig_spec;
    int obs_size = 0;
    std::vector<int> action_dims;
    if (sigmoid) {
        sig_spec.dims = o.dims;
        sig_spec.action_sizes.assign(static_cast<std::size_t>(o.dims), o.action_size);
        SigmoidEnv probe(sig_spec);
        obs_size = probe.observation_size();
        action_dims = probe.action_dims();
    } else {
        train_set = cmd_detail::resolve_train_set(o);
        obs_size = kMamoFeatures;
        action_dims = mamo_action_dims();
        cfg.mask = cmd_detail::mamo_mask(o.mask_agents);
    }

    Learner learner(mode, obs_size, action_dims, o.hidden, o.lr, o.gamma, o.target_every, o.seed);
    if (cfg.mask.fixed.size() == action_dims.size() && cfg.mask.any()) learner.set_mask(cfg.mask);

    long start_steps = 0, start_episodes = 0;
    const fs::path ckpt_path = dir / "checkpoint.bin";
    const fs::path ckpt_meta = dir / "checkpoint.json";
    if (o.resume && fs::exists(ckpt_path)) {
        std::ifstream is(ckpt_path, std::ios::binary);
        const auto ck = learner_io::load_learner(is);
        if (ck.mode != mode) throw std::runtime_error("resume: checkpoint learner mode mismatch");
        learner.restore_params(
            [&] {
                std::vector<Mlp> nets;
                for (const auto& n : ck.nets) nets.push_back(n.net);
                return nets;
            }(),
            ck.optimizers, ck.train_steps);
        start_steps = ck.env_steps;
        start_episodes = ck.episodes;
        std::cout << "resuming from " << ckpt_path.string() << " at step " << start_steps << "\n";
    }

    std::ofstream train_os(dir / "train_log.csv", start_steps > 0 ? std::ios::app : std::ios::out);
    std::ofstream eval_os(dir / "eval_log.csv", start_steps > 0 ? std::ios::app : std::ios::out);
    if (start_steps == 0) {
        train_os << "step,episode,mean_return,loss,epsilon\n";
        eval_os << "step,mean_return\n";
    }

    const std::string env_desc = sigmoid ? "sigmoid" : "mamo";
    std::cout << "train " << env_desc << " learner=" << o.learner << " steps=" << o.steps
              << " seed=" << o.seed << " out=" << o.out_dir << "\n";
    if (!sigmoid) {
        std::cout << "train set:";
        for (const auto& inst : train_set) std::cout << " " << inst.id();
        std::cout << "\n";
    }

    auto save_checkpoint = [&](long env_steps, long episodes) {
        std::ofstream os(ckpt_path, std::ios::binary);
        learner_io::save_learner(os, learner, o.seed, env_steps, episodes);
        json meta{{"mode", learner_mode_name(mode)},
                  {"env", env_desc},
                  {"obs_size", obs_size},
                  {"action_dims", action_dims},
                  {"hidden", o.hidden},
                  {"gamma", o.gamma},
                  {"mask_agents", o.mask_agents},
                  {"dims", o.dims},
                  {"action_size", o.action_size},
                  {"reward", o.reward},
                  {"hv_samples", o.hv_samples},
                  {"population", o.population},
                  {"env_steps", env_steps},
                  {"episodes", episodes},
                  {"method_name", o.method_name},
                  {"config_hash", hex64(fnv1a(config.dump()))}};
        std::ofstream meta_os(ckpt_meta);
        meta_os << meta.dump(2) << "\n";
    };

    auto train_log = [&](const TrainLogRow& row) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%ld,%ld,%.10g,%.10g,%.4f\n", row.env_steps, row.episode,
                      row.mean_return, row.loss, row.epsilon);
        train_os << buf;
    };
    auto eval_log = [&](const EvalLogRow& row) {
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%ld,%.10g\n", row.env_steps, row.mean_return);
        eval_os << buf;
    };

    TrainOutcome outcome;
    if (sigmoid) {
        auto factory = [&](std::uint64_t env_seed, bool) {
            SigmoidSpec spec = sig_spec;
            spec.seed = env_seed;
            return SigmoidFactoryEnv{SigmoidEnv(spec)};
        };
        outcome = run_training(cfg, learner, factory, train_log, eval_log, save_checkpoint,
                               o.checkpoint_every, start_steps, start_episodes);
    } else {
        const RewardMode reward_mode = parse_reward_mode(o.reward);
        auto factory = [&](std::uint64_t env_seed, bool) {
            RngStream pick(env_seed);
            const auto& inst = train_set[pick.uniform_int(train_set.size())];
            EpisodeSpec spec = make_episode_spec(inst, pick.next_u64());
            spec.N = o.population;
            spec.reward_mode = reward_mode;
            spec.hv_samples = o.hv_samples;
            return MamoEnv(spec);
        };
        outcome = run_training(cfg, learner, factory, train_log, eval_log, save_checkpoint,
                               o.checkpoint_every, start_steps, start_episodes);
    }
    save_checkpoint(outcome.env_steps, outcome.episodes);

    TrainArtifacts art;
    art.checkpoint = ckpt_path;
    art.checkpoint_meta = ckpt_meta;
    art.train_log = dir / "train_log.csv";
    art.eval_log = dir / "eval_log.csv";
    art.env_steps = outcome.env_steps;
    art.episodes = outcome.episodes;
    std::cout << "trained " << outcome.env_steps << " env steps over " << outcome.episodes
              << " episodes; checkpoint at " << ckpt_path.string() << "\n";
    return art;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
    std::string checkpoint;              // path to checkpoint.bin (with .json sidecar)
    std::string baseline;                // moead | moead-op1..4 | ma-ucb | frrmab | awa
    std::vector<std::string> instances;  // mamo instance ids
    int runs = 30;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string reward = "triangle";
    std::size_t hv_samples = 10000;
    int population = 210;
    bool trajectories = false;
    bool save_populations = false;
    int dims = 3;                        // sigmoid fallback when no checkpoint meta
    int action_size = 3;
    std::string method_name;
    std::string out_dir = "out/eval";
};

namespace cmd_detail {

inline bool is_known_baseline(const std::string& name) {
    static const char* names[] = {"moead",     "moead-op1", "moead-op2", "moead-op3",
                                  "moead-op4", "ma-ucb",    "frrmab",    "awa"};
    for (const char* n : names)
        if (name == n) return true;
    return false;
}

inline std::unique_ptr<MamoController> make_baseline(const std::string& name, int horizon,
                                                     int population, std::uint64_t seed) {
    if (name == "moead") return std::make_unique<StaticController>(StaticController::original());
    if (name == "moead-op1")
        return std::make_unique<StaticController>(StaticController::with_operator(Operator::OP1));
    if (name == "moead-op2")
        return std::make_unique<StaticController>(StaticController::with_operator(Operator::OP2));
    if (name == "moead-op3")
        return std::make_unique<StaticController>(StaticController::with_operator(Operator::OP3));
    if (name == "moead-op4")
        return std::make_unique<StaticController>(StaticController::with_operator(Operator::OP4));
    if (name == "ma-ucb") return std::make_unique<MaUcbController>();
    if (name == "frrmab") return std::make_unique<FrrmabController>(population, seed);
    if (name == "awa") return std::make_unique<AwaIntervalController>(horizon);
    throw std::invalid_argument("unknown baseline: " + name);
}

inline AgentMask mamo_mask_or_empty(const std::vector<int>& agents_1based, std::size_t n_agents) {
    if (agents_1based.empty() || n_agents != kMamoAgents) {
        AgentMask mask;
        mask.fixed.assign(n_agents, -1);
        return mask;
    }
    return mamo_mask(agents_1based);
}

inline json eval_options_json(const EvalOptions& o) {
    return json{{"checkpoint", o.checkpoint.empty() ? "" : fs::path(o.checkpoint).filename().string()},
                {"baseline", o.baseline},
                {"instances", o.instances},
                {"runs", o.runs},
                {"seed", o.seed},
                {"reward", o.reward},
                {"hv_samples", o.hv_samples},
                {"population", o.population},
                {"dims", o.dims},
                {"action_size", o.action_size},
                {"method_name", o.method_name}};
}

}  // namespace cmd_detail

inline std::vector<RunResult> cmd_eval(const EvalOptions& opts_in) {
    EvalOptions o = opts_in;
    o.seed = resolve_seed(o.seed);
    if (o.checkpoint.empty() == o.baseline.empty())
        throw std::invalid_argument("eval: exactly one of --checkpoint / --baseline is required");
    if (o.runs < 1) throw std::invalid_argument("eval: runs must be positive");
    if (!o.baseline.empty()) {
        if (!cmd_detail::is_known_baseline(o.baseline))
            throw std::invalid_argument("unknown baseline: " + o.baseline);
        if (o.instances.empty()) throw std::invalid_argument("eval: --instances required for mamo");
        for (const auto& id : o.instances) parse_instance_id(id);  // fail before any output
    }

    // Learner setup (when evaluating a checkpoint).
    std::unique_ptr<Learner> learner;
    std::string env_kind = "mamo";
    json meta;
    if (!o.checkpoint.empty()) {
        const fs::path meta_path = fs::path(o.checkpoint).replace_extension(".json");
        if (!fs::exists(meta_path))
            throw std::runtime_error("eval: checkpoint sidecar not found: " + meta_path.string());
        std::ifstream meta_is(meta_path);
        meta = json::parse(meta_is);
        env_kind = meta.at("env").get<std::string>();
        const LearnerMode mode = parse_learner_mode(meta.at("mode").get<std::string>());
        const int obs_size = meta.at("obs_size").get<int>();
        const auto action_dims = meta.at("action_dims").get<std::vector<int>>();
        const auto hidden = meta.at("hidden").get<std::vector<int>>();
        learner = std::make_unique<Learner>(mode, obs_size, action_dims, hidden, 1e-4,
                                            meta.at("gamma").get<double>(), 0, 0);
        std::ifstream is(o.checkpoint, std::ios::binary);
        if (!is) throw std::runtime_error("eval: cannot open checkpoint: " + o.checkpoint);
        const auto ck = learner_io::load_learner(is);
        if (ck.mode != mode) throw std::runtime_error("eval: checkpoint/manifest mode mismatch");
        std::vector<Mlp> nets;
        for (const auto& n : ck.nets) nets.push_back(n.net);
        learner->restore_params(nets, ck.optimizers, ck.train_steps);
        if (meta.contains("mask_agents"))
            learner->set_mask(cmd_detail::mamo_mask_or_empty(
                meta.at("mask_agents").get<std::vector<int>>(), action_dims.size()));
        if (o.method_name.empty() && meta.contains("method_name"))
            o.method_name = meta.at("method_name").get<std::string>();
        if (meta.contains("reward")) o.reward = meta.at("reward").get<std::string>();
        if (meta.contains("hv_samples")) o.hv_samples = meta.at("hv_samples").get<std::size_t>();
        if (meta.contains("population")) o.population = meta.at("population").get<int>();
        if (meta.contains("dims")) o.dims = meta.at("dims").get<int>();
        if (meta.contains("action_size")) o.action_size = meta.at("action_size").get<int>();
    }
    if (o.method_name.empty()) o.method_name = o.baseline;

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    {
        json seed_tree = json::object();
        if (env_kind == "sigmoid") {
            const std::string instance_id =
                "SIGMOID_" + std::to_string(o.dims) + "x" + std::to_string(o.action_size);
            json runs = json::array();
            for (int r = 0; r < o.runs; ++r)
                runs.push_back(RngStream::derive_seed(o.seed ^ fnv1a(instance_id),
                                                      static_cast<std::uint64_t>(r)));
            seed_tree[instance_id] = runs;
        } else {
            for (const auto& id : o.instances) {
                json runs = json::array();
                for (int r = 0; r < o.runs; ++r)
                    runs.push_back(RngStream::derive_seed(o.seed ^ fnv1a(id),
                                                          static_cast<std::uint64_t>(r)));
                seed_tree[id] = runs;
            }
        }
        cmd_detail::write_manifest(dir, "eval", cmd_detail::eval_options_json(o), o.seed, seed_tree);
    }

    std::vector<RunResult> results;
    if (env_kind == "sigmoid") {
        if (learner == nullptr) throw std::invalid_argument("eval: sigmoid evaluation needs a checkpoint");
        const std::string instance_id =
            "SIGMOID_" + std::to_string(o.dims) + "x" + std::to_string(o.action_size);
        std::cout << "eval " << o.method_name << " on " << instance_id << " runs=" << o.runs
                  << " seed=" << o.seed << " out=" << o.out_dir << "\n";
        for (int r = 0; r < o.runs; ++r) {
            SigmoidSpec spec;
            spec.dims = o.dims;
            spec.action_sizes.assign(static_cast<std::size_t>(o.dims), o.action_size);
            spec.seed = RngStream::derive_seed(o.seed ^ fnv1a(instance_id), static_cast<std::uint64_t>(r));
            SigmoidEnv env(spec);
            Vec obs = env.reset();
            RunResult res;
            res.method = o.method_name;
            res.instance = instance_id;
            res.seed = spec.seed;
            res.metric = "return";
            while (!env.done()) {
                const auto sr = env.step_indices(learner->act_greedy(obs));
                res.curve.push_back(sr.reward);
                obs = sr.observation;
            }
            res.final_value = 0.0;
            for (double v : res.curve) res.final_value += v;
            results.push_back(std::move(res));
        }
    } else {
        if (o.instances.empty()) throw std::invalid_argument("eval: --instances required for mamo");
        const RewardMode reward_mode = parse_reward_mode(o.reward);
        struct Task {
            MopInstance instance;
            std::uint64_t seed;
        };
        std::vector<Task> tasks;
        for (const auto& id : o.instances) {
            const MopInstance inst = parse_instance_id(id);
            for (int r = 0; r < o.runs; ++r)
                tasks.push_back({inst, RngStream::derive_seed(o.seed ^ fnv1a(id),
                                                              static_cast<std::uint64_t>(r))});
        }
        std::cout << "eval " << o.method_name << " on " << o.instances.size() << " instance(s), "
                  << o.runs << " run(s) each, base seed " << o.seed << ", out=" << o.out_dir << "\n";
        for (const auto& t : tasks) std::cout << "  " << t.instance.id() << " seed " << t.seed << "\n";

        results.resize(tasks.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) break;
                const Task& t = tasks[i];
                EpisodeSpec spec = make_episode_spec(t.instance, t.seed);
                spec.N = o.population;
                spec.reward_mode = reward_mode;
                spec.hv_samples = o.hv_samples;
                MamoEnv env(spec);
                std::unique_ptr<MamoController> controller;
                if (learner != nullptr)
                    controller = std::make_unique<LearnerController>(*learner);
                else
                    controller = cmd_detail::make_baseline(o.baseline, spec.T, spec.N, t.seed);
                const Trajectory traj = drive_episode(env, *controller);
                RunResult res;
                res.method = o.method_name;
                res.instance = t.instance.id();
                res.seed = t.seed;
                res.metric = "igd";
                res.curve = traj.igd_curve();
                res.final_value = res.curve.back();
                if (o.trajectories) {
                    fs::create_directories(dir / "trajectories");
                    std::ofstream ts(dir / "trajectories" /
                                     (o.method_name + "_" + res.instance + "_" +
                                      std::to_string(res.seed) + ".csv"));
                    write_trajectory_csv(ts, traj);
                }
                if (o.save_populations) {
                    fs::create_directories(dir / "populations");
                    std::ofstream ps(dir / "populations" /
                                     (o.method_name + "_" + res.instance + "_" +
                                      std::to_string(res.seed) + ".csv"));
                    write_population_csv(ps, env.state());
                }
                results[i] = std::move(res);
            }
        };
        const int workers = std::max(1, o.workers);
        if (workers == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
    }

    std::ofstream records(dir / "records.jsonl");
    write_records(records, results);
    std::cout << "wrote " << results.size() << " record(s) to "
              << (dir / "records.jsonl").string() << "\n";
    return results;
}

// ---------------------------------------------------------------------------
// table

struct TableOptions {
    std::vector<std::string> record_files;
    std::string reference;  // default: last method seen
    double alpha = 0.05;
    std::string out_dir = "out/table";
};

namespace cmd_detail {

inline bool is_train_instance(const std::string& instance) {
    return instance.rfind("DTLZ2_", 0) == 0 || instance.rfind("WFG4_", 0) == 0 ||
           instance.rfind("WFG6_", 0) == 0 || instance.rfind("SIGMOID", 0) == 0;
}

inline std::string format_cell(const SummaryCell& cell) {
    if (!cell.present) return "--";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3E (%.2E)", cell.mean, cell.stddev);
    std::string out(buf);
    if (!cell.is_reference) {
        out += " ";
        out += verdict_symbol(cell.verdict);
    }
    return out;
}

}  // namespace cmd_detail

inline std::vector<RunResult> load_record_files(const std::vector<std::string>& paths) {
    std::vector<RunResult> all;
    for (const auto& p : paths) {
        fs::path path(p);
        if (fs::is_directory(path)) path /= "records.jsonl";
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open records: " + path.string());
        auto part = read_records(is);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

inline SummaryTable cmd_table(const TableOptions& o) {
    auto all = load_record_files(o.record_files);
    if (all.empty()) throw std::invalid_argument("table: no records");
    std::string metric = all.front().metric;
    for (const auto& r : all)
        if (r.metric != metric) throw std::invalid_argument("table: mixed metrics in records");
    const bool lower_better = metric != "return";

    // The test reads lower-is-better; flip the sign for return-like metrics.
    std::vector<RunResult> adjusted = all;
    if (!lower_better)
        for (auto& r : adjusted) r.final_value = -r.final_value;

    std::string reference = o.reference;
    if (reference.empty()) {
        for (const auto& r : adjusted) reference = r.method;  // last method seen
    }
    SummaryTable table = summarize(adjusted, reference, o.alpha);
    if (!lower_better)
        for (auto& row : table.rows)
            for (auto& cell : row.cells) cell.mean = -cell.mean;

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);

    {
        std::ofstream csv(dir / "table.csv");
        csv << "instance,method,mean,std,runs,verdict\n";
        char buf[160];
        for (const auto& row : table.rows)
            for (const auto& cell : row.cells) {
                if (!cell.present) {
                    csv << row.instance << "," << cell.method << ",,,0,missing\n";
                    continue;
                }
                std::snprintf(buf, sizeof(buf), "%s,%s,%.10E,%.10E,%d,%s\n", row.instance.c_str(),
                              cell.method.c_str(), cell.mean, cell.stddev, cell.runs,
                              cell.is_reference ? "ref" : verdict_symbol(cell.verdict));
                csv << buf;
            }
    }

    // Aligned text rendering with train/test tallies and average ranks.
    std::ostringstream text;
    {
        std::size_t name_w = 10;
        for (const auto& row : table.rows) name_w = std::max(name_w, row.instance.size());
        std::vector<std::size_t> col_w(table.methods.size());
        for (std::size_t c = 0; c < table.methods.size(); ++c)
            col_w[c] = table.methods[c].size() + (table.methods[c] == table.reference ? 6 : 0);
        std::vector<std::vector<std::string>> cells(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            for (std::size_t c = 0; c < table.methods.size(); ++c) {
                cells[r].push_back(cmd_detail::format_cell(table.rows[r].cells[c]));
                col_w[c] = std::max(col_w[c], cells[r].back().size());
            }
        }
        auto pad = [](const std::string& s, std::size_t w) {
            return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
        };
        text << pad("instance", name_w);
        for (std::size_t c = 0; c < table.methods.size(); ++c) {
            std::string head = table.methods[c];
            if (table.methods[c] == table.reference) head += " (ref)";
            text << "  " << pad(head, col_w[c]);
        }
        text << "\n";
        std::map<std::string, std::array<int, 3>> train_tally, test_tally;
        bool has_train = false, has_test = false;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            text << pad(table.rows[r].instance, name_w);
            for (std::size_t c = 0; c < table.methods.size(); ++c)
                text << "  " << pad(cells[r][c], col_w[c]);
            text << "\n";
            const bool train = cmd_detail::is_train_instance(table.rows[r].instance);
            (train ? has_train : has_test) = true;
            for (const auto& cell : table.rows[r].cells) {
                if (!cell.present || cell.is_reference) continue;
                auto& tally = train ? train_tally[cell.method] : test_tally[cell.method];
                switch (cell.verdict) {
                    case Verdict::Superior: ++tally[0]; break;
                    case Verdict::Inferior: ++tally[1]; break;
                    case Verdict::Equivalent: ++tally[2]; break;
                }
            }
        }
        auto tally_line = [&](const char* label,
                              std::map<std::string, std::array<int, 3>>& tally) {
            text << pad(label, name_w);
            for (std::size_t c = 0; c < table.methods.size(); ++c) {
                std::string cell = "";
                if (table.methods[c] != table.reference) {
                    const auto& t = tally[table.methods[c]];
                    cell = std::to_string(t[0]) + "/" + std::to_string(t[1]) + "/" +
                           std::to_string(t[2]);
                }
                text << "  " << pad(cell, col_w[c]);
            }
            text << "\n";
        };
        if (has_train) tally_line("train +/-/~", train_tally);
        if (has_test) tally_line("test +/-/~", test_tally);
        text << pad("avg rank", name_w);
        for (std::size_t c = 0; c < table.methods.size(); ++c) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", table.average_rank.at(table.methods[c]));
            text << "  " << pad(buf, col_w[c]);
        }
        text << "\n";
    }
    std::ofstream txt(dir / "table.txt");
    txt << text.str();
    std::cout << text.str();
    return table;
}

// ---------------------------------------------------------------------------
// curves

struct CurvesOptions {
    std::vector<std::string> record_files;
    bool mean = false;
    std::string out_file = "out/curves.csv";
};

inline void cmd_curves(const CurvesOptions& o) {
    auto all = load_record_files(o.record_files);
    if (all.empty()) throw std::invalid_argument("curves: no records");
    const fs::path parent = fs::path(o.out_file).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    std::ofstream os(o.out_file);
    const std::string value_name = all.front().metric == "return" ? "reward" : "igd";
    char buf[200];
    if (!o.mean) {
        os << "method,instance,seed,step," << value_name << "\n";
        for (const auto& r : all)
            for (std::size_t t = 0; t < r.curve.size(); ++t) {
                std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%zu,%.17g\n", r.method.c_str(),
                              r.instance.c_str(), static_cast<unsigned long long>(r.seed), t + 1,
                              r.curve[t]);
                os << buf;
            }
    } else {
        os << "method,instance,step,mean,std\n";
        std::map<std::pair<std::string, std::string>, std::vector<const RunResult*>> groups;
        for (const auto& r : all) groups[{r.method, r.instance}].push_back(&r);
        for (const auto& [key, runs] : groups) {
            std::size_t min_len = runs.front()->curve.size();
            for (const auto* r : runs) min_len = std::min(min_len, r->curve.size());
            for (std::size_t t = 0; t < min_len; ++t) {
                Vec vals;
                vals.reserve(runs.size());
                for (const auto* r : runs) vals.push_back(r->curve[t]);
                std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.17g,%.17g\n", key.first.c_str(),
                              key.second.c_str(), t + 1, mean_of(vals), stdev_of(vals));
                os << buf;
            }
        }
    }
    std::cout << "wrote curves to " << o.out_file << "\n";
}

}  // namespace madac
