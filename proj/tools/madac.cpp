#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "madac/commands.hpp"

namespace {

// JSON config file values fill the options first; explicit flags override.
template <typename Fn>
void apply_config_file(const std::string& path, Fn&& apply) {
    if (path.empty()) return;
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    apply(nlohmann::json::parse(is));
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic configuration of decomposition-based multi-objective search "
                 "with cooperative value-decomposition learners"};
    app.require_subcommand(1);

    madac::TrainOptions train;
    std::string train_config_file;
    std::string train_set_csv, objectives_csv;
    auto* t = app.add_subcommand("train", "Train a configuration policy");
    t->add_option("--config", train_config_file, "JSON config file (flags override)");
    t->add_option("--env", train.env, "Environment: mamo | sigmoid");
    t->add_option("--learner", train.learner, "Learner: vdn | iql | dqn");
    t->add_option("--train-set", train_set_csv, "Comma-separated instance ids (mamo)");
    t->add_option("--objectives", objectives_csv, "Comma-separated objective counts (mamo)");
    t->add_option("--dims", train.dims, "Sigmoid dimensions");
    t->add_option("--action-size", train.action_size, "Sigmoid per-dimension action count");
    t->add_option("--steps", train.steps, "Total environment steps");
    t->add_option("--seed", train.seed, "Base seed (0 draws one from OS entropy)");
    t->add_option("--lr", train.lr, "Learning rate (default by learner)");
    t->add_option("--gamma", train.gamma, "Discount factor");
    t->add_option("--buffer", train.buffer, "Replay capacity (episodes, or transitions for dqn)");
    t->add_option("--batch", train.batch, "Batch size");
    t->add_option("--target-every", train.target_every, "Target refresh interval (train steps)");
    t->add_option("--eps-start", train.eps_start, "Initial exploration rate");
    t->add_option("--eps-end", train.eps_end, "Final exploration rate");
    t->add_option("--eps-decay", train.eps_decay, "Exploration decay horizon (env steps)");
    t->add_option("--train-per-episode", train.train_per_episode, "Gradient steps per episode");
    t->add_option("--hidden", train.hidden, "Hidden layer widths");
    t->add_option("--eval-every", train.eval_every, "Greedy evaluation interval (env steps)");
    t->add_option("--eval-episodes", train.eval_episodes, "Episodes per greedy evaluation");
    t->add_option("--mask-agent", train.mask_agents, "Fix agent i (1..4) at its default action");
    t->add_option("--checkpoint-every", train.checkpoint_every, "Checkpoint interval (episodes)");
    t->add_option("--reward", train.reward, "Reward mode: triangle | r1 | r2 | r3");
    t->add_option("--hv-samples", train.hv_samples, "Monte Carlo samples for the HV feature");
    t->add_option("--population", train.population, "Population size");
    t->add_flag("--resume", train.resume, "Continue from the checkpoint in --out");
    t->add_option("--method-name", train.method_name, "Label stored with the checkpoint");
    t->add_option("--out", train.out_dir, "Output directory");

    madac::EvalOptions eval;
    std::string eval_config_file, instances_csv;
    auto* e = app.add_subcommand("eval", "Evaluate a checkpoint or baseline");
    e->add_option("--config", eval_config_file, "JSON config file (flags override)");
    e->add_option("--checkpoint", eval.checkpoint, "Checkpoint file");
    e->add_option("--baseline", eval.baseline,
                  "Baseline: moead | moead-op1..4 | ma-ucb | frrmab | awa");
    e->add_option("--instances", instances_csv, "Comma-separated instance ids");
    e->add_option("--runs", eval.runs, "Runs per instance");
    e->add_option("--seed", eval.seed, "Base seed (0 draws one from OS entropy)");
    e->add_option("--workers", eval.workers, "Parallel evaluation workers");
    e->add_option("--reward", eval.reward, "Reward mode: triangle | r1 | r2 | r3");
    e->add_option("--hv-samples", eval.hv_samples, "Monte Carlo samples for the HV feature");
    e->add_option("--population", eval.population, "Population size");
    e->add_flag("--trajectories", eval.trajectories, "Write per-step trajectory CSVs");
    e->add_flag("--save-populations", eval.save_populations, "Write final population CSVs");
    e->add_option("--dims", eval.dims, "Sigmoid dimensions");
    e->add_option("--action-size", eval.action_size, "Sigmoid per-dimension action count");
    e->add_option("--method-name", eval.method_name, "Method label in records");
    e->add_option("--out", eval.out_dir, "Output directory");

    madac::TableOptions table;
    auto* tb = app.add_subcommand("table", "Comparison table from run records");
    tb->add_option("--records", table.record_files, "Record files or eval directories")->required();
    tb->add_option("--reference", table.reference, "Reference method (default: last seen)");
    tb->add_option("--alpha", table.alpha, "Significance level");
    tb->add_option("--out", table.out_dir, "Output directory");

    madac::CurvesOptions curves;
    auto* cv = app.add_subcommand("curves", "Per-step metric trajectories as CSV");
    cv->add_option("--records", curves.record_files, "Record files or eval directories")->required();
    cv->add_flag("--mean", curves.mean, "Aggregate seeds into mean/std per step");
    cv->add_option("--out", curves.out_file, "Output CSV file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) {
            apply_config_file(train_config_file, [&](const nlohmann::json& j) {
                maybe(j, "env", train.env);
                maybe(j, "learner", train.learner);
                maybe(j, "train_set", train.train_set);
                maybe(j, "objectives", train.objectives);
                maybe(j, "dims", train.dims);
                maybe(j, "action_size", train.action_size);
                maybe(j, "steps", train.steps);
                maybe(j, "seed", train.seed);
                maybe(j, "lr", train.lr);
                maybe(j, "gamma", train.gamma);
                maybe(j, "buffer", train.buffer);
                maybe(j, "batch", train.batch);
                maybe(j, "target_every", train.target_every);
                maybe(j, "eps_start", train.eps_start);
                maybe(j, "eps_end", train.eps_end);
                maybe(j, "eps_decay", train.eps_decay);
                maybe(j, "train_per_episode", train.train_per_episode);
                maybe(j, "hidden", train.hidden);
                maybe(j, "eval_every", train.eval_every);
                maybe(j, "eval_episodes", train.eval_episodes);
                maybe(j, "mask_agents", train.mask_agents);
                maybe(j, "checkpoint_every", train.checkpoint_every);
                maybe(j, "reward", train.reward);
                maybe(j, "hv_samples", train.hv_samples);
                maybe(j, "population", train.population);
                maybe(j, "method_name", train.method_name);
                maybe(j, "out", train.out_dir);
            });
            if (!train_set_csv.empty()) train.train_set = madac::split_csv_list(train_set_csv);
            if (!objectives_csv.empty()) {
                train.objectives.clear();
                for (const auto& s : madac::split_csv_list(objectives_csv))
                    train.objectives.push_back(std::stoi(s));
            }
            madac::cmd_train(train);
        } else if (e->parsed()) {
            apply_config_file(eval_config_file, [&](const nlohmann::json& j) {
                maybe(j, "checkpoint", eval.checkpoint);
                maybe(j, "baseline", eval.baseline);
                maybe(j, "instances", eval.instances);
                maybe(j, "runs", eval.runs);
                maybe(j, "seed", eval.seed);
                maybe(j, "workers", eval.workers);
                maybe(j, "reward", eval.reward);
                maybe(j, "hv_samples", eval.hv_samples);
                maybe(j, "population", eval.population);
                maybe(j, "dims", eval.dims);
                maybe(j, "action_size", eval.action_size);
                maybe(j, "method_name", eval.method_name);
                maybe(j, "out", eval.out_dir);
            });
            if (!instances_csv.empty()) eval.instances = madac::split_csv_list(instances_csv);
            madac::cmd_eval(eval);
        } else if (tb->parsed()) {
            madac::cmd_table(table);
        } else if (cv->parsed()) {
            madac::cmd_curves(curves);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
