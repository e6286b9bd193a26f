#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "madac/core.hpp"
#include "madac/nn.hpp"
#include "madac/rng.hpp"

namespace madac {

struct Transition {
    Vec obs;
    std::vector<int> actions;  // one index per agent
    double reward = 0.0;
    Vec next_obs;
    bool done = false;
};

using Episode = std::vector<Transition>;

// Ring buffer over complete units (episodes or transitions); sampling is
// uniform with replacement over everything stored.
template <typename T>
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const T& at(std::size_t i) const { return items_[i]; }

    void push(T item) {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(item));
        } else {
            items_[write_] = std::move(item);
        }
        write_ = (write_ + 1) % capacity_;
    }

    std::vector<const T*> sample(std::size_t k, RngStream& rng) const {
        if (items_.empty()) throw std::logic_error("ReplayBuffer: sampling from empty buffer");
        std::vector<const T*> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = &items_[rng.uniform_int(items_.size())];
        return out;
    }

private:
    std::size_t capacity_;
    std::size_t write_ = 0;
    std::vector<T> items_;
};

enum class LearnerMode { VDN, IQL, DQN };

inline const char* learner_mode_name(LearnerMode m) {
    switch (m) {
        case LearnerMode::VDN: return "vdn";
        case LearnerMode::IQL: return "iql";
        case LearnerMode::DQN: return "dqn";
    }
    return "?";
}

inline LearnerMode parse_learner_mode(const std::string& s) {
    if (s == "vdn") return LearnerMode::VDN;
    if (s == "iql") return LearnerMode::IQL;
    if (s == "dqn") return LearnerMode::DQN;
    throw std::invalid_argument("unknown learner mode: " + s);
}

// Sum mixing: the team value is the plain sum of the chosen per-agent
// values, in agent order.
inline double vdn_qtot(const Vec& chosen_qs) {
    double acc = 0.0;
    for (double q : chosen_qs) acc += q;
    return acc;
}

inline int argmax_index(const Vec& qs) {
    int best = 0;
    for (std::size_t i = 1; i < qs.size(); ++i)
        if (qs[i] > qs[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    return best;
}

// Epsilon-greedy with lowest-index tie break; draws nothing when eps == 0.
inline int epsilon_greedy(const Vec& qs, double eps, RngStream& rng) {
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("epsilon_greedy: eps outside [0,1]");
    if (eps > 0.0 && rng.uniform() < eps) return rng.index(qs.size());
    return argmax_index(qs);
}

// Mixed-radix joint-action coding, agent 0 most significant.
inline int encode_joint(const std::vector<int>& actions, const std::vector<int>& dims) {
    int code = 0;
    for (std::size_t a = 0; a < dims.size(); ++a) code = code * dims[a] + actions[a];
    return code;
}

inline std::vector<int> decode_joint(int code, const std::vector<int>& dims) {
    std::vector<int> out(dims.size());
    for (std::size_t a = dims.size(); a-- > 0;) {
        out[a] = code % dims[a];
        code /= dims[a];
    }
    return out;
}

// Ablation mask: agents listed here always emit their default action.
struct AgentMask {
    std::vector<int> fixed;  // per agent: -1 free, otherwise forced index
    bool any() const {
        return std::any_of(fixed.begin(), fixed.end(), [](int v) { return v >= 0; });
    }
};

// Q-learners over a factored discrete action space: independent per-agent
// networks mixed by summation (VDN), fully independent targets (IQL), or
// one network over the joint space (DQN).
class Learner {
public:
    Learner(LearnerMode mode, int obs_size, std::vector<int> action_dims,
            std::vector<int> hidden, double lr, double gamma, int target_every,
            std::uint64_t seed)
        : mode_(mode),
          obs_size_(obs_size),
          action_dims_(std::move(action_dims)),
          gamma_(gamma),
          target_every_(target_every),
          seed_(seed) {
        mask_.fixed.assign(action_dims_.size(), -1);
        const int nets = mode_ == LearnerMode::DQN ? 1 : static_cast<int>(action_dims_.size());
        for (int n = 0; n < nets; ++n) {
            std::vector<int> widths;
            widths.push_back(obs_size_);
            for (int hw : hidden) widths.push_back(hw);
            widths.push_back(mode_ == LearnerMode::DQN ? joint_size() : action_dims_[static_cast<std::size_t>(n)]);
            RngStream rng(RngStream::derive_seed(seed ^ 0x6e657473ull, static_cast<std::uint64_t>(n)));
            online_.push_back(make_mlp(widths, rng));
            opt_.push_back(OptimizerState::for_params(online_.back().params.size(), lr));
        }
        target_ = online_;
    }

    LearnerMode mode() const { return mode_; }
    int num_agents() const { return static_cast<int>(action_dims_.size()); }
    const std::vector<int>& action_dims() const { return action_dims_; }
    int obs_size() const { return obs_size_; }
    double gamma() const { return gamma_; }
    long train_steps() const { return train_steps_; }
    const std::vector<Mlp>& online_nets() const { return online_; }
    std::vector<Mlp>& online_nets() { return online_; }
    std::vector<Mlp>& target_nets() { return target_; }
    const std::vector<OptimizerState>& optimizers() const { return opt_; }
    std::vector<OptimizerState>& optimizers() { return opt_; }
    const AgentMask& mask() const { return mask_; }
    void set_mask(AgentMask mask) {
        if (mask.fixed.size() != action_dims_.size())
            throw std::invalid_argument("set_mask: one entry per agent required");
        mask_ = std::move(mask);
    }

    int joint_size() const {
        int n = 1;
        for (int d : action_dims_) n *= d;
        return n;
    }

    // Per-action values of one agent's online network (DQN exposes the
    // joint network under agent 0).
    Vec q_values(int agent, const Vec& obs) const {
        if (agent < 0 || agent >= static_cast<int>(online_.size()))
            throw std::out_of_range("q_values: bad agent index");
        return forward(online_[static_cast<std::size_t>(agent)], obs);
    }

    std::vector<int> act(const Vec& obs, double eps, RngStream& rng) const {
        if (mode_ == LearnerMode::DQN) return act_joint(obs, eps, &rng);
        std::vector<int> out(action_dims_.size());
        for (std::size_t a = 0; a < action_dims_.size(); ++a) {
            if (mask_.fixed[a] >= 0) {
                out[a] = mask_.fixed[a];
                continue;
            }
            out[a] = epsilon_greedy(q_values(static_cast<int>(a), obs), eps, rng);
        }
        return out;
    }

    std::vector<int> act_greedy(const Vec& obs) const {
        if (mode_ == LearnerMode::DQN) return act_joint(obs, 0.0, nullptr);
        std::vector<int> out(action_dims_.size());
        for (std::size_t a = 0; a < action_dims_.size(); ++a)
            out[a] = mask_.fixed[a] >= 0
                         ? mask_.fixed[a]
                         : argmax_index(q_values(static_cast<int>(a), obs));
        return out;
    }

    // Greedy value of one agent's target net, restricted to the mask.
    double target_best(std::size_t agent, const Vec& next_obs) const {
        const Vec tq = forward(target_[agent], next_obs);
        if (mask_.fixed[agent] >= 0) return tq[static_cast<std::size_t>(mask_.fixed[agent])];
        return *std::max_element(tq.begin(), tq.end());
    }

    // One fitted TD step on a batch of transitions. Returns the mean
    // squared TD error that was optimized.
    double td_train_step(const std::vector<const Transition*>& batch) {
        if (batch.empty()) throw std::invalid_argument("td_train_step: empty batch");
        double loss = 0.0;
        std::vector<Vec> grads(online_.size());
        for (std::size_t n = 0; n < online_.size(); ++n) grads[n].assign(online_[n].params.size(), 0.0);
        const double inv_b = 1.0 / static_cast<double>(batch.size());

        if (mode_ == LearnerMode::DQN) {
            for (const Transition* tr : batch) {
                const int code = encode_joint(tr->actions, action_dims_);
                const Vec qs = forward(online_[0], tr->obs);
                double y = tr->reward;
                if (!tr->done) {
                    const Vec tq = forward(target_[0], tr->next_obs);
                    double best = -std::numeric_limits<double>::infinity();
                    for (int c = 0; c < static_cast<int>(tq.size()); ++c) {
                        if (mask_.any()) {
                            const auto joint = decode_joint(c, action_dims_);
                            bool ok = true;
                            for (std::size_t a = 0; a < joint.size(); ++a)
                                if (mask_.fixed[a] >= 0 && joint[a] != mask_.fixed[a]) ok = false;
                            if (!ok) continue;
                        }
                        best = std::max(best, tq[static_cast<std::size_t>(c)]);
                    }
                    y += gamma_ * best;
                }
                const double delta = qs[static_cast<std::size_t>(code)] - y;
                loss += delta * delta * inv_b;
                Vec gout(qs.size(), 0.0);
                gout[static_cast<std::size_t>(code)] = 2.0 * delta * inv_b;
                backward(online_[0], tr->obs, gout, grads[0]);
            }
        } else {
            for (const Transition* tr : batch) {
                if (mode_ == LearnerMode::VDN) {
                    Vec chosen(online_.size());
                    std::vector<Vec> per_agent(online_.size());
                    for (std::size_t a = 0; a < online_.size(); ++a) {
                        per_agent[a] = forward(online_[a], tr->obs);
                        chosen[a] = per_agent[a][static_cast<std::size_t>(tr->actions[a])];
                    }
                    double y = tr->reward;
                    if (!tr->done) {
                        double best_sum = 0.0;
                        for (std::size_t a = 0; a < online_.size(); ++a)
                            best_sum += target_best(a, tr->next_obs);
                        y += gamma_ * best_sum;
                    }
                    const double delta = vdn_qtot(chosen) - y;
                    loss += delta * delta * inv_b;
                    for (std::size_t a = 0; a < online_.size(); ++a) {
                        Vec gout(per_agent[a].size(), 0.0);
                        gout[static_cast<std::size_t>(tr->actions[a])] = 2.0 * delta * inv_b;
                        backward(online_[a], tr->obs, gout, grads[a]);
                    }
                } else {  // IQL
                    for (std::size_t a = 0; a < online_.size(); ++a) {
                        const Vec qs = forward(online_[a], tr->obs);
                        double y = tr->reward;
                        if (!tr->done) y += gamma_ * target_best(a, tr->next_obs);
                        const double delta = qs[static_cast<std::size_t>(tr->actions[a])] - y;
                        loss += delta * delta * inv_b / static_cast<double>(online_.size());
                        Vec gout(qs.size(), 0.0);
                        gout[static_cast<std::size_t>(tr->actions[a])] = 2.0 * delta * inv_b;
                        backward(online_[a], tr->obs, gout, grads[a]);
                    }
                }
            }
        }

        if (!std::isfinite(loss))
            throw std::runtime_error("td_train_step: non-finite loss after " +
                                     std::to_string(train_steps_) + " updates");
        for (std::size_t n = 0; n < online_.size(); ++n)
            adam_step(online_[n].params, grads[n], opt_[n]);
        ++train_steps_;
        if (target_every_ > 0 && train_steps_ % target_every_ == 0) sync_targets();
        return loss;
    }

    void sync_targets() { target_ = online_; }

    void restore_params(const std::vector<Mlp>& nets, const std::vector<OptimizerState>& opts,
                        long train_steps) {
        if (nets.size() != online_.size() || opts.size() != opt_.size())
            throw std::runtime_error("restore_params: checkpoint does not match learner layout");
        for (std::size_t n = 0; n < nets.size(); ++n) {
            if (nets[n].widths != online_[n].widths)
                throw std::runtime_error("restore_params: network shape mismatch");
            online_[n].params = nets[n].params;
            const double lr = opt_[n].lr;
            opt_[n] = opts[n];
            opt_[n].lr = lr;
        }
        train_steps_ = train_steps;
        sync_targets();
    }

private:
    std::vector<int> act_joint(const Vec& obs, double eps, RngStream* rng) const {
        const Vec qs = forward(online_[0], obs);
        std::vector<int> allowed;
        allowed.reserve(qs.size());
        for (int code = 0; code < static_cast<int>(qs.size()); ++code) {
            if (mask_.any()) {
                const auto decoded = decode_joint(code, action_dims_);
                bool ok = true;
                for (std::size_t a = 0; a < decoded.size(); ++a)
                    if (mask_.fixed[a] >= 0 && decoded[a] != mask_.fixed[a]) ok = false;
                if (!ok) continue;
            }
            allowed.push_back(code);
        }
        int pick = allowed.front();
        if (eps > 0.0 && rng != nullptr && rng->uniform() < eps) {
            pick = allowed[rng->uniform_int(allowed.size())];
        } else {
            for (int code : allowed)
                if (qs[static_cast<std::size_t>(code)] > qs[static_cast<std::size_t>(pick)]) pick = code;
        }
        return decode_joint(pick, action_dims_);
    }

    LearnerMode mode_;
    int obs_size_;
    std::vector<int> action_dims_;
    double gamma_;
    int target_every_;
    std::uint64_t seed_;
    AgentMask mask_;
    std::vector<Mlp> online_, target_;
    std::vector<OptimizerState> opt_;
    long train_steps_ = 0;
};

// Linear decay from start to end over decay_steps environment steps.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long decay_steps = 50000;

    double at(long env_steps) const {
        if (decay_steps <= 0) return end;
        const double frac = std::min(1.0, static_cast<double>(env_steps) / static_cast<double>(decay_steps));
        return start - (start - end) * frac;
    }
};

struct TrainLogRow {
    long env_steps = 0;
    long episode = 0;
    double mean_return = 0.0;
    double loss = 0.0;
    double epsilon = 0.0;
};

struct EvalLogRow {
    long env_steps = 0;
    double mean_return = 0.0;
};

struct TrainConfig {
    LearnerMode mode = LearnerMode::VDN;
    long total_env_steps = 400000;
    std::uint64_t seed = 1;
    double lr = 1e-4;
    double gamma = 0.99;
    std::size_t buffer_capacity = 5000;   // episodes (VDN/IQL) or transitions (DQN)
    std::size_t batch_size = 32;
    int target_update_every = 200;
    EpsilonSchedule epsilon;
    int train_steps_per_episode = 1;      // VDN/IQL
    int dqn_train_every = 1;              // env steps between DQN updates
    std::vector<int> hidden{64, 64};
    long eval_every = 0;                  // env steps between greedy evals; 0 disables
    int eval_episodes = 10;
    AgentMask mask;                       // empty => no masking
};

namespace train_detail {

inline constexpr std::uint64_t kEnvDomain = 0x656e7669ull;
inline constexpr std::uint64_t kRolloutDomain = 0x726f6c6cull;
inline constexpr std::uint64_t kBatchDomain = 0x62617463ull;
inline constexpr std::uint64_t kEvalDomain = 0x6576616cull;

}  // namespace train_detail

struct TrainOutcome {
    long env_steps = 0;
    long episodes = 0;
    double last_loss = 0.0;
};

// Generic training loop. EnvFactory is called with a derived seed and a
// purpose tag ("train" episode index or eval index) and must return an
// environment exposing reset(), step_indices(), horizon(),
// observation_size() and action_dims().
template <typename EnvFactory>
TrainOutcome run_training(const TrainConfig& cfg, Learner& learner, EnvFactory&& make_env,
                          const std::function<void(const TrainLogRow&)>& train_log,
                          const std::function<void(const EvalLogRow&)>& eval_log,
                          const std::function<void(long env_steps, long episode)>& on_checkpoint,
                          long checkpoint_every_episodes, long start_env_steps = 0,
                          long start_episode = 0) {
    using train_detail::kBatchDomain;
    using train_detail::kEnvDomain;
    using train_detail::kEvalDomain;
    using train_detail::kRolloutDomain;

    const bool episodic = cfg.mode != LearnerMode::DQN;
    ReplayBuffer<Episode> episode_buffer(episodic ? cfg.buffer_capacity : 1);
    ReplayBuffer<Transition> transition_buffer(episodic ? 1 : cfg.buffer_capacity);

    TrainOutcome out;
    out.env_steps = start_env_steps;
    out.episodes = start_episode;
    Vec recent_returns;
    long next_eval = cfg.eval_every > 0 ? ((out.env_steps / cfg.eval_every) + 1) * cfg.eval_every
                                        : std::numeric_limits<long>::max();

    auto run_greedy_eval = [&](long tag) {
        double total = 0.0;
        for (int e = 0; e < cfg.eval_episodes; ++e) {
            auto env = make_env(
                RngStream::derive_seed(cfg.seed ^ kEvalDomain,
                                       static_cast<std::uint64_t>(tag) * 100000ull + static_cast<std::uint64_t>(e)),
                true);
            Vec obs = env.reset();
            double ret = 0.0;
            for (;;) {
                const auto res = env.step_indices(learner.act_greedy(obs));
                ret += res.reward;
                if (res.done) break;
                obs = res.observation;
            }
            total += ret;
        }
        return total / std::max(1, cfg.eval_episodes);
    };

    while (out.env_steps < cfg.total_env_steps) {
        const std::uint64_t ep_index = static_cast<std::uint64_t>(out.episodes);
        RngStream rollout_rng(RngStream::derive_seed(cfg.seed ^ kRolloutDomain, ep_index));
        auto env = make_env(RngStream::derive_seed(cfg.seed ^ kEnvDomain, ep_index), false);

        Episode episode;
        episode.reserve(static_cast<std::size_t>(env.horizon()));
        Vec obs = env.reset();
        double ep_return = 0.0;
        double last_loss = out.last_loss;
        bool done = false;
        while (!done && out.env_steps < cfg.total_env_steps) {
            const double eps = cfg.epsilon.at(out.env_steps);
            const auto actions = learner.act(obs, eps, rollout_rng);
            auto res = env.step_indices(actions);
            Transition tr;
            tr.obs = obs;
            tr.actions = actions;
            tr.reward = res.reward;
            tr.next_obs = res.observation;
            tr.done = res.done;
            ep_return += res.reward;
            obs = res.observation;
            done = res.done;
            ++out.env_steps;

            if (!episodic) {
                transition_buffer.push(std::move(tr));
                if (out.env_steps % cfg.dqn_train_every == 0 &&
                    transition_buffer.size() >= cfg.batch_size) {
                    RngStream batch_rng(RngStream::derive_seed(
                        cfg.seed ^ kBatchDomain, static_cast<std::uint64_t>(out.env_steps)));
                    last_loss = learner.td_train_step(
                        transition_buffer.sample(cfg.batch_size, batch_rng));
                }
            } else {
                episode.push_back(std::move(tr));
            }

            if (out.env_steps >= next_eval) {
                eval_log(EvalLogRow{out.env_steps, run_greedy_eval(next_eval / cfg.eval_every)});
                next_eval += cfg.eval_every;
            }
        }

        if (episodic && !episode.empty()) {
            episode_buffer.push(std::move(episode));
            for (int k = 0; k < cfg.train_steps_per_episode; ++k) {
                RngStream batch_rng(RngStream::derive_seed(
                    cfg.seed ^ kBatchDomain,
                    ep_index * 1000ull + static_cast<std::uint64_t>(k)));
                const auto eps_batch = episode_buffer.sample(
                    std::min(cfg.batch_size, episode_buffer.size()), batch_rng);
                std::vector<const Transition*> flat;
                for (const Episode* ep : eps_batch)
                    for (const Transition& t : *ep) flat.push_back(&t);
                last_loss = learner.td_train_step(flat);
            }
        }

        ++out.episodes;
        out.last_loss = last_loss;
        recent_returns.push_back(ep_return);
        if (recent_returns.size() > 32) recent_returns.erase(recent_returns.begin());
        train_log(TrainLogRow{out.env_steps, out.episodes, mean_of(recent_returns), last_loss,
                              cfg.epsilon.at(out.env_steps)});
        if (checkpoint_every_episodes > 0 && out.episodes % checkpoint_every_episodes == 0)
            on_checkpoint(out.env_steps, out.episodes);
    }
    return out;
}

// Learner checkpoint: a container of per-network blocks, each the plain
// network format followed by its optimizer moments.
namespace learner_io {

inline constexpr char kMagic[8] = {'M', 'A', 'D', 'A', 'C', 'K', 'P', '1'};
inline constexpr char kAdamMagic[8] = {'A', 'D', 'A', 'M', 'S', 'T', 'A', '1'};

inline void save_learner(std::ostream& os, const Learner& learner, std::uint64_t seed,
                         long env_steps, long episodes) {
    os.write(kMagic, sizeof(kMagic));
    nn_io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(learner.mode()));
    nn_io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(learner.num_agents()));
    nn_io::write_pod<std::int64_t>(os, env_steps);
    nn_io::write_pod<std::int64_t>(os, episodes);
    nn_io::write_pod<std::int64_t>(os, learner.train_steps());
    nn_io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(learner.online_nets().size()));
    for (std::size_t n = 0; n < learner.online_nets().size(); ++n) {
        save_net(os, learner.online_nets()[n], seed, static_cast<std::uint64_t>(env_steps));
        const auto& opt = learner.optimizers()[n];
        os.write(kAdamMagic, sizeof(kAdamMagic));
        nn_io::write_pod<std::int64_t>(os, opt.step);
        nn_io::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(opt.m1.size()));
        for (double v : opt.m1) nn_io::write_pod<double>(os, v);
        for (double v : opt.m2) nn_io::write_pod<double>(os, v);
    }
}

struct LearnerCheckpoint {
    LearnerMode mode = LearnerMode::VDN;
    int num_agents = 0;
    long env_steps = 0;
    long episodes = 0;
    long train_steps = 0;
    std::vector<NetCheckpoint> nets;
    std::vector<OptimizerState> optimizers;
};

inline LearnerCheckpoint load_learner(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("learner checkpoint: bad magic");
    LearnerCheckpoint ck;
    ck.mode = static_cast<LearnerMode>(nn_io::read_pod<std::uint32_t>(is));
    ck.num_agents = static_cast<int>(nn_io::read_pod<std::uint32_t>(is));
    ck.env_steps = nn_io::read_pod<std::int64_t>(is);
    ck.episodes = nn_io::read_pod<std::int64_t>(is);
    ck.train_steps = nn_io::read_pod<std::int64_t>(is);
    const auto nets = nn_io::read_pod<std::uint32_t>(is);
    for (std::uint32_t n = 0; n < nets; ++n) {
        ck.nets.push_back(load_net(is));
        char amagic[8];
        is.read(amagic, 8);
        if (!is || std::memcmp(amagic, kAdamMagic, 8) != 0)
            throw std::runtime_error("learner checkpoint: bad optimizer block");
        OptimizerState opt;
        opt.step = nn_io::read_pod<std::int64_t>(is);
        const auto np = nn_io::read_pod<std::uint64_t>(is);
        opt.m1.resize(np);
        opt.m2.resize(np);
        for (auto& v : opt.m1) v = nn_io::read_pod<double>(is);
        for (auto& v : opt.m2) v = nn_io::read_pod<double>(is);
        ck.optimizers.push_back(std::move(opt));
    }
    return ck;
}

}  // namespace learner_io

}  // namespace madac
