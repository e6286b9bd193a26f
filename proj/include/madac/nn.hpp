#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "madac/core.hpp"
#include "madac/rng.hpp"

namespace madac {

// Fully connected network with rectifier hidden layers and a linear
// output, parameters in one flat array (per layer: row-major weight
// matrix, then biases).
struct Mlp {
    std::vector<int> widths;  // input, hidden..., output
    Vec params;

    int input_size() const { return widths.front(); }
    int output_size() const { return widths.back(); }

    static std::size_t param_count(const std::vector<int>& widths) {
        std::size_t n = 0;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l)
            n += static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l + 1]) +
                 static_cast<std::size_t>(widths[l + 1]);
        return n;
    }
};

// Uniform init in +-1/sqrt(fan_in).
inline Mlp make_mlp(const std::vector<int>& widths, RngStream& rng) {
    if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output widths");
    Mlp net;
    net.widths = widths;
    net.params.resize(Mlp::param_count(widths));
    std::size_t at = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
        const std::size_t block = static_cast<std::size_t>(widths[l]) * static_cast<std::size_t>(widths[l + 1]) +
                                  static_cast<std::size_t>(widths[l + 1]);
        for (std::size_t i = 0; i < block; ++i) net.params[at++] = rng.uniform(-bound, bound);
    }
    return net;
}

inline Vec forward(const Mlp& net, const Vec& input) {
    if (static_cast<int>(input.size()) != net.input_size())
        throw std::invalid_argument("forward: input size mismatch");
    Vec cur = input;
    std::size_t at = 0;
    const std::size_t layers = net.widths.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const int in = net.widths[l], out = net.widths[l + 1];
        Vec next(static_cast<std::size_t>(out));
        for (int o = 0; o < out; ++o) {
            double acc = 0.0;
            const std::size_t row = at + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i) acc += net.params[row + static_cast<std::size_t>(i)] * cur[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = acc;
        }
        const std::size_t bias = at + static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
        for (int o = 0; o < out; ++o) next[static_cast<std::size_t>(o)] += net.params[bias + static_cast<std::size_t>(o)];
        if (l + 1 < layers)
            for (auto& v : next) v = std::max(v, 0.0);
        at = bias + static_cast<std::size_t>(out);
        cur = std::move(next);
    }
    return cur;
}

// Gradient of <output, output_gradient> with respect to every parameter,
// accumulated into grad (which must be param-sized). Recomputes the
// forward pass internally. Returns the output.
inline Vec backward(const Mlp& net, const Vec& input, const Vec& output_gradient, Vec& grad) {
    if (grad.size() != net.params.size())
        throw std::invalid_argument("backward: gradient buffer size mismatch");
    if (static_cast<int>(output_gradient.size()) != net.output_size())
        throw std::invalid_argument("backward: output gradient size mismatch");

    const std::size_t layers = net.widths.size() - 1;
    std::vector<Vec> activ(layers + 1);  // post-activation values per layer
    activ[0] = input;
    std::vector<std::size_t> offsets(layers);
    std::size_t at = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        offsets[l] = at;
        const int in = net.widths[l], out = net.widths[l + 1];
        Vec next(static_cast<std::size_t>(out));
        const std::size_t bias = at + static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
        for (int o = 0; o < out; ++o) {
            double acc = net.params[bias + static_cast<std::size_t>(o)];
            const std::size_t row = at + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i)
                acc += net.params[row + static_cast<std::size_t>(i)] * activ[l][static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = (l + 1 < layers) ? std::max(acc, 0.0) : acc;
        }
        activ[l + 1] = std::move(next);
        at = bias + static_cast<std::size_t>(out);
    }

    Vec delta = output_gradient;
    for (std::size_t l = layers; l-- > 0;) {
        const int in = net.widths[l], out = net.widths[l + 1];
        const std::size_t base = offsets[l];
        const std::size_t bias = base + static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
        if (l + 1 < layers)
            for (int o = 0; o < out; ++o)
                if (activ[l + 1][static_cast<std::size_t>(o)] <= 0.0) delta[static_cast<std::size_t>(o)] = 0.0;
        Vec prev_delta(static_cast<std::size_t>(in), 0.0);
        for (int o = 0; o < out; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            const std::size_t row = base + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            grad[bias + static_cast<std::size_t>(o)] += d;
            for (int i = 0; i < in; ++i) {
                grad[row + static_cast<std::size_t>(i)] += d * activ[l][static_cast<std::size_t>(i)];
                prev_delta[static_cast<std::size_t>(i)] += d * net.params[row + static_cast<std::size_t>(i)];
            }
        }
        delta = std::move(prev_delta);
    }
    return activ[layers];
}

struct OptimizerState {
    Vec m1, m2;
    long step = 0;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static OptimizerState for_params(std::size_t n, double lr) {
        OptimizerState opt;
        opt.m1.assign(n, 0.0);
        opt.m2.assign(n, 0.0);
        opt.lr = lr;
        return opt;
    }
};

// Bias-corrected adaptive update.
inline void adam_step(Vec& params, const Vec& grads, OptimizerState& opt) {
    if (params.size() != grads.size() || params.size() != opt.m1.size())
        throw std::invalid_argument("adam_step: size mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
    ++opt.step;
    const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        opt.m1[i] = opt.beta1 * opt.m1[i] + (1.0 - opt.beta1) * grads[i];
        opt.m2[i] = opt.beta2 * opt.m2[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
        const double mhat = opt.m1[i] / c1;
        const double vhat = opt.m2[i] / c2;
        params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
    }
}

// Central-finite-difference verification of backward(); returns the
// maximum relative error across parameters over random probe directions.
inline double finite_diff_check(const Mlp& net, const Vec& input, const Vec& output_gradient,
                                double h = 1e-5) {
    Vec analytic(net.params.size(), 0.0);
    backward(net, input, output_gradient, analytic);
    Mlp probe = net;
    double worst = 0.0;
    auto objective = [&]() {
        const Vec out = forward(probe, input);
        double acc = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) acc += out[j] * output_gradient[j];
        return acc;
    };
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        const double saved = probe.params[i];
        probe.params[i] = saved + h;
        const double up = objective();
        probe.params[i] = saved - h;
        const double down = objective();
        probe.params[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-8});
        worst = std::max(worst, std::fabs(numeric - analytic[i]) / denom);
    }
    return worst;
}

inline double finite_diff_check(const Mlp& net, const Vec& input, double h = 1e-5) {
    return finite_diff_check(net, input, Vec(static_cast<std::size_t>(net.output_size()), 1.0), h);
}

// Checkpoint block: magic, widths, seed, step count, then the flat
// parameter array as little-endian 64-bit floats.
namespace nn_io {

inline constexpr char kMagic[8] = {'M', 'L', 'P', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated stream");
    return v;
}

}  // namespace nn_io

inline void save_net(std::ostream& os, const Mlp& net, std::uint64_t seed, std::uint64_t step) {
    os.write(nn_io::kMagic, sizeof(nn_io::kMagic));
    nn_io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(net.widths.size()));
    for (int w : net.widths) nn_io::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(w));
    nn_io::write_pod<std::uint64_t>(os, seed);
    nn_io::write_pod<std::uint64_t>(os, step);
    nn_io::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(net.params.size()));
    for (double p : net.params) nn_io::write_pod<double>(os, p);
}

struct NetCheckpoint {
    Mlp net;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
};

inline NetCheckpoint load_net(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, nn_io::kMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic");
    NetCheckpoint ck;
    const auto nw = nn_io::read_pod<std::uint32_t>(is);
    ck.net.widths.resize(nw);
    for (auto& w : ck.net.widths) w = static_cast<int>(nn_io::read_pod<std::uint64_t>(is));
    ck.seed = nn_io::read_pod<std::uint64_t>(is);
    ck.step = nn_io::read_pod<std::uint64_t>(is);
    const auto np = nn_io::read_pod<std::uint64_t>(is);
    if (np != Mlp::param_count(ck.net.widths))
        throw std::runtime_error("checkpoint: parameter count does not match shape");
    ck.net.params.resize(np);
    for (auto& p : ck.net.params) p = nn_io::read_pod<double>(is);
    return ck;
}

}  // namespace madac
