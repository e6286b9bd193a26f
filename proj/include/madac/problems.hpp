#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "madac/core.hpp"
#include "madac/lattice.hpp"

namespace madac {

enum class Family { DTLZ2, DTLZ4, WFG4, WFG5, WFG6, WFG7, WFG8, WFG9 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::DTLZ2: return "DTLZ2";
        case Family::DTLZ4: return "DTLZ4";
        case Family::WFG4: return "WFG4";
        case Family::WFG5: return "WFG5";
        case Family::WFG6: return "WFG6";
        case Family::WFG7: return "WFG7";
        case Family::WFG8: return "WFG8";
        case Family::WFG9: return "WFG9";
    }
    return "?";
}

inline bool is_wfg(Family f) { return f >= Family::WFG4; }

// One scalable test problem instance. DTLZ uses D = m + 9 decision
// variables; WFG uses k = 2(m-1) position and l = 20 distance parameters.
struct MopInstance {
    Family family = Family::DTLZ2;
    int m = 3;       // objectives
    int D = 12;      // decision variables
    int k = 0;       // WFG position parameters (0 for DTLZ)
    Vec lower, upper;
    Vec ideal, nadir;

    std::string id() const { return std::string(family_name(family)) + "_" + std::to_string(m); }
};

inline MopInstance make_instance(Family family, int m) {
    if (m != 3 && m != 5 && m != 7)
        throw std::invalid_argument("make_instance: m must be 3, 5 or 7");
    MopInstance inst;
    inst.family = family;
    inst.m = m;
    if (is_wfg(family)) {
        inst.k = 2 * (m - 1);
        inst.D = inst.k + 20;
        inst.lower.assign(static_cast<std::size_t>(inst.D), 0.0);
        inst.upper.resize(static_cast<std::size_t>(inst.D));
        for (int i = 0; i < inst.D; ++i) inst.upper[static_cast<std::size_t>(i)] = 2.0 * (i + 1);
        inst.ideal.assign(static_cast<std::size_t>(m), 0.0);
        inst.nadir.resize(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) inst.nadir[static_cast<std::size_t>(j)] = 2.0 * (j + 1);
    } else {
        inst.k = 0;
        inst.D = m + 9;
        inst.lower.assign(static_cast<std::size_t>(inst.D), 0.0);
        inst.upper.assign(static_cast<std::size_t>(inst.D), 1.0);
        inst.ideal.assign(static_cast<std::size_t>(m), 0.0);
        inst.nadir.assign(static_cast<std::size_t>(m), 1.0);
    }
    return inst;
}

// Parses identifiers of the form "WFG9_7" (family + "_" + objectives).
inline MopInstance parse_instance_id(const std::string& id) {
    const auto sep = id.rfind('_');
    if (sep == std::string::npos)
        throw std::invalid_argument("instance id must look like FAMILY_m, got: " + id);
    const std::string fam = id.substr(0, sep);
    const int m = std::stoi(id.substr(sep + 1));
    static const std::pair<const char*, Family> table[] = {
        {"DTLZ2", Family::DTLZ2}, {"DTLZ4", Family::DTLZ4}, {"WFG4", Family::WFG4},
        {"WFG5", Family::WFG5},   {"WFG6", Family::WFG6},   {"WFG7", Family::WFG7},
        {"WFG8", Family::WFG8},   {"WFG9", Family::WFG9}};
    for (const auto& [name, f] : table)
        if (fam == name) return make_instance(f, m);
    throw std::invalid_argument("unknown problem family: " + fam);
}

namespace wfg_detail {

// Transformation functions of the WFG toolkit. All take and return
// values in [0, 1]; the floor-based expressions follow the toolkit's
// closed forms.
inline double s_linear(double y, double A) {
    return std::fabs(y - A) / std::fabs(std::floor(A - y) + A);
}

inline double s_decept(double y, double A, double B, double C) {
    const double tmp1 = std::floor(y - A + B) * (1.0 - C + (A - B) / B) / (A - B);
    const double tmp2 = std::floor(A + B - y) * (1.0 - C + (1.0 - A - B) / B) / (1.0 - A - B);
    return 1.0 + (std::fabs(y - A) - B) * (tmp1 + tmp2 + 1.0 / B);
}

inline double s_multi(double y, double A, double B, double C) {
    const double tmp1 = std::fabs(y - C) / (2.0 * (std::floor(C - y) + C));
    const double tmp2 = (4.0 * A + 2.0) * std::numbers::pi * (0.5 - tmp1);
    return (1.0 + std::cos(tmp2) + 4.0 * B * tmp1 * tmp1) / (B + 2.0);
}

inline double b_param(double y, double u, double A, double B, double C) {
    const double v = A - (1.0 - 2.0 * u) * std::fabs(std::floor(0.5 - u) + A);
    return std::pow(y, B + (C - B) * v);
}

inline double r_sum_uniform(const Vec& y, std::size_t first, std::size_t last) {
    double acc = 0.0;
    for (std::size_t i = first; i < last; ++i) acc += y[i];
    return acc / static_cast<double>(last - first);
}

inline double r_nonsep(const Vec& y, std::size_t first, std::size_t last, int A) {
    const std::size_t len = last - first;
    double num = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
        num += y[first + j];
        for (int kk = 0; kk <= A - 2; ++kk)
            num += std::fabs(y[first + j] - y[first + (j + 1 + static_cast<std::size_t>(kk)) % len]);
    }
    const double tmp = std::ceil(A / 2.0);
    const double den = static_cast<double>(len) / A * tmp * (1.0 + 2.0 * A - 2.0 * tmp);
    return num / den;
}

// Concave shape functions; the image of [0,1]^(m-1) is the unit sphere octant.
inline Vec shape_concave(const Vec& x, int m) {
    Vec h(static_cast<std::size_t>(m), 1.0);
    for (int j = 1; j <= m; ++j) {
        double v = 1.0;
        for (int i = 1; i <= m - j; ++i) v *= std::sin(x[static_cast<std::size_t>(i - 1)] * std::numbers::pi / 2.0);
        if (j > 1) v *= std::cos(x[static_cast<std::size_t>(m - j)] * std::numbers::pi / 2.0);
        h[static_cast<std::size_t>(j - 1)] = v;
    }
    return h;
}

inline Vec wfg_evaluate(const MopInstance& inst, const Vec& z) {
    const int n = inst.D;
    const int k = inst.k;
    const int m = inst.m;
    const std::size_t un = static_cast<std::size_t>(n);
    const std::size_t uk = static_cast<std::size_t>(k);

    Vec y(un);
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] / (2.0 * (i + 1));

    switch (inst.family) {
        case Family::WFG4:
            for (auto& v : y) v = s_multi(v, 30.0, 10.0, 0.35);
            break;
        case Family::WFG5:
            for (auto& v : y) v = s_decept(v, 0.35, 0.001, 0.05);
            break;
        case Family::WFG6:
            for (std::size_t i = uk; i < un; ++i) y[i] = s_linear(y[i], 0.35);
            break;
        case Family::WFG7: {
            Vec t(y);
            for (std::size_t i = 0; i < uk; ++i)
                t[i] = b_param(y[i], r_sum_uniform(y, i + 1, un), 0.98 / 49.98, 0.02, 50.0);
            y = t;
            for (std::size_t i = uk; i < un; ++i) y[i] = s_linear(y[i], 0.35);
            break;
        }
        case Family::WFG8: {
            Vec t(y);
            for (std::size_t i = uk; i < un; ++i)
                t[i] = b_param(y[i], r_sum_uniform(y, 0, i), 0.98 / 49.98, 0.02, 50.0);
            y = t;
            for (std::size_t i = uk; i < un; ++i) y[i] = s_linear(y[i], 0.35);
            break;
        }
        case Family::WFG9: {
            Vec t(y);
            for (std::size_t i = 0; i + 1 < un; ++i)
                t[i] = b_param(y[i], r_sum_uniform(y, i + 1, un), 0.98 / 49.98, 0.02, 50.0);
            y = t;
            for (std::size_t i = 0; i < uk; ++i) y[i] = s_decept(y[i], 0.35, 0.001, 0.05);
            for (std::size_t i = uk; i < un; ++i) y[i] = s_multi(y[i], 30.0, 95.0, 0.35);
            break;
        }
        default:
            throw std::logic_error("wfg_evaluate: not a WFG family");
    }

    // Reduction to m underlying parameters.
    Vec t(static_cast<std::size_t>(m));
    const std::size_t group = uk / static_cast<std::size_t>(m - 1);
    const bool nonsep = inst.family == Family::WFG6 || inst.family == Family::WFG9;
    for (int i = 1; i < m; ++i) {
        const std::size_t first = (static_cast<std::size_t>(i) - 1) * group;
        const std::size_t last = static_cast<std::size_t>(i) * group;
        t[static_cast<std::size_t>(i - 1)] =
            nonsep ? r_nonsep(y, first, last, static_cast<int>(group)) : r_sum_uniform(y, first, last);
    }
    t[static_cast<std::size_t>(m - 1)] =
        nonsep ? r_nonsep(y, uk, un, n - k) : r_sum_uniform(y, uk, un);

    // Degeneracy constants A_i = 1 for every family here.
    Vec x(static_cast<std::size_t>(m));
    const double xm = t[static_cast<std::size_t>(m - 1)];
    for (int i = 0; i < m - 1; ++i)
        x[static_cast<std::size_t>(i)] = std::max(xm, 1.0) * (t[static_cast<std::size_t>(i)] - 0.5) + 0.5;
    x[static_cast<std::size_t>(m - 1)] = xm;

    const Vec h = shape_concave(x, m);
    Vec f(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        f[static_cast<std::size_t>(j)] = xm + 2.0 * (j + 1) * h[static_cast<std::size_t>(j)];
    return f;
}

}  // namespace wfg_detail

namespace dtlz_detail {

inline Vec dtlz_evaluate(const MopInstance& inst, const Vec& x, double alpha) {
    const int m = inst.m;
    const std::size_t um = static_cast<std::size_t>(m);
    double g = 0.0;
    for (std::size_t i = um - 1; i < x.size(); ++i) g += (x[i] - 0.5) * (x[i] - 0.5);

    Vec theta(um - 1);
    for (std::size_t i = 0; i < um - 1; ++i)
        theta[i] = std::pow(x[i], alpha) * std::numbers::pi / 2.0;

    Vec f(um);
    for (int j = 1; j <= m; ++j) {
        double v = 1.0 + g;
        for (int i = 1; i <= m - j; ++i) v *= std::cos(theta[static_cast<std::size_t>(i - 1)]);
        if (j > 1) v *= std::sin(theta[static_cast<std::size_t>(m - j)]);
        f[static_cast<std::size_t>(j - 1)] = v;
    }
    return f;
}

}  // namespace dtlz_detail

// Evaluates instance objectives. Deterministic; throws on dimension or
// bounds violations.
inline Vec evaluate(const MopInstance& inst, const Vec& x) {
    if (static_cast<int>(x.size()) != inst.D)
        throw std::invalid_argument("evaluate: decision vector has wrong length");
    for (int i = 0; i < inst.D; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        if (!(x[ui] >= inst.lower[ui] && x[ui] <= inst.upper[ui]))
            throw std::domain_error("evaluate: variable " + std::to_string(i) + " out of bounds");
    }
    switch (inst.family) {
        case Family::DTLZ2: return dtlz_detail::dtlz_evaluate(inst, x, 1.0);
        case Family::DTLZ4: return dtlz_detail::dtlz_evaluate(inst, x, 100.0);
        default: return wfg_detail::wfg_evaluate(inst, x);
    }
}

struct ReferenceFront {
    std::vector<Vec> points;
};

// Deterministic reference front: a Das-Dennis direction lattice mapped
// onto the analytic front (unit sphere for DTLZ, the 2j-scaled sphere
// for WFG). The smallest lattice resolution reaching target_count is used.
inline ReferenceFront sample_reference_front(const MopInstance& inst, std::size_t target_count) {
    if (target_count < static_cast<std::size_t>(inst.m))
        throw std::invalid_argument("sample_reference_front: target_count < m");
    int H = 1;
    while (choose(static_cast<std::uint64_t>(H + inst.m - 1),
                  static_cast<std::uint64_t>(inst.m - 1)) < target_count)
        ++H;
    ReferenceFront front;
    front.points = simplex_lattice(inst.m, H);
    for (auto& p : front.points) {
        double norm = 0.0;
        for (double v : p) norm += v * v;
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] /= norm;
            if (is_wfg(inst.family)) p[j] *= 2.0 * (static_cast<double>(j) + 1.0);
        }
    }
    return front;
}

// Analytic per-objective bounds of the Pareto front, used to normalize
// objectives for the state indicators.
inline std::pair<Vec, Vec> instance_bounds(const MopInstance& inst) {
    return {inst.ideal, inst.nadir};
}

inline Vec normalize_objectives(const MopInstance& inst, const Vec& f) {
    Vec out(f.size());
    for (std::size_t j = 0; j < f.size(); ++j)
        out[j] = (f[j] - inst.ideal[j]) / (inst.nadir[j] - inst.ideal[j]);
    return out;
}

}  // namespace madac
