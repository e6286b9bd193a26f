#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "madac/core.hpp"

namespace madac {

struct RunResult {
    std::string method;
    std::string instance;
    std::uint64_t seed = 0;
    std::string metric = "igd";  // lower is better for igd; higher for return
    double final_value = 0.0;
    Vec curve;
};

enum class Verdict { Superior, Inferior, Equivalent };

inline const char* verdict_symbol(Verdict v) {
    switch (v) {
        case Verdict::Superior: return "+";
        case Verdict::Inferior: return "-";
        case Verdict::Equivalent: return "~";
    }
    return "?";
}

namespace stats_detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Midranks of the pooled sample; returns (ranks of a, ranks of b, tie term).
inline double rank_sum_of_first(const Vec& a, const Vec& b, double& tie_term) {
    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    tie_term = 0.0;
    double w = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) w += midrank;
        i = j;
    }
    return w;
}

// Exact two-sided p by enumerating every assignment of pooled values to
// the first group: the probability of a rank sum at least as far from its
// mean as the observed one.
inline double exact_two_sided_p(const Vec& a, const Vec& b) {
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    Vec pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    // Midranks of the pooled values.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    Vec ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
        i = j;
    }
    double w_obs = 0.0;
    for (std::size_t k = 0; k < na; ++k) w_obs += ranks[k];
    const double mean_w = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
    const double dev_obs = std::fabs(w_obs - mean_w);

    long total = 0, extreme = 0;
    std::vector<std::size_t> pick(na);
    std::iota(pick.begin(), pick.end(), 0);
    bool done = false;
    while (!done) {
        double w = 0.0;
        for (std::size_t idx : pick) w += ranks[idx];
        ++total;
        if (std::fabs(w - mean_w) >= dev_obs - 1e-12) ++extreme;
        // advance to the next index combination
        std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(na) - 1;
        while (pos >= 0 && pick[static_cast<std::size_t>(pos)] ==
                               static_cast<std::size_t>(pos) + n - na)
            --pos;
        if (pos < 0) {
            done = true;
        } else {
            ++pick[static_cast<std::size_t>(pos)];
            for (std::size_t k = static_cast<std::size_t>(pos) + 1; k < na; ++k)
                pick[k] = pick[k - 1] + 1;
        }
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace stats_detail

struct RanksumResult {
    double p_value = 1.0;
    Verdict verdict = Verdict::Equivalent;
    double z = 0.0;
};

// Two-sided Wilcoxon rank-sum / Mann-Whitney. Sample sizes up to 8 per
// group are handled by exact enumeration; larger ones use the normal
// approximation with midrank tie correction and continuity correction.
// The verdict reads lower-is-better: Superior means a sits below b.
inline RanksumResult ranksum_test(const Vec& a, const Vec& b, double alpha = 0.05) {
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("ranksum_test: need at least 3 samples per group");
    RanksumResult res;

    const bool identical = std::all_of(a.begin(), a.end(), [&](double v) { return v == a.front(); }) &&
                           std::all_of(b.begin(), b.end(), [&](double v) { return v == a.front(); });
    if (identical) {
        res.p_value = 1.0;
        res.verdict = Verdict::Equivalent;
        return res;
    }

    if (a.size() <= 8 && b.size() <= 8) {
        res.p_value = stats_detail::exact_two_sided_p(a, b);
    } else {
        const double na = static_cast<double>(a.size());
        const double nb = static_cast<double>(b.size());
        const double n = na + nb;
        double tie_term = 0.0;
        const double w = stats_detail::rank_sum_of_first(a, b, tie_term);
        const double u = w - na * (na + 1.0) / 2.0;
        const double mu = na * nb / 2.0;
        const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if (var <= 0.0) {
            res.p_value = 1.0;
            res.verdict = Verdict::Equivalent;
            return res;
        }
        double num = u - mu;
        if (num > 0.5) num -= 0.5;
        else if (num < -0.5) num += 0.5;
        else num = 0.0;
        res.z = num / std::sqrt(var);
        res.p_value = std::min(1.0, 2.0 * stats_detail::normal_cdf(-std::fabs(res.z)));
    }

    if (res.p_value >= alpha) {
        res.verdict = Verdict::Equivalent;
        return res;
    }
    auto median = [](Vec v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const double ma = median(a), mb = median(b);
    if (ma < mb) res.verdict = Verdict::Superior;
    else if (ma > mb) res.verdict = Verdict::Inferior;
    else res.verdict = mean_of(a) < mean_of(b) ? Verdict::Superior
                       : mean_of(a) > mean_of(b) ? Verdict::Inferior
                                                 : Verdict::Equivalent;
    return res;
}

struct SummaryCell {
    std::string method;
    double mean = 0.0;
    double stddev = 0.0;
    int runs = 0;
    bool present = false;
    bool is_reference = false;
    Verdict verdict = Verdict::Equivalent;  // vs the reference method
};

struct SummaryRow {
    std::string instance;
    std::vector<SummaryCell> cells;
};

struct SummaryTable {
    std::vector<std::string> methods;
    std::string reference;
    std::vector<SummaryRow> rows;
    std::map<std::string, double> average_rank;   // over rows where all methods present
    std::map<std::string, int> wins, losses, ties;  // vs reference
};

// Groups run results by instance and method: per-cell mean/std, verdicts
// against the reference method, average ranks of means, and win/loss/tie
// tallies. Missing cells stay marked and are excluded from ranks.
inline SummaryTable summarize(const std::vector<RunResult>& results, const std::string& reference,
                              double alpha = 0.05) {
    SummaryTable table;
    table.reference = reference;
    std::map<std::string, std::map<std::string, Vec>> grouped;  // instance -> method -> finals
    std::vector<std::string> instance_order;
    for (const auto& r : results) {
        if (grouped.find(r.instance) == grouped.end()) instance_order.push_back(r.instance);
        grouped[r.instance][r.method].push_back(r.final_value);
        if (std::find(table.methods.begin(), table.methods.end(), r.method) == table.methods.end())
            table.methods.push_back(r.method);
    }
    if (std::find(table.methods.begin(), table.methods.end(), reference) == table.methods.end())
        throw std::invalid_argument("summarize: reference method has no results: " + reference);

    for (const auto& m : table.methods) {
        table.average_rank[m] = 0.0;
        table.wins[m] = table.losses[m] = table.ties[m] = 0;
    }
    int ranked_rows = 0;

    for (const auto& inst : instance_order) {
        SummaryRow row;
        row.instance = inst;
        const auto& per_method = grouped[inst];
        const Vec* ref_values = nullptr;
        if (auto it = per_method.find(reference); it != per_method.end()) ref_values = &it->second;

        std::vector<std::pair<double, std::string>> means;
        bool complete = true;
        for (const auto& m : table.methods) {
            SummaryCell cell;
            cell.method = m;
            cell.is_reference = m == reference;
            auto it = per_method.find(m);
            if (it == per_method.end() || it->second.empty()) {
                complete = false;
            } else {
                cell.present = true;
                cell.runs = static_cast<int>(it->second.size());
                cell.mean = mean_of(it->second);
                cell.stddev = stdev_of(it->second);
                means.emplace_back(cell.mean, m);
                if (!cell.is_reference && ref_values != nullptr &&
                    it->second.size() >= 3 && ref_values->size() >= 3) {
                    cell.verdict = ranksum_test(it->second, *ref_values, alpha).verdict;
                    switch (cell.verdict) {
                        case Verdict::Superior: ++table.wins[m]; break;
                        case Verdict::Inferior: ++table.losses[m]; break;
                        case Verdict::Equivalent: ++table.ties[m]; break;
                    }
                }
            }
            row.cells.push_back(cell);
        }
        if (complete) {
            ++ranked_rows;
            std::sort(means.begin(), means.end());
            for (std::size_t r = 0; r < means.size(); ++r)
                table.average_rank[means[r].second] += static_cast<double>(r + 1);
        }
        table.rows.push_back(std::move(row));
    }
    if (ranked_rows > 0)
        for (auto& [m, v] : table.average_rank) v /= static_cast<double>(ranked_rows);
    return table;
}

}  // namespace madac
