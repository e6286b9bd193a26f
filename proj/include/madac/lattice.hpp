#pragma once

#include <cstdint>
#include <vector>

#include "madac/core.hpp"

namespace madac {

// Binomial coefficient, saturating at UINT64_MAX on overflow.
inline std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        std::uint64_t q = r / i;
        if (q > UINT64_MAX / (n - k + i)) return UINT64_MAX;
        // r is always divisible-exact across the running product when
        // computed as r = r*(n-k+i)/i in full precision; split to avoid
        // overflow while staying exact.
        r = q * (n - k + i) + (r % i) * (n - k + i) / i;
    }
    return r;
}

// Das-Dennis simplex lattice: all m-part compositions of H, scaled by 1/H.
// C(H+m-1, m-1) vectors, lexicographic order, each summing to 1.
inline std::vector<Vec> simplex_lattice(int m, int H) {
    std::vector<Vec> out;
    Vec w(static_cast<std::size_t>(m), 0.0);
    const double h = static_cast<double>(H);
    auto rec = [&](auto&& self, int dim, int left) -> void {
        if (dim == m - 1) {
            w[static_cast<std::size_t>(dim)] = left / h;
            out.push_back(w);
            return;
        }
        for (int c = 0; c <= left; ++c) {
            w[static_cast<std::size_t>(dim)] = c / h;
            self(self, dim + 1, left - c);
        }
    };
    rec(rec, 0, H);
    return out;
}

}  // namespace madac
