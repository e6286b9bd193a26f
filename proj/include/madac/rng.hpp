#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace madac {

// Seeded pseudo-random stream: xoshiro256** with splitmix64 seeding.
// Sub-streams are derived with spawn(); the child seed mixes the parent
// seed and a spawn counter through splitmix64, so derived streams never
// share an initial state.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), spawn_count_(0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int index(std::size_t n) { return static_cast<int>(uniform_int(n)); }

    // Standard normal via Box-Muller; one spare value cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // k distinct values from [0, n), in draw order.
    std::vector<int> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
        std::vector<int> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<int>(i);
        std::vector<int> out;
        out.reserve(k);
        std::size_t remaining = n;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = uniform_int(remaining);
            out.push_back(pool[j]);
            pool[j] = pool[--remaining];
        }
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = uniform_int(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    RngStream spawn() {
        std::uint64_t mix = seed_ ^ (0x9e3779b97f4a7c15ull + (++spawn_count_));
        return RngStream(splitmix64(mix));
    }

    // Deterministic per-index child seed, used to derive independent run seeds.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
        std::uint64_t s = base ^ (0xbf58476d1ce4e5b9ull * (index + 1));
        return splitmix64(s);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t seed_;
    std::uint64_t spawn_count_;
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace madac
