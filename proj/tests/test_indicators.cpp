#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "madac/indicators.hpp"
#include "madac/rng.hpp"
#include "support/oracles.hpp"

using namespace madac;

namespace {

std::vector<Vec> random_set(std::size_t count, std::size_t dim, RngStream& rng) {
    std::vector<Vec> out(count, Vec(dim));
    for (auto& v : out)
        for (auto& x : v) x = rng.uniform();
    return out;
}

}  // namespace

TEST_CASE("dominates basics") {
    CHECK(dominates({0.1, 0.2}, {0.2, 0.3}));
    CHECK_FALSE(dominates({0.1, 0.2}, {0.1, 0.2}));
    CHECK_FALSE(dominates({0.1, 0.9}, {0.2, 0.8}));
    CHECK_FALSE(dominates({0.2, 0.8}, {0.1, 0.9}));
    CHECK_THROWS_AS(dominates({0.1}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("dominates is irreflexive and asymmetric") {
    RngStream rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto set = random_set(2, 3, rng);
        CHECK_FALSE(dominates(set[0], set[0]));
        if (dominates(set[0], set[1])) CHECK_FALSE(dominates(set[1], set[0]));
    }
}

TEST_CASE("igd oracle cases") {
    ReferenceFront ref;
    ref.points = {{0, 1}, {1, 0}};
    CHECK(igd(ref, std::vector<Vec>{{0, 1}, {1, 0}, {0.5, 0.5}}) == 0.0);
    CHECK(igd(ref, std::vector<Vec>{{0, 1}}) == Catch::Approx((0.0 + std::sqrt(2.0)) / 2.0));
    CHECK_THROWS_AS(igd(ref, std::vector<Vec>{}), std::invalid_argument);

    RngStream rng(17);
    const auto a = random_set(50, 3, rng);
    ReferenceFront rr;
    rr.points = random_set(50, 3, rng);
    CHECK(igd(rr, a) == oracles::igd_bruteforce(rr.points, a));
}

TEST_CASE("igd is monotone under adding approximation points") {
    RngStream rng(23);
    ReferenceFront ref;
    ref.points = random_set(40, 3, rng);
    auto a = random_set(20, 3, rng);
    const double before = igd(ref, a);
    const auto extra = random_set(10, 3, rng);
    a.insert(a.end(), extra.begin(), extra.end());
    CHECK(igd(ref, a) <= before + 1e-15);
}

TEST_CASE("hypervolume Monte Carlo") {
    SECTION("single point fills the box") {
        const std::vector<Vec> set{{0.0, 0.0}};
        CHECK(hypervolume(set, {1.0, 1.0}, 20000, 9) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("points on the reference point contribute nothing") {
        const std::vector<Vec> set{{1.0, 1.0}, {1.0, 1.0}};
        CHECK(hypervolume(set, {1.0, 1.0}, 20000, 9) == Catch::Approx(0.0).margin(1e-9));
    }
    SECTION("agrees with the exact 2-D sweep") {
        RngStream rng(31);
        for (int trial = 0; trial < 5; ++trial) {
            const auto set = random_set(30, 2, rng);
            const double exact = oracles::hv2d_exact(set, 1.1, 1.1);
            const double mc = hypervolume(set, {1.1, 1.1}, 200000, 1000 + trial);
            CHECK(mc == Catch::Approx(exact).epsilon(0.02));
        }
    }
    SECTION("monotone when adding a point, common random numbers") {
        RngStream rng(37);
        auto set = random_set(10, 3, rng);
        const double before = hypervolume(set, {1.1, 1.1, 1.1}, 50000, 77);
        set.push_back({0.01, 0.01, 0.01});
        const double after = hypervolume(set, {1.1, 1.1, 1.1}, 50000, 77);
        CHECK(after >= before);
    }
}

TEST_CASE("nd_ratio") {
    CHECK(nd_ratio(std::vector<Vec>{{1, 1}, {1, 1}, {1, 1}}) == 1.0);
    CHECK(nd_ratio(std::vector<Vec>{{0, 0}, {1, 1}}) == 0.5);
    RngStream rng(41);
    const auto set = random_set(100, 3, rng);
    CHECK(nd_ratio(set) == oracles::nd_ratio_bruteforce(set));
}

TEST_CASE("avg_distance") {
    CHECK(avg_distance(std::vector<Vec>{{0.5, 0.5}, {0.5, 0.5}}, 1.0) == 0.0);
    CHECK(avg_distance(std::vector<Vec>{{0, 0}, {0, 1}}, 1.0) == 1.0);
    CHECK(avg_distance(std::vector<Vec>{{0.3, 0.3}}, 1.0) == 0.0);
    RngStream rng(43);
    const auto set = random_set(60, 3, rng);
    CHECK(avg_distance(set, 2.0) == Catch::Approx(oracles::avg_distance_bruteforce(set, 2.0)).margin(1e-15));
}

TEST_CASE("vicinity_sparsity") {
    std::vector<Vec> set{{0, 0}, {0, 0}, {1, 0}, {0, 1}};
    CHECK(vicinity_sparsity(0, set, 2) == 0.0);  // duplicated point

    std::vector<Vec> line{{0, 0}, {0.5, 0}, {-0.4, 0}, {3, 0}};
    CHECK(vicinity_sparsity(0, line, 2) == Catch::Approx(0.2));

    RngStream rng(47);
    const auto rnd = random_set(50, 3, rng);
    for (std::size_t i = 0; i < rnd.size(); i += 7)
        CHECK(vicinity_sparsity(i, rnd, 3) == oracles::sparsity_bruteforce(i, rnd, 3));

    CHECK_THROWS_AS(vicinity_sparsity(0, std::vector<Vec>{{0, 0}, {1, 1}}, 2), std::invalid_argument);
}
