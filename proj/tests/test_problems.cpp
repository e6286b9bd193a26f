#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "madac/indicators.hpp"
#include "madac/problems.hpp"
#include "madac/rng.hpp"
#include "support/oracles.hpp"

using namespace madac;

namespace {

Vec random_point(const MopInstance& inst, RngStream& rng) {
    Vec x(static_cast<std::size_t>(inst.D));
    for (int d = 0; d < inst.D; ++d)
        x[static_cast<std::size_t>(d)] =
            rng.uniform(inst.lower[static_cast<std::size_t>(d)], inst.upper[static_cast<std::size_t>(d)]);
    return x;
}

double norm2(const Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("instance construction and parsing") {
    const auto inst = make_instance(Family::WFG7, 5);
    CHECK(inst.D == 28);
    CHECK(inst.k == 8);
    CHECK(inst.id() == "WFG7_5");
    CHECK(parse_instance_id("WFG7_5").D == inst.D);
    CHECK(parse_instance_id("DTLZ2_3").D == 12);
    CHECK_THROWS_AS(parse_instance_id("DTLZ1_3"), std::invalid_argument);
    CHECK_THROWS_AS(make_instance(Family::DTLZ2, 4), std::invalid_argument);
    for (int i = 0; i < inst.D; ++i)
        CHECK(inst.lower[static_cast<std::size_t>(i)] < inst.upper[static_cast<std::size_t>(i)]);
}

TEST_CASE("DTLZ2 front points") {
    const auto inst = make_instance(Family::DTLZ2, 3);
    Vec x(12, 0.5);
    const Vec f = evaluate(inst, x);
    CHECK(norm2(f) == Catch::Approx(1.0).margin(1e-12));

    Vec corner(12, 0.5);
    corner[0] = 0.0;
    corner[1] = 0.0;
    const Vec fc = evaluate(inst, corner);
    CHECK(fc[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(fc[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(fc[2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("DTLZ4 shares the DTLZ2 front") {
    const auto inst = make_instance(Family::DTLZ4, 5);
    Vec x(static_cast<std::size_t>(inst.D), 0.5);
    const Vec f = evaluate(inst, x);
    CHECK(norm2(f) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("evaluate rejects bad input") {
    const auto inst = make_instance(Family::DTLZ2, 3);
    CHECK_THROWS_AS(evaluate(inst, Vec(5, 0.5)), std::invalid_argument);
    Vec x(12, 0.5);
    x[3] = 1.5;
    CHECK_THROWS_AS(evaluate(inst, x), std::domain_error);
}

TEST_CASE("evaluation is deterministic") {
    const auto inst = make_instance(Family::WFG9, 3);
    RngStream rng(7);
    const Vec x = random_point(inst, rng);
    const Vec f1 = evaluate(inst, x);
    const Vec f2 = evaluate(inst, x);
    CHECK(f1 == f2);
}

TEST_CASE("WFG4 matches an independent transcription") {
    const auto inst = make_instance(Family::WFG4, 3);
    RngStream rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = random_point(inst, rng);
        const Vec got = evaluate(inst, x);
        const Vec want = oracles::wfg4_m3_reference(x);
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j)
            CHECK(got[j] == Catch::Approx(want[j]).margin(1e-10));
    }
}

TEST_CASE("WFG objective envelope") {
    RngStream rng(3);
    for (Family fam : {Family::WFG4, Family::WFG5, Family::WFG6, Family::WFG7, Family::WFG8, Family::WFG9}) {
        const auto inst = make_instance(fam, 3);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec f = evaluate(inst, random_point(inst, rng));
            for (int j = 0; j < inst.m; ++j) {
                CHECK(f[static_cast<std::size_t>(j)] >= 0.0);
                CHECK(f[static_cast<std::size_t>(j)] <= 1.0 + 2.0 * (j + 1) + 1e-9);
            }
        }
    }
}

TEST_CASE("constructed optima evaluate onto the front equation") {
    // Families whose optimal distance parameters sit at the plain 0.35 mark.
    for (Family fam : {Family::WFG4, Family::WFG5, Family::WFG6, Family::WFG7}) {
        const auto inst = make_instance(fam, 3);
        RngStream rng(11);
        for (int trial = 0; trial < 5; ++trial) {
            Vec x(static_cast<std::size_t>(inst.D));
            for (int i = 0; i < inst.k; ++i)
                x[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0 * (i + 1));
            for (int i = inst.k; i < inst.D; ++i)
                x[static_cast<std::size_t>(i)] = 0.35 * 2.0 * (i + 1);
            const Vec f = evaluate(inst, x);
            double sum = 0.0;
            for (int j = 0; j < inst.m; ++j) {
                const double h = f[static_cast<std::size_t>(j)] / (2.0 * (j + 1));
                sum += h * h;
            }
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("reference front construction") {
    SECTION("DTLZ2 m=3 exact count and unit norms") {
        const auto inst = make_instance(Family::DTLZ2, 3);
        const auto front = sample_reference_front(inst, 990);
        CHECK(front.points.size() == 990);
        for (const auto& p : front.points) CHECK(norm2(p) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("WFG4 points satisfy the scaled front equation") {
        const auto inst = make_instance(Family::WFG4, 3);
        const auto front = sample_reference_front(inst, 990);
        CHECK(front.points.size() >= 990);
        for (const auto& p : front.points) {
            double sum = 0;
            for (std::size_t j = 0; j < p.size(); ++j) {
                const double h = p[j] / (2.0 * (static_cast<double>(j) + 1.0));
                sum += h * h;
            }
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
        }
    }
    SECTION("mutual non-domination by full brute force, m=3") {
        const auto inst = make_instance(Family::WFG6, 3);
        const auto front = sample_reference_front(inst, 990);
        for (std::size_t i = 0; i < front.points.size(); ++i)
            for (std::size_t j = 0; j < front.points.size(); ++j)
                if (i != j) REQUIRE_FALSE(oracles::dom(front.points[i], front.points[j]));
    }
    SECTION("mutual non-domination on a subsample, m=5") {
        const auto inst = make_instance(Family::DTLZ2, 5);
        const auto front = sample_reference_front(inst, 2000);
        CHECK(front.points.size() >= 2000);
        for (std::size_t i = 0; i < 300; ++i)
            for (std::size_t j = 0; j < 300; ++j)
                if (i != j) REQUIRE_FALSE(oracles::dom(front.points[i], front.points[j]));
    }
    SECTION("determinism") {
        const auto inst = make_instance(Family::WFG5, 3);
        CHECK(sample_reference_front(inst, 990).points == sample_reference_front(inst, 990).points);
    }
    SECTION("front measured against itself scores zero") {
        const auto inst = make_instance(Family::DTLZ2, 3);
        const auto front = sample_reference_front(inst, 990);
        CHECK(igd(front, front.points) == 0.0);
    }
}

TEST_CASE("instance bounds") {
    const auto [i1, n1] = instance_bounds(make_instance(Family::DTLZ2, 3));
    CHECK(i1 == Vec{0, 0, 0});
    CHECK(n1 == Vec{1, 1, 1});
    const auto [i2, n2] = instance_bounds(make_instance(Family::WFG4, 3));
    CHECK(i2 == Vec{0, 0, 0});
    CHECK(n2 == Vec{2, 4, 6});
    const auto [i3, n3] = instance_bounds(make_instance(Family::DTLZ4, 5));
    CHECK(i3 == Vec(5, 0.0));
    CHECK(n3 == Vec(5, 1.0));
}
