#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "madac/rng.hpp"
#include "madac/stats.hpp"
#include "support/oracles.hpp"

using namespace madac;

TEST_CASE("ranksum_test basics") {
    SECTION("identical samples are equivalent with p=1") {
        const Vec a{0.5, 0.5, 0.5, 0.5};
        const auto res = ranksum_test(a, a);
        CHECK(res.p_value == 1.0);
        CHECK(res.verdict == Verdict::Equivalent);
    }
    SECTION("fully separated 3v3: exact p is 0.1, equivalent at alpha 0.05") {
        const Vec a{1, 2, 3}, b{10, 11, 12};
        const auto res = ranksum_test(a, b);
        CHECK(res.p_value == Catch::Approx(0.1));
        CHECK(res.verdict == Verdict::Equivalent);
        // the separation is detectable at a looser level
        CHECK(ranksum_test(a, b, 0.11).verdict == Verdict::Superior);
        CHECK(ranksum_test(b, a, 0.11).verdict == Verdict::Inferior);
    }
    SECTION("well separated 30v30 normals reject decisively") {
        RngStream rng(7);
        Vec a, b;
        for (int i = 0; i < 30; ++i) {
            a.push_back(rng.normal(0.0, 1.0));
            b.push_back(rng.normal(6.0, 1.0));
        }
        const auto res = ranksum_test(a, b);
        CHECK(res.p_value < 1e-6);
        CHECK(res.verdict == Verdict::Superior);
    }
    SECTION("minimum sample size enforced") {
        CHECK_THROWS_AS(ranksum_test({1, 2}, {3, 4, 5}), std::invalid_argument);
    }
}

TEST_CASE("exact small-sample path matches an independent enumerator") {
    RngStream rng(21);
    for (std::size_t na = 3; na <= 8; ++na) {
        for (std::size_t nb = 3; nb <= 8; ++nb) {
            for (int trial = 0; trial < 3; ++trial) {
                Vec a, b;
                for (std::size_t i = 0; i < na; ++i) a.push_back(rng.uniform());
                for (std::size_t i = 0; i < nb; ++i) b.push_back(rng.uniform());
                const double p = ranksum_test(a, b).p_value;
                CHECK(p == Catch::Approx(oracles::ranksum_exact_p(a, b)).margin(1e-12));
            }
        }
    }
    SECTION("ties are handled by midranks in both paths") {
        const Vec a{1.0, 1.0, 2.0, 3.0};
        const Vec b{1.0, 2.0, 2.0, 4.0};
        CHECK(ranksum_test(a, b).p_value ==
              Catch::Approx(oracles::ranksum_exact_p(a, b)).margin(1e-12));
    }
}

TEST_CASE("verdict symmetry") {
    RngStream rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        Vec a, b;
        for (int i = 0; i < 12; ++i) {
            a.push_back(rng.normal(0.0, 1.0));
            b.push_back(rng.normal(0.8, 1.0));
        }
        const auto ab = ranksum_test(a, b);
        const auto ba = ranksum_test(b, a);
        CHECK(ab.p_value == Catch::Approx(ba.p_value).margin(1e-12));
        if (ab.verdict == Verdict::Superior) CHECK(ba.verdict == Verdict::Inferior);
        if (ab.verdict == Verdict::Inferior) CHECK(ba.verdict == Verdict::Superior);
        if (ab.verdict == Verdict::Equivalent) CHECK(ba.verdict == Verdict::Equivalent);
    }
}

TEST_CASE("normal approximation stays close to exact just above the cutoff") {
    RngStream rng(9);
    // n=9 uses the approximation; compare against the exact enumerator,
    // which is still cheap at this size
    for (int trial = 0; trial < 5; ++trial) {
        Vec a, b;
        for (int i = 0; i < 9; ++i) {
            a.push_back(rng.uniform());
            b.push_back(rng.uniform());
        }
        const auto res = ranksum_test(a, b);
        CHECK(res.p_value == Catch::Approx(oracles::ranksum_exact_p(a, b)).margin(0.03));
    }
}

namespace {

std::vector<RunResult> fake_results(const std::vector<std::string>& methods,
                                    const std::vector<std::string>& instances,
                                    const std::vector<double>& shifts, int runs,
                                    std::uint64_t seed) {
    std::vector<RunResult> out;
    RngStream rng(seed);
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (const auto& inst : instances)
            for (int r = 0; r < runs; ++r) {
                RunResult res;
                res.method = methods[m];
                res.instance = inst;
                res.seed = static_cast<std::uint64_t>(r);
                res.final_value = shifts[m] + 0.01 * rng.uniform();
                res.curve = {res.final_value};
                out.push_back(res);
            }
    return out;
}

}  // namespace

TEST_CASE("summarize") {
    SECTION("single method ranks first everywhere") {
        const auto table = summarize(fake_results({"solo"}, {"A_3", "B_3"}, {0.1}, 5, 3), "solo");
        CHECK(table.average_rank.at("solo") == 1.0);
        CHECK(table.rows.size() == 2);
    }
    SECTION("uniformly lower method ranks 1 and wins everywhere") {
        const auto table = summarize(
            fake_results({"good", "bad"}, {"A_3", "B_3", "C_3"}, {0.1, 0.5}, 10, 5), "bad");
        CHECK(table.average_rank.at("good") == 1.0);
        CHECK(table.average_rank.at("bad") == 2.0);
        CHECK(table.wins.at("good") == 3);
        CHECK(table.losses.at("good") == 0);
        CHECK(table.ties.at("good") == 0);
    }
    SECTION("tallies partition the row count") {
        const auto table = summarize(
            fake_results({"x", "y"}, {"A_3", "B_3", "C_3", "D_3"}, {0.3, 0.300001}, 8, 7), "y");
        const int total = table.wins.at("x") + table.losses.at("x") + table.ties.at("x");
        CHECK(total == 4);
    }
    SECTION("missing cells are flagged and excluded from ranks") {
        auto results = fake_results({"p", "q"}, {"A_3", "B_3"}, {0.1, 0.2}, 5, 9);
        std::erase_if(results, [](const RunResult& r) {
            return r.method == "q" && r.instance == "B_3";
        });
        const auto table = summarize(results, "p");
        REQUIRE(table.rows.size() == 2);
        bool found_missing = false;
        for (const auto& row : table.rows)
            for (const auto& cell : row.cells)
                if (!cell.present) found_missing = true;
        CHECK(found_missing);
        CHECK(table.average_rank.at("p") == 1.0);
    }
    SECTION("unknown reference is rejected") {
        CHECK_THROWS_AS(summarize(fake_results({"a"}, {"X_3"}, {0.1}, 3, 1), "nope"),
                        std::invalid_argument);
    }
}
