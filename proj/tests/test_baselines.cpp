#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "madac/baselines.hpp"
#include "madac/driver.hpp"
#include "madac/env.hpp"

using namespace madac;

TEST_CASE("static controllers") {
    auto original = StaticController::original();
    const JointAction a = original.act({}, 0);
    CHECK(a.adapt_weights == false);
    CHECK(a.neighborhood_size == 20);
    CHECK(a.op == Operator::SBX);

    auto op2 = StaticController::with_operator(Operator::OP2);
    const JointAction b = op2.act({}, 5);
    CHECK(b.op == Operator::OP2);
    CHECK(b.scaling_factor == 0.5);
    for (int t = 0; t < 10; ++t) CHECK(op2.act({}, t).adapt_weights == false);
}

TEST_CASE("ucb selection") {
    SECTION("warmup picks untried arms in index order") {
        UcbArmStats stats(3);
        CHECK(ucb_select(stats) == 0);
        ucb_update(stats, 0, 0.5);
        CHECK(ucb_select(stats) == 1);
        ucb_update(stats, 1, 0.1);
        CHECK(ucb_select(stats) == 2);
    }
    SECTION("worked example") {
        UcbArmStats stats(2);
        stats.q = {0.5, 0.6};
        stats.n = {10, 2};
        stats.t = 12;
        const double s0 = 0.5 + std::sqrt(std::log(12.0) / 10.0);
        const double s1 = 0.6 + std::sqrt(std::log(12.0) / 2.0);
        CHECK(s0 == Catch::Approx(0.998).margin(5e-4));
        CHECK(s1 == Catch::Approx(1.715).margin(5e-4));
        CHECK(ucb_select(stats) == 1);
    }
    SECTION("c=0 is pure greedy") {
        UcbArmStats stats(3, 0.0);
        stats.q = {0.2, 0.9, 0.4};
        stats.n = {5, 5, 5};
        stats.t = 15;
        CHECK(ucb_select(stats) == 1);
    }
    SECTION("incremental mean") {
        UcbArmStats stats(1);
        ucb_update(stats, 0, 1.0);
        ucb_update(stats, 0, 0.0);
        ucb_update(stats, 0, 0.5);
        CHECK(stats.q[0] == Catch::Approx(0.5));
        CHECK(stats.n[0] == 3);
        CHECK(stats.t == 3);
    }
}

TEST_CASE("ma-ucb controller") {
    MaUcbController ctl;
    const JointAction first = ctl.act({}, 0);
    CHECK(first.adapt_weights == false);      // arm 0 of agent 1 is N
    CHECK(first.neighborhood_size == 15);     // arm 0
    CHECK(first.op == Operator::OP1);
    CHECK(first.scaling_factor == 0.4);

    SECTION("zero rewards cycle arms through the exploration bonus") {
        MamoStepInfo info;
        std::set<int> seen;
        for (int t = 0; t < 8; ++t) {
            const JointAction a = ctl.act({}, t);
            seen.insert(a.neighborhood_size);
            ctl.observe(0.0, info);
        }
        CHECK(seen.size() == 4);  // every arm tried during warmup
    }
    SECTION("agents evolve independently") {
        MamoStepInfo info;
        for (int t = 0; t < 4; ++t) {
            ctl.act({}, t);
            ctl.observe(0.0, info);
        }
        const auto& agents = ctl.agents();
        REQUIRE(agents.size() == 4);
        CHECK(agents[0].n.size() == 2);
        CHECK(agents[1].n.size() == 4);
        long pulls0 = 0, pulls1 = 0;
        for (long n : agents[0].n) pulls0 += n;
        for (long n : agents[1].n) pulls1 += n;
        CHECK(pulls0 == 4);
        CHECK(pulls1 == 4);
    }
}

TEST_CASE("frrmab credit and selection") {
    SECTION("window obeys capacity") {
        FrrmabState st(3);
        for (int i = 0; i < 10; ++i) frrmab_credit(st, i % 4, 1.0, 0.5);
        CHECK(st.window.size() == 3);
    }
    SECTION("credit clamps at zero and guards division") {
        FrrmabState st(10);
        frrmab_credit(st, 0, 1.0, 2.0);  // worse child
        CHECK(st.window.back().second == 0.0);
        frrmab_credit(st, 1, 0.0, 0.5);  // zero parent fitness
        CHECK(st.window.back().second == 0.0);
        frrmab_credit(st, 2, 2.0, 1.0);
        CHECK(st.window.back().second == Catch::Approx(0.5));
    }
    SECTION("empty window draws uniformly") {
        FrrmabState st(4);
        RngStream rng(5);
        std::set<int> seen;
        for (int i = 0; i < 100; ++i) seen.insert(frrmab_select(st, rng));
        CHECK(seen.size() == 4);
    }
    SECTION("unused operators inside the window are tried first") {
        FrrmabState st(100);
        RngStream rng(5);
        frrmab_credit(st, 0, 1.0, 0.2);
        frrmab_credit(st, 1, 1.0, 0.4);
        frrmab_credit(st, 2, 1.0, 0.6);
        CHECK(frrmab_select(st, rng) == 3);
    }
    SECTION("hand-traced window of four records") {
        FrrmabState st(100);
        RngStream rng(5);
        frrmab_credit(st, 0, 1.0, 0.2);  // fir 0.8
        frrmab_credit(st, 0, 1.0, 0.6);  // fir 0.4 -> reward0 = 1.2
        frrmab_credit(st, 1, 1.0, 0.7);  // fir 0.3 -> reward1 = 0.3
        frrmab_credit(st, 2, 1.0, 0.9);  // fir 0.1 -> reward2 = 0.1
        frrmab_credit(st, 3, 1.0, 1.0);  // fir 0.0 -> reward3 = 0.0
        // ranks: op0 (1.2) -> 0, op1 (0.3) -> 1, op2 (0.1) -> 2, op3 -> 3
        // decayed: 1.2, 0.09, 0.009, 0; frr = decayed / 1.299
        const double total = 1.2 + 0.3 * 0.3 + 0.1 * 0.09 + 0.0;
        const double n = 5.0;
        auto score = [&](double dec, double cnt) {
            return dec / total + 2.0 * std::sqrt(2.0 * std::log(n) / cnt);
        };
        const double s0 = score(1.2, 2), s1 = score(0.09, 1), s2 = score(0.009, 1),
                     s3 = score(0.0, 1);
        int expect = 0;
        double best = s0;
        if (s1 > best) { best = s1; expect = 1; }
        if (s2 > best) { best = s2; expect = 2; }
        if (s3 > best) { best = s3; expect = 3; }
        CHECK(frrmab_select(st, rng) == expect);
    }
    SECTION("dominant credit wins once counts equalize") {
        FrrmabState st(1000);
        RngStream rng(5);
        for (int i = 0; i < 25; ++i) {
            frrmab_credit(st, 0, 1.0, 0.1);
            frrmab_credit(st, 1, 1.0, 1.0);
            frrmab_credit(st, 2, 1.0, 1.0);
            frrmab_credit(st, 3, 1.0, 1.0);
        }
        CHECK(frrmab_select(st, rng) == 0);
    }
}

TEST_CASE("awa interval controller") {
    SECTION("adaptation attempts land on the schedule for T=300") {
        std::vector<int> attempts;
        for (int t = 0; t <= 300; ++t)
            if (awa_interval_action(t, 300).adapt_weights) attempts.push_back(t);
        std::vector<int> expect;
        for (int t = 15; t <= 270; t += 15) expect.push_back(t);
        CHECK(attempts == expect);
    }
    SECTION("frozen in the final tenth") {
        for (int t = 271; t <= 300; ++t) CHECK_FALSE(awa_interval_action(t, 300).adapt_weights);
    }
    SECTION("other knobs stay at defaults") {
        const JointAction a = awa_interval_action(15, 300);
        CHECK(a.neighborhood_size == 20);
        CHECK(a.op == Operator::SBX);
    }
}

TEST_CASE("controllers drive a full episode") {
    EpisodeSpec spec = make_episode_spec(make_instance(Family::DTLZ2, 3), 5);
    spec.N = 21;
    spec.T = 8;
    spec.hv_samples = 1000;

    SECTION("static controller produces identical actions each step") {
        MamoEnv env(spec);
        auto ctl = StaticController::original();
        const auto traj = drive_episode(env, ctl);
        REQUIRE(traj.steps.size() == 8);
        for (const auto& s : traj.steps) {
            CHECK(s.action.op == Operator::SBX);
            CHECK(s.action.neighborhood_size == 20);
        }
        CHECK(traj.observations.size() == 9);
    }
    SECTION("ma-ucb runs and learns within the episode") {
        MamoEnv env(spec);
        MaUcbController ctl;
        const auto traj = drive_episode(env, ctl);
        CHECK(traj.steps.size() == 8);
        long pulls = 0;
        for (long n : ctl.agents()[0].n) pulls += n;
        CHECK(pulls == 8);
    }
    SECTION("frrmab consumes generation credit") {
        MamoEnv env(spec);
        FrrmabController ctl(spec.N, 9);
        const auto traj = drive_episode(env, ctl);
        CHECK(traj.steps.size() == 8);
        CHECK(ctl.state().window.size() == std::min<std::size_t>(8 * 21, spec.N / 2));
    }
}
