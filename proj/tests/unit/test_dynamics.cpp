#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairdyn/dynamics.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using Catch::Approx;
using namespace fairdyn;

TEST_CASE("g_ys values and limits", "[dynamics]") {
    GroupModel g = testing_support::fig2().a;
    CHECK(g_ys(g, 1, 0.0) == Approx(oracle::g_1a_theta0).epsilon(1e-14));
    CHECK(g_ys(g, 0, kInf) == Approx(0.4));
    CHECK(g_ys(g, 0, -kInf) == Approx(0.5));
    g.transitions = {0.3, 0.3, 0.6, 0.6};
    CHECK(g_ys(g, 0, 1.7) == Approx(0.3));
}

TEST_CASE("one step of the rate update", "[dynamics]") {
    Scenario s = testing_support::fig2();
    const ThresholdPair p{0.5, -0.5};
    const QualState next = step(s, {0.0, 0.0}, p);
    CHECK(next.alpha_a == Approx(g_ys(s.a, 0, 0.5)));
    CHECK(next.alpha_b == Approx(g_ys(s.b, 0, -0.5)));
    s.a.transitions = {0.2, 0.2, 0.8, 0.8};
    s.b.transitions = s.a.transitions;
    const QualState q = step(s, {0.3, 0.9}, ThresholdPair{-3.0, 4.0});
    CHECK(q.alpha_a == Approx(0.2 * 0.7 + 0.8 * 0.3));
    CHECK(q.alpha_b == Approx(0.2 * 0.1 + 0.8 * 0.9));
}

TEST_CASE("step agrees with an agent-level simulation", "[dynamics][oracle]") {
    const Scenario s = testing_support::fig2();
    const QualState st{0.5, 0.5};
    const ThresholdPair p = threshold_map(s, Constraint::unconstrained)(st);
    const QualState next = step(s, st, p);
    std::mt19937_64 rng(11);
    const int n = 200000;
    for (Group g : {Group::a, Group::b}) {
        const GroupModel& m = s.group(g);
        std::bernoulli_distribution qual(st[g]);
        std::normal_distribution<double> x0(m.g0.gaussian_mean(), m.g0.gaussian_stddev());
        std::normal_distribution<double> x1(m.g1.gaussian_mean(), m.g1.gaussian_stddev());
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int count = 0;
        for (int i = 0; i < n; ++i) {
            const int y = qual(rng);
            const double x = y ? x1(rng) : x0(rng);
            const int d = x >= p[g];
            count += u(rng) < m.transitions.at(y, d);
        }
        const double mc = static_cast<double>(count) / n;
        const double se = std::sqrt(next[g] * (1 - next[g]) / n);
        CHECK(std::abs(mc - next[g]) <= 3 * se);
    }
}

TEST_CASE("simulation from an equilibrium converges at once", "[dynamics]") {
    Scenario s = testing_support::fig2();
    s.a.transitions = {0.2, 0.2, 0.8, 0.8};
    s.b.transitions = s.a.transitions;
    const Trajectory t = simulate(s, Constraint::dp, {0.5, 0.5});
    CHECK(t.termination.kind == Termination::converged);
    CHECK(t.states.size() <= 3);
    CHECK(t.thresholds.size() == t.states.size());
}

TEST_CASE("fig2 trajectories converge to the oracle fixed points", "[dynamics][oracle]") {
    const Scenario s = testing_support::fig2();
    SimulationOptions opt;
    opt.tol = 1e-12;
    const Trajectory un = simulate(s, Constraint::unconstrained, {0.1, 0.9}, opt);
    REQUIRE(un.termination.kind == Termination::converged);
    CHECK(un.final_state().alpha_a == Approx(oracle::fig2_un_a).margin(1e-9));
    CHECK(un.final_state().alpha_b == Approx(oracle::fig2_un_b).margin(1e-9));
    const Trajectory dp = simulate(s, Constraint::dp, {0.8, 0.2}, opt);
    CHECK(dp.final_state().alpha_a == Approx(oracle::fig2_dp_a).margin(oracle::fixed_point_tol));
    CHECK(dp.final_state().alpha_b == Approx(oracle::fig2_dp_b).margin(oracle::fixed_point_tol));
    const Trajectory eo = simulate(s, Constraint::eqopt, {0.5, 0.5}, opt);
    CHECK(eo.final_state().alpha_a == Approx(oracle::fig2_eqopt_a).margin(oracle::fixed_point_tol));
    CHECK(eo.final_state().alpha_b == Approx(oracle::fig2_eqopt_b).margin(oracle::fixed_point_tol));
}

TEST_CASE("oscillation detection", "[dynamics]") {
    std::vector<QualState> alt;
    for (int i = 0; i < 100; ++i) alt.push_back(i % 2 ? QualState{0.6, 0.6} : QualState{0.2, 0.2});
    CHECK(detect_oscillation(alt, 64, 1e-9) == 2);
    std::vector<QualState> flat(100, QualState{0.4, 0.4});
    CHECK_FALSE(detect_oscillation(flat, 64, 1e-9).has_value());
    std::vector<QualState> three;
    for (int i = 0; i < 100; ++i) three.push_back({0.1 + 0.2 * (i % 3), 0.5});
    CHECK(detect_oscillation(three, 64, 1e-9) == 3);
}

TEST_CASE("bad simulation options", "[dynamics]") {
    const Scenario s = testing_support::fig2();
    SimulationOptions opt;
    opt.max_steps = 0;
    CHECK_THROWS_AS(simulate(s, Constraint::dp, {0.5, 0.5}, opt), ModelError);
    opt.max_steps = 10;
    opt.tol = 0.0;
    CHECK_THROWS_AS(simulate(s, Constraint::dp, {0.5, 0.5}, opt), ModelError);
}

TEST_CASE("trajectory csv layout", "[dynamics]") {
    const Trajectory t = simulate(testing_support::fig2(), Constraint::eqopt, {0.5, 0.5});
    std::ostringstream os;
    write_trajectory_csv(os, t);
    const std::string out = os.str();
    CHECK(out.rfind("step,alphaA,alphaB,thetaA,thetaB,utility\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == static_cast<long>(t.states.size()) + 1);
}
