#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairdyn/policy.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using Catch::Approx;
using namespace fairdyn;

TEST_CASE("unconstrained threshold closed cases", "[policy]") {
    const Scenario s = testing_support::fig2();
    CHECK(unconstrained_threshold(s, Group::a, 0.5) == Approx(0.0).margin(1e-10));
    CHECK(unconstrained_threshold(s, Group::b, 0.5) == Approx(0.0).margin(1e-10));
    CHECK(unconstrained_threshold(s, Group::a, 0.0) == kInf);
    CHECK(unconstrained_threshold(s, Group::a, 1.0) == -kInf);
    // equal-variance gaussians: theta = (m0 + m1)/2 + s^2/(m1 - m0) * log((1 - a)/a)
    const double a = 0.3;
    CHECK(unconstrained_threshold(s, Group::a, a) ==
          Approx(2.5 * std::log((1 - a) / a)).margin(1e-9));
    CHECK_THROWS_AS(unconstrained_threshold(s, Group::a, 1.5), ModelError);
}

TEST_CASE("identical groups share the unconstrained threshold", "[policy]") {
    Scenario s = testing_support::fig2();
    s.b = s.a;
    for (Constraint c : {Constraint::dp, Constraint::eqopt}) {
        const ThresholdPair p = fair_thresholds(s, {0.4, 0.4}, c);
        const double un = unconstrained_threshold(s, Group::a, 0.4);
        CHECK(p.theta_a == Approx(un).margin(1e-7));
        CHECK(p.theta_b == Approx(un).margin(1e-7));
        const auto [foc, gap] = fair_policy_residual(s, {0.4, 0.4}, p);
        CHECK(std::abs(foc) <= 1e-7);
        CHECK(gap <= 1e-9);
    }
}

TEST_CASE("fair thresholds satisfy their contract", "[policy][property]") {
    const Scenario scenarios[] = {testing_support::fig2(), testing_support::fico(0.5, 0.5)};
    for (const Scenario& s : scenarios)
        for (Constraint c : {Constraint::dp, Constraint::eqopt})
            for (double a : {0.1, 0.35, 0.8})
                for (double b : {0.2, 0.5, 0.9}) {
                    const ThresholdPair p = fair_thresholds(s, {a, b}, c);
                    const auto [foc, gap] = fair_policy_residual(s, {a, b}, p);
                    CHECK(std::abs(foc) <= 1e-7);
                    CHECK(gap <= 1e-7);
                    CHECK(p.fairness_residual <= 1e-7);
                }
}

TEST_CASE("DP thresholds beat a fairness-feasible grid", "[policy][oracle]") {
    const Scenario s = testing_support::fig2();
    const QualState st{0.5, 0.5};
    const ThresholdPair p = fair_thresholds(s, st, Constraint::dp);
    const double best = expected_utility(s, st, p.theta_a, p.theta_b);
    const ThresholdMap m(s, Constraint::dp);
    double grid = -kInf;
    for (int i = 1; i < 401; ++i) {
        const ThresholdPair g = m.at_mass(st, i / 401.0);
        grid = std::max(grid, expected_utility(s, st, g.theta_a, g.theta_b));
    }
    CHECK(best >= grid - 1e-5);
}

TEST_CASE("DP pair at an asymmetric state matches the high-precision oracle", "[policy][oracle]") {
    const Scenario s = testing_support::fig2();
    const ThresholdPair p = fair_thresholds(s, {0.35, 0.5}, Constraint::dp);
    CHECK(p.acceptance_mass == Approx(oracle::fig2_dp_mass_035).margin(1e-9));
    CHECK(p.theta_a == Approx(oracle::fig2_dp_theta_a_035).margin(1e-7));
    CHECK(p.theta_b == Approx(oracle::fig2_dp_theta_b_035).margin(1e-7));
}

TEST_CASE("perturbed pair breaks fairness", "[policy]") {
    const Scenario s = testing_support::fig2();
    ThresholdPair p = fair_thresholds(s, {0.3, 0.6}, Constraint::dp);
    p.theta_b += 0.1;
    CHECK(fair_policy_residual(s, {0.3, 0.6}, p).second > 0.0);
}

TEST_CASE("threshold map is continuous and monotone", "[policy][property]") {
    const Scenario s = testing_support::fig2();
    const PolicyFn dp = threshold_map(s, Constraint::dp);
    const ThresholdPair p0 = dp({0.4, 0.6}), p1 = dp({0.4 + 1e-9, 0.6});
    CHECK(std::abs(p0.theta_a - p1.theta_a) < 1e-4);
    CHECK(std::abs(p0.theta_b - p1.theta_b) < 1e-4);
    double prev_a = kInf, prev_b = kInf;
    for (int i = 1; i < 40; ++i) {
        const ThresholdPair p = dp({i / 40.0, 0.5});
        CHECK(p.theta_a <= prev_a + 1e-9);
        CHECK(p.theta_b <= prev_b + 1e-9);
        prev_a = p.theta_a;
        prev_b = p.theta_b;
    }
    const PolicyFn un = threshold_map(s, Constraint::unconstrained);
    CHECK(un({0.3, 0.2}).theta_a == un({0.3, 0.9}).theta_a);
    CHECK(std::isnan(un({0.3, 0.2}).acceptance_mass));
}

TEST_CASE("flat constraint cdf takes the smallest threshold", "[policy]") {
    Scenario s;
    s.a.g0 = FeatureDistribution::tabulated({0, 1, 2, 3, 4, 5}, {1, 1, 0, 0, 0.5, 0.5});
    s.a.g1 = FeatureDistribution::tabulated({0, 1, 2, 3, 4, 5}, {0.2, 0.2, 0, 0, 1, 2});
    s.b = testing_support::fig2().b;
    const ThresholdPair p = fair_thresholds(s, {0.5, 0.5}, Constraint::eqopt);
    const auto [foc, gap] = fair_policy_residual(s, {0.5, 0.5}, p);
    CHECK(gap <= 1e-7);
    if (p.flat_segment) {
        CHECK(s.a.g1.cdf(p.theta_a - 1e-6) < s.a.g1.cdf(p.theta_a) + 1e-12);
    }
}

TEST_CASE("degenerate rates are accepted", "[policy]") {
    const Scenario s = testing_support::fig2();
    const ThresholdPair p = fair_thresholds(s, {0.0, 0.0}, Constraint::eqopt);
    CHECK((std::isfinite(p.theta_a) || p.boundary));
    CHECK_THROWS_AS(fair_thresholds(s, {-0.1, 0.5}, Constraint::dp), ModelError);
}
