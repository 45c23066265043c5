#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairdyn/model.hpp"
#include "fairdyn/policy.hpp"
#include "scenarios.hpp"

using Catch::Approx;
using namespace fairdyn;

TEST_CASE("density values at simple points", "[model]") {
    CHECK(FeatureDistribution().pdf(0.0) == Approx(0.3989422804014327));
    CHECK(FeatureDistribution::beta(1, 1).pdf(0.3) == Approx(1.0));
    CHECK(FeatureDistribution::tabulated({0, 1}, {1, 1}).pdf(0.5) == Approx(1.0));
    CHECK(FeatureDistribution().cdf(0.0) == Approx(0.5));
    CHECK(FeatureDistribution::beta(2, 2).cdf(0.5) == Approx(0.5));
    CHECK(FeatureDistribution().quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(FeatureDistribution::beta(1, 1).quantile(0.25) == Approx(0.25));
}

TEST_CASE("transition classes and tie rule", "[model]") {
    CHECK(classify_transitions({0.4, 0.5, 0.5, 0.9}) == TransitionClass::B);
    CHECK(classify_transitions({0.5, 0.5, 0.5, 0.5}) == TransitionClass::B);
    CHECK(classify_transitions({0.3, 0.5, 0.9, 0.4}) == TransitionClass::C);
    CHECK(classify_transitions({0.5, 0.3, 0.9, 0.4}) == TransitionClass::A);
    CHECK(classify_transitions({0.5, 0.3, 0.4, 0.9}) == TransitionClass::D);
    // equal decision entries on one row only: ties toward B, then A
    CHECK(classify_transitions({0.5, 0.5, 0.9, 0.4}) == TransitionClass::A);
    CHECK(classify_transitions({0.5, 0.5, 0.4, 0.9}) == TransitionClass::B);
}

TEST_CASE("transition validation names the field", "[model]") {
    TransitionMatrix t{0.2, 1.0, 0.3, 0.4};
    try {
        t.validate("groups.a.transitions");
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("groups.a.transitions.t01") != std::string::npos);
    }
    Scenario s = testing_support::fig2();
    s.a.share = 0.3;
    CHECK_THROWS_AS(s.validate(), ModelError);
    s.a.share = 0.5;
    s.u_plus = -1.0;
    CHECK_THROWS_AS(s.validate(), ModelError);
}

TEST_CASE("qualification profile", "[model]") {
    GroupModel g = testing_support::fig2().a;
    CHECK(qualification_profile(g, 0.5, 0.0) == Approx(0.5));
    CHECK(qualification_profile(g, 0.0, 1.3) == 0.0);
    GroupModel flat = g;
    flat.g1 = flat.g0;
    CHECK(qualification_profile(flat, 0.3, 2.0) == Approx(0.3));
    const auto b0 = FeatureDistribution::beta(2, 5), b1 = FeatureDistribution::beta(5, 2);
    GroupModel bg{b0, b1, {}, 0.5};
    CHECK_THROWS_AS(log_likelihood_ratio(bg, 2.0), ModelError);
    CHECK(qualification_profile(bg, 0.4, 0.7) > qualification_profile(bg, 0.4, 0.3));
}

TEST_CASE("constraint densities", "[model]") {
    GroupModel g = testing_support::fig2().a;
    CHECK(constraint_density(g, 0.2, Constraint::eqopt, 1.5) == Approx(g.g1.pdf(1.5)));
    CHECK(constraint_density(g, 1.0, Constraint::dp, 1.5) == Approx(g.g1.pdf(1.5)));
    CHECK(constraint_density(g, 0.5, Constraint::dp, 1.5) ==
          Approx(0.5 * g.g0.pdf(1.5) + 0.5 * g.g1.pdf(1.5)));
    CHECK(constraint_tail(g, 0.5, Constraint::dp, 0.0) == Approx(0.5));
    CHECK_THROWS_AS(constraint_density(g, 0.5, Constraint::unconstrained, 0.0), ModelError);
    CHECK(parse_constraint("UN") == Constraint::unconstrained);
    CHECK(parse_constraint("EqOpt") == Constraint::eqopt);
    CHECK_THROWS_AS(parse_constraint("fair"), ModelError);
}

TEST_CASE("expected utility limits", "[model]") {
    const Scenario s = testing_support::fig2();
    CHECK(expected_utility(s, {0.3, 0.7}, kInf, kInf) == 0.0);
    CHECK(expected_utility(s, {1.0, 1.0}, -kInf, -kInf) == Approx(s.u_plus));
    CHECK(expected_utility(s, {0.0, 0.0}, -kInf, -kInf) == Approx(-s.u_minus));
}

TEST_CASE("optimal unconstrained thresholds beat a 2001-point grid", "[model][oracle]") {
    const Scenario s = testing_support::fig2();
    const QualState st{0.37, 0.62};
    const double ta = unconstrained_threshold(s, Group::a, st.alpha_a);
    const double tb = unconstrained_threshold(s, Group::b, st.alpha_b);
    const double best = expected_utility(s, st, ta, tb);
    double grid_best = -kInf;
    for (int i = 0; i <= 2000; ++i) {
        const double ga = -30.0 + 60.0 * i / 2000.0;
        // groups are separable under UN
        grid_best = std::max(grid_best, expected_utility(s, st, ga, tb));
    }
    double grid_b = -kInf;
    for (int i = 0; i <= 2000; ++i) grid_b = std::max(grid_b, expected_utility(s, st, ta, -30.0 + 60.0 * i / 2000.0));
    CHECK(best >= grid_best - 1e-6);
    CHECK(best >= grid_b - 1e-6);
    CHECK(best == Approx(std::max(grid_best, grid_b)).margin(1e-4));
}
