#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairdyn/analysis.hpp"
#include "scenarios.hpp"

using Catch::Approx;
using namespace fairdyn;

namespace {

EquilibriumOptions fast() {
    EquilibriumOptions o;
    o.scan = 256;
    o.diagnostics = false;
    return o;
}

}  // namespace

TEST_CASE("identical groups have no disparity", "[analysis]") {
    Scenario s = testing_support::fig2();
    s.b = s.a;
    const ImpactComparison r = compare_impact(s, fast());
    for (const ConstraintOutcome& o : r.outcomes) CHECK(o.disparity == Approx(0.0).margin(1e-9));
}

TEST_CASE("natural equality is kept only with shared features", "[analysis]") {
    Scenario s = testing_support::fig2();
    auto [ta, tb] = natural_equality_transitions(s, 0.6, TransitionClass::B);
    CHECK(classify_transitions(ta) == TransitionClass::B);
    s.a.transitions = ta;
    s.b.transitions = tb;
    const ImpactComparison same = compare_impact(s, fast());
    for (const ConstraintOutcome& o : same.outcomes) {
        CHECK(o.equilibrium.alpha_a == Approx(0.6).margin(1e-7));
        CHECK(o.disparity == Approx(0.0).margin(1e-7));
    }

    Scenario d = testing_support::fig2();
    d.b.g0 = FeatureDistribution::gaussian(-8.0, 5.0);
    std::tie(ta, tb) = natural_equality_transitions(d, 0.6, TransitionClass::B);
    d.a.transitions = ta;
    d.b.transitions = tb;
    const ImpactComparison diff = compare_impact(d, fast());
    CHECK(diff.at(Constraint::unconstrained).disparity == Approx(0.0).margin(1e-7));
    CHECK(std::abs(diff.at(Constraint::dp).disparity) > 1e-5);
    CHECK(std::abs(diff.at(Constraint::eqopt).disparity) > 1e-5);
    CHECK_THROWS_AS(natural_equality_transitions(d, 0.6, TransitionClass::C), ModelError);
}

TEST_CASE("EqOpt mitigates when group b's unqualified sit lower", "[analysis]") {
    Scenario s = testing_support::fig2();
    s.b.g0 = FeatureDistribution::gaussian(-7.0, 5.0);
    s.b.transitions = s.a.transitions;
    s.u_plus = 15.0;
    const MitigationReport r = verify_eqopt_mitigation(s, fast());
    CHECK(s.a.g0.pdf(r.crossing) == Approx(s.b.g0.pdf(r.crossing)).epsilon(1e-8));
    REQUIRE(r.precondition);
    CHECK(r.holds());
    const double d_un = r.impact.at(Constraint::unconstrained).disparity;
    const double d_eo = r.impact.at(Constraint::eqopt).disparity;
    CHECK(d_un > 0.0);
    CHECK(d_eo >= 0.0);
    CHECK(d_eo < d_un);

    Scenario bad = s;
    bad.b.g1 = FeatureDistribution::gaussian(6.0, 5.0);
    CHECK_THROWS_AS(verify_eqopt_mitigation(bad, fast()), ModelError);
}

TEST_CASE("offset policies", "[analysis]") {
    const Scenario s = testing_support::fig2();
    const PolicyInterventionResult zero = policy_intervention(s, Constraint::dp, 0.0, fast());
    CHECK(sup_distance(zero.optimal_equilibrium, zero.offset_equilibrium) <= 1e-9);
    const PolicyInterventionResult lower = policy_intervention(s, Constraint::eqopt, -0.2, fast());
    CHECK(lower.both_improve);
    CHECK(lower.offset_equilibrium.alpha_a > lower.optimal_equilibrium.alpha_a);
    CHECK(lower.offset_equilibrium.alpha_b > lower.optimal_equilibrium.alpha_b);
    CHECK_THROWS_AS(offset_policy(s, Constraint::dp, 1.0), ModelError);
    CHECK_THROWS_AS(offset_policy(s, Constraint::unconstrained, 0.1), ModelError);
}

TEST_CASE("equitable target", "[analysis]") {
    const TransitionMatrix t{0.2, 0.3, 0.6, 0.8};
    const auto same = equitable_target(t, t);
    REQUIRE(same.has_value());
    CHECK(same->alpha_range.contains(same->alpha_hat));
    CHECK_FALSE(equitable_target({0.05, 0.1, 0.05, 0.1}, {0.8, 0.9, 0.8, 0.9}).has_value());

    Scenario s = testing_support::fig2();
    s.b.transitions = s.a.transitions;
    SimulationOptions sim;
    sim.tol = 1e-12;
    const auto out = equitable_policy(s, {0.2, 0.9}, sim);
    REQUIRE(out.has_value());
    CHECK(out->trajectory.final_state().alpha_a == Approx(out->target.alpha_hat).margin(1e-6));
    CHECK(out->trajectory.final_state().alpha_b == Approx(out->target.alpha_hat).margin(1e-6));
}

TEST_CASE("transition interventions", "[analysis]") {
    const Scenario s = testing_support::fig2();
    const TransitionInterventionResult none =
        transition_intervention(s, Constraint::dp, {Group::b, 0, 1}, 0.0, fast());
    CHECK(sup_distance(none.before, none.after) <= 1e-12);
    const TransitionInterventionResult up =
        transition_intervention(s, Constraint::dp, {Group::b, 0, 1}, 0.05, fast());
    CHECK(up.after.alpha_b > up.before.alpha_b);

    const Scenario f = testing_support::fico(0.3, 0.5);
    const TransitionInterventionResult fa =
        transition_intervention(f, Constraint::eqopt, {Group::a, 0, 1}, 0.2, fast());
    CHECK(fa.after.alpha_a > fa.before.alpha_a);
    CHECK_THROWS_AS(transition_intervention(s, Constraint::dp, {Group::a, 1, 1}, 0.2, fast()),
                    ModelError);
    CHECK_THROWS_AS(transition_intervention(s, Constraint::dp, {Group::a, 0, 1}, -0.1, fast()),
                    ModelError);
}

TEST_CASE("short property suites pass", "[analysis][property]") {
    SuiteOptions o;
    o.count = 8;
    for (const std::string& name : suite_names()) {
        INFO(name);
        const SuiteResult r = run_suite(name, 20240611, o);
        CHECK(r.ok());
        CHECK(static_cast<int>(r.cases.size()) >= 8);
    }
    CHECK(known_suite("shared-features"));
    CHECK_FALSE(known_suite("thm9"));
    CHECK_THROWS_AS(run_suite("thm9", 1), ModelError);
}

TEST_CASE("suite results are reproducible", "[analysis]") {
    SuiteOptions o;
    o.count = 5;
    std::ostringstream a, b;
    write_suite_csv(a, run_suite("prop3", 99, o));
    write_suite_csv(b, run_suite("prop3", 99, o));
    CHECK(a.str() == b.str());
}
