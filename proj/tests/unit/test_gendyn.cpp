#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairdyn/gendyn.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace fairdyn;

namespace {

GenModel fig4_left() {
    GenModel m;
    m.g00 = FeatureDistribution::gaussian(-8.0, 3.0);
    m.g01 = FeatureDistribution::gaussian(-1.0, 3.0);
    m.g10 = FeatureDistribution::gaussian(5.0, 3.0);
    m.g11 = m.g10;
    m.transitions = {0.2, 0.6, 0.5, 0.9};
    return m;
}

double gen_utility(const GenModel& m, const GenState& s, double theta) {
    double u = 0.0;
    for (int y : {0, 1})
        for (int d : {0, 1}) u += s.at(y, d) * m.at(y, d).sf(theta) * (y ? m.u_plus : -m.u_minus);
    return u;
}

}  // namespace

TEST_CASE("joint-state profile", "[gendyn]") {
    const GenModel m = fig4_left();
    const GenState s{0.2, 0.2, 0.4, 0.2};  // alpha 0.4, zeta00 0.2
    CHECK(gen_profile(m, s, 0.0) == Approx(oracle::gen_profile_x0).epsilon(1e-12));
    GenModel same = m;
    same.g00 = same.g01 = same.g11 = same.g10;
    CHECK(gen_profile(same, s, 1.7) == Approx(0.4));
    CHECK(gen_profile(m, {0.5, 0.5, 0.0, 0.0}, -3.0) == 1.0);
}

TEST_CASE("joint step reduces to the rate update", "[gendyn][property]") {
    GenModel m;
    m.g00 = m.g01 = FeatureDistribution::gaussian(-2.0, 2.0);
    m.g10 = m.g11 = FeatureDistribution::gaussian(2.0, 2.0);
    m.transitions = {0.3, 0.6, 0.4, 0.8};
    GroupModel base{m.g00, m.g10, m.transitions, 0.5};
    GenState s = initial_gen_state(0.3);
    for (int k = 0; k < 100; ++k) {
        const double theta = -1.0 + 0.03 * k;
        const double expected = s.alpha() * g_ys(base, 1, theta) + (1 - s.alpha()) * g_ys(base, 0, theta);
        s = gen_step(m, s, theta);
        CHECK(s.alpha() == Approx(expected).margin(1e-12));
    }
    const GenState r = gen_step(m, initial_gen_state(0.5), kInf);
    CHECK(r.zeta11 == 0.0);
    CHECK(r.zeta01 == 0.0);
    CHECK(r.zeta10 == Approx(0.5 * 0.3 + 0.5 * 0.4));
}

TEST_CASE("joint-state threshold", "[gendyn][oracle]") {
    GenModel sym;
    sym.g00 = sym.g01 = FeatureDistribution::gaussian(-1.0, 1.0);
    sym.g10 = sym.g11 = FeatureDistribution::gaussian(1.0, 1.0);
    CHECK(gen_threshold(sym, initial_gen_state(0.5)) == Approx(0.0).margin(1e-9));

    const GenModel m = fig4_left();
    const GenState s{0.2, 0.2, 0.4, 0.2};
    const double th = gen_threshold(m, s);
    const double best = gen_utility(m, s, th);
    double grid = -kInf;
    for (int i = 0; i <= 2000; ++i) grid = std::max(grid, gen_utility(m, s, -20.0 + 40.0 * i / 2000.0));
    CHECK(best >= grid - 1e-9);
    CHECK(gen_profile(m, s, th) == Approx(0.5).margin(1e-9));
}

TEST_CASE("decision-dependent generation shifts the equilibrium", "[gendyn]") {
    GenModel flat = fig4_left();
    flat.g01 = flat.g00;
    CHECK_THROWS_AS(gen_equilibrium(flat, GenVariant::unqualified_side), ModelError);
    CHECK_THROWS_AS(gen_equilibrium(fig4_left(), GenVariant::qualified_side), ModelError);

    GenModel m = fig4_left();
    m.g10 = m.g11 = FeatureDistribution::gaussian(1.0, 3.0);

    GenModel a = m;
    a.transitions = {0.8, 0.6, 0.9, 0.7};  // class A
    a.u_plus = 2.0;
    const GenComparison ca = gen_equilibrium(a, GenVariant::unqualified_side);
    REQUIRE(ca.equilibria.size() == 1);
    REQUIRE(ca.precondition);
    CHECK(ca.crossing == Approx(-4.5).margin(1e-9));
    CHECK(ca.equilibria[0].feasible);
    CHECK(ca.equilibria[0].residual <= 1e-12);
    CHECK(ca.ordering_holds);
    CHECK(ca.equilibria[0].alpha > ca.baseline.at(0));

    GenModel b = m;
    b.transitions = {0.5, 0.7, 0.6, 0.9};  // class B
    b.u_plus = 2.5;
    const GenComparison cb = gen_equilibrium(b, GenVariant::unqualified_side);
    REQUIRE(cb.equilibria.size() == 1);
    REQUIRE(cb.precondition);
    CHECK(cb.ordering_holds);
    CHECK(cb.equilibria[0].alpha < cb.baseline.at(0));
    CHECK(cb.equilibria[0].state.alpha() + cb.equilibria[0].state.zeta00 <= 1.0 + 1e-12);
}

TEST_CASE("joint simulation converges to the joint equilibrium", "[gendyn]") {
    const GenModel m = fig4_left();
    SimulationOptions opt;
    opt.tol = 1e-13;
    const GenTrajectory t = gen_simulate(m, initial_gen_state(0.3), opt);
    REQUIRE(t.termination.kind == Termination::converged);
    const GenComparison c = gen_equilibrium(m, GenVariant::unqualified_side);
    REQUIRE(c.equilibria.size() == 1);
    CHECK(t.states.back().alpha() == Approx(c.equilibria[0].alpha).margin(1e-8));
    CHECK_THROWS_AS((GenState{0.5, 0.5, 0.5, 0.0}.validate()), ModelError);
}
