#pragma once

#include <optional>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

/// Single group whose features depend on both the current qualification and
/// the previous decision: g_yd is the density given Y_t = y, D_{t-1} = d.
struct GenModel {
    FeatureDistribution g00;
    FeatureDistribution g01;
    FeatureDistribution g10;
    FeatureDistribution g11;
    TransitionMatrix transitions;
    double u_plus = 1.0;
    double u_minus = 1.0;

    const FeatureDistribution& at(int y, int d) const;
    /// Grid check that g0d / g1d' decreases strictly for all four pairs.
    void validate() const;
};

/// zeta_yd = P(D_{t-1} = d, Y_t = y).
struct GenState {
    double zeta11 = 0.25;
    double zeta10 = 0.25;
    double zeta01 = 0.25;
    double zeta00 = 0.25;

    double alpha() const { return zeta11 + zeta10; }
    double at(int y, int d) const;
    void validate() const;
};

/// Product state from a rate and a half-accepting previous round.
GenState initial_gen_state(double alpha);

double gen_profile(const GenModel& m, const GenState& s, double x);

/// One application of the four-state transition under threshold theta.
GenState gen_step(const GenModel& m, const GenState& s, double theta);

/// Unconstrained optimal threshold; +-inf when the profile never or always
/// reaches the target.
double gen_threshold(const GenModel& m, const GenState& s);

struct GenTrajectory {
    std::vector<GenState> states;
    std::vector<double> thresholds;
    TerminationInfo termination;
};

GenTrajectory gen_simulate(const GenModel& m, const GenState& initial,
                           const SimulationOptions& opt = {});

enum class GenVariant { unqualified_side, qualified_side };

const char* to_string(GenVariant v);

struct GenEquilibrium {
    double alpha = kNaN;
    GenState state;
    double residual = kNaN;  // sup-norm of gen_step(state) - state
    bool feasible = false;   // bound from the balanced-system sum holds
};

struct GenComparison {
    GenVariant variant = GenVariant::unqualified_side;
    std::vector<GenEquilibrium> equilibria;
    /// Same transitions with the decision dependence removed.
    std::vector<double> baseline;
    double crossing = kNaN;
    /// +1 when the decision-shifted density lies to the right of the other
    /// (first distribution function below), -1 in the mirrored case.
    int shape = 0;
    double ratio_bound = kNaN;
    bool precondition = false;
    /// Expected sign of alpha - baseline when the precondition holds, else 0.
    int predicted = 0;
    bool ordering_holds = false;
};

/// Throws ModelError when the densities do not match the variant.
GenComparison gen_equilibrium(const GenModel& m, GenVariant variant, int grid = 65);

}  // namespace fairdyn
