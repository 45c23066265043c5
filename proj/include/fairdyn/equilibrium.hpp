#pragma once

#include <string>
#include <vector>

#include "fairdyn/dynamics.hpp"

namespace fairdyn {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
    bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// (1 - g_1s(theta)) / g_0s(theta).
double h_func(const GroupModel& group, double theta);

/// Range of h over all thresholds.
Interval h_bounds(const TransitionMatrix& t);

/// Rates that can solve the group's balanced equation: [1/(1+h_max), 1/(1+h_min)].
Interval invariant_interval(const TransitionMatrix& t);

/// 1/alpha - 1 - h(theta) for group g at the given state and thresholds.
double balanced_residual(const Scenario& s, Group g, const QualState& state,
                         const ThresholdPair& pair);

/// Each group's balanced rate as a function of the other group's rate.
/// psi_a[i] lists every solution for alpha_a with alpha_b = grid_b[i]; likewise psi_b.
struct BalancedFunctions {
    std::vector<double> grid_b;
    std::vector<std::vector<double>> psi_a;
    std::vector<double> grid_a;
    std::vector<std::vector<double>> psi_b;
    int resolution = 0;
};

BalancedFunctions balanced_functions(const Scenario& s, const PolicyFn& policy, int grid,
                                     int crossing_scan = 4096);
BalancedFunctions balanced_functions(const Scenario& s, Constraint c, int grid,
                                     int crossing_scan = 4096);

struct EquilibriumPoint {
    QualState state;
    ThresholdPair thresholds;
    double balance_residual = kNaN;  // max over groups of |balanced_residual|
    double step_residual = kNaN;     // sup-norm of step(state) - state
    double spectral_radius = kNaN;   // of the finite-difference Jacobian of one step
    bool stable = false;
};

struct EquilibriumOptions {
    int scan = 4096;         // crossing scan points along the balanced curves
    int grid2d = 65;         // per-axis nodes when the curves may be multivalued
    int derivative_grid = 33;
    double fd_step = 1e-4;
    bool diagnostics = true;  // uniqueness, Lipschitz and stability checks
};

struct UniquenessCheck {
    bool holds = false;
    std::string basis;          // "grid-verified" or "violated"
    std::string condition;      // which partial derivatives were bounded
    double max_partial = kNaN;  // largest required |partial| on the grid
    QualState worst;            // where it occurs
};

struct EquilibriumReport {
    Constraint constraint = Constraint::unconstrained;
    std::vector<EquilibriumPoint> equilibria;
    TransitionClass class_a = TransitionClass::B;
    TransitionClass class_b = TransitionClass::B;
    /// "grid-verified", "not-established" or "unknown" (mixed or C/D classes).
    std::string uniqueness = "unknown";
    UniquenessCheck uniqueness_check;
    double lipschitz = kNaN;

    bool unique() const { return equilibria.size() == 1; }
};

/// Fixed points of the dynamics under `policy`, sorted by (alpha_a, alpha_b),
/// each carrying residuals and a stability flag.
std::vector<EquilibriumPoint> enumerate_equilibria(const Scenario& s, const PolicyFn& policy,
                                                   const EquilibriumOptions& opt = {});

EquilibriumReport find_equilibria(const Scenario& s, Constraint c,
                                  const EquilibriumOptions& opt = {});
EquilibriumReport find_equilibria(const Scenario& s, const PolicyFn& policy, Constraint label,
                                  const EquilibriumOptions& opt = {});

/// Grid test of the sufficient derivative bounds on h composed with the
/// threshold map. Throws ModelError unless both groups are class A or both B.
UniquenessCheck check_uniqueness(const Scenario& s, Constraint c, int grid = 33,
                                 double fd_step = 1e-4);
UniquenessCheck check_uniqueness(const Scenario& s, const PolicyFn& policy, int grid = 33,
                                 double fd_step = 1e-4);

/// Largest induced sup-norm of the finite-difference Jacobian of one step.
double lipschitz_estimate(const Scenario& s, Constraint c, int grid = 33, double fd_step = 1e-4);
double lipschitz_estimate(const Scenario& s, const PolicyFn& policy, int grid = 33,
                          double fd_step = 1e-4);

/// Spectral radius of the finite-difference Jacobian of one step at `state`.
double step_spectral_radius(const Scenario& s, const PolicyFn& policy, const QualState& state,
                            double fd_step = 1e-4);

std::vector<bool> stability_flags(const Scenario& s, Constraint c,
                                  const std::vector<EquilibriumPoint>& eq, double fd_step = 1e-4);

/// Transition-gap bound under which the derivative conditions are guaranteed.
struct GapBound {
    double m0 = kNaN;  // max |d P(X < theta | y=0) / d alpha| over the grid
    double m1 = kNaN;
    double eps_a = kNaN;
    double eps_b = kNaN;

    /// |t_y1 - t_y0| < eps for both y and both groups.
    bool satisfied_by(const Scenario& s) const;
};

/// Requires each group to be class A or B.
GapBound uniqueness_gap_bound(const Scenario& s, Constraint c, int grid = 33,
                              double fd_step = 1e-4);

void write_equilibria_csv(std::ostream& os, const std::vector<EquilibriumReport>& reports);
void write_balanced_csv(std::ostream& os, const BalancedFunctions& bf);

}  // namespace fairdyn
