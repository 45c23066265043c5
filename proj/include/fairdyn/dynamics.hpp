#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairdyn/policy.hpp"

namespace fairdyn {

/// T_y0 * P(X < theta | y) + T_y1 * P(X >= theta | y): chance that a member
/// with qualification y is qualified next step.
double g_ys(const GroupModel& group, int y, double theta);

/// One application of the rate update under fixed thresholds.
QualState step(const Scenario& s, const QualState& state, const ThresholdPair& pair);

struct SimulationOptions {
    int max_steps = 10000;
    double tol = 1e-8;
    int window = 64;
    int max_period = 8;
};

enum class Termination { converged, oscillating, max_steps };

const char* to_string(Termination t);

struct TerminationInfo {
    Termination kind = Termination::max_steps;
    double residual = kNaN;  // sup-norm step size at the end
    int period = 0;          // set when oscillating
    std::string diagnostic;
};

struct Trajectory {
    std::vector<QualState> states;
    std::vector<ThresholdPair> thresholds;  // thresholds[i] applied to states[i]
    std::vector<double> utilities;          // utilities[i] earned at states[i]
    TerminationInfo termination;

    const QualState& final_state() const { return states.back(); }
};

Trajectory simulate(const Scenario& s, const PolicyFn& policy, const QualState& initial,
                    const SimulationOptions& opt = {});
Trajectory simulate(const Scenario& s, Constraint c, const QualState& initial,
                    const SimulationOptions& opt = {});

/// Smallest period p in [2, min(max_period, window / 2)] such that every state
/// in the trailing window repeats p steps later within tol. A tail that has
/// converged to a point yields nullopt.
std::optional<int> detect_oscillation(const std::vector<QualState>& states, int window,
                                      double tol, int max_period = 8);

/// Columns: step, alphaA, alphaB, thetaA, thetaB, utility.
void write_trajectory_csv(std::ostream& os, const Trajectory& t);

}  // namespace fairdyn
