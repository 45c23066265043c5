#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "fairdyn/model.hpp"

namespace fairdyn {

/// Group thresholds; an applicant is accepted when its feature is >= the threshold.
struct ThresholdPair {
    double theta_a = kInf;
    double theta_b = kInf;
    Constraint constraint = Constraint::unconstrained;
    /// |tail mass of group a's constraint distribution - group b's|; 0 when unconstrained.
    double fairness_residual = 0.0;
    /// Normalized derivative of utility in the acceptance mass at the solution.
    double foc_residual = 0.0;
    /// Shared constraint tail mass; NaN when unconstrained.
    double acceptance_mass = kNaN;
    /// Optimum sits at accept-all or reject-all.
    bool boundary = false;
    /// A constraint CDF had a flat stretch; the smallest threshold was taken.
    bool flat_segment = false;
    /// Local maxima of the coarse utility scan.
    int local_optima = 0;

    double operator[](Group g) const { return g == Group::a ? theta_a : theta_b; }
};

using PolicyFn = std::function<ThresholdPair(const QualState&)>;

/// Smallest theta whose qualification profile reaches `profile_target`.
/// +inf when it never does, -inf when the whole support qualifies.
double unconstrained_threshold(const GroupModel& group, double alpha, double profile_target);
double unconstrained_threshold(const Scenario& s, Group g, double alpha);

/// Utility-maximizing thresholds for a fixed scenario and constraint.
///
/// Fair constraints are solved in the shared acceptance mass q: each group's
/// threshold is the upper-q point of its constraint distribution, a coarse
/// scan over q locates the maximum and the first-order condition is then
/// solved exactly. Construction tabulates the tails once; evaluation is
/// const and thread-safe.
class ThresholdMap {
public:
    static constexpr int kCoarsePoints = 512;
    static constexpr int kTablePoints = 1024;

    ThresholdMap(const Scenario& s, Constraint c);

    ThresholdPair operator()(const QualState& state) const;
    /// Thresholds giving both groups constraint tail mass q. Fair constraints only.
    ThresholdPair at_mass(const QualState& state, double q) const;
    /// Threshold for one group at constraint tail mass q.
    double threshold_at_mass(Group g, double alpha, double q) const;
    /// Exact normalized utility derivative in q.
    double foc(const QualState& state, double q) const;

    const Scenario& scenario() const;
    Constraint constraint() const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

ThresholdPair fair_thresholds(const Scenario& s, const QualState& state, Constraint c);

/// (first-order residual, fairness tail-mass gap) for an arbitrary pair.
std::pair<double, double> fair_policy_residual(const Scenario& s, const QualState& state,
                                               const ThresholdPair& pair);

PolicyFn threshold_map(const Scenario& s, Constraint c);

}  // namespace fairdyn
