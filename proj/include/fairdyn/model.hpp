#pragma once

#include <array>
#include <string>

#include "fairdyn/dist.hpp"

namespace fairdyn {

/// Entry t_yd is P(qualified next | qualified now = y, decision = d).
struct TransitionMatrix {
    double t00 = 0.5;
    double t01 = 0.5;
    double t10 = 0.5;
    double t11 = 0.5;

    double at(int y, int d) const;
    double& at(int y, int d);
    void validate(const std::string& where = "transitions") const;

    friend bool operator==(const TransitionMatrix&, const TransitionMatrix&) = default;
};

enum class TransitionClass { A, B, C, D };

const char* to_string(TransitionClass c);

/// Ties resolve toward B, then A.
TransitionClass classify_transitions(const TransitionMatrix& t);

struct GroupModel {
    FeatureDistribution g0;  // features of unqualified members
    FeatureDistribution g1;  // features of qualified members
    TransitionMatrix transitions;
    double share = 0.5;

    /// Checks transition ranges, share, and the likelihood-ratio ordering.
    void validate(const std::string& where = "group") const;
};

struct Scenario {
    GroupModel a;
    GroupModel b;
    double u_plus = 1.0;
    double u_minus = 1.0;

    const GroupModel& group(Group g) const { return g == Group::a ? a : b; }
    GroupModel& group(Group g) { return g == Group::a ? a : b; }
    /// u_minus / (u_plus + u_minus), the profile level at the unconstrained optimum.
    double profile_target() const { return u_minus / (u_plus + u_minus); }
    void validate() const;
};

struct QualState {
    double alpha_a = 0.5;
    double alpha_b = 0.5;

    double operator[](Group g) const { return g == Group::a ? alpha_a : alpha_b; }
    double& operator[](Group g) { return g == Group::a ? alpha_a : alpha_b; }

    friend bool operator==(const QualState&, const QualState&) = default;
};

double sup_distance(const QualState& l, const QualState& r);

enum class Constraint { unconstrained, dp, eqopt };

const char* to_string(Constraint c);
/// Accepts "un", "unconstrained", "dp", "eqopt" (case-insensitive).
Constraint parse_constraint(const std::string& name);
inline constexpr std::array<Constraint, 3> kAllConstraints{
    Constraint::unconstrained, Constraint::dp, Constraint::eqopt};

/// log g1(x) - log g0(x), with +-inf where exactly one density vanishes.
/// Throws ModelError when both vanish.
double log_likelihood_ratio(const GroupModel& group, double x);

/// Posterior probability of being qualified given feature x.
double qualification_profile(const GroupModel& group, double alpha, double x);

double constraint_density(const GroupModel& group, double alpha, Constraint c, double x);
/// Mass of the constraint distribution at or above theta.
double constraint_tail(const GroupModel& group, double alpha, Constraint c, double theta);

/// Per-group contribution to utility, before weighting by share.
double group_utility(const GroupModel& group, double alpha, double theta, double u_plus,
                     double u_minus);

double expected_utility(const Scenario& s, const QualState& state, double theta_a,
                        double theta_b);

}  // namespace fairdyn
