#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairdyn/equilibrium.hpp"

namespace fairdyn {

/// Slack absorbing solver tolerance when comparing disparities.
inline constexpr double kDisparitySlack = 1e-6;

struct ConstraintOutcome {
    Constraint constraint = Constraint::unconstrained;
    QualState equilibrium;
    double disparity = 0.0;  // alpha_a - alpha_b at equilibrium
};

struct ImpactComparison {
    std::array<ConstraintOutcome, 3> outcomes;  // UN, DP, EqOpt
    TransitionClass class_a = TransitionClass::B;
    TransitionClass class_b = TransitionClass::B;

    const ConstraintOutcome& at(Constraint c) const;
    /// |disparity(c)| >= |disparity(UN)| - slack.
    bool exacerbates(Constraint c) const;
    /// |disparity(c)| <= |disparity(UN)| + slack.
    bool mitigates(Constraint c) const;
    /// The group behind without the constraint stays behind (or ties).
    bool keeps_sign(Constraint c) const;
};

/// Equilibria under all three policies. Throws ModelError when any policy
/// has more than one equilibrium.
ImpactComparison compare_impact(const Scenario& s, const EquilibriumOptions& opt = {});

/// Transitions giving both groups the unconstrained equilibrium rate
/// `alpha_target`, of class A or B, with a margin that starts at 0.1.
std::pair<TransitionMatrix, TransitionMatrix> natural_equality_transitions(
    const Scenario& s, double alpha_target, TransitionClass condition);

enum class DpBranch { mitigates, flips, exacerbates };
const char* to_string(DpBranch b);

/// Check of the shared-qualified-features, shared-transitions setting in
/// which group b's unqualified features sit lower than group a's.
struct MitigationReport {
    double crossing = kNaN;           // x where both unqualified densities agree
    double utility_ratio_bound = kNaN;  // required lower bound on u_plus / u_minus
    bool precondition = false;
    ImpactComparison impact;
    bool un_gap_positive = false;
    bool eqopt_mitigates = false;  // 0 <= d_EqOpt < d_UN
    DpBranch dp = DpBranch::exacerbates;
    bool holds() const { return un_gap_positive && eqopt_mitigates && dp != DpBranch::exacerbates; }
};

/// Throws ModelError with the first violating x when the structural
/// preconditions fail.
MitigationReport verify_eqopt_mitigation(const Scenario& s, const EquilibriumOptions& opt = {});

/// Policy that keeps the fairness constraint but moves the shared acceptance
/// mass toward reject-all (offset > 0) or accept-all (offset < 0) by the
/// fraction |offset| of the remaining room. Requires |offset| < 1.
PolicyFn offset_policy(const Scenario& s, Constraint c, double offset);

struct PolicyInterventionResult {
    QualState optimal_equilibrium;
    QualState offset_equilibrium;
    double optimal_utility = kNaN;  // long-run average, i.e. utility at equilibrium
    double offset_utility = kNaN;
    bool both_improve = false;  // both rates strictly higher under the offset policy
};

PolicyInterventionResult policy_intervention(const Scenario& s, Constraint c, double offset,
                                             const EquilibriumOptions& opt = {});

struct EquitableTarget {
    Interval l_range;      // common range of 1/alpha - 1
    Interval alpha_range;  // the same range mapped to rates
    double alpha_hat = kNaN;
};

/// Common equilibrium rates reachable by per-group threshold policies; the
/// chosen rate is the midpoint in 1/alpha - 1. Both matrices must be class A
/// or both class B.
std::optional<EquitableTarget> equitable_target(const TransitionMatrix& ta,
                                                const TransitionMatrix& tb);

/// Constant threshold making alpha_hat the group's equilibrium.
double equitable_threshold(const GroupModel& g, double alpha_hat);

struct EquitableOutcome {
    EquitableTarget target;
    double theta_a = kNaN;
    double theta_b = kNaN;
    Trajectory trajectory;
};

std::optional<EquitableOutcome> equitable_policy(const Scenario& s, const QualState& initial,
                                                 const SimulationOptions& sim = {});

struct TransitionEntry {
    Group group = Group::a;
    int y = 0;
    int d = 0;
};

struct TransitionInterventionResult {
    QualState before;
    QualState after;
};

/// Raises one transition entry by delta. Throws ModelError when the entry
/// leaves (0, 1) or either equilibrium is not unique.
TransitionInterventionResult transition_intervention(const Scenario& s, Constraint c,
                                                     TransitionEntry which, double delta,
                                                     const EquilibriumOptions& opt = {});

/// Random Gaussian scenarios for property suites.
class ScenarioSampler {
public:
    explicit ScenarioSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi);
    int integer(int lo, int hi);
    /// Equal-variance pair with mean(g1) > mean(g0).
    std::pair<FeatureDistribution, FeatureDistribution> feature_pair();
    TransitionMatrix transitions(TransitionClass c);
    Scenario scenario(bool shared_features, TransitionClass ca, TransitionClass cb);

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

struct SuiteCase {
    int index = 0;
    bool pass = false;
    std::string detail;
    std::vector<std::pair<std::string, double>> values;
};

struct SuiteResult {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<SuiteCase> cases;
    std::vector<std::string> notes;

    int passed() const;
    bool ok() const { return !cases.empty() && passed() == static_cast<int>(cases.size()); }
};

struct SuiteOptions {
    int scan = 128;  // crossing scan used by the suites
    int count = 0;   // 0 selects the suite's default case count
};

/// Canonical suite names (aliases accepted by run_suite).
const std::vector<std::string>& suite_names();
/// Canonical name or alias.
bool known_suite(const std::string& name);
SuiteResult run_suite(const std::string& name, std::uint64_t seed, const SuiteOptions& opt = {});

void write_suite_csv(std::ostream& os, const SuiteResult& r);

}  // namespace fairdyn
