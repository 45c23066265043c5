#include "fairdyn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace fairdyn {

double TransitionMatrix::at(int y, int d) const {
    return y == 0 ? (d == 0 ? t00 : t01) : (d == 0 ? t10 : t11);
}

double& TransitionMatrix::at(int y, int d) {
    return y == 0 ? (d == 0 ? t00 : t01) : (d == 0 ? t10 : t11);
}

void TransitionMatrix::validate(const std::string& where) const {
    const char* names[] = {"t00", "t01", "t10", "t11"};
    const double vals[] = {t00, t01, t10, t11};
    for (int i = 0; i < 4; ++i)
        if (!(vals[i] > 0.0 && vals[i] < 1.0))
            throw ModelError(where + "." + names[i] + " must lie strictly inside (0, 1)");
}

const char* to_string(TransitionClass c) {
    switch (c) {
    case TransitionClass::A: return "A";
    case TransitionClass::B: return "B";
    case TransitionClass::C: return "C";
    case TransitionClass::D: return "D";
    }
    return "?";
}

TransitionClass classify_transitions(const TransitionMatrix& t) {
    if (t.t01 >= t.t00 && t.t11 >= t.t10) return TransitionClass::B;
    if (t.t01 <= t.t00 && t.t11 <= t.t10) return TransitionClass::A;
    if (t.t01 >= t.t00 && t.t11 <= t.t10) return TransitionClass::C;
    return TransitionClass::D;
}

void GroupModel::validate(const std::string& where) const {
    transitions.validate(where + ".transitions");
    if (!(share > 0.0 && share < 1.0)) throw ModelError(where + ".share must lie in (0, 1)");
    MlrCheck m = verify_mlr(g0, g1);
    if (!m.holds)
        throw ModelError(where + ": likelihood ratio g1/g0 is not strictly increasing near x = " +
                         std::to_string(m.first_violation.value_or(kNaN)));
}

void Scenario::validate() const {
    a.validate("groups.a");
    b.validate("groups.b");
    if (std::abs(a.share + b.share - 1.0) > 1e-12)
        throw ModelError("group shares must sum to 1");
    if (!(u_plus > 0.0) || !std::isfinite(u_plus)) throw ModelError("utility.u_plus must be positive");
    if (!(u_minus > 0.0) || !std::isfinite(u_minus))
        throw ModelError("utility.u_minus must be positive");
}

double sup_distance(const QualState& l, const QualState& r) {
    return std::max(std::abs(l.alpha_a - r.alpha_a), std::abs(l.alpha_b - r.alpha_b));
}

const char* to_string(Constraint c) {
    switch (c) {
    case Constraint::unconstrained: return "UN";
    case Constraint::dp: return "DP";
    case Constraint::eqopt: return "EqOpt";
    }
    return "?";
}

Constraint parse_constraint(const std::string& name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (s == "un" || s == "unconstrained") return Constraint::unconstrained;
    if (s == "dp") return Constraint::dp;
    if (s == "eqopt") return Constraint::eqopt;
    throw ModelError("unknown constraint '" + name + "'");
}

double log_likelihood_ratio(const GroupModel& group, double x) {
    const double l1 = group.g1.log_pdf(x);
    const double l0 = group.g0.log_pdf(x);
    if (l1 == -kInf && l0 == -kInf) throw ModelError("x outside support");
    if (l1 == -kInf) return -kInf;
    if (l0 == -kInf) return kInf;
    return l1 - l0;
}

double qualification_profile(const GroupModel& group, double alpha, double x) {
    if (alpha <= 0.0) return 0.0;
    if (alpha >= 1.0) return 1.0;
    const double llr = log_likelihood_ratio(group, x);
    if (llr == kInf) return 1.0;
    if (llr == -kInf) return 0.0;
    const double z = llr + std::log(alpha) - std::log1p(-alpha);
    return 1.0 / (1.0 + std::exp(-z));
}

double constraint_density(const GroupModel& group, double alpha, Constraint c, double x) {
    switch (c) {
    case Constraint::eqopt: return group.g1.pdf(x);
    case Constraint::dp: return (1.0 - alpha) * group.g0.pdf(x) + alpha * group.g1.pdf(x);
    case Constraint::unconstrained: break;
    }
    throw ModelError("no constraint distribution for the unconstrained policy");
}

double constraint_tail(const GroupModel& group, double alpha, Constraint c, double theta) {
    switch (c) {
    case Constraint::eqopt: return group.g1.sf(theta);
    case Constraint::dp: return (1.0 - alpha) * group.g0.sf(theta) + alpha * group.g1.sf(theta);
    case Constraint::unconstrained: break;
    }
    throw ModelError("no constraint distribution for the unconstrained policy");
}

double group_utility(const GroupModel& group, double alpha, double theta, double u_plus,
                     double u_minus) {
    return alpha * u_plus * group.g1.sf(theta) - (1.0 - alpha) * u_minus * group.g0.sf(theta);
}

double expected_utility(const Scenario& s, const QualState& state, double theta_a,
                        double theta_b) {
    return s.a.share * group_utility(s.a, state.alpha_a, theta_a, s.u_plus, s.u_minus) +
           s.b.share * group_utility(s.b, state.alpha_b, theta_b, s.u_plus, s.u_minus);
}

}  // namespace fairdyn
