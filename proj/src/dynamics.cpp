#include "fairdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fairdyn {

double g_ys(const GroupModel& group, int y, double theta) {
    const FeatureDistribution& d = y == 0 ? group.g0 : group.g1;
    const double lo = group.transitions.at(y, 0);
    const double hi = group.transitions.at(y, 1);
    if (theta == kInf) return lo;
    if (theta == -kInf) return hi;
    return lo * d.cdf(theta) + hi * d.sf(theta);
}

QualState step(const Scenario& s, const QualState& state, const ThresholdPair& pair) {
    QualState next;
    for (Group g : {Group::a, Group::b}) {
        const GroupModel& m = s.group(g);
        const double a = state[g];
        const double v = g_ys(m, 0, pair[g]) * (1.0 - a) + g_ys(m, 1, pair[g]) * a;
        next[g] = std::clamp(v, 0.0, 1.0);
    }
    return next;
}

const char* to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::oscillating: return "oscillating";
    case Termination::max_steps: return "max_steps";
    }
    return "?";
}

std::optional<int> detect_oscillation(const std::vector<QualState>& states, int window,
                                      double tol, int max_period) {
    const int n = static_cast<int>(states.size());
    if (window < 4 || window > n) return std::nullopt;
    const int start = n - window;
    bool moving = false;
    for (int t = start + 1; t < n && !moving; ++t)
        moving = sup_distance(states[t], states[t - 1]) > tol;
    if (!moving) return std::nullopt;
    const int pmax = std::min(max_period, window / 2);
    for (int p = 2; p <= pmax; ++p) {
        bool ok = true;
        for (int t = start + p; t < n && ok; ++t) ok = sup_distance(states[t], states[t - p]) <= tol;
        if (ok) return p;
    }
    return std::nullopt;
}

Trajectory simulate(const Scenario& s, const PolicyFn& policy, const QualState& initial,
                    const SimulationOptions& opt) {
    if (opt.max_steps < 1) throw ModelError("max_steps must be at least 1");
    if (!(opt.tol > 0.0)) throw ModelError("tol must be positive");
    Trajectory tr;
    tr.states.push_back(initial);
    QualState cur = initial;
    for (int t = 0; t < opt.max_steps; ++t) {
        ThresholdPair p = policy(cur);
        tr.utilities.push_back(expected_utility(s, cur, p.theta_a, p.theta_b));
        tr.thresholds.push_back(p);
        QualState next = step(s, cur, p);
        const double res = sup_distance(next, cur);
        tr.states.push_back(next);
        cur = next;
        tr.termination.residual = res;
        if (res <= opt.tol) {
            tr.termination.kind = Termination::converged;
            break;
        }
        if (static_cast<int>(tr.states.size()) > opt.window) {
            if (auto per = detect_oscillation(tr.states, opt.window, opt.tol, opt.max_period)) {
                tr.termination.kind = Termination::oscillating;
                tr.termination.period = *per;
                break;
            }
        }
    }
    if (tr.termination.kind == Termination::max_steps) {
        auto longer = detect_oscillation(tr.states, opt.window, opt.tol, opt.window / 2);
        if (longer)
            tr.termination.diagnostic = "cycle of period " + std::to_string(*longer) +
                                        " exceeds the oscillation period limit";
        else
            tr.termination.diagnostic =
                "no convergence within " + std::to_string(opt.max_steps) + " steps";
    }
    ThresholdPair last = policy(cur);
    tr.utilities.push_back(expected_utility(s, cur, last.theta_a, last.theta_b));
    tr.thresholds.push_back(last);
    return tr;
}

Trajectory simulate(const Scenario& s, Constraint c, const QualState& initial,
                    const SimulationOptions& opt) {
    return simulate(s, threshold_map(s, c), initial, opt);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
    os << "step,alphaA,alphaB,thetaA,thetaB,utility\n";
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        os << i << ',' << format_real(t.states[i].alpha_a) << ',' << format_real(t.states[i].alpha_b)
           << ',' << format_real(t.thresholds[i].theta_a) << ','
           << format_real(t.thresholds[i].theta_b) << ',' << format_real(t.utilities[i]) << '\n';
    }
}

}  // namespace fairdyn
