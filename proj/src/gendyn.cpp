#include "fairdyn/gendyn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "fairdyn/equilibrium.hpp"

namespace fairdyn {

namespace {

double accept_mass(const FeatureDistribution& g, double theta) {
    if (theta == kInf) return 0.0;
    if (theta == -kInf) return 1.0;
    return g.sf(theta);
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

double weighted_log(const FeatureDistribution& g, double w, double x) {
    return w > 0.0 ? g.log_pdf(x) + std::log(w) : -kInf;
}

// log of the qualified over the unqualified weighted density.
double log_odds(const GenModel& m, const GenState& s, double x) {
    const double q = log_add(weighted_log(m.g10, s.zeta10, x), weighted_log(m.g11, s.zeta11, x));
    const double u = log_add(weighted_log(m.g00, s.zeta00, x), weighted_log(m.g01, s.zeta01, x));
    if (q == -kInf && u == -kInf) throw ModelError("all weighted densities vanish at x");
    return q - u;
}

// Single crossing of two densities on a scan of their common support.
// Returns (x, +1) when `right` overtakes `left` there, (x, -1) in the mirrored case.
std::pair<double, int> density_crossing(const FeatureDistribution& left,
                                        const FeatureDistribution& right) {
    const double lo = std::max(left.lower(), right.lower());
    const double hi = std::min(left.upper(), right.upper());
    if (!(hi > lo)) throw ModelError("densities share no support");
    auto d = [&](double x) { return right.log_pdf(x) - left.log_pdf(x); };
    const int n = 4096;
    std::vector<std::pair<double, double>> brackets;
    double xp = lo, dp = d(lo);
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double dx = d(x);
        if (std::isfinite(dp) && std::isfinite(dx) && (dp < 0.0) != (dx < 0.0))
            brackets.emplace_back(xp, x);
        xp = x;
        dp = dx;
    }
    if (brackets.size() != 1)
        throw ModelError("densities must cross exactly once, found " +
                         std::to_string(brackets.size()) + " crossings");
    auto [l, u] = brackets.front();
    const bool rising = d(l) < 0.0;
    for (int i = 0; i < 200 && u - l > 1e-14 * std::max(1.0, std::abs(l)); ++i) {
        const double mid = 0.5 * (l + u);
        ((d(mid) < 0.0) == rising ? l : u) = mid;
    }
    return {0.5 * (l + u), rising ? 1 : -1};
}

GenState reduced_state(GenVariant v, double alpha, double u) {
    GenState s;
    if (v == GenVariant::unqualified_side) {
        s.zeta00 = u * (1.0 - alpha);
        s.zeta01 = (1.0 - u) * (1.0 - alpha);
        s.zeta11 = s.zeta10 = 0.5 * alpha;
    } else {
        s.zeta11 = u * alpha;
        s.zeta10 = (1.0 - u) * alpha;
        s.zeta01 = s.zeta00 = 0.5 * (1.0 - alpha);
    }
    return s;
}

double free_coordinate(GenVariant v, const GenState& s) {
    return v == GenVariant::unqualified_side ? s.zeta00 : s.zeta11;
}

double sup_gap(const GenState& l, const GenState& r) {
    return std::max({std::abs(l.zeta11 - r.zeta11), std::abs(l.zeta10 - r.zeta10),
                     std::abs(l.zeta01 - r.zeta01), std::abs(l.zeta00 - r.zeta00)});
}

}  // namespace

const FeatureDistribution& GenModel::at(int y, int d) const {
    if (y == 0) return d == 0 ? g00 : g01;
    return d == 0 ? g10 : g11;
}

void GenModel::validate() const {
    transitions.validate("generation.transitions");
    if (!(u_plus > 0.0 && u_minus > 0.0)) throw ModelError("utilities must be positive");
    for (int d0 : {0, 1})
        for (int d1 : {0, 1}) {
            const MlrCheck c = verify_mlr(at(0, d0), at(1, d1));
            if (!c.holds)
                throw ModelError("g0" + std::to_string(d0) + " / g1" + std::to_string(d1) +
                                 " is not strictly decreasing near x = " +
                                 format_real(c.first_violation.value_or(kNaN)));
        }
}

double GenState::at(int y, int d) const {
    if (y == 0) return d == 0 ? zeta00 : zeta01;
    return d == 0 ? zeta10 : zeta11;
}

void GenState::validate() const {
    for (double z : {zeta11, zeta10, zeta01, zeta00})
        if (!(z >= 0.0 && z <= 1.0)) throw ModelError("joint state entries must lie in [0, 1]");
    if (std::abs(zeta11 + zeta10 + zeta01 + zeta00 - 1.0) > 1e-10)
        throw ModelError("joint state must sum to 1");
}

GenState initial_gen_state(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ModelError("alpha must lie in [0, 1]");
    return {0.5 * alpha, 0.5 * alpha, 0.5 * (1.0 - alpha), 0.5 * (1.0 - alpha)};
}

double gen_profile(const GenModel& m, const GenState& s, double x) {
    const double z = log_odds(m, s, x);
    if (z == kInf) return 1.0;
    if (z == -kInf) return 0.0;
    return 1.0 / (1.0 + std::exp(-z));
}

GenState gen_step(const GenModel& m, const GenState& s, double theta) {
    const TransitionMatrix& t = m.transitions;
    // previous (y, d) in the order 11, 10, 01, 00
    const std::array<double, 4> prev{s.zeta11, s.zeta10, s.zeta01, s.zeta00};
    const std::array<double, 4> acc{accept_mass(m.g11, theta), accept_mass(m.g10, theta),
                                     accept_mass(m.g01, theta), accept_mass(m.g00, theta)};
    double n11 = 0.0, n10 = 0.0, n01 = 0.0, n00 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const int y = k < 2 ? 1 : 0;
        const double a = prev[static_cast<std::size_t>(k)] * acc[static_cast<std::size_t>(k)];
        const double r = prev[static_cast<std::size_t>(k)] - a;
        n11 += t.at(y, 1) * a;
        n10 += t.at(y, 0) * r;
        n01 += (1.0 - t.at(y, 1)) * a;
        n00 += (1.0 - t.at(y, 0)) * r;
    }
    const double sum = n11 + n10 + n01 + n00;
    return {n11 / sum, n10 / sum, n01 / sum, n00 / sum};
}

double gen_threshold(const GenModel& m, const GenState& s) {
    const double target = std::log(m.u_minus / m.u_plus);
    double lo = kInf, hi = -kInf;
    for (int y : {0, 1})
        for (int d : {0, 1})
            if (s.at(y, d) > 0.0) {
                lo = std::min(lo, m.at(y, d).lower());
                hi = std::max(hi, m.at(y, d).upper());
            }
    if (!(hi > lo)) throw ModelError("joint state has no mass");
    auto phi = [&](double x) {
        const double q = log_add(weighted_log(m.g10, s.zeta10, x), weighted_log(m.g11, s.zeta11, x));
        const double u = log_add(weighted_log(m.g00, s.zeta00, x), weighted_log(m.g01, s.zeta01, x));
        if (q == -kInf && u == -kInf) return kNaN;
        return q - u - target;
    };
    const double plo = phi(lo), phi_hi = phi(hi);
    if (plo >= 0.0) return -kInf;
    if (!(phi_hi >= 0.0)) return kInf;
    double l = lo, u = hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (l + u);
        if (mid == l || mid == u) break;
        (phi(mid) >= 0.0 ? u : l) = mid;
    }
    return u;
}

const char* to_string(GenVariant v) {
    return v == GenVariant::unqualified_side ? "unqualified-side" : "qualified-side";
}

GenTrajectory gen_simulate(const GenModel& m, const GenState& initial,
                           const SimulationOptions& opt) {
    initial.validate();
    GenTrajectory tr;
    tr.states.push_back(initial);
    std::vector<QualState> track{{initial.alpha(), initial.zeta00}};
    for (int k = 0; k < opt.max_steps; ++k) {
        const GenState& cur = tr.states.back();
        const double theta = gen_threshold(m, cur);
        tr.thresholds.push_back(theta);
        const GenState next = gen_step(m, cur, theta);
        const double r = sup_gap(next, cur);
        tr.states.push_back(next);
        track.push_back({next.alpha(), next.zeta00});
        if (r <= opt.tol) {
            tr.thresholds.push_back(gen_threshold(m, next));
            tr.termination = {Termination::converged, r, 0, "converged"};
            return tr;
        }
        if (static_cast<int>(track.size()) >= opt.window && k % 8 == 0) {
            if (auto p = detect_oscillation(track, opt.window, opt.tol, opt.max_period)) {
                tr.thresholds.push_back(gen_threshold(m, next));
                tr.termination = {Termination::oscillating, r, *p,
                                  "period-" + std::to_string(*p) + " cycle"};
                return tr;
            }
        }
    }
    tr.thresholds.push_back(gen_threshold(m, tr.states.back()));
    tr.termination = {Termination::max_steps,
                      sup_gap(tr.states.back(), tr.states[tr.states.size() - 2]), 0,
                      "step limit reached"};
    return tr;
}

GenComparison gen_equilibrium(const GenModel& m, GenVariant variant, int grid) {
    m.validate();
    const bool unq = variant == GenVariant::unqualified_side;
    if (unq && !(m.g11 == m.g10 && !(m.g01 == m.g00)))
        throw ModelError("unqualified-side variant needs g11 = g10 and g01 != g00");
    if (!unq && !(m.g01 == m.g00 && !(m.g11 == m.g10)))
        throw ModelError("qualified-side variant needs g01 = g00 and g11 != g10");
    grid = std::max(grid, 5);

    GenComparison r;
    r.variant = variant;
    const TransitionMatrix& t = m.transitions;
    const double amin = std::min({t.t00, t.t01, t.t10, t.t11});
    const double amax = std::max({t.t00, t.t01, t.t10, t.t11});

    auto residual = [&](double alpha, double u) {
        const GenState s = reduced_state(variant, alpha, u);
        const GenState n = gen_step(m, s, gen_threshold(m, s));
        return std::pair{n.alpha() - alpha, free_coordinate(variant, n) - free_coordinate(variant, s)};
    };
    auto node = [&](int i, double lo, double hi) { return lo + (hi - lo) * i / (grid - 1); };
    std::vector<double> ra(static_cast<std::size_t>(grid * grid)), rz(ra.size());
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            auto [x, y] = residual(node(i, amin, amax), node(j, 0.0, 1.0));
            ra[static_cast<std::size_t>(i * grid + j)] = x;
            rz[static_cast<std::size_t>(i * grid + j)] = y;
        }
    std::vector<std::pair<double, double>> roots;
    for (int i = 0; i + 1 < grid; ++i)
        for (int j = 0; j + 1 < grid; ++j) {
            double a0 = kInf, a1 = -kInf, z0 = kInf, z1 = -kInf;
            for (int di : {0, 1})
                for (int dj : {0, 1}) {
                    const auto k = static_cast<std::size_t>((i + di) * grid + j + dj);
                    a0 = std::min(a0, ra[k]);
                    a1 = std::max(a1, ra[k]);
                    z0 = std::min(z0, rz[k]);
                    z1 = std::max(z1, rz[k]);
                }
            if (!(a0 <= 0.0 && a1 >= 0.0 && z0 <= 0.0 && z1 >= 0.0)) continue;
            double x = 0.5 * (node(i, amin, amax) + node(i + 1, amin, amax));
            double y = 0.5 * (node(j, 0.0, 1.0) + node(j + 1, 0.0, 1.0));
            auto [f1, f2] = residual(x, y);
            double norm = std::max(std::abs(f1), std::abs(f2));
            for (int it = 0; it < 60 && norm > 1e-14; ++it) {
                const double h = 1e-7;
                const double xs = x + h <= amax ? h : -h;
                const double ys = y + h <= 1.0 ? h : -h;
                auto [g1, g2] = residual(x + xs, y);
                auto [k1, k2] = residual(x, y + ys);
                const double j11 = (g1 - f1) / xs, j21 = (g2 - f2) / xs;
                const double j12 = (k1 - f1) / ys, j22 = (k2 - f2) / ys;
                const double det = j11 * j22 - j12 * j21;
                if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
                const double dx = (f1 * j22 - f2 * j12) / det;
                const double dy = (j11 * f2 - j21 * f1) / det;
                bool improved = false;
                double lam = 1.0;
                for (int k = 0; k < 30; ++k, lam *= 0.5) {
                    const double nx = std::clamp(x - lam * dx, amin, amax);
                    const double ny = std::clamp(y - lam * dy, 0.0, 1.0);
                    auto [p1, p2] = residual(nx, ny);
                    const double nn = std::max(std::abs(p1), std::abs(p2));
                    if (nn < norm) {
                        x = nx;
                        y = ny;
                        f1 = p1;
                        f2 = p2;
                        norm = nn;
                        improved = true;
                        break;
                    }
                }
                if (!improved) break;
            }
            if (norm > 1e-10) continue;
            const bool dup = std::any_of(roots.begin(), roots.end(), [&](const auto& p) {
                return std::abs(p.first - x) < 1e-6 && std::abs(p.second - y) < 1e-6;
            });
            if (!dup) roots.emplace_back(x, y);
        }
    if (roots.empty()) throw NumericFailure("no equilibrium found for the joint state");
    std::sort(roots.begin(), roots.end());

    for (auto [alpha, u] : roots) {
        const GenState s0 = reduced_state(variant, alpha, u);
        GenEquilibrium e;
        e.state = gen_step(m, s0, gen_threshold(m, s0));
        e.alpha = e.state.alpha();
        e.residual = sup_gap(gen_step(m, e.state, gen_threshold(m, e.state)), e.state);
        e.feasible = unq ? e.alpha + e.state.zeta00 <= 1.0 + 1e-12
                         : e.state.zeta11 <= e.alpha + 1e-12;
        r.equilibria.push_back(e);
    }

    GroupModel base;
    base.g0 = unq ? m.g01 : m.g00;
    base.g1 = unq ? m.g11 : m.g10;
    base.transitions = t;
    Scenario bs{base, base, m.u_plus, m.u_minus};
    EquilibriumOptions eo;
    eo.diagnostics = false;
    for (const EquilibriumPoint& p : find_equilibria(bs, Constraint::unconstrained, eo).equilibria)
        r.baseline.push_back(p.state.alpha_a);

    const FeatureDistribution& plain = unq ? m.g00 : m.g10;
    const FeatureDistribution& shifted = unq ? m.g01 : m.g11;
    // shape +1: the decision-shifted density is below the other left of the crossing
    std::tie(r.crossing, r.shape) = density_crossing(plain, shifted);
    const double ra_ = (1.0 - t.t10) / t.t00, rb_ = (1.0 - t.t11) / t.t01;
    const TransitionClass cls = classify_transitions(t);
    if (unq) {
        r.ratio_bound = m.g01.pdf(r.crossing) / m.g11.pdf(r.crossing) * std::max(ra_, rb_);
        r.precondition = m.u_plus / m.u_minus > r.ratio_bound;
    } else {
        r.ratio_bound = m.g00.pdf(r.crossing) / m.g10.pdf(r.crossing) * std::min(ra_, rb_);
        r.precondition = m.u_plus / m.u_minus < r.ratio_bound;
    }
    if (r.precondition && r.baseline.size() == 1 &&
        (cls == TransitionClass::A || cls == TransitionClass::B)) {
        // the two variants predict opposite directions for the same shape and class
        int sign = cls == TransitionClass::A ? 1 : -1;
        if (!unq) sign = -sign;
        r.predicted = sign * r.shape;
        r.ordering_holds = std::all_of(r.equilibria.begin(), r.equilibria.end(), [&](const auto& e) {
            const double gap = e.alpha - r.baseline.front();
            return r.predicted > 0 ? gap > 0.0 : gap < 0.0;
        });
    }
    return r;
}

}  // namespace fairdyn
