#include "fairdyn/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>

#include <boost/math/tools/toms748_solve.hpp>

namespace fairdyn {

namespace {

constexpr double kDegenerate = 1e-15;

template <class F>
double refine_root(F&& f, double lo, double hi, double flo, double fhi, double tol) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    std::uintmax_t iters = 200;
    auto stop = [tol](double l, double r) { return std::abs(r - l) <= tol; };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

QualState with(Group g, double own, double other) {
    return g == Group::a ? QualState{own, other} : QualState{other, own};
}

// Interval endpoint whose residual vanishes up to rounding, when the scan
// saw no sign change.
template <class F>
std::vector<double> endpoint_root(F&& f, const Interval& I) {
    const double flo = std::abs(f(I.lo)), fhi = std::abs(f(I.hi));
    const double best = std::min(flo, fhi);
    if (best > 1e-12) return {};
    return {flo <= fhi ? I.lo : I.hi};
}

bool is_ab(TransitionClass c) { return c == TransitionClass::A || c == TransitionClass::B; }

struct Balancer {
    const Scenario& s;
    const PolicyFn& policy;

    double residual(Group g, const QualState& st) const {
        return balanced_residual(s, g, st, policy(st));
    }

    // Rate of group g balancing its own equation with the other rate fixed.
    double psi(Group g, double other, double guess = kNaN) const {
        const Interval I = invariant_interval(s.group(g).transitions);
        if (I.width() <= kDegenerate) return I.lo;
        auto f = [&](double a) { return residual(g, with(g, a, other)); };
        const double tol = 1e-14;
        if (std::isfinite(guess)) {
            // secant from the guess; the curve is single-valued for A/B classes
            double x0 = std::clamp(guess, I.lo, I.hi);
            double x1 = std::clamp(x0 + 1e-7 * I.width(), I.lo, I.hi);
            if (x1 == x0) x0 = std::clamp(x1 - 1e-7 * I.width(), I.lo, I.hi);
            double f0 = f(x0), f1 = f(x1);
            for (int it = 0; it < 12 && f1 != f0; ++it) {
                const double x2 = std::clamp(x1 - f1 * (x1 - x0) / (f1 - f0), I.lo, I.hi);
                if (std::abs(x2 - x1) <= tol) return x2;
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = f(x1);
                if (f1 == 0.0) return x1;
            }
            double d = 1e-3 * I.width();
            for (;;) {
                const double a = std::max(I.lo, guess - d), b = std::min(I.hi, guess + d);
                const double fa = f(a), fb = f(b);
                if ((fa >= 0.0) != (fb > 0.0) || fa == 0.0 || fb == 0.0)
                    return refine_root(f, a, b, fa, fb, tol);
                if (a <= I.lo && b >= I.hi) return std::abs(fa) < std::abs(fb) ? a : b;
                d *= 8.0;
            }
        }
        const double fa = f(I.lo), fb = f(I.hi);
        if ((fa >= 0.0) == (fb > 0.0) && fa != 0.0 && fb != 0.0)
            return std::abs(fa) < std::abs(fb) ? I.lo : I.hi;
        return refine_root(f, I.lo, I.hi, fa, fb, tol);
    }

    // Every balanced rate of group g along a uniform scan of its interval.
    std::vector<double> psi_all(Group g, double other, int scan) const {
        const Interval I = invariant_interval(s.group(g).transitions);
        if (I.width() <= kDegenerate) return {I.lo};
        auto f = [&](double a) { return residual(g, with(g, a, other)); };
        std::vector<double> roots;
        double xp = I.lo, fp = f(xp);
        if (fp == 0.0) roots.push_back(xp);
        for (int i = 1; i < scan; ++i) {
            const double x = I.lo + I.width() * i / (scan - 1);
            const double fx = f(x);
            if (fx == 0.0) roots.push_back(x);
            else if (fp != 0.0 && (fp > 0.0) != (fx > 0.0))
                roots.push_back(refine_root(f, xp, x, fp, fx, 1e-14));
            xp = x;
            fp = fx;
        }
        if (roots.empty()) return endpoint_root(f, I);
        return roots;
    }

    // Crossings of the two balanced curves via F(beta) = psi_b(psi_a(beta)) - beta.
    std::vector<QualState> curve_crossings(int scan) const {
        const Interval Ib = invariant_interval(s.b.transitions);
        std::vector<double> betas;
        if (Ib.width() <= kDegenerate) {
            betas.push_back(Ib.lo);
        } else {
            const int n = std::max(scan, 2);
            std::vector<double> xb(n), fa_(n), fb_(n), F(n);
            auto extrapolate = [](const std::vector<double>& v, int j) {
                if (j == 0) return kNaN;
                if (j == 1) return v[0];
                return 2.0 * v[j - 1] - v[j - 2];
            };
            for (int j = 0; j < n; ++j) {
                xb[j] = Ib.lo + Ib.width() * j / (n - 1);
                fa_[j] = psi(Group::a, xb[j], extrapolate(fa_, j));
                fb_[j] = psi(Group::b, fa_[j], extrapolate(fb_, j));
                F[j] = fb_[j] - xb[j];
            }
            for (int j = 0; j < n; ++j) {
                if (F[j] == 0.0) {
                    betas.push_back(xb[j]);
                    continue;
                }
                if (j + 1 < n && F[j + 1] != 0.0 && (F[j] > 0.0) != (F[j + 1] > 0.0)) {
                    const double l = xb[j], r = xb[j + 1];
                    auto G = [&](double beta) {
                        const double w = (beta - l) / (r - l);
                        const double a = psi(Group::a, beta, fa_[j] + w * (fa_[j + 1] - fa_[j]));
                        return psi(Group::b, a, fb_[j] + w * (fb_[j + 1] - fb_[j])) - beta;
                    };
                    betas.push_back(refine_root(G, l, r, F[j], F[j + 1], 1e-13));
                }
            }
        }
        std::vector<QualState> out;
        for (double beta : betas) out.push_back({psi(Group::a, beta), beta});
        return out;
    }

    // Sign-change cells of both residuals on a grid, refined by damped Newton.
    std::vector<QualState> grid_crossings(int n) const {
        const Interval Ia = invariant_interval(s.a.transitions);
        const Interval Ib = invariant_interval(s.b.transitions);
        n = std::max(n, 3);
        auto node = [&](const Interval& I, int i) { return I.lo + I.width() * i / (n - 1); };
        std::vector<double> ra(n * n), rb(n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const QualState st{node(Ia, i), node(Ib, j)};
                const ThresholdPair p = policy(st);
                ra[i * n + j] = balanced_residual(s, Group::a, st, p);
                rb[i * n + j] = balanced_residual(s, Group::b, st, p);
            }
        auto eval = [&](const QualState& st) {
            const ThresholdPair p = policy(st);
            return std::pair{balanced_residual(s, Group::a, st, p),
                             balanced_residual(s, Group::b, st, p)};
        };
        auto clampst = [&](QualState st) {
            st.alpha_a = std::clamp(st.alpha_a, Ia.lo, Ia.hi);
            st.alpha_b = std::clamp(st.alpha_b, Ib.lo, Ib.hi);
            return st;
        };
        std::vector<QualState> found;
        for (int i = 0; i + 1 < n; ++i)
            for (int j = 0; j + 1 < n; ++j) {
                const int idx[4] = {i * n + j, (i + 1) * n + j, i * n + j + 1, (i + 1) * n + j + 1};
                double amin = kInf, amax = -kInf, bmin = kInf, bmax = -kInf;
                for (int k : idx) {
                    amin = std::min(amin, ra[k]);
                    amax = std::max(amax, ra[k]);
                    bmin = std::min(bmin, rb[k]);
                    bmax = std::max(bmax, rb[k]);
                }
                if (!(amin <= 0.0 && amax >= 0.0 && bmin <= 0.0 && bmax >= 0.0)) continue;
                QualState x{0.5 * (node(Ia, i) + node(Ia, i + 1)),
                            0.5 * (node(Ib, j) + node(Ib, j + 1))};
                auto [fa, fb] = eval(x);
                double norm = std::max(std::abs(fa), std::abs(fb));
                for (int it = 0; it < 60 && norm > 1e-13; ++it) {
                    const double h = 1e-7;
                    auto [fa1, fb1] = eval({x.alpha_a + h, x.alpha_b});
                    auto [fa2, fb2] = eval({x.alpha_a, x.alpha_b + h});
                    const double j11 = (fa1 - fa) / h, j12 = (fa2 - fa) / h;
                    const double j21 = (fb1 - fb) / h, j22 = (fb2 - fb) / h;
                    const double det = j11 * j22 - j12 * j21;
                    if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
                    const double da = (fa * j22 - fb * j12) / det;
                    const double db = (j11 * fb - j21 * fa) / det;
                    double lam = 1.0;
                    bool improved = false;
                    for (int k = 0; k < 30; ++k, lam *= 0.5) {
                        QualState y = clampst({x.alpha_a - lam * da, x.alpha_b - lam * db});
                        auto [ga, gb] = eval(y);
                        const double ny = std::max(std::abs(ga), std::abs(gb));
                        if (ny < norm) {
                            x = y;
                            fa = ga;
                            fb = gb;
                            norm = ny;
                            improved = true;
                            break;
                        }
                    }
                    if (!improved) break;
                }
                if (norm <= 1e-10) found.push_back(x);
            }
        return found;
    }
};

std::vector<QualState> dedupe(std::vector<QualState> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](const QualState& l, const QualState& r) {
        return l.alpha_a != r.alpha_a ? l.alpha_a < r.alpha_a : l.alpha_b < r.alpha_b;
    });
    std::vector<QualState> out;
    for (const QualState& p : pts) {
        bool dup = false;
        for (const QualState& q : out) dup = dup || sup_distance(p, q) <= tol;
        if (!dup) out.push_back(p);
    }
    return out;
}

struct GridStats {
    double max_cross = 0.0;
    double max_own = 0.0;
    QualState worst_cross, worst_own;
    double lipschitz = 0.0;
    double m0 = 0.0, m1 = 0.0;
};

GridStats grid_stats(const Scenario& s, const PolicyFn& policy, int n, double h) {
    if (n < 2) throw ModelError("derivative grid needs at least 2 nodes per axis");
    GridStats out;
    struct Eval {
        double H[2], Phi[2], G0[2], G1[2];
    };
    auto evaluate = [&](const QualState& st) {
        const ThresholdPair p = policy(st);
        const QualState nx = step(s, st, p);
        Eval e{};
        for (int g = 0; g < 2; ++g) {
            const GroupModel& m = g == 0 ? s.a : s.b;
            const double th = g == 0 ? p.theta_a : p.theta_b;
            e.H[g] = h_func(m, th);
            e.Phi[g] = g == 0 ? nx.alpha_a : nx.alpha_b;
            e.G0[g] = th == kInf ? 1.0 : th == -kInf ? 0.0 : m.g0.cdf(th);
            e.G1[g] = th == kInf ? 1.0 : th == -kInf ? 0.0 : m.g1.cdf(th);
        }
        return e;
    };
    // every state after one step lies in the box spanned by the transition entries
    auto span = [](const TransitionMatrix& t) {
        return std::pair{std::min({t.t00, t.t01, t.t10, t.t11}), std::max({t.t00, t.t01, t.t10, t.t11})};
    };
    const auto [lo_a, hi_a] = span(s.a.transitions);
    const auto [lo_b, hi_b] = span(s.b.transitions);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const QualState st{lo_a + (hi_a - lo_a) * i / (n - 1), lo_b + (hi_b - lo_b) * j / (n - 1)};
            double dPhi[2][2];
            for (int u = 0; u < 2; ++u) {
                QualState lo = st, hi = st;
                double& l = u == 0 ? lo.alpha_a : lo.alpha_b;
                double& r = u == 0 ? hi.alpha_a : hi.alpha_b;
                l = std::max(0.0, l - h);
                r = std::min(1.0, r + h);
                const double den = r - l;
                const Eval el = evaluate(lo), er = evaluate(hi);
                for (int g = 0; g < 2; ++g) {
                    const double dH = std::abs((er.H[g] - el.H[g]) / den);
                    if (u == g) {
                        if (dH > out.max_own) {
                            out.max_own = dH;
                            out.worst_own = st;
                        }
                    } else if (dH > out.max_cross) {
                        out.max_cross = dH;
                        out.worst_cross = st;
                    }
                    dPhi[g][u] = (er.Phi[g] - el.Phi[g]) / den;
                    out.m0 = std::max(out.m0, std::abs((er.G0[g] - el.G0[g]) / den));
                    out.m1 = std::max(out.m1, std::abs((er.G1[g] - el.G1[g]) / den));
                }
            }
            for (int g = 0; g < 2; ++g)
                out.lipschitz = std::max(out.lipschitz, std::abs(dPhi[g][0]) + std::abs(dPhi[g][1]));
        }
    return out;
}

UniquenessCheck uniqueness_from(const Scenario& s, const GridStats& gs) {
    const TransitionClass ca = classify_transitions(s.a.transitions);
    const TransitionClass cb = classify_transitions(s.b.transitions);
    UniquenessCheck u;
    if (ca == TransitionClass::A && cb == TransitionClass::A) {
        u.condition = "cross partials";
        u.max_partial = gs.max_cross;
        u.worst = gs.worst_cross;
    } else if (ca == TransitionClass::B && cb == TransitionClass::B) {
        u.condition = "cross and own partials";
        u.max_partial = std::max(gs.max_cross, gs.max_own);
        u.worst = gs.max_cross >= gs.max_own ? gs.worst_cross : gs.worst_own;
    } else {
        throw ModelError(std::string("uniqueness condition inapplicable: transition classes a=") +
                         to_string(ca) + ", b=" + to_string(cb));
    }
    u.holds = u.max_partial < 1.0 - 1e-6;
    u.basis = u.holds ? "grid-verified" : "violated";
    return u;
}

EquilibriumPoint finish_point(const Scenario& s, const PolicyFn& policy, const QualState& st,
                              const EquilibriumOptions& opt) {
    EquilibriumPoint e;
    e.state = st;
    e.thresholds = policy(st);
    e.balance_residual = std::max(std::abs(balanced_residual(s, Group::a, st, e.thresholds)),
                                  std::abs(balanced_residual(s, Group::b, st, e.thresholds)));
    e.step_residual = sup_distance(step(s, st, e.thresholds), st);
    if (opt.diagnostics) {
        e.spectral_radius = step_spectral_radius(s, policy, st, opt.fd_step);
        e.stable = e.spectral_radius < 1.0 - 1e-6;
    }
    return e;
}

// Roots of a group's balanced equation under the unconstrained policy, which
// ignores the other group.
std::vector<double> unconstrained_roots(const Scenario& s, Group g, int scan) {
    const GroupModel& m = s.group(g);
    const Interval I = invariant_interval(m.transitions);
    if (I.width() <= kDegenerate) return {I.lo};
    const double c = s.profile_target();
    auto f = [&](double a) {
        return 1.0 / a - 1.0 - h_func(m, unconstrained_threshold(m, a, c));
    };
    std::vector<double> roots;
    const int n = std::max(scan, 2);
    double xp = I.lo, fp = f(xp);
    if (fp == 0.0) roots.push_back(xp);
    for (int i = 1; i < n; ++i) {
        const double x = I.lo + I.width() * i / (n - 1);
        const double fx = f(x);
        if (fx == 0.0) roots.push_back(x);
        else if (fp != 0.0 && (fp > 0.0) != (fx > 0.0))
            roots.push_back(refine_root(f, xp, x, fp, fx, 1e-14));
        xp = x;
        fp = fx;
    }
    if (roots.empty()) return endpoint_root(f, I);
    return roots;
}

}  // namespace

double h_func(const GroupModel& group, double theta) {
    return (1.0 - g_ys(group, 1, theta)) / g_ys(group, 0, theta);
}

Interval h_bounds(const TransitionMatrix& t) {
    const double hmax = (1.0 - std::min(t.t10, t.t11)) / std::min(t.t00, t.t01);
    const double hmin = (1.0 - std::max(t.t10, t.t11)) / std::max(t.t00, t.t01);
    return {hmin, hmax};
}

Interval invariant_interval(const TransitionMatrix& t) {
    const Interval h = h_bounds(t);
    return {1.0 / (1.0 + h.hi), 1.0 / (1.0 + h.lo)};
}

double balanced_residual(const Scenario& s, Group g, const QualState& state,
                         const ThresholdPair& pair) {
    return 1.0 / state[g] - 1.0 - h_func(s.group(g), pair[g]);
}

BalancedFunctions balanced_functions(const Scenario& s, const PolicyFn& policy, int grid,
                                     int crossing_scan) {
    if (grid < 16) throw ModelError("balanced function grid must have at least 16 points");
    Balancer bal{s, policy};
    BalancedFunctions bf;
    bf.resolution = grid;
    const bool single_a = is_ab(classify_transitions(s.a.transitions));
    const bool single_b = is_ab(classify_transitions(s.b.transitions));
    double ga = kNaN, gb = kNaN;
    for (int i = 0; i < grid; ++i) {
        const double x = static_cast<double>(i) / (grid - 1);
        bf.grid_b.push_back(x);
        bf.grid_a.push_back(x);
        if (single_a) {
            ga = bal.psi(Group::a, x, ga);
            bf.psi_a.push_back({ga});
        } else {
            bf.psi_a.push_back(bal.psi_all(Group::a, x, crossing_scan));
        }
        if (single_b) {
            gb = bal.psi(Group::b, x, gb);
            bf.psi_b.push_back({gb});
        } else {
            bf.psi_b.push_back(bal.psi_all(Group::b, x, crossing_scan));
        }
    }
    return bf;
}

BalancedFunctions balanced_functions(const Scenario& s, Constraint c, int grid, int crossing_scan) {
    return balanced_functions(s, threshold_map(s, c), grid, crossing_scan);
}

std::vector<EquilibriumPoint> enumerate_equilibria(const Scenario& s, const PolicyFn& policy,
                                                   const EquilibriumOptions& opt) {
    Balancer bal{s, policy};
    const bool ab = is_ab(classify_transitions(s.a.transitions)) &&
                    is_ab(classify_transitions(s.b.transitions));
    std::vector<QualState> pts = ab ? bal.curve_crossings(opt.scan) : bal.grid_crossings(opt.grid2d);
    pts = dedupe(std::move(pts), 1e-6);
    if (pts.empty()) throw NumericFailure("no equilibrium found: balanced curves do not cross");
    std::vector<EquilibriumPoint> out;
    for (const QualState& p : pts) out.push_back(finish_point(s, policy, p, opt));
    return out;
}

EquilibriumReport find_equilibria(const Scenario& s, const PolicyFn& policy, Constraint label,
                                  const EquilibriumOptions& opt) {
    EquilibriumReport r;
    r.constraint = label;
    r.class_a = classify_transitions(s.a.transitions);
    r.class_b = classify_transitions(s.b.transitions);
    r.equilibria = enumerate_equilibria(s, policy, opt);
    if (opt.diagnostics) {
        const GridStats gs = grid_stats(s, policy, opt.derivative_grid, opt.fd_step);
        r.lipschitz = gs.lipschitz;
        if ((r.class_a == TransitionClass::A && r.class_b == TransitionClass::A) ||
            (r.class_a == TransitionClass::B && r.class_b == TransitionClass::B)) {
            r.uniqueness_check = uniqueness_from(s, gs);
            r.uniqueness = r.uniqueness_check.holds ? "grid-verified" : "not-established";
        }
    }
    return r;
}

EquilibriumReport find_equilibria(const Scenario& s, Constraint c, const EquilibriumOptions& opt) {
    if (c != Constraint::unconstrained) return find_equilibria(s, threshold_map(s, c), c, opt);
    PolicyFn policy = threshold_map(s, c);
    EquilibriumReport r;
    r.constraint = c;
    r.class_a = classify_transitions(s.a.transitions);
    r.class_b = classify_transitions(s.b.transitions);
    const std::vector<double> ra = unconstrained_roots(s, Group::a, opt.scan);
    const std::vector<double> rb = unconstrained_roots(s, Group::b, opt.scan);
    std::vector<QualState> pts;
    for (double a : ra)
        for (double b : rb) pts.push_back({a, b});
    pts = dedupe(std::move(pts), 1e-6);
    if (pts.empty()) throw NumericFailure("no equilibrium found: balanced curves do not cross");
    for (const QualState& p : pts) r.equilibria.push_back(finish_point(s, policy, p, opt));
    if (opt.diagnostics) {
        const GridStats gs = grid_stats(s, policy, opt.derivative_grid, opt.fd_step);
        r.lipschitz = gs.lipschitz;
        if ((r.class_a == TransitionClass::A && r.class_b == TransitionClass::A) ||
            (r.class_a == TransitionClass::B && r.class_b == TransitionClass::B)) {
            r.uniqueness_check = uniqueness_from(s, gs);
            r.uniqueness = r.uniqueness_check.holds ? "grid-verified" : "not-established";
        }
    }
    return r;
}

UniquenessCheck check_uniqueness(const Scenario& s, const PolicyFn& policy, int grid,
                                 double fd_step) {
    // classes first, so inapplicable inputs fail before the grid work
    const TransitionClass ca = classify_transitions(s.a.transitions);
    const TransitionClass cb = classify_transitions(s.b.transitions);
    if (!((ca == TransitionClass::A && cb == TransitionClass::A) ||
          (ca == TransitionClass::B && cb == TransitionClass::B)))
        throw ModelError(std::string("uniqueness condition inapplicable: transition classes a=") +
                         to_string(ca) + ", b=" + to_string(cb));
    return uniqueness_from(s, grid_stats(s, policy, grid, fd_step));
}

UniquenessCheck check_uniqueness(const Scenario& s, Constraint c, int grid, double fd_step) {
    return check_uniqueness(s, threshold_map(s, c), grid, fd_step);
}

double lipschitz_estimate(const Scenario& s, const PolicyFn& policy, int grid, double fd_step) {
    return grid_stats(s, policy, grid, fd_step).lipschitz;
}

double lipschitz_estimate(const Scenario& s, Constraint c, int grid, double fd_step) {
    return lipschitz_estimate(s, threshold_map(s, c), grid, fd_step);
}

double step_spectral_radius(const Scenario& s, const PolicyFn& policy, const QualState& st,
                            double h) {
    double J[2][2];
    for (int u = 0; u < 2; ++u) {
        QualState lo = st, hi = st;
        double& l = u == 0 ? lo.alpha_a : lo.alpha_b;
        double& r = u == 0 ? hi.alpha_a : hi.alpha_b;
        l = std::max(0.0, l - h);
        r = std::min(1.0, r + h);
        const double den = r - l;
        const QualState pl = step(s, lo, policy(lo)), pr = step(s, hi, policy(hi));
        J[0][u] = (pr.alpha_a - pl.alpha_a) / den;
        J[1][u] = (pr.alpha_b - pl.alpha_b) / den;
    }
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr / 4.0 - det));
    return std::max(std::abs(tr / 2.0 + disc), std::abs(tr / 2.0 - disc));
}

std::vector<bool> stability_flags(const Scenario& s, Constraint c,
                                  const std::vector<EquilibriumPoint>& eq, double fd_step) {
    PolicyFn policy = threshold_map(s, c);
    std::vector<bool> out;
    for (const EquilibriumPoint& e : eq)
        out.push_back(step_spectral_radius(s, policy, e.state, fd_step) < 1.0 - 1e-6);
    return out;
}

bool GapBound::satisfied_by(const Scenario& s) const {
    auto ok = [](const TransitionMatrix& t, double eps) {
        return std::abs(t.t01 - t.t00) < eps && std::abs(t.t11 - t.t10) < eps;
    };
    return ok(s.a.transitions, eps_a) && ok(s.b.transitions, eps_b);
}

GapBound uniqueness_gap_bound(const Scenario& s, Constraint c, int grid, double fd_step) {
    const GridStats gs = grid_stats(s, threshold_map(s, c), grid, fd_step);
    GapBound out;
    out.m0 = gs.m0;
    out.m1 = gs.m1;
    auto eps = [&](const TransitionMatrix& t) {
        switch (classify_transitions(t)) {
        case TransitionClass::A: return t.t01 * t.t01 / (gs.m1 * t.t00 + gs.m0 * (1.0 - t.t11));
        case TransitionClass::B: return t.t00 * t.t00 / (gs.m1 * t.t01 + gs.m0 * (1.0 - t.t10));
        default: break;
        }
        throw ModelError("transition gap bound needs class A or B transitions");
    };
    out.eps_a = eps(s.a.transitions);
    out.eps_b = eps(s.b.transitions);
    return out;
}

void write_equilibria_csv(std::ostream& os, const std::vector<EquilibriumReport>& reports) {
    os << "constraint,index,count,alphaA,alphaB,thetaA,thetaB,balance_residual,step_residual,"
          "spectral_radius,stable,uniqueness,lipschitz,class_a,class_b\n";
    for (const EquilibriumReport& r : reports) {
        for (std::size_t i = 0; i < r.equilibria.size(); ++i) {
            const EquilibriumPoint& e = r.equilibria[i];
            os << to_string(r.constraint) << ',' << i << ',' << r.equilibria.size() << ','
               << format_real(e.state.alpha_a) << ',' << format_real(e.state.alpha_b) << ','
               << format_real(e.thresholds.theta_a) << ',' << format_real(e.thresholds.theta_b)
               << ',' << format_real(e.balance_residual) << ',' << format_real(e.step_residual)
               << ',' << format_real(e.spectral_radius) << ',' << (e.stable ? "true" : "false")
               << ',' << r.uniqueness << ',' << format_real(r.lipschitz) << ','
               << to_string(r.class_a) << ',' << to_string(r.class_b) << '\n';
        }
    }
}

void write_balanced_csv(std::ostream& os, const BalancedFunctions& bf) {
    os << "curve,other_rate,rate\n";
    for (std::size_t i = 0; i < bf.grid_b.size(); ++i)
        for (double v : bf.psi_a[i])
            os << "psi_a," << format_real(bf.grid_b[i]) << ',' << format_real(v) << '\n';
    for (std::size_t i = 0; i < bf.grid_a.size(); ++i)
        for (double v : bf.psi_b[i])
            os << "psi_b," << format_real(bf.grid_a[i]) << ',' << format_real(v) << '\n';
}

}  // namespace fairdyn
