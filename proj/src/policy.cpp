#include "fairdyn/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

namespace fairdyn {

namespace {

double support_lower(const GroupModel& g) { return std::min(g.g0.lower(), g.g1.lower()); }
double support_upper(const GroupModel& g) { return std::max(g.g0.upper(), g.g1.upper()); }

// Log-likelihood ratio, NaN where both densities vanish.
double llr_or_nan(const GroupModel& g, double x) {
    const double l1 = g.g1.log_pdf(x);
    const double l0 = g.g0.log_pdf(x);
    if (l1 == -kInf && l0 == -kInf) return kNaN;
    if (l1 == -kInf) return -kInf;
    if (l0 == -kInf) return kInf;
    return l1 - l0;
}

// Same, nudged toward the middle of the support when x sits where both vanish.
double llr_near(const GroupModel& g, double x) {
    const double lo = support_lower(g), hi = support_upper(g);
    x = std::clamp(x, lo, hi);
    double v = llr_or_nan(g, x);
    const double mid = 0.5 * (lo + hi);
    for (double f : {1e-12, 1e-9, 1e-6, 1e-3, 1e-1}) {
        if (!std::isnan(v)) break;
        v = llr_or_nan(g, x + (mid - x) * f);
    }
    return std::isnan(v) ? 0.0 : v;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Group contribution to the normalized utility derivative in the acceptance
// mass: (alpha g1 (1-c) - (1-alpha) g0 c) / P_C, evaluated at theta.
double foc_term(const GroupModel& g, double alpha, Constraint c, double theta, double cpos) {
    const double llr = llr_near(g, theta);
    if (c == Constraint::dp) {
        double gamma;
        if (alpha <= 0.0) gamma = 0.0;
        else if (alpha >= 1.0) gamma = 1.0;
        else if (llr == kInf) gamma = 1.0;
        else if (llr == -kInf) gamma = 0.0;
        else gamma = logistic(llr + std::log(alpha) - std::log1p(-alpha));
        return gamma - cpos;
    }
    if (alpha >= 1.0) return 1.0 - cpos;
    const double e = std::exp(std::min(-llr, 700.0));
    return alpha * (1.0 - cpos) - (1.0 - alpha) * cpos * e;
}

struct TailTable {
    std::vector<double> x, s0, s1;
};

TailTable make_table(const GroupModel& g, int n) {
    TailTable t;
    t.x.resize(n);
    t.s0.resize(n);
    t.s1.resize(n);
    const double lo = support_lower(g), hi = support_upper(g);
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        t.x[i] = x;
        t.s0[i] = g.g0.sf(x);
        t.s1[i] = g.g1.sf(x);
    }
    return t;
}

bool constraint_has_flat(const GroupModel& g, Constraint c) {
    if (c == Constraint::eqopt) return g.g1.has_flat_segments();
    if (c == Constraint::dp) return g.g0.has_flat_segments() && g.g1.has_flat_segments();
    return false;
}

}  // namespace

double unconstrained_threshold(const GroupModel& group, double alpha, double profile_target) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ModelError("qualification rate must lie in [0, 1]");
    if (alpha <= 0.0) return kInf;
    if (alpha >= 1.0) return -kInf;
    const double target_llr = std::log(profile_target) - std::log1p(-profile_target) -
                              std::log(alpha) + std::log1p(-alpha);

    constexpr int kScan = 33;
    const double lo = support_lower(group), hi = support_upper(group);
    std::array<double, kScan> xs{}, ls{};
    double prev = kNaN;
    for (int i = 0; i < kScan; ++i) {
        xs[i] = lo + (hi - lo) * i / (kScan - 1);
        ls[i] = llr_or_nan(group, xs[i]);
        if (std::isnan(ls[i])) continue;
        if (!std::isnan(prev) && ls[i] < prev - 1e-9 * (1.0 + std::abs(prev)))
            throw ModelError("qualification profile is not monotone: likelihood ratio ordering violated");
        prev = ls[i];
    }

    int first_valid = -1, hit = -1;
    for (int i = 0; i < kScan; ++i) {
        if (std::isnan(ls[i])) continue;
        if (first_valid < 0) first_valid = i;
        if (ls[i] >= target_llr) {
            hit = i;
            break;
        }
    }
    if (first_valid < 0) throw ModelError("x outside support");
    if (hit < 0) return kInf;
    if (hit == first_valid) return -kInf;

    // invariant: llr(a) < target <= llr(b); points with both densities zero count as reached
    double a = xs[hit - 1], b = xs[hit];
    for (int i = hit - 1; i >= 0; --i) {
        if (!std::isnan(ls[i])) {
            a = xs[i];
            break;
        }
    }
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double v = llr_or_nan(group, m);
        if (std::isnan(v) || v >= target_llr) b = m;
        else a = m;
    }
    return b;
}

double unconstrained_threshold(const Scenario& s, Group g, double alpha) {
    return unconstrained_threshold(s.group(g), alpha, s.profile_target());
}

struct ThresholdMap::Impl {
    Scenario s;
    Constraint c;
    double cpos;
    std::array<TailTable, 2> tables;
    std::array<bool, 2> flat{false, false};

    const GroupModel& group(int i) const { return i == 0 ? s.a : s.b; }

    double tail(int i, double alpha, double theta) const {
        return constraint_tail(group(i), alpha, c, theta);
    }

    // Finite threshold with constraint tail mass q, smallest on flat stretches.
    double solve_theta(int i, double alpha, double q) const {
        const TailTable& t = tables[i];
        const double w1 = c == Constraint::eqopt ? 1.0 : std::clamp(alpha, 0.0, 1.0);
        auto T = [&](std::size_t j) { return (1.0 - w1) * t.s0[j] + w1 * t.s1[j]; };
        // first table node at or below q; the tail decreases along the table
        std::size_t lo_j = 0, hi_j = t.x.size();
        while (lo_j < hi_j) {
            const std::size_t m = (lo_j + hi_j) / 2;
            if (T(m) <= q) hi_j = m;
            else lo_j = m + 1;
        }
        if (lo_j == 0 || lo_j == t.x.size()) return solve_theta_wide(i, alpha, q);
        return refine_theta(i, alpha, q, t.x[lo_j - 1], t.x[lo_j]);
    }

    // Root of tail - q on [lo, hi] with tail(lo) > q >= tail(hi).
    double refine_theta(int i, double alpha, double q, double lo, double hi) const {
        auto f = [&](double th) { return tail(i, alpha, th) - q; };
        const double flo = f(lo);
        if (flo <= 0.0) return lo;
        const double fhi = f(hi);
        if (fhi > 0.0) return hi;
        if (fhi == 0.0 && !flat[i]) return hi;
        if (flat[i]) {
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
                const double m = 0.5 * (lo + hi);
                if (m <= lo || m >= hi) break;
                if (f(m) <= 0.0) hi = m;
                else lo = m;
            }
            return hi;
        }
        std::uintmax_t iters = 200;
        auto tol = [](double l, double r) {
            return std::abs(r - l) <= 4e-16 * std::max(1.0, std::max(std::abs(l), std::abs(r)));
        };
        return boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters).second;
    }

    // Outside the tabulated range: bracket from the component quantiles.
    double solve_theta_wide(int i, double alpha, double q) const {
        const GroupModel& g = group(i);
        if (c == Constraint::eqopt || alpha >= 1.0) return g.g1.isf(q);
        if (alpha <= 0.0) return g.g0.isf(q);
        const double x0 = g.g0.isf(q), x1 = g.g1.isf(q);
        double lo = std::min(x0, x1), hi = std::max(x0, x1);
        if (!(hi > lo)) return hi;
        return refine_theta(i, alpha, q, lo, hi);
    }

    double foc(const QualState& st, double q) const {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double alpha = i == 0 ? st.alpha_a : st.alpha_b;
            const double th = solve_theta(i, alpha, q);
            acc += group(i).share * foc_term(group(i), alpha, c, th, cpos);
        }
        return acc;
    }

    // Adds each group's table-interpolated utility at masses i / n, i = 0..n.
    // q decreases as the table index grows, so one merged pass suffices.
    void coarse_utility(const QualState& st, int n, std::vector<double>& u) const {
        u.assign(n + 1, 0.0);
        for (int g = 0; g < 2; ++g) {
            const double alpha = g == 0 ? st.alpha_a : st.alpha_b;
            const TailTable& t = tables[g];
            auto T = [&](std::size_t j) {
                return c == Constraint::eqopt ? t.s1[j] : (1.0 - alpha) * t.s0[j] + alpha * t.s1[j];
            };
            const std::size_t m = t.s0.size();
            const double w_share = group(g).share;
            std::size_t j = 0;
            for (int i = n; i >= 0; --i) {
                const double q = static_cast<double>(i) / n;
                while (j + 1 < m && T(j + 1) >= q) ++j;
                double s0, s1;
                if (j + 1 >= m || q >= T(j)) {
                    s0 = t.s0[j];
                    s1 = t.s1[j];
                } else {
                    const double tl = T(j), th = T(j + 1);
                    const double w = tl > th ? (tl - q) / (tl - th) : 0.0;
                    s0 = t.s0[j] + w * (t.s0[j + 1] - t.s0[j]);
                    s1 = t.s1[j] + w * (t.s1[j + 1] - t.s1[j]);
                }
                u[i] += w_share * (alpha * s.u_plus * s1 - (1.0 - alpha) * s.u_minus * s0);
            }
        }
    }

    ThresholdPair pair_at(const QualState& st, double q) const {
        ThresholdPair p;
        p.constraint = c;
        p.acceptance_mass = q;
        p.flat_segment = flat[0] || flat[1];
        if (q <= 0.0) {
            p.theta_a = p.theta_b = kInf;
            p.boundary = true;
        } else if (q >= 1.0) {
            p.theta_a = p.theta_b = -kInf;
            p.boundary = true;
        } else {
            p.theta_a = solve_theta(0, st.alpha_a, q);
            p.theta_b = solve_theta(1, st.alpha_b, q);
        }
        p.fairness_residual =
            std::abs(tail(0, st.alpha_a, p.theta_a) - tail(1, st.alpha_b, p.theta_b));
        p.foc_residual = p.boundary ? 0.0 : foc(st, q);
        return p;
    }

    ThresholdPair unconstrained(const QualState& st) const {
        ThresholdPair p;
        p.constraint = Constraint::unconstrained;
        p.theta_a = unconstrained_threshold(s.a, st.alpha_a, cpos);
        p.theta_b = unconstrained_threshold(s.b, st.alpha_b, cpos);
        p.boundary = std::isinf(p.theta_a) && std::isinf(p.theta_b);
        p.foc_residual = fair_policy_residual(s, st, p).first;
        p.local_optima = 1;
        return p;
    }

    ThresholdPair solve(const QualState& st) const {
        if (!(st.alpha_a >= 0.0 && st.alpha_a <= 1.0 && st.alpha_b >= 0.0 && st.alpha_b <= 1.0))
            throw ModelError("qualification rates must lie in [0, 1]");
        if (c == Constraint::unconstrained) return unconstrained(st);

        constexpr int n = kCoarsePoints;
        std::vector<double> u;
        coarse_utility(st, n, u);
        int best = 0;
        for (int i = 0; i <= n; ++i)
            if (u[i] > u[best]) best = i;
        int local = 0;
        for (int i = 0; i <= n; ++i) {
            const double tol = 1e-12 * (1.0 + std::abs(u[i]));
            const bool left_ok = i == 0 || u[i] > u[i - 1] + tol;
            const bool right_ok = i == n || u[i] >= u[i + 1] - tol;
            if (left_ok && right_ok) ++local;
        }

        double step = 1.0 / n;
        double ql = std::max(0, best - 1) * step, qr = std::min(n, best + 1) * step;
        double fl = foc(st, ql), fr = foc(st, qr);
        double grow = step;
        while (fl < 0.0 && ql > 0.0) {
            qr = ql;
            fr = fl;
            grow *= 2.0;
            ql = std::max(0.0, ql - grow);
            fl = foc(st, ql);
        }
        while (fr > 0.0 && qr < 1.0) {
            ql = qr;
            fl = fr;
            grow *= 2.0;
            qr = std::min(1.0, qr + grow);
            fr = foc(st, qr);
        }

        double qstar;
        if (fl == 0.0) qstar = ql;
        else if (fr == 0.0) qstar = qr;
        else if (fl < 0.0) qstar = 0.0;
        else if (fr > 0.0) qstar = 1.0;
        else {
            std::uintmax_t iters = 200;
            auto tol = [](double l, double r) {
                return std::abs(r - l) <= 4e-16 * std::max(std::abs(l), std::abs(r));
            };
            auto f = [&](double q) { return foc(st, q); };
            auto r = boost::math::tools::toms748_solve(f, ql, qr, fl, fr, tol, iters);
            qstar = 0.5 * (r.first + r.second);
        }
        ThresholdPair p = pair_at(st, qstar);
        p.local_optima = std::max(local, 1);
        return p;
    }
};

ThresholdMap::ThresholdMap(const Scenario& s, Constraint c) {
    auto impl = std::make_shared<Impl>();
    impl->s = s;
    impl->c = c;
    impl->cpos = s.profile_target();
    if (c != Constraint::unconstrained) {
        impl->tables[0] = make_table(s.a, kTablePoints);
        impl->tables[1] = make_table(s.b, kTablePoints);
        impl->flat[0] = constraint_has_flat(s.a, c);
        impl->flat[1] = constraint_has_flat(s.b, c);
    }
    impl_ = std::move(impl);
}

ThresholdPair ThresholdMap::operator()(const QualState& state) const { return impl_->solve(state); }

ThresholdPair ThresholdMap::at_mass(const QualState& state, double q) const {
    if (impl_->c == Constraint::unconstrained)
        throw ModelError("acceptance mass is undefined for the unconstrained policy");
    return impl_->pair_at(state, q);
}

double ThresholdMap::threshold_at_mass(Group g, double alpha, double q) const {
    if (impl_->c == Constraint::unconstrained)
        throw ModelError("acceptance mass is undefined for the unconstrained policy");
    if (q <= 0.0) return kInf;
    if (q >= 1.0) return -kInf;
    return impl_->solve_theta(static_cast<int>(g), alpha, q);
}

double ThresholdMap::foc(const QualState& state, double q) const {
    if (impl_->c == Constraint::unconstrained)
        throw ModelError("acceptance mass is undefined for the unconstrained policy");
    return impl_->foc(state, q);
}

const Scenario& ThresholdMap::scenario() const { return impl_->s; }
Constraint ThresholdMap::constraint() const { return impl_->c; }

ThresholdPair fair_thresholds(const Scenario& s, const QualState& state, Constraint c) {
    return ThresholdMap(s, c)(state);
}

std::pair<double, double> fair_policy_residual(const Scenario& s, const QualState& state,
                                               const ThresholdPair& pair) {
    const double cpos = s.profile_target();
    if (pair.constraint == Constraint::unconstrained) {
        double worst = 0.0;
        for (Group g : {Group::a, Group::b}) {
            const double th = pair[g];
            if (std::isinf(th)) continue;
            const double gamma = qualification_profile(s.group(g), state[g], th);
            worst = std::max(worst, std::abs(gamma - cpos));
        }
        return {worst, 0.0};
    }
    const double gap = std::abs(constraint_tail(s.a, state.alpha_a, pair.constraint, pair.theta_a) -
                                constraint_tail(s.b, state.alpha_b, pair.constraint, pair.theta_b));
    if (std::isinf(pair.theta_a) || std::isinf(pair.theta_b)) return {0.0, gap};
    const double foc =
        s.a.share * foc_term(s.a, state.alpha_a, pair.constraint, pair.theta_a, cpos) +
        s.b.share * foc_term(s.b, state.alpha_b, pair.constraint, pair.theta_b, cpos);
    return {foc, gap};
}

PolicyFn threshold_map(const Scenario& s, Constraint c) {
    ThresholdMap m(s, c);
    return [m](const QualState& st) { return m(st); };
}

}  // namespace fairdyn
