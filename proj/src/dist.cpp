#include "fairdyn/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace fairdyn {

struct FeatureDistribution::Table {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> input;  // density as supplied, before normalization
    std::vector<double> head;  // mass on [x0, x_i]
    std::vector<double> tail;  // mass on [x_i, x_n]
    double mean = 0.0;
    double var = 0.0;
};

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
// double-precision evaluation; the default promotes to long double
using Pol = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Offset t into a segment of width w whose density runs linearly from f0 to f1
// such that the mass on [0, t] equals m.
double solve_segment(double f0, double f1, double w, double m) {
    if (m <= 0.0) return 0.0;
    const double a = 0.5 * (f1 - f0) / w;
    const double disc = std::max(0.0, f0 * f0 + 4.0 * a * m);
    const double denom = f0 + std::sqrt(disc);
    if (denom <= 0.0) return w;
    return std::clamp(2.0 * m / denom, 0.0, w);
}

double segment_mass(double f0, double f1, double t, double w) {
    return f0 * t + 0.5 * (f1 - f0) * t * t / w;
}

}  // namespace

FeatureDistribution FeatureDistribution::gaussian(double mean, double stddev) {
    if (!std::isfinite(mean) || !std::isfinite(stddev) || stddev <= 0.0)
        throw ModelError("gaussian: mean must be finite and stddev positive");
    FeatureDistribution d;
    d.kind_ = DistKind::gaussian;
    d.p0_ = mean;
    d.p1_ = stddev;
    d.lower_ = mean - kClampSigmas * stddev;
    d.upper_ = mean + kClampSigmas * stddev;
    return d;
}

FeatureDistribution FeatureDistribution::beta(double shape_a, double shape_b) {
    if (!std::isfinite(shape_a) || !std::isfinite(shape_b) || shape_a <= 0.0 || shape_b <= 0.0)
        throw ModelError("beta: shapes must be positive and finite");
    FeatureDistribution d;
    d.kind_ = DistKind::beta;
    d.p0_ = shape_a;
    d.p1_ = shape_b;
    d.log_beta_ = std::lgamma(shape_a) + std::lgamma(shape_b) - std::lgamma(shape_a + shape_b);
    d.lower_ = 0.0;
    d.upper_ = 1.0;
    return d;
}

FeatureDistribution FeatureDistribution::tabulated(std::vector<double> grid,
                                                   std::vector<double> density) {
    if (grid.size() != density.size())
        throw ModelError("tabulated: grid and density lengths differ");
    if (grid.size() < 2) throw ModelError("tabulated: need at least two grid points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw ModelError("tabulated: grid values must be finite");
        if (!std::isfinite(density[i]) || density[i] < 0.0)
            throw ModelError("tabulated: density values must be finite and non-negative");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ModelError("tabulated: grid must be strictly increasing");
    }
    const std::size_t n = grid.size();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        total += 0.5 * (density[i] + density[i + 1]) * (grid[i + 1] - grid[i]);
    if (!(total > 0.0)) throw ModelError("tabulated: density has zero mass");

    auto t = std::make_shared<Table>();
    t->input = density;
    for (double& v : density) v /= total;
    t->x = std::move(grid);
    t->f = std::move(density);
    t->head.assign(n, 0.0);
    t->tail.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        t->head[i + 1] = t->head[i] + 0.5 * (t->f[i] + t->f[i + 1]) * (t->x[i + 1] - t->x[i]);
    for (std::size_t i = n - 1; i-- > 0;)
        t->tail[i] = t->tail[i + 1] + 0.5 * (t->f[i] + t->f[i + 1]) * (t->x[i + 1] - t->x[i]);
    t->head[n - 1] = 1.0;
    t->tail[0] = 1.0;

    // Simpson's rule is exact for x f(x) and x^2 f(x) on a linear segment.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x0 = t->x[i], x1 = t->x[i + 1], xm = 0.5 * (x0 + x1);
        const double f0 = t->f[i], f1 = t->f[i + 1], fm = 0.5 * (f0 + f1);
        const double w = (x1 - x0) / 6.0;
        m1 += w * (x0 * f0 + 4.0 * xm * fm + x1 * f1);
        m2 += w * (x0 * x0 * f0 + 4.0 * xm * xm * fm + x1 * x1 * f1);
    }
    t->mean = m1;
    t->var = std::max(0.0, m2 - m1 * m1);

    FeatureDistribution d;
    d.kind_ = DistKind::tabulated;
    d.lower_ = t->x.front();
    d.upper_ = t->x.back();
    d.table_ = std::move(t);
    return d;
}

double FeatureDistribution::pdf(double x) const {
    switch (kind_) {
    case DistKind::gaussian: {
        const double z = (x - p0_) / p1_;
        return std::exp(-0.5 * z * z - kLogSqrt2Pi) / p1_;
    }
    case DistKind::beta: {
        if (x < 0.0 || x > 1.0) return 0.0;
        const double lb = log_beta_;
        return std::pow(x, p0_ - 1.0) * std::pow(1.0 - x, p1_ - 1.0) * std::exp(-lb);
    }
    case DistKind::tabulated: {
        const auto& xs = table_->x;
        if (x < xs.front() || x > xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.end()) return table_->f.back();
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return table_->f[i] + t * (table_->f[i + 1] - table_->f[i]);
    }
    }
    return 0.0;
}

double FeatureDistribution::log_pdf(double x) const {
    if (kind_ == DistKind::gaussian) {
        const double z = (x - p0_) / p1_;
        return -0.5 * z * z - kLogSqrt2Pi - std::log(p1_);
    }
    if (kind_ == DistKind::beta) {
        if (x < 0.0 || x > 1.0) return -kInf;
        const double lb = log_beta_;
        const double lx = (p0_ == 1.0) ? 0.0 : (p0_ - 1.0) * std::log(x);
        const double ly = (p1_ == 1.0) ? 0.0 : (p1_ - 1.0) * std::log1p(-x);
        return lx + ly - lb;
    }
    const double v = pdf(x);
    return v > 0.0 ? std::log(v) : -kInf;
}

double FeatureDistribution::cdf(double x) const {
    switch (kind_) {
    case DistKind::gaussian:
        return 0.5 * std::erfc(-(x - p0_) / (p1_ * kSqrt2));
    case DistKind::beta:
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return boost::math::ibeta(p0_, p1_, x, Pol());
    case DistKind::tabulated: {
        const auto& xs = table_->x;
        if (x <= xs.front()) return 0.0;
        if (x >= xs.back()) return 1.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double w = xs[i + 1] - xs[i];
        return std::min(1.0, table_->head[i] +
                                 segment_mass(table_->f[i], table_->f[i + 1], x - xs[i], w));
    }
    }
    return 0.0;
}

double FeatureDistribution::sf(double x) const {
    switch (kind_) {
    case DistKind::gaussian:
        return 0.5 * std::erfc((x - p0_) / (p1_ * kSqrt2));
    case DistKind::beta:
        if (x <= 0.0) return 1.0;
        if (x >= 1.0) return 0.0;
        return boost::math::ibetac(p0_, p1_, x, Pol());
    case DistKind::tabulated: {
        const auto& xs = table_->x;
        if (x <= xs.front()) return 1.0;
        if (x >= xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double w = xs[i + 1] - xs[i];
        const double f0 = table_->f[i], f1 = table_->f[i + 1];
        const double seg = 0.5 * (f0 + f1) * w;
        const double rest = seg - segment_mass(f0, f1, x - xs[i], w);
        return std::clamp(table_->tail[i + 1] + rest, 0.0, 1.0);
    }
    }
    return 0.0;
}

double FeatureDistribution::quantile(double p) const {
    if (!(p > 0.0)) return lower_;
    if (p >= 1.0) {
        if (kind_ != DistKind::tabulated) return upper_;
    }
    switch (kind_) {
    case DistKind::gaussian:
        return p0_ - p1_ * kSqrt2 * boost::math::erfc_inv(2.0 * p, Pol());
    case DistKind::beta:
        return boost::math::ibeta_inv(p0_, p1_, p, Pol());
    case DistKind::tabulated: {
        const auto& h = table_->head;
        auto it = std::lower_bound(h.begin(), h.end(), std::min(p, 1.0));
        std::size_t i = static_cast<std::size_t>(it - h.begin());
        if (i == 0) return table_->x.front();
        const double w = table_->x[i] - table_->x[i - 1];
        return table_->x[i - 1] +
               solve_segment(table_->f[i - 1], table_->f[i], w, p - h[i - 1]);
    }
    }
    return lower_;
}

double FeatureDistribution::isf(double q) const {
    if (!(q > 0.0)) {
        if (kind_ != DistKind::tabulated) return upper_;
    }
    if (q >= 1.0) return lower_;
    switch (kind_) {
    case DistKind::gaussian:
        return p0_ + p1_ * kSqrt2 * boost::math::erfc_inv(2.0 * q, Pol());
    case DistKind::beta:
        return boost::math::ibetac_inv(p0_, p1_, q, Pol());
    case DistKind::tabulated: {
        // first index whose remaining tail mass is <= q
        const auto& tl = table_->tail;
        std::size_t lo = 0, hi = tl.size() - 1;
        const double target = std::max(q, 0.0);
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (tl[mid] <= target) hi = mid;
            else lo = mid + 1;
        }
        if (lo == 0) return table_->x.front();
        const std::size_t i = lo;
        const double w = table_->x[i] - table_->x[i - 1];
        return table_->x[i - 1] +
               solve_segment(table_->f[i - 1], table_->f[i], w, tl[i - 1] - target);
    }
    }
    return upper_;
}

double FeatureDistribution::mean() const {
    switch (kind_) {
    case DistKind::gaussian: return p0_;
    case DistKind::beta: return p0_ / (p0_ + p1_);
    case DistKind::tabulated: return table_->mean;
    }
    return 0.0;
}

double FeatureDistribution::stddev() const {
    switch (kind_) {
    case DistKind::gaussian: return p1_;
    case DistKind::beta: {
        const double s = p0_ + p1_;
        return std::sqrt(p0_ * p1_ / (s * s * (s + 1.0)));
    }
    case DistKind::tabulated: return std::sqrt(table_->var);
    }
    return 0.0;
}

const std::vector<double>& FeatureDistribution::grid() const {
    static const std::vector<double> empty;
    return table_ ? table_->x : empty;
}

const std::vector<double>& FeatureDistribution::density() const {
    static const std::vector<double> empty;
    return table_ ? table_->f : empty;
}

const std::vector<double>& FeatureDistribution::input_density() const {
    static const std::vector<double> empty;
    return table_ ? table_->input : empty;
}

bool FeatureDistribution::has_flat_segments() const {
    if (kind_ != DistKind::tabulated) return false;
    const auto& f = table_->f;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        if (f[i] == 0.0 && f[i + 1] == 0.0 && table_->head[i] > 0.0 && table_->tail[i + 1] > 0.0)
            return true;
    return false;
}

std::string FeatureDistribution::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case DistKind::gaussian: os << "gaussian(mean=" << p0_ << ", stddev=" << p1_ << ")"; break;
    case DistKind::beta: os << "beta(a=" << p0_ << ", b=" << p1_ << ")"; break;
    case DistKind::tabulated:
        os << "tabulated(" << table_->x.size() << " points on [" << lower_ << ", " << upper_
           << "])";
        break;
    }
    return os.str();
}

bool operator==(const FeatureDistribution& l, const FeatureDistribution& r) {
    if (l.kind_ != r.kind_) return false;
    if (l.kind_ != DistKind::tabulated) return l.p0_ == r.p0_ && l.p1_ == r.p1_;
    return l.table_ == r.table_ || (l.table_->x == r.table_->x && l.table_->input == r.table_->input);
}

MlrCheck verify_mlr(const FeatureDistribution& g0, const FeatureDistribution& g1,
                    int grid_size) {
    if (grid_size < 3) throw ModelError("verify_mlr: grid_size must be at least 3");
    constexpr double kFloor = 1e-12;
    const double lo = std::max(g0.lower(), g1.lower());
    const double hi = std::min(g0.upper(), g1.upper());
    if (!(lo < hi)) throw ModelError("verify_mlr: supports do not overlap");

    auto usable = [&](double x) {
        const double a = g0.pdf(x), b = g1.pdf(x);
        return a > kFloor && b > kFloor && std::isfinite(a) && std::isfinite(b);
    };
    // Locate the effective common support on a probe grid first.
    const int probe = std::max(grid_size, 4096);
    double elo = kNaN, ehi = kNaN;
    for (int i = 0; i < probe; ++i) {
        const double x = lo + (hi - lo) * i / (probe - 1);
        if (usable(x)) {
            if (std::isnan(elo)) elo = x;
            ehi = x;
        }
    }
    if (std::isnan(elo) || !(elo < ehi))
        throw ModelError("verify_mlr: empty common support (densities above 1e-12)");

    MlrCheck out;
    out.holds = true;
    double prev = kNaN;
    for (int i = 0; i < grid_size; ++i) {
        const double x = elo + (ehi - elo) * i / (grid_size - 1);
        if (!usable(x)) continue;
        const double r = g1.log_pdf(x) - g0.log_pdf(x);
        if (!std::isnan(prev) && !(r > prev)) {
            out.holds = false;
            out.first_violation = x;
            return out;
        }
        prev = r;
    }
    return out;
}

}  // namespace fairdyn
