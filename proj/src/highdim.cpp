#include "fairdyn/highdim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fairdyn {

namespace {

void check_class(const GaussianClass& c, const char* name) {
    const Eigen::Index d = c.mean.size();
    if (d == 0) throw ModelError(std::string(name) + ".mean is empty");
    if (c.cov.rows() != d || c.cov.cols() != d)
        throw ModelError(std::string(name) + ".cov must be " + std::to_string(d) + "x" +
                         std::to_string(d));
    if (!c.cov.isApprox(c.cov.transpose(), 1e-12))
        throw ModelError(std::string(name) + ".cov must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success)
        throw ModelError(std::string(name) + ".cov must be positive definite");
}

double log_density(const GaussianClass& c, const Eigen::VectorXd& x) {
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    const Eigen::VectorXd z = llt.matrixL().solve(x - c.mean);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double d = static_cast<double>(x.size());
    return -0.5 * (z.squaredNorm() + logdet + d * std::log(2.0 * std::numbers::pi));
}

}  // namespace

ExpFamilyGroup gaussian_group(const GaussianClass& c0, const GaussianClass& c1,
                              const TransitionMatrix& t, double share) {
    check_class(c0, "class0");
    check_class(c1, "class1");
    if (c0.mean.size() != c1.mean.size()) throw ModelError("class dimensions differ");
    const Eigen::MatrixXd p0 = c0.cov.inverse();
    const Eigen::MatrixXd p1 = c1.cov.inverse();
    ExpFamilyGroup g;
    g.eta_linear = p1 * c1.mean - p0 * c0.mean;
    g.eta_quadratic = -0.5 * p1 + 0.5 * p0;
    // the base measure carries the covariance determinant, so it joins the partition term
    g.log_partition_diff = 0.5 * (c1.mean.dot(p1 * c1.mean) - c0.mean.dot(p0 * c0.mean)) +
                           0.5 * (std::log(c1.cov.determinant()) - std::log(c0.cov.determinant()));
    g.classes = std::pair{c0, c1};
    g.transitions = t;
    g.share = share;
    if (c0.cov.isApprox(c1.cov, 1e-12)) {
        const Eigen::VectorXd& w = g.eta_linear;
        const double sd = std::sqrt(w.dot(c0.cov * w));
        if (sd > 0.0) {
            g.score_distributions = std::pair{FeatureDistribution::gaussian(w.dot(c0.mean), sd),
                                              FeatureDistribution::gaussian(w.dot(c1.mean), sd)};
        }
    }
    return g;
}

double score(const ExpFamilyGroup& g, const Eigen::VectorXd& x) {
    if (x.size() != g.eta_linear.size())
        throw ModelError("feature dimension " + std::to_string(x.size()) + " does not match " +
                         std::to_string(g.eta_linear.size()));
    double s = g.eta_linear.dot(x);
    if (g.eta_quadratic.size() > 0) s += x.dot(g.eta_quadratic * x);
    return s;
}

double raw_log_likelihood_ratio(const ExpFamilyGroup& g, const Eigen::VectorXd& x) {
    if (!g.classes) throw ModelError("raw densities unavailable for this group");
    if (x.size() != g.eta_linear.size()) throw ModelError("feature dimension mismatch");
    return log_density(g.classes->second, x) - log_density(g.classes->first, x);
}

double raw_qualification_profile(const ExpFamilyGroup& g, double alpha, const Eigen::VectorXd& x) {
    const double z = raw_log_likelihood_ratio(g, x) + std::log(alpha) - std::log1p(-alpha);
    return 1.0 / (1.0 + std::exp(-z));
}

std::vector<Eigen::VectorXd> sample_class(const ExpFamilyGroup& g, int y, int n,
                                          std::mt19937_64& rng) {
    if (!g.classes) throw ModelError("sampling needs raw Gaussian classes");
    const GaussianClass& c = y == 0 ? g.classes->first : g.classes->second;
    const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(c.cov).matrixL();
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(n));
    Eigen::VectorXd z(c.mean.size());
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = nd(rng);
        out.push_back(c.mean + L * z);
    }
    return out;
}

GroupModel reduce_to_1d(const ExpFamilyGroup& g, int samples_per_class, std::uint64_t seed,
                        ScoreSource source) {
    GroupModel m;
    m.transitions = g.transitions;
    m.share = g.share;
    if (source == ScoreSource::automatic && g.score_distributions) {
        m.g0 = g.score_distributions->first;
        m.g1 = g.score_distributions->second;
        return m;
    }
    if (samples_per_class < 10000) throw ModelError("need at least 10000 samples per class");
    std::mt19937_64 rng(seed);
    std::vector<double> t;
    t.reserve(2 * static_cast<std::size_t>(samples_per_class));
    for (int y : {0, 1})
        for (const Eigen::VectorXd& x : sample_class(g, y, samples_per_class, rng))
            t.push_back(score(g, x));
    const auto [lo_it, hi_it] = std::minmax_element(t.begin(), t.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        // indistinguishable classes: one flat bin around the common score
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 1e-9 * std::max(1.0, hi - lo);
    lo -= pad;
    hi += pad;
    const double width = (hi - lo) / kScoreBins;
    std::vector<double> counts(kScoreBins, kBinSmoothing);
    for (double v : t) {
        const int k = std::clamp(static_cast<int>((v - lo) / width), 0, kScoreBins - 1);
        counts[static_cast<std::size_t>(k)] += 1.0;
    }
    std::vector<double> grid(kScoreBins), f0(kScoreBins), f1(kScoreBins);
    const double total = static_cast<double>(t.size());
    for (int k = 0; k < kScoreBins; ++k) {
        const double x = lo + (k + 0.5) * width;
        const double mix = counts[static_cast<std::size_t>(k)] / (total * width);
        // pooled density is (g0 + g1) / 2 and g1 / g0 = exp(x - A)
        const double r = x - g.log_partition_diff;
        grid[static_cast<std::size_t>(k)] = x;
        f1[static_cast<std::size_t>(k)] = 2.0 * mix / (1.0 + std::exp(-r));
        f0[static_cast<std::size_t>(k)] = 2.0 * mix / (1.0 + std::exp(r));
    }
    m.g0 = FeatureDistribution::tabulated(grid, f0);
    m.g1 = FeatureDistribution::tabulated(std::move(grid), f1);
    return m;
}

}  // namespace fairdyn
