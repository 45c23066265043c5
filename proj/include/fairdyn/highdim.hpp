#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fairdyn/model.hpp"

namespace fairdyn {

struct GaussianClass {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// One group whose class-conditional features come from an exponential
/// family: log(g1(x) / g0(x)) = <eta, xi(x)> - log_partition_diff with
/// xi(x) = (x, x x^T).
struct ExpFamilyGroup {
    Eigen::VectorXd eta_linear;
    Eigen::MatrixXd eta_quadratic;
    double log_partition_diff = 0.0;
    /// Score densities for y = 0 and y = 1, when known.
    std::optional<std::pair<FeatureDistribution, FeatureDistribution>> score_distributions;
    /// Raw class densities, when the group was built from Gaussians.
    std::optional<std::pair<GaussianClass, GaussianClass>> classes;
    TransitionMatrix transitions;
    double share = 0.5;

    int dimension() const { return static_cast<int>(eta_linear.size()); }
};

/// Natural-parameter difference and log-partition difference of two
/// Gaussian classes. With a shared covariance the score is affine and its
/// class distributions are supplied in closed form.
ExpFamilyGroup gaussian_group(const GaussianClass& c0, const GaussianClass& c1,
                              const TransitionMatrix& t = {}, double share = 0.5);

/// <eta, xi(x)>. Throws ModelError on a dimension mismatch.
double score(const ExpFamilyGroup& g, const Eigen::VectorXd& x);

/// log g1(x) - log g0(x) from the raw Gaussian densities.
double raw_log_likelihood_ratio(const ExpFamilyGroup& g, const Eigen::VectorXd& x);

/// Posterior of being qualified computed in the raw space.
double raw_qualification_profile(const ExpFamilyGroup& g, double alpha, const Eigen::VectorXd& x);

/// Draws n feature vectors of class y. Requires Gaussian classes.
std::vector<Eigen::VectorXd> sample_class(const ExpFamilyGroup& g, int y, int n,
                                          std::mt19937_64& rng);

enum class ScoreSource { automatic, sampled };

/// One-dimensional model over the score. Supplied score distributions are
/// used unless sampling is forced; sampled densities come from a 512-bin
/// histogram of both classes pooled, split by the exact score likelihood
/// ratio, so the likelihood ratio is increasing by construction.
GroupModel reduce_to_1d(const ExpFamilyGroup& g, int samples_per_class, std::uint64_t seed,
                        ScoreSource source = ScoreSource::automatic);

inline constexpr int kScoreBins = 512;
inline constexpr double kBinSmoothing = 1e-9;

}  // namespace fairdyn
