#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairdyn/common.hpp"

namespace fairdyn {

enum class DistKind { gaussian, beta, tabulated };

/// One-dimensional feature density with CDF and quantile.
///
/// Values are immutable after construction and cheap to copy; tabulated
/// data is shared between copies.
class FeatureDistribution {
public:
    /// Unbounded supports are clamped to mean +/- this many standard deviations.
    static constexpr double kClampSigmas = 12.0;

    /// Standard normal.
    FeatureDistribution() = default;

    static FeatureDistribution gaussian(double mean, double stddev);
    static FeatureDistribution beta(double shape_a, double shape_b);
    /// Linear interpolation of `density` over the strictly increasing `grid`,
    /// renormalized to unit mass. Zero outside the grid.
    static FeatureDistribution tabulated(std::vector<double> grid, std::vector<double> density);

    DistKind kind() const { return kind_; }

    double pdf(double x) const;
    /// -inf where the density vanishes.
    double log_pdf(double x) const;
    double cdf(double x) const;
    /// Upper tail 1 - cdf(x), accurate where cdf(x) is close to one.
    double sf(double x) const;
    /// Smallest x with cdf(x) >= p. p = 0 and p = 1 map to the support ends.
    double quantile(double p) const;
    /// Smallest x with sf(x) <= q; equals quantile(1 - q) without the cancellation.
    double isf(double q) const;

    /// Effective support, clamped for unbounded kinds.
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    double mean() const;
    double stddev() const;

    // Parameters, meaningful for the matching kind only.
    double gaussian_mean() const { return p0_; }
    double gaussian_stddev() const { return p1_; }
    double beta_a() const { return p0_; }
    double beta_b() const { return p1_; }
    const std::vector<double>& grid() const;
    /// Normalized density values on grid().
    const std::vector<double>& density() const;
    /// Density values exactly as passed to tabulated().
    const std::vector<double>& input_density() const;

    /// True when a tabulated density has a zero run strictly inside its grid.
    bool has_flat_segments() const;

    std::string describe() const;

    friend bool operator==(const FeatureDistribution& l, const FeatureDistribution& r);

private:
    struct Table;

    DistKind kind_ = DistKind::gaussian;
    double p0_ = 0.0;
    double p1_ = 1.0;
    double log_beta_ = 0.0;  // log B(a, b) for the beta kind
    double lower_ = -kClampSigmas;
    double upper_ = kClampSigmas;
    std::shared_ptr<const Table> table_;
};

struct MlrCheck {
    bool holds = false;
    std::optional<double> first_violation;
};

/// Grid check that g1(x)/g0(x) is strictly increasing where both densities
/// exceed 1e-12. Throws ModelError when that common support is empty.
MlrCheck verify_mlr(const FeatureDistribution& g0, const FeatureDistribution& g1,
                    int grid_size = 2048);

}  // namespace fairdyn
