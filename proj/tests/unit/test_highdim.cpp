#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "fairdyn/highdim.hpp"

using Catch::Approx;
using namespace fairdyn;

namespace {

GaussianClass cls(std::initializer_list<double> mean, const Eigen::MatrixXd& cov) {
    Eigen::VectorXd m(static_cast<Eigen::Index>(mean.size()));
    Eigen::Index i = 0;
    for (double v : mean) m(i++) = v;
    return {m, cov};
}

Eigen::Vector2d v2(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST_CASE("shared covariance gives an affine score", "[highdim]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const ExpFamilyGroup g = gaussian_group(cls({-1, -1}, id), cls({1, 1}, id));
    CHECK(g.eta_quadratic.norm() == Approx(0.0).margin(1e-12));
    CHECK(g.eta_linear(0) == Approx(2.0));
    CHECK(g.eta_linear(1) == Approx(2.0));
    for (auto [x, y] : {std::pair{0.3, -1.2}, std::pair{2.0, 0.5}, std::pair{-4.0, 3.0}}) {
        CHECK(score(g, v2(x, y)) == Approx(2 * (x + y)).margin(1e-12));
        CHECK(score(g, v2(x, y)) - g.log_partition_diff ==
              Approx(raw_log_likelihood_ratio(g, v2(x, y))).margin(1e-10));
    }
    REQUIRE(g.score_distributions.has_value());
    // score | y=1 ~ N(4, 8)
    CHECK(g.score_distributions->second.gaussian_mean() == Approx(4.0));
    CHECK(g.score_distributions->second.gaussian_stddev() == Approx(std::sqrt(8.0)));
    CHECK_THROWS_AS(score(g, Eigen::VectorXd::Zero(3)), ModelError);
}

TEST_CASE("indistinguishable classes have zero score", "[highdim]") {
    Eigen::MatrixXd cov(2, 2);
    cov << 2.0, 0.5, 0.5, 1.0;
    const ExpFamilyGroup g = gaussian_group(cls({0.5, 1}, cov), cls({0.5, 1}, cov));
    CHECK(score(g, v2(3.0, -2.0)) == Approx(0.0).margin(1e-12));
    CHECK(raw_qualification_profile(g, 0.3, v2(1.0, 1.0)) == Approx(0.3));
    const GroupModel m = reduce_to_1d(g, 20000, 5, ScoreSource::sampled);
    CHECK(qualification_profile(m, 0.3, 0.0) == Approx(0.3).margin(1e-6));
}

TEST_CASE("profile in score space equals raw profile", "[highdim][property]") {
    Eigen::MatrixXd c0(2, 2), c1(2, 2);
    c0 << 1.0, 0.3, 0.3, 2.0;
    c1 << 1.5, -0.2, -0.2, 0.8;
    const ExpFamilyGroup g = gaussian_group(cls({-1, 0}, c0), cls({1, 1}, c1));
    CHECK(g.eta_quadratic.norm() > 0.1);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const Eigen::Vector2d x = v2(n(rng), n(rng));
        const double z = score(g, x) - g.log_partition_diff;
        const double alpha = 0.4;
        const double via_score = 1.0 / (1.0 + (1 - alpha) / alpha * std::exp(-z));
        CHECK(raw_qualification_profile(g, alpha, x) == Approx(via_score).epsilon(1e-9));
    }
}

TEST_CASE("sampled score density matches the closed form", "[highdim][oracle]") {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    const ExpFamilyGroup g = gaussian_group(cls({-1, -1}, id), cls({1, 1}, id));
    const GroupModel m = reduce_to_1d(g, 100000, 42, ScoreSource::sampled);
    CHECK(m.g1.kind() == DistKind::tabulated);
    double ks = 0.0;
    for (double x = -12.0; x <= 12.0; x += 0.05) {
        ks = std::max(ks, std::abs(m.g1.cdf(x) - g.score_distributions->second.cdf(x)));
        ks = std::max(ks, std::abs(m.g0.cdf(x) - g.score_distributions->first.cdf(x)));
    }
    CHECK(ks <= 0.02);
    CHECK(verify_mlr(m.g0, m.g1).holds);
    CHECK_THROWS_AS(reduce_to_1d(g, 500, 1, ScoreSource::sampled), ModelError);
}

TEST_CASE("class validation", "[highdim]") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(gaussian_group(cls({0, 0}, bad), cls({1, 1}, id)), ModelError);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.1, 0.0, 1.0;
    CHECK_THROWS_AS(gaussian_group(cls({0, 0}, asym), cls({1, 1}, id)), ModelError);
    CHECK_THROWS_AS(gaussian_group(cls({0, 0}, id), cls({1, 1, 1}, Eigen::MatrixXd::Identity(3, 3))),
                    ModelError);
}
