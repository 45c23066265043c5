#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairdyn/dist.hpp"
#include "oracles.hpp"

using Catch::Approx;
using fairdyn::FeatureDistribution;
using fairdyn::ModelError;

TEST_CASE("gaussian values match mpmath", "[dist]") {
    const FeatureDistribution std_normal;
    CHECK(std_normal.cdf(-2.0) == Approx(oracle::phi_m2).epsilon(1e-14));
    CHECK(std_normal.sf(2.0) == Approx(oracle::phi_m2).epsilon(1e-14));

    const auto g = FeatureDistribution::gaussian(2.0, 3.0);
    CHECK(g.quantile(0.975) == Approx(oracle::gauss_2_3_q975).epsilon(1e-13));
    CHECK(g.isf(0.025) == Approx(oracle::gauss_2_3_q975).epsilon(1e-13));
    CHECK(g.mean() == 2.0);
    CHECK(g.stddev() == 3.0);
}

TEST_CASE("beta values match mpmath", "[dist]") {
    CHECK(FeatureDistribution::beta(2, 5).cdf(0.3) == Approx(oracle::beta_2_5_cdf_03).epsilon(1e-13));
    CHECK(FeatureDistribution::beta(1.5, 4.5).sf(0.4) ==
          Approx(oracle::beta_15_45_sf_04).epsilon(1e-13));
    CHECK(FeatureDistribution::beta(3.5, 2.5).quantile(0.3) ==
          Approx(oracle::beta_35_25_q03).epsilon(1e-12));
    const auto b = FeatureDistribution::beta(2, 5);
    CHECK(b.lower() == 0.0);
    CHECK(b.upper() == 1.0);
    CHECK(b.mean() == Approx(2.0 / 7.0));
}

TEST_CASE("far gaussian tail keeps relative precision", "[dist]") {
    const FeatureDistribution z;
    // Phi(-30) ~ 4.906e-198
    CHECK(z.cdf(-30.0) == Approx(4.906713927148187e-198).epsilon(1e-12));
    CHECK(z.sf(30.0) == Approx(4.906713927148187e-198).epsilon(1e-12));
    CHECK(z.isf(1e-300) > 37.0);
}

TEST_CASE("cdf and sf are complementary and quantile inverts cdf", "[dist][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    const FeatureDistribution dists[] = {
        FeatureDistribution::gaussian(-1.0, 2.5), FeatureDistribution::beta(0.7, 3.0),
        FeatureDistribution::beta(4.0, 1.5),
        FeatureDistribution::tabulated({0.0, 1.0, 2.0, 3.0}, {0.5, 2.0, 1.0, 0.25})};
    for (const auto& d : dists) {
        for (int i = 0; i < 200; ++i) {
            const double p = u(rng);
            const double x = d.quantile(p);
            CHECK(d.cdf(x) == Approx(p).margin(1e-12));
            CHECK(d.cdf(x) + d.sf(x) == Approx(1.0).margin(1e-15));
            CHECK(d.isf(1.0 - p) == Approx(x).margin(1e-9));
        }
    }
}

TEST_CASE("pdf integrates to the cdf", "[dist][property]") {
    const FeatureDistribution dists[] = {FeatureDistribution::gaussian(1.0, 0.5),
                                         FeatureDistribution::beta(2.5, 3.5)};
    for (const auto& d : dists) {
        const double lo = d.quantile(0.05), hi = d.quantile(0.8);
        const int n = 2000;
        const double h = (hi - lo) / n;
        double s = d.pdf(lo) + d.pdf(hi);
        for (int i = 1; i < n; ++i) s += d.pdf(lo + i * h) * (i % 2 ? 4.0 : 2.0);
        CHECK(s * h / 3.0 == Approx(0.75).margin(1e-10));
        CHECK(d.log_pdf(0.5 * (lo + hi)) == Approx(std::log(d.pdf(0.5 * (lo + hi)))));
    }
}

TEST_CASE("tabulated density is renormalized and keeps the input", "[dist]") {
    const auto t = FeatureDistribution::tabulated({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    CHECK(t.kind() == fairdyn::DistKind::tabulated);
    CHECK(t.pdf(0.5) == Approx(0.5));
    CHECK(t.cdf(1.0) == Approx(0.5));
    CHECK(t.pdf(-1.0) == 0.0);
    CHECK(t.cdf(5.0) == 1.0);
    CHECK(t.input_density() == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(t.density()[0] == Approx(0.5));
    CHECK_FALSE(t.has_flat_segments());

    const auto gap = FeatureDistribution::tabulated({0, 1, 2, 3, 4}, {1, 0, 0, 0, 1});
    CHECK(gap.has_flat_segments());
    // smallest x reaching the median is the start of the gap
    CHECK(gap.quantile(0.5) == Approx(1.0).margin(1e-12));
}

TEST_CASE("invalid parameters are rejected", "[dist]") {
    CHECK_THROWS_AS(FeatureDistribution::gaussian(0.0, 0.0), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::gaussian(NAN, 1.0), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::beta(-1.0, 2.0), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::tabulated({0.0, 1.0}, {1.0}), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::tabulated({0.0, 0.0}, {1.0, 1.0}), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::tabulated({0.0, 1.0}, {0.0, 0.0}), ModelError);
    CHECK_THROWS_AS(FeatureDistribution::tabulated({0.0, 1.0}, {-1.0, 2.0}), ModelError);
}

TEST_CASE("likelihood ratio ordering check", "[dist]") {
    const auto g0 = FeatureDistribution::gaussian(-1.0, 1.0);
    const auto g1 = FeatureDistribution::gaussian(1.0, 1.0);
    CHECK(fairdyn::verify_mlr(g0, g1).holds);
    const auto swapped = fairdyn::verify_mlr(g1, g0);
    CHECK_FALSE(swapped.holds);
    CHECK(swapped.first_violation.has_value());
    // unequal variances: ratio is not monotone on the whole line
    CHECK_FALSE(fairdyn::verify_mlr(g0, FeatureDistribution::gaussian(1.0, 3.0)).holds);
    CHECK(fairdyn::verify_mlr(FeatureDistribution::beta(2, 4), FeatureDistribution::beta(5, 2)).holds);
    CHECK_THROWS_AS(fairdyn::verify_mlr(FeatureDistribution::tabulated({0, 1}, {1, 1}),
                                        FeatureDistribution::tabulated({2, 3}, {1, 1})),
                    ModelError);
}

TEST_CASE("equality compares kind and parameters", "[dist]") {
    CHECK(FeatureDistribution::gaussian(0, 1) == FeatureDistribution());
    CHECK_FALSE(FeatureDistribution::gaussian(0, 2) == FeatureDistribution());
    CHECK_FALSE(FeatureDistribution::beta(1, 1) == FeatureDistribution::gaussian(1, 1));
}
