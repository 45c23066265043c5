#pragma once

#include "fairdyn/model.hpp"

namespace testing_support {

inline fairdyn::Scenario fig2() {
    using fairdyn::FeatureDistribution;
    fairdyn::Scenario s;
    s.a.g0 = FeatureDistribution::gaussian(-5.0, 5.0);
    s.a.g1 = FeatureDistribution::gaussian(5.0, 5.0);
    s.b.g0 = s.a.g0;
    s.b.g1 = s.a.g1;
    s.a.transitions = {0.4, 0.5, 0.5, 0.9};
    s.b.transitions = {0.1, 0.5, 0.5, 0.7};
    return s;
}

// beta stand-ins of configs/fico_beta.cfg
inline fairdyn::Scenario fico(double t01, double t10) {
    using fairdyn::FeatureDistribution;
    fairdyn::Scenario s;
    s.a.g0 = FeatureDistribution::beta(1.5, 4.5);
    s.a.g1 = FeatureDistribution::beta(3.5, 2.5);
    s.a.share = 0.12;
    s.b.g0 = FeatureDistribution::beta(2.0, 4.0);
    s.b.g1 = FeatureDistribution::beta(5.0, 2.0);
    s.b.share = 0.88;
    s.a.transitions = {0.1, t01, t10, 0.9};
    s.b.transitions = s.a.transitions;
    return s;
}

}  // namespace testing_support
