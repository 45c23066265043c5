#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fairdyn/equilibrium.hpp"

namespace fairdyn::cli {

struct ScatterSeries {
    std::string label;
    std::string color;
    std::vector<QualState> points;
};

/// Phase portrait in the unit square: balanced curves, trajectories and
/// starred equilibria.
void write_phase_svg(std::ostream& os, const std::string& title, const BalancedFunctions& bf,
                     const std::vector<Trajectory>& trajectories,
                     const std::vector<EquilibriumPoint>& equilibria);

/// Equilibrium pairs in the unit square, consecutive points joined by arrows.
void write_scatter_svg(std::ostream& os, const std::string& title,
                       const std::vector<ScatterSeries>& series);

}  // namespace fairdyn::cli
