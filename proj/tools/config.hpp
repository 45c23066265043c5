#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairdyn/dynamics.hpp"
#include "fairdyn/gendyn.hpp"
#include "fairdyn/highdim.hpp"

namespace fairdyn::cli {

/// Bad config content. The message starts with the offending field path.
class ConfigError : public ModelError {
public:
    using ModelError::ModelError;
};

/// Multivariate source of a group's features, kept so the config
/// serializes back to what was read.
struct HighdimSpec {
    std::optional<std::pair<GaussianClass, GaussianClass>> classes;
    int samples = 20000;
    ScoreSource source = ScoreSource::automatic;
    // precomputed score table
    std::vector<double> grid;
    std::vector<double> density0;
    std::vector<double> density1;
};

/// Sweep axis: "a.t01", "b.t10", "t01" (both groups) or "u_ratio".
/// Linked axes step in lockstep with this one and add no grid dimension.
struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
    std::vector<SweepAxis> linked;
};

struct GenerationSpec {
    GenModel model;
    std::optional<GenVariant> variant;
    std::vector<double> initial_alpha;
};

struct ScenarioConfig {
    std::optional<Scenario> scenario;
    std::optional<HighdimSpec> highdim_a;
    std::optional<HighdimSpec> highdim_b;
    std::vector<Constraint> constraints;
    std::vector<QualState> initial_states;
    int random_initial = 0;  // extra seeded initial states
    std::uint64_t seed = 20240611;
    std::string output = "out";
    SimulationOptions simulation;
    std::vector<SweepAxis> sweep;
    std::optional<GenerationSpec> generation;

    /// Explicit states followed by the seeded random ones.
    std::vector<QualState> all_initial_states() const;
    /// Constraints, defaulting to all three when none are listed.
    std::vector<Constraint> active_constraints() const;
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

nlohmann::json to_json(const FeatureDistribution& d);
FeatureDistribution distribution_from_json(const nlohmann::json& j, const std::string& path);

/// Parameter of every sweep column: each axis followed by its linked axes.
std::vector<std::string> sweep_columns(const std::vector<SweepAxis>& axes);

/// Scenario with one sweep point (one value per column) applied.
Scenario apply_sweep_point(const Scenario& s, const std::vector<SweepAxis>& axes,
                           const std::vector<double>& point);

/// Grid points of the sweep in row-major order, last axis fastest, one value
/// per column.
std::vector<std::vector<double>> sweep_points(const std::vector<SweepAxis>& axes);

}  // namespace fairdyn::cli
