#pragma once

#include <string_view>
#include <vector>

#include "fishschool/integrators.hpp"
#include "fishschool/params.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

/// Observables of a single swarm state. For a single particle the pair
/// statistics are min = mean_nn = +inf and max = 0.
struct StateDiagnostics {
  std::vector<double> total_velocity;
  std::vector<double> center_of_mass;
  double min_pair_distance = 0.0;
  double max_pair_distance = 0.0;
  /// Mean over i of the distance to the nearest other particle.
  double mean_nn_distance = 0.0;
  /// |sum v_i| / sum |v_i|, defined as 1 when every velocity is zero.
  double polarization = 1.0;
  double mean_speed = 0.0;
};

StateDiagnostics diagnose(const SwarmState& state);

enum class Classification { schooled, collided, exploded, undecided };

std::string_view to_string(Classification c);
Classification parse_classification(std::string_view name);

struct ClassifyThresholds {
  double collision_eps = 1e-3;
  double overflow_bound = 1e12;
  double schooling_diameter_bound = 2.0;
};

/// 2 r N^(1/d): the diameter of a loose packing of N particles at spacing r.
double default_schooling_diameter_bound(const ModelParams& params);

/// Thresholds taken from the trajectory's own configuration.
ClassifyThresholds thresholds_for(const Trajectory& trajectory,
                                  double schooling_diameter_bound);

/// Collision takes precedence over explosion, which takes precedence over
/// schooling. A trajectory that terminated with status collision or
/// singular_force counts as collided, explosion as exploded.
Classification classify(const Trajectory& trajectory, const ClassifyThresholds& thresholds);

/// Separation at which the position kernel vanishes. Equals r for every
/// admissible (p, q).
double pair_equilibrium_distance(const ModelParams& params);

}  // namespace fishschool
