#include "fishschool/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fishschool {

StateDiagnostics diagnose(const SwarmState& state) {
  const std::size_t n = state.n;
  const std::size_t d = state.dim;
  StateDiagnostics out;
  out.total_velocity.assign(d, 0.0);
  out.center_of_mass.assign(d, 0.0);

  double speed_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = state.vel(i);
    const auto x = state.pos(i);
    double speed2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      out.total_velocity[k] += v[k];
      out.center_of_mass[k] += x[k];
      speed2 += v[k] * v[k];
    }
    speed_sum += std::sqrt(speed2);
  }
  if (n > 0) {
    for (auto& c : out.center_of_mass) c /= static_cast<double>(n);
    out.mean_speed = speed_sum / static_cast<double>(n);
  }
  double total_norm = 0.0;
  for (double c : out.total_velocity) total_norm += c * c;
  total_norm = std::sqrt(total_norm);
  out.polarization = speed_sum > 0.0 ? std::min(1.0, total_norm / speed_sum) : 1.0;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> nearest(n, inf);
  double min_d2 = inf;
  double max_d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = squared_distance(state.pos(i), state.pos(j));
      min_d2 = std::min(min_d2, d2);
      max_d2 = std::max(max_d2, d2);
      nearest[i] = std::min(nearest[i], d2);
      nearest[j] = std::min(nearest[j], d2);
    }
  }
  out.min_pair_distance = std::sqrt(min_d2);
  out.max_pair_distance = std::sqrt(max_d2);
  if (n < 2) {
    out.mean_nn_distance = inf;
  } else {
    double sum = 0.0;
    for (double d2 : nearest) sum += std::sqrt(d2);
    out.mean_nn_distance = sum / static_cast<double>(n);
  }
  return out;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::schooled: return "schooled";
    case Classification::collided: return "collided";
    case Classification::exploded: return "exploded";
    case Classification::undecided: return "undecided";
  }
  return "?";
}

Classification parse_classification(std::string_view name) {
  for (auto c : {Classification::schooled, Classification::collided, Classification::exploded,
                 Classification::undecided}) {
    if (to_string(c) == name) return c;
  }
  throw InvalidParameter("unknown classification '" + std::string(name) + "'");
}

double default_schooling_diameter_bound(const ModelParams& params) {
  return 2.0 * params.r() *
         std::pow(static_cast<double>(params.n_particles()), 1.0 / static_cast<double>(params.dim()));
}

ClassifyThresholds thresholds_for(const Trajectory& trajectory, double schooling_diameter_bound) {
  return {trajectory.config.collision_eps_for(trajectory.params),
          trajectory.config.overflow_bound, schooling_diameter_bound};
}

Classification classify(const Trajectory& trajectory, const ClassifyThresholds& thresholds) {
  if (trajectory.samples.empty()) throw InvalidParameter("cannot classify an empty trajectory");

  bool collided = trajectory.termination == Termination::collision ||
                  trajectory.termination == Termination::singular_force ||
                  trajectory.min_distance_seen < thresholds.collision_eps;
  bool exploded = trajectory.termination == Termination::explosion;
  for (const auto& s : trajectory.samples) {
    if (min_pair_distance(s) < thresholds.collision_eps) collided = true;
    auto big = [&](double c) { return !std::isfinite(c) || std::abs(c) > thresholds.overflow_bound; };
    if (std::any_of(s.x.begin(), s.x.end(), big) || std::any_of(s.v.begin(), s.v.end(), big)) {
      exploded = true;
    }
  }
  if (collided) return Classification::collided;
  if (exploded) return Classification::exploded;
  if (trajectory.termination == Termination::completed &&
      diagnose(trajectory.samples.back()).max_pair_distance <=
          thresholds.schooling_diameter_bound) {
    return Classification::schooled;
  }
  return Classification::undecided;
}

double pair_equilibrium_distance(const ModelParams& params) {
  // s^-p = gamma s^-q  <=>  s^(q-p) = r^(q-p)
  return params.r();
}

}  // namespace fishschool
