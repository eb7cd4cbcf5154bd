#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fishschool {

/// Positions and velocities of all particles at one instant. Coordinates are
/// stored particle-major: x[i*dim + k] is component k of particle i.
struct SwarmState {
  double t = 0.0;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> v;

  SwarmState() = default;
  SwarmState(std::size_t n_particles, std::size_t dimension, double time = 0.0)
      : t(time), n(n_particles), dim(dimension), x(n_particles * dimension, 0.0),
        v(n_particles * dimension, 0.0) {}

  std::span<double> pos(std::size_t i) { return {x.data() + i * dim, dim}; }
  std::span<const double> pos(std::size_t i) const { return {x.data() + i * dim, dim}; }
  std::span<double> vel(std::size_t i) { return {v.data() + i * dim, dim}; }
  std::span<const double> vel(std::size_t i) const { return {v.data() + i * dim, dim}; }

  /// x and v both hold n*dim entries.
  bool consistent() const { return x.size() == n * dim && v.size() == n * dim; }

  bool operator==(const SwarmState&) const = default;
};

double distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Smallest pairwise distance; +inf for fewer than two particles.
double min_pair_distance(const SwarmState& state);

/// Outcome of a phase-space membership check. Pairs are 0-based, i < j, in
/// ascending lexicographic order.
struct StateReport {
  std::vector<std::pair<std::size_t, std::size_t>> offending_pairs;
  double min_distance = 0.0;

  bool ok() const { return offending_pairs.empty(); }
};

/// ok iff every pairwise distance exceeds min_separation. Throws
/// InvalidParameter if the state is not dimensionally consistent.
StateReport validate_state(const SwarmState& state, double min_separation);

/// Default phase-space tolerance for a model with critical radius r.
inline double default_min_separation(double r) { return 1e-9 * r; }

}  // namespace fishschool
