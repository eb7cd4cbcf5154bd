#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fishschool/external_force.hpp"
#include "fishschool/params.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

/// Two particles occupy the same position, so the kernels are undefined.
/// Particle indices are 0-based with first < second.
class SingularForce : public std::runtime_error {
 public:
  SingularForce(std::size_t first, std::size_t second);

  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

/// Radial weights of the attraction-repulsion and alignment kernels.
///
/// For a pair at distance s the position force on i is
///   position_weight * (x_i - x_j),  position_weight = -alpha1 (s^-p - gamma s^-q)
/// and the alignment force is
///   velocity_weight * (v_i - v_j),  velocity_weight = -beta1 (s^-p + gamma s^-q).
/// Integral exponents (the common case p=3, q=4) are evaluated by repeated
/// multiplication on 1/s^2; other exponents go through pow().
class PairKernel {
 public:
  explicit PairKernel(const ModelParams& params);

  struct Weights {
    double position = 0.0;
    double velocity = 0.0;
  };

  /// Requires dist_sq > 0.
  Weights weights(double dist_sq) const;

  /// Upper bounds on the relaxation rate of the alignment term and on the
  /// squared oscillation frequency of the position term contributed by one
  /// pair. Used for step-size control.
  struct Rates {
    double damping = 0.0;
    double spring_sq = 0.0;
  };
  Rates rates(double dist_sq) const;

 private:
  struct Powers {
    double inv_p;
    double inv_q;
  };
  Powers inverse_powers(double dist_sq) const;

  double alpha1_, beta1_, gamma_, p_, q_;
  int p_int_ = -1;  // -1 when p is not a small integer
  int q_int_ = -1;
};

/// Position kernel acting on x_i due to x_j. Throws SingularForce(0, 1) when
/// x_i == x_j.
std::vector<double> pair_position_force(std::span<const double> x_i, std::span<const double> x_j,
                                        const ModelParams& params);

/// Alignment kernel acting on v_i due to particle j.
std::vector<double> pair_velocity_force(std::span<const double> x_i, std::span<const double> x_j,
                                        std::span<const double> v_i, std::span<const double> v_j,
                                        const ModelParams& params);

/// Time derivatives of the whole swarm.
struct DriftEval {
  std::vector<double> dxdt;  // equal to the current velocities
  std::vector<double> dvdt;
};

/// Drift of all particles. For each i the sum over j runs in ascending index
/// order, so the result does not depend on `threads`. Throws SingularForce
/// naming the lowest offending particle.
DriftEval drift(const SwarmState& state, const ModelParams& params,
                const ExternalForceSpec& external, unsigned threads = 1);

/// Acceleration-only form used by the integrators; dvdt must hold n*dim
/// entries. Pairs whose alignment rate (PairKernel::Rates::damping) exceeds
/// split_rate contribute no alignment term.
void acceleration_into(const SwarmState& state, const ExternalForceSpec& external,
                       const PairKernel& kernel, std::span<double> dvdt, unsigned threads = 1,
                       double split_rate = std::numeric_limits<double>::infinity());

/// Pairwise quantities needed for step-size control.
struct PairScan {
  double min_distance = 0.0;
  /// Upper bound on the fastest local time scale (1/time) of the drift,
  /// leaving out the alignment of split pairs.
  double max_rate = 0.0;
  /// Pairs (i < j, ascending) whose alignment rate exceeds split_rate.
  std::vector<std::pair<std::size_t, std::size_t>> split_pairs;
};

PairScan scan_pairs(const SwarmState& state, const ExternalForceSpec& external,
                    const PairKernel& kernel,
                    double split_rate = std::numeric_limits<double>::infinity());

}  // namespace fishschool
