#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fishschool/external_force.hpp"
#include "fishschool/params.hpp"
#include "fishschool/rng.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

enum class Scheme { rk4, euler_maruyama, euler };
enum class Termination { completed, collision, explosion, singular_force };

std::string_view to_string(Scheme scheme);
std::string_view to_string(Termination termination);
/// Throws InvalidParameter for unknown names.
Scheme parse_scheme(std::string_view name);
Termination parse_termination(std::string_view name);

struct IntegratorConfig {
  Scheme scheme = Scheme::euler_maruyama;
  double dt = 1e-3;
  bool adaptive = false;
  double dt_min = 1e-8;
  /// Distance ratio (to r) that triggers a smaller step, and the factor the
  /// step is shrunk by. Must lie in (0, 1).
  double close_approach_factor = 0.5;
  /// Adaptive steps keep dt * (fastest local rate) at or below this value.
  /// In adaptive euler and euler_maruyama runs the alignment of a pair whose
  /// relaxation rate exceeds stiffness_safety / dt is integrated exactly over
  /// each step instead of entering the explicit drift. Adaptive
  /// euler_maruyama steps also keep the rms relative noise kick
  /// sqrt(2 dt) max sigma_i at or below the smallest pair distance.
  double stiffness_safety = 0.5;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  /// Defaults to 1e-3 r when unset.
  std::optional<double> collision_eps;
  double overflow_bound = 1e12;
  /// Defaults to 1e-9 r when unset.
  std::optional<double> min_separation;
  unsigned threads = 1;

  double collision_eps_for(const ModelParams& params) const {
    return collision_eps.value_or(1e-3 * params.r());
  }
  double min_separation_for(const ModelParams& params) const {
    return min_separation.value_or(default_min_separation(params.r()));
  }

  /// Throws InvalidParameter when the configuration is unusable with params
  /// (including rk4 with nonzero noise).
  void validate(const ModelParams& params) const;

  bool operator==(const IntegratorConfig&) const = default;
};

struct Trajectory {
  ModelParams params;
  ExternalForceSpec external;
  IntegratorConfig config;
  /// Recorded states; the first is the initial state at t = 0 and the last is
  /// the state at termination.
  std::vector<SwarmState> samples;
  Termination termination = Termination::completed;
  std::size_t steps = 0;
  /// Minimum pairwise distance over every step, recorded or not.
  double min_distance_seen = 0.0;
  double smallest_dt = 0.0;
};

/// Classical fourth-order Runge-Kutta step of the deterministic system.
/// Throws InvalidParameter if any sigma_i != 0 and SingularForce if a stage
/// hits coincident positions.
SwarmState step_rk4(const SwarmState& state, double dt, const ModelParams& params,
                    const ExternalForceSpec& external, unsigned threads = 1);

/// Explicit Euler step of the deterministic system (noise ignored).
SwarmState step_euler(const SwarmState& state, double dt, const ModelParams& params,
                      const ExternalForceSpec& external, unsigned threads = 1);

/// Euler-Maruyama step drawing particle i's increment from streams[i]. Noise
/// enters positions only; the drift is evaluated at the pre-step state.
SwarmState step_euler_maruyama(const SwarmState& state, double dt, const ModelParams& params,
                               const ExternalForceSpec& external,
                               std::span<NoiseStream> streams, unsigned threads = 1);

/// Euler-Maruyama step with caller-supplied Wiener increments dw (n*dim
/// entries, each with variance dt); x_i gains sigma_i * dw_i.
SwarmState step_euler_maruyama(const SwarmState& state, double dt, const ModelParams& params,
                               const ExternalForceSpec& external, std::span<const double> dw,
                               unsigned threads = 1);

/// Integrates from `initial` until config.t_end or a terminal event. Terminal
/// events are reported through Trajectory::termination, never thrown. Throws
/// InvalidParameter when the configuration is invalid or the initial state is
/// outside the phase space.
Trajectory simulate(const SwarmState& initial, const ModelParams& params,
                    const ExternalForceSpec& external, const IntegratorConfig& config);

}  // namespace fishschool
