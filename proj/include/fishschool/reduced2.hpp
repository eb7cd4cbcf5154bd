#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fishschool/params.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

/// Two-particle reduction: X = 1/|x1 - x2|, Y = |v1 - v2|^2,
/// Z = <x1 - x2, v1 - v2>. Valid states satisfy X > 0, Y >= 0 and
/// Y >= X^2 Z^2 (Cauchy-Schwarz).
struct ReducedState {
  double X = 1.0;
  double Y = 0.0;
  double Z = 0.0;

  bool operator==(const ReducedState&) const = default;
};

struct ReducedRates {
  double dX = 0.0;
  double dY = 0.0;
  double dZ = 0.0;
};

/// Throws SingularForce when x1 == x2.
ReducedState reduce(std::span<const double> x1, std::span<const double> x2,
                    std::span<const double> v1, std::span<const double> v2);
/// Requires state.n == 2.
ReducedState reduce(const SwarmState& state);

/// Y - X^2 Z^2; nonnegative up to round-off on any state produced by reduce().
inline double cauchy_schwarz_gap(const ReducedState& s) { return s.Y - s.X * s.X * s.Z * s.Z; }

/// Right-hand side of the deterministic (X, Y, Z) system obtained from the
/// free two-particle dynamics (no noise, no external force).
ReducedRates xyz_drift_det(const ReducedState& s, const ModelParams& params);

/// Drift part of the stochastic (X, Y, Z) system. `sigma` is the combined
/// amplitude sqrt(sigma_1^2 + sigma_2^2). Only dX picks up an Ito term,
/// -((d-3)/2) sigma^2 X^3; the diffusion terms are not functions of (X, Y, Z)
/// and are left to the full simulation.
ReducedRates xyz_drift_stoch(const ReducedState& s, const ModelParams& params, double sigma,
                             std::size_t d);

/// sqrt(sigma_1^2 + sigma_2^2) for a two-particle model.
double combined_sigma(const ModelParams& params);

/// Integrates the deterministic (X, Y, Z) system with classical RK4 at fixed
/// step dt, returning the state after every `record_every` steps (the initial
/// state first). The final step is shortened to land on t_end.
std::vector<ReducedState> integrate_reduced_rk4(const ReducedState& initial,
                                                const ModelParams& params, double dt,
                                                double t_end, std::size_t record_every = 1);

/// Energy-like function for the deterministic two-particle system:
///   H = X^(q-4) + X^(q-2) + Y^2 + M Z^2 + Y + X^-4 + M.
double lyapunov_H(const ReducedState& s, double M, double q);

/// dH/dt along the deterministic (X, Y, Z) flow (chain rule).
double lyapunov_H_rate(const ReducedState& s, const ModelParams& params, double M);

/// V = X^theta + X^-4 + Y^2 + M Z^2 + M. Throws InvalidParameter when theta
/// is not admissible for (d, q), see check_theta().
double lyapunov_V(const ReducedState& s, double M, double theta, std::size_t d, double q);

/// Ito generator f of V along the stochastic (X, Y, Z) system, i.e. the dt
/// coefficient of dV.
double lyapunov_V_generator(const ReducedState& s, const ModelParams& params, double M,
                            double theta, double sigma, std::size_t d);

/// max{q-6, 0} < theta < min{d-2, q-2}.
bool check_theta(std::size_t d, double q, double theta);
/// Open interval of admissible theta, or nullopt when it is empty.
std::optional<std::pair<double, double>> theta_interval(std::size_t d, double q);
/// d > max{q-4, 2} and q > 2: the regime in which the stochastic two-particle
/// system is known to have global solutions.
bool stochastic_global_regime(std::size_t d, double q);

/// Default Lyapunov weight: 10 max(1, alpha1, beta1, gamma).
double default_lyapunov_M(const ModelParams& params);

struct LyapunovConfig {
  double M = 10.0;
  double theta = 0.5;
  /// Window parameter for the stopping-time monitor.
  double k = 100.0;

  bool operator==(const LyapunovConfig&) const = default;
};

/// First sample time at which X leaves (1/k, k) or Y leaves [0, k); nullopt
/// when the path never exits. Throws InvalidParameter if the initial sample
/// already lies outside the window or the inputs differ in length.
std::optional<double> tau_k(std::span<const double> times, std::span<const ReducedState> path,
                            double k);

}  // namespace fishschool
