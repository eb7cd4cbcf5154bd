#pragma once

#include <span>
#include <vector>

namespace fishschool {

/// External force acting on each particle. Only forces that are locally
/// Lipschitz by construction are admitted. New kinds belong here, together
/// with a case in external_force().
struct ExternalForceSpec {
  enum class Kind { none, linear_drag };

  Kind kind = Kind::none;
  double drag_coefficient = 0.0;

  static ExternalForceSpec none() { return {}; }
  /// F(t, x, v) = -c v. Throws InvalidParameter for c < 0.
  static ExternalForceSpec linear_drag(double c);

  bool operator==(const ExternalForceSpec&) const = default;
};

/// Writes F(t, x_i, v_i) into out (same length as v_i).
void external_force(const ExternalForceSpec& spec, double t, std::span<const double> x_i,
                    std::span<const double> v_i, std::span<double> out);

/// Adds F(t, x_i, v_i) to accum.
void add_external_force(const ExternalForceSpec& spec, double t, std::span<const double> x_i,
                        std::span<const double> v_i, std::span<double> accum);

std::vector<double> external_force(const ExternalForceSpec& spec, double t,
                                   std::span<const double> x_i, std::span<const double> v_i);

}  // namespace fishschool
