#include "fishschool/external_force.hpp"

#include <algorithm>
#include <cmath>

#include "fishschool/params.hpp"

namespace fishschool {

ExternalForceSpec ExternalForceSpec::linear_drag(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidParameter("drag coefficient must be finite and >= 0");
  }
  return {Kind::linear_drag, c};
}

void external_force(const ExternalForceSpec& spec, double /*t*/,
                    std::span<const double> /*x_i*/, std::span<const double> v_i,
                    std::span<double> out) {
  switch (spec.kind) {
    case ExternalForceSpec::Kind::none:
      std::fill(out.begin(), out.end(), 0.0);
      return;
    case ExternalForceSpec::Kind::linear_drag:
      for (std::size_t k = 0; k < v_i.size(); ++k) out[k] = -spec.drag_coefficient * v_i[k];
      return;
  }
}

void add_external_force(const ExternalForceSpec& spec, double /*t*/,
                        std::span<const double> /*x_i*/, std::span<const double> v_i,
                        std::span<double> accum) {
  if (spec.kind == ExternalForceSpec::Kind::linear_drag) {
    for (std::size_t k = 0; k < v_i.size(); ++k) accum[k] -= spec.drag_coefficient * v_i[k];
  }
}

std::vector<double> external_force(const ExternalForceSpec& spec, double t,
                                   std::span<const double> x_i, std::span<const double> v_i) {
  std::vector<double> out(v_i.size());
  external_force(spec, t, x_i, v_i, out);
  return out;
}

}  // namespace fishschool
