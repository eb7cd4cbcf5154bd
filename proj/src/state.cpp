#include "fishschool/state.hpp"

#include <cmath>
#include <limits>

#include "fishschool/params.hpp"

namespace fishschool {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

double min_pair_distance(const SwarmState& state) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.n; ++i) {
    for (std::size_t j = i + 1; j < state.n; ++j) {
      best = std::min(best, squared_distance(state.pos(i), state.pos(j)));
    }
  }
  return std::sqrt(best);
}

StateReport validate_state(const SwarmState& state, double min_separation) {
  if (!state.consistent()) {
    throw InvalidParameter("state arrays do not match n*dim");
  }
  StateReport report;
  report.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.n; ++i) {
    for (std::size_t j = i + 1; j < state.n; ++j) {
      const double d = distance(state.pos(i), state.pos(j));
      report.min_distance = std::min(report.min_distance, d);
      if (!(d > min_separation)) report.offending_pairs.emplace_back(i, j);
    }
  }
  return report;
}

}  // namespace fishschool
