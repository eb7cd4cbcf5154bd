#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fishschool/integrators.hpp"
#include "fishschool/params.hpp"
#include "fishschool/rng.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// `PASS  3 reduction-equivalence: ...`
std::string format_result(const CriterionResult& result);

enum class VerifyScale { full, quick };

struct VerifyOptions {
  /// quick shrinks seed counts and horizons for smoke testing; the pass/fail
  /// thresholds stay the same.
  VerifyScale scale = VerifyScale::full;
  /// Where the determinism checks write files; a fresh temporary directory
  /// when unset. Removed afterwards either way.
  std::optional<std::filesystem::path> scratch_dir;
  unsigned workers = 1;
};

/// Records the worst Cauchy-Schwarz slack Y - X^2 Z^2 over every
/// two-particle state it is shown.
class CauchySchwarzMonitor {
 public:
  static constexpr double tolerance = 1e-12;

  void observe(const SwarmState& state);
  void observe(const Trajectory& trajectory);

  std::size_t states_checked() const { return checked_; }
  std::size_t violations() const { return violations_; }
  /// min over observed states of (Y - X^2 Z^2) / (1 + Y).
  double worst_relative_gap() const { return worst_; }

 private:
  std::size_t checked_ = 0;
  std::size_t violations_ = 0;
  double worst_ = 0.0;
};

/// Least-squares slope of log(error) against log(step).
double fitted_order(std::span<const double> steps, std::span<const double> errors);

/// Random two-particle state in d dimensions: separation uniform in
/// [s_lo, s_hi], direction uniform on the sphere, velocity components
/// uniform in [-v_max, v_max].
SwarmState random_pair_state(NoiseStream& rng, std::size_t d, double s_lo, double s_hi,
                             double v_max);

CriterionResult check_pair_equilibrium(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_momentum_conservation(const VerifyOptions& options);
CriterionResult check_reduction_equivalence(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_cauchy_schwarz(const CauchySchwarzMonitor& cs);
CriterionResult check_deterministic_lyapunov(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_stochastic_lyapunov(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_collision_contrast(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_schooling(const VerifyOptions& options);
CriterionResult check_integrator_orders(const VerifyOptions& options, CauchySchwarzMonitor& cs);
CriterionResult check_determinism(const VerifyOptions& options);

/// Runs every criterion in order 1..10. Criterion 4 reports on the states
/// recorded by all the two-particle runs of the others.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& options = {});

}  // namespace fishschool
