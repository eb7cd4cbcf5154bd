#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fishschool/external_force.hpp"
#include "fishschool/integrators.hpp"
#include "fishschool/params.hpp"
#include "fishschool/reduced2.hpp"

namespace fishschool {

/// Every coordinate of every initial position is drawn uniformly from [lo, hi].
struct InitBox {
  double lo = 0.0;
  double hi = 1.0;

  bool operator==(const InitBox&) const = default;
};

/// A parameter that a scenario is meant to be swept over.
struct SweepSpec {
  std::string key;
  std::vector<double> values;

  bool operator==(const SweepSpec&) const = default;
};

/// A named, seeded, fully parameterized experiment.
struct ScenarioSpec {
  std::string name;
  std::string description;
  ModelParams params;
  ExternalForceSpec external;
  InitBox init_box;
  /// Initial velocity shared by all particles; empty means zero.
  std::vector<double> v0;
  IntegratorConfig integrator;
  std::size_t replicates = 1;
  /// Defaults to default_schooling_diameter_bound(params) when unset.
  std::optional<double> schooling_diameter_bound;
  /// Enables the H / V columns of the diagnostics output for two particles.
  std::optional<LyapunovConfig> lyapunov;
  /// Times at which plot snapshots are emitted.
  std::vector<double> snapshot_times;
  std::optional<SweepSpec> sweep;

  double diameter_bound() const;
  /// Throws InvalidParameter on inconsistent fields.
  void validate() const;

  bool operator==(const ScenarioSpec&) const = default;
};

/// The experiments of the two-dimensional and three-dimensional schooling
/// runs and the one- and two-dimensional collision runs. The one-dimensional
/// collision scenario carries its sigma sweep {0, 0.15, 5}.
std::vector<ScenarioSpec> builtin_scenarios();
std::optional<ScenarioSpec> find_builtin(std::string_view name);

nlohmann::ordered_json to_json(const ScenarioSpec& spec);
/// Strict: unknown keys and malformed values raise InvalidParameter.
ScenarioSpec scenario_from_json(const nlohmann::ordered_json& j);

/// Sets `key` (dotted path such as "params.alpha") to `value` in a scenario
/// tree. A key without dots addresses the unique leaf of that name, so
/// "sigma" means "params.sigma". Values are parsed as JSON when possible and
/// kept as strings otherwise.
void apply_override(nlohmann::ordered_json& tree, std::string_view key, std::string_view value);

/// Parses "key=value" and applies it.
void apply_override(nlohmann::ordered_json& tree, std::string_view assignment);

/// Reads a scenario file; throws IoError when unreadable and InvalidParameter
/// when malformed.
ScenarioSpec load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const ScenarioSpec& spec, const std::filesystem::path& path);

}  // namespace fishschool
