#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fishschool/diagnostics.hpp"
#include "fishschool/integrators.hpp"
#include "fishschool/scenario.hpp"

namespace fishschool {

/// Where and what a run writes. Nothing is written without out_dir.
struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool write_trajectory = true;
  bool write_diagnostics = true;
  bool write_snapshots = true;
};

struct RunRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  Termination termination = Termination::completed;
  double t_final = 0.0;
  std::size_t steps = 0;
  StateDiagnostics final_diagnostics;
  Classification classification = Classification::undecided;
  std::vector<std::filesystem::path> outputs;
};

struct RunResult {
  RunRecord record;
  Trajectory trajectory;
};

/// Uniform positions in init_box from the seed's initial-position stream,
/// redrawn (at most 100 attempts) until every pair is farther apart than the
/// integrator's min_separation; velocities all equal v0.
SwarmState draw_initial_state(const ScenarioSpec& spec, std::uint64_t seed);

/// Draws x(0), simulates with integrator.seed = seed, classifies and writes
/// the requested files (trajectory.csv, diagnostics.csv, snapshots.dat).
RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options = {});

/// Runs seeds first_seed .. first_seed+count-1 on up to `workers` threads.
/// Each replicate writes below options.out_dir/seed-<seed>. Records are
/// returned sorted by seed.
std::vector<RunRecord> run_replicates(const ScenarioSpec& spec, std::uint64_t first_seed,
                                      std::size_t count, unsigned workers,
                                      const RunOptions& options = {});

/// Classification counts for one parameter value.
struct Tally {
  double value = 0.0;
  std::size_t runs = 0;
  std::array<std::size_t, 4> counts{};  // indexed by Classification

  std::size_t count(Classification c) const { return counts[static_cast<std::size_t>(c)]; }
  double fraction(Classification c) const {
    return runs == 0 ? 0.0 : static_cast<double>(count(c)) / static_cast<double>(runs);
  }
};

Tally tally(double value, const std::vector<RunRecord>& records);

/// For each value, applies `key=value` to the scenario and runs `replicates`
/// seeds. Output goes below options.out_dir/<key>=<value>.
std::vector<Tally> sweep(const ScenarioSpec& spec, const std::string& key,
                         const std::vector<double>& values, std::uint64_t first_seed,
                         std::size_t replicates, unsigned workers, const RunOptions& options = {});

/// Scenario with `key=value` applied through its JSON form.
ScenarioSpec with_override(const ScenarioSpec& spec, const std::string& key, double value);

void write_summary_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
/// One row per tally with the four classification fractions. The leading
/// value column is named `key` and omitted when key is empty.
void write_sweep_csv(const std::string& key, const std::vector<Tally>& rows,
                     const std::filesystem::path& path);

}  // namespace fishschool
