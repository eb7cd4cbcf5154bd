#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fishschool/integrators.hpp"
#include "fishschool/reduced2.hpp"
#include "fishschool/state.hpp"

namespace fishschool {

/// File-system failure; the message carries the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Creates missing parent directories and truncates the file.
std::ofstream open_output_file(const std::filesystem::path& path);
/// Flushes and raises IoError if any write to `out` failed.
void finish_output_file(std::ofstream& out, const std::filesystem::path& path);

/// 17 significant digits, C-locale general notation; reads back bit-exactly.
std::string format_double(double value);

/// Header `t,particle,x0..x{d-1},v0..v{d-1}`, one row per (sample, particle),
/// rows ordered by time then particle index.
void write_trajectory_csv(std::span<const SwarmState> samples, std::ostream& out);
void emit_trajectory_csv(const Trajectory& trajectory, const std::filesystem::path& path);
std::vector<SwarmState> read_trajectory_csv(const std::filesystem::path& path);

/// Per-sample observables: t, total_velocity_norm, min_pair_distance,
/// max_pair_distance, mean_nn_distance, polarization, mean_speed, then X, Y,
/// Z for two particles, H when `lyapunov` is given, and V when additionally
/// theta is admissible for the model's (d, q).
void emit_diagnostics_csv(const Trajectory& trajectory, const std::filesystem::path& path,
                          const std::optional<LyapunovConfig>& lyapunov = std::nullopt);

/// gnuplot-style blocks, one per requested time (nearest recorded sample),
/// separated by two blank lines; columns x0..x{d-1} v0..v{d-1}.
void emit_snapshots(std::span<const SwarmState> samples, std::span<const double> times,
                    const std::filesystem::path& path);

}  // namespace fishschool
