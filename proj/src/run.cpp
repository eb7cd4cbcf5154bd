#include "fishschool/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "fishschool/io.hpp"
#include "fishschool/rng.hpp"

namespace fishschool {

namespace {

constexpr int kMaxInitialDraws = 100;

std::string value_label(double value) { return format_double(value); }

}  // namespace

SwarmState draw_initial_state(const ScenarioSpec& spec, std::uint64_t seed) {
  const auto& params = spec.params;
  const double min_sep = spec.integrator.min_separation_for(params);
  for (int attempt = 0; attempt < kMaxInitialDraws; ++attempt) {
    NoiseStream rng(seed, StreamDomain::initial_positions, static_cast<std::uint64_t>(attempt));
    SwarmState s(params.n_particles(), params.dim());
    for (auto& c : s.x) c = rng.uniform(spec.init_box.lo, spec.init_box.hi);
    if (!spec.v0.empty()) {
      for (std::size_t i = 0; i < s.n; ++i) std::copy(spec.v0.begin(), spec.v0.end(), s.vel(i).begin());
    }
    if (validate_state(s, min_sep).ok()) return s;
  }
  throw InvalidParameter("could not draw an initial state with all pairs farther than " +
                         format_double(min_sep) + " in " + std::to_string(kMaxInitialDraws) +
                         " attempts");
}

RunResult run_scenario(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options) {
  spec.validate();
  IntegratorConfig config = spec.integrator;
  config.seed = seed;
  const auto initial = draw_initial_state(spec, seed);
  auto trajectory = simulate(initial, spec.params, spec.external, config);

  RunRecord record;
  record.scenario = spec.name;
  record.seed = seed;
  record.termination = trajectory.termination;
  record.t_final = trajectory.samples.back().t;
  record.steps = trajectory.steps;
  record.final_diagnostics = diagnose(trajectory.samples.back());
  record.classification = classify(trajectory, thresholds_for(trajectory, spec.diameter_bound()));

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    if (options.write_trajectory) {
      record.outputs.push_back(dir / "trajectory.csv");
      emit_trajectory_csv(trajectory, record.outputs.back());
    }
    if (options.write_diagnostics) {
      record.outputs.push_back(dir / "diagnostics.csv");
      emit_diagnostics_csv(trajectory, record.outputs.back(), spec.lyapunov);
    }
    if (options.write_snapshots && !spec.snapshot_times.empty()) {
      record.outputs.push_back(dir / "snapshots.dat");
      emit_snapshots(trajectory.samples, spec.snapshot_times, record.outputs.back());
    }
  }
  return {std::move(record), std::move(trajectory)};
}

std::vector<RunRecord> run_replicates(const ScenarioSpec& spec, std::uint64_t first_seed,
                                      std::size_t count, unsigned workers,
                                      const RunOptions& options) {
  spec.validate();
  std::vector<RunRecord> records(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        RunOptions local = options;
        const std::uint64_t seed = first_seed + k;
        if (options.out_dir) local.out_dir = *options.out_dir / ("seed-" + std::to_string(seed));
        records[k] = run_scenario(spec, seed, local).record;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const unsigned n_workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.seed < b.seed; });
  return records;
}

Tally tally(double value, const std::vector<RunRecord>& records) {
  Tally t;
  t.value = value;
  t.runs = records.size();
  for (const auto& r : records) ++t.counts[static_cast<std::size_t>(r.classification)];
  return t;
}

ScenarioSpec with_override(const ScenarioSpec& spec, const std::string& key, double value) {
  auto tree = to_json(spec);
  apply_override(tree, key, format_double(value));
  return scenario_from_json(tree);
}

std::vector<Tally> sweep(const ScenarioSpec& spec, const std::string& key,
                         const std::vector<double>& values, std::uint64_t first_seed,
                         std::size_t replicates, unsigned workers, const RunOptions& options) {
  std::vector<Tally> rows;
  rows.reserve(values.size());
  for (double value : values) {
    const auto variant = with_override(spec, key, value);
    RunOptions local = options;
    if (options.out_dir) local.out_dir = *options.out_dir / (key + "=" + value_label(value));
    const auto records = run_replicates(variant, first_seed, replicates, workers, local);
    if (local.out_dir) write_summary_csv(records, *local.out_dir / "summary.csv");
    rows.push_back(tally(value, records));
  }
  return rows;
}

void write_summary_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  auto out = open_output_file(path);
  out << "scenario,seed,termination,classification,t_final,steps,min_pair_distance,"
         "max_pair_distance,mean_nn_distance,polarization,mean_speed\n";
  for (const auto& r : records) {
    const auto& d = r.final_diagnostics;
    out << r.scenario << ',' << r.seed << ',' << to_string(r.termination) << ','
        << to_string(r.classification) << ',' << format_double(r.t_final) << ',' << r.steps << ','
        << format_double(d.min_pair_distance) << ',' << format_double(d.max_pair_distance) << ','
        << format_double(d.mean_nn_distance) << ',' << format_double(d.polarization) << ','
        << format_double(d.mean_speed) << '\n';
  }
  finish_output_file(out, path);
}

void write_sweep_csv(const std::string& key, const std::vector<Tally>& rows,
                     const std::filesystem::path& path) {
  auto out = open_output_file(path);
  if (!key.empty()) out << key << ',';
  out << "runs,schooled_fraction,collided_fraction,exploded_fraction,undecided_fraction\n";
  for (const auto& t : rows) {
    if (!key.empty()) out << format_double(t.value) << ',';
    out << t.runs << ','
        << format_double(t.fraction(Classification::schooled)) << ','
        << format_double(t.fraction(Classification::collided)) << ','
        << format_double(t.fraction(Classification::exploded)) << ','
        << format_double(t.fraction(Classification::undecided)) << '\n';
  }
  finish_output_file(out, path);
}

}  // namespace fishschool
