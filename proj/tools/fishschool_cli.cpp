// Command-line front end: scenarios, simulate, sweep, verify.
//
// Exit codes: 0 success, 1 invalid input or failed verification, 2 i/o error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fishschool/io.hpp"
#include "fishschool/run.hpp"
#include "fishschool/scenario.hpp"
#include "fishschool/verify.hpp"

namespace fs = std::filesystem;
using namespace fishschool;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIo = 2;

struct CommonFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::size_t> replicates;
  std::vector<std::string> sets;
  unsigned threads = 1;
  unsigned workers = 1;
};

std::string brief(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("scenario", f.scenario, "built-in scenario name or scenario JSON file")->required();
  cmd->add_option("--seed", f.seed, "first seed (default: the scenario's integrator.seed)");
  cmd->add_option("--out-dir", f.out_dir,
                  "output directory (default: $FISHSCHOOL_OUT_DIR, else ./fishschool-out)");
  cmd->add_option("--dt", f.dt, "base time step");
  cmd->add_option("--t-end", f.t_end, "final time");
  cmd->add_option("--replicates", f.replicates, "number of consecutive seeds to run");
  cmd->add_option("--set", f.sets, "override a field, e.g. --set params.alpha=2 or --set sigma=5")
      ->allow_extra_args(false);
  cmd->add_option("--threads", f.threads, "threads for the force evaluation of one run")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "replicates run concurrently")->check(CLI::PositiveNumber);
}

ScenarioSpec resolve(const CommonFlags& f) {
  ScenarioSpec base = [&] {
    if (auto builtin = find_builtin(f.scenario)) return *builtin;
    if (fs::exists(f.scenario)) return load_scenario_file(f.scenario);
    std::string names;
    for (const auto& s : builtin_scenarios()) names += " " + s.name;
    throw InvalidParameter("unknown scenario '" + f.scenario + "' (built-ins:" + names +
                           "; or pass a scenario file)");
  }();
  auto tree = to_json(base);
  if (f.dt) apply_override(tree, "integrator.dt", format_double(*f.dt));
  if (f.t_end) apply_override(tree, "integrator.t_end", format_double(*f.t_end));
  apply_override(tree, "integrator.threads", std::to_string(f.threads));
  for (const auto& s : f.sets) apply_override(tree, s);
  auto spec = scenario_from_json(tree);
  spec.validate();
  return spec;
}

fs::path output_dir(const CommonFlags& f) {
  if (f.out_dir) return *f.out_dir;
  if (const char* env = std::getenv("FISHSCHOOL_OUT_DIR"); env && *env) return env;
  return "fishschool-out";
}

void print_fractions(std::ostream& out, const std::string& key, const std::vector<Tally>& rows) {
  if (!key.empty()) out << key << ' ';
  out << "runs schooled collided exploded undecided\n";
  for (const auto& t : rows) {
    if (!key.empty()) out << brief(t.value) << ' ';
    out << t.runs << ' ' << t.fraction(Classification::schooled) << ' '
        << t.fraction(Classification::collided) << ' ' << t.fraction(Classification::exploded)
        << ' ' << t.fraction(Classification::undecided) << '\n';
  }
}

int cmd_scenarios() {
  for (const auto& s : builtin_scenarios()) {
    std::cout << s.name << "  N=" << s.params.n_particles() << " d=" << s.params.dim()
              << " t_end=" << brief(s.integrator.t_end);
    if (s.sweep) {
      std::cout << " sweep " << s.sweep->key << " in {";
      for (std::size_t k = 0; k < s.sweep->values.size(); ++k) {
        std::cout << (k ? ", " : "") << brief(s.sweep->values[k]);
      }
      std::cout << '}';
    }
    std::cout << "\n    " << s.description << '\n';
  }
  return kOk;
}

int cmd_simulate(const CommonFlags& f) {
  const auto spec = resolve(f);
  const auto dir = output_dir(f);
  const std::uint64_t seed = f.seed.value_or(spec.integrator.seed);
  const std::size_t count = f.replicates.value_or(1);
  if (count == 0) throw InvalidParameter("--replicates must be at least 1");

  save_scenario_file(spec, dir / "scenario.json");
  std::vector<RunRecord> records;
  if (count == 1) {
    records.push_back(run_scenario(spec, seed, {dir}).record);
  } else {
    records = run_replicates(spec, seed, count, f.workers, {dir});
  }
  write_summary_csv(records, dir / "summary.csv");
  const std::vector<Tally> rows{tally(0.0, records)};
  write_sweep_csv("", rows, dir / "fractions.csv");

  for (const auto& r : records) {
    std::cout << "seed " << r.seed << ": " << to_string(r.termination) << " at t="
              << brief(r.t_final) << " after " << r.steps << " steps, "
              << to_string(r.classification) << '\n';
  }
  print_fractions(std::cout, "", rows);
  std::cout << "wrote " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const CommonFlags& f, std::optional<std::string> key, std::vector<double> values) {
  const auto spec = resolve(f);
  if (!key && spec.sweep) key = spec.sweep->key;
  if (values.empty() && spec.sweep) values = spec.sweep->values;
  if (!key || values.empty()) {
    throw InvalidParameter("scenario '" + spec.name + "' has no sweep; pass --key and --values");
  }
  const auto dir = output_dir(f);
  const std::uint64_t seed = f.seed.value_or(spec.integrator.seed);
  const std::size_t count = f.replicates.value_or(spec.replicates);
  if (count == 0) throw InvalidParameter("--replicates must be at least 1");

  save_scenario_file(spec, dir / "scenario.json");
  RunOptions options{dir};
  options.write_trajectory = false;
  options.write_snapshots = false;
  const auto rows = sweep(spec, *key, values, seed, count, f.workers, options);
  write_sweep_csv(*key, rows, dir / "sweep.csv");
  print_fractions(std::cout, *key, rows);
  std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
  return kOk;
}

int cmd_verify(bool quick_scale, unsigned workers) {
  VerifyOptions options;
  options.scale = quick_scale ? VerifyScale::quick : VerifyScale::full;
  options.workers = workers;
  const auto results = run_acceptance(options);
  bool all = true;
  for (const auto& r : results) {
    std::cout << format_result(r) << '\n';
    all = all && r.passed;
  }
  std::cout << (all ? "all criteria passed\n" : "some criteria failed\n");
  return all ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic fish-schooling particle model"};
  app.require_subcommand(1);

  app.add_subcommand("scenarios", "list the built-in scenarios");

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "run a scenario for one or more seeds");
  add_common(sim, sim_flags);

  CommonFlags sweep_flags;
  std::optional<std::string> sweep_key;
  std::vector<double> sweep_values;
  auto* sw = app.add_subcommand("sweep", "vary one parameter and tabulate classification fractions");
  add_common(sw, sweep_flags);
  sw->add_option("--key", sweep_key, "field to vary (default: the scenario's sweep key)");
  sw->add_option("--values", sweep_values, "values to use (default: the scenario's sweep values)")
      ->delimiter(',');

  bool quick_scale = false;
  unsigned verify_workers = 1;
  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  ver->add_flag("--quick", quick_scale, "fewer seeds and shorter horizons");
  ver->add_option("--threads", verify_workers, "threads for the force evaluation")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (app.got_subcommand("scenarios")) return cmd_scenarios();
    if (app.got_subcommand("simulate")) return cmd_simulate(sim_flags);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_flags, sweep_key, sweep_values);
    if (app.got_subcommand("verify")) return cmd_verify(quick_scale, verify_workers);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
