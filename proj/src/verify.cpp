#include "fishschool/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include "fishschool/diagnostics.hpp"
#include "fishschool/forces.hpp"
#include "fishschool/io.hpp"
#include "fishschool/reduced2.hpp"
#include "fishschool/run.hpp"
#include "fishschool/scenario.hpp"

namespace fishschool {

namespace {

bool quick(const VerifyOptions& o) { return o.scale == VerifyScale::quick; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

double vec_norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

std::vector<double> total_velocity(const SwarmState& s) {
  std::vector<double> total(s.dim, 0.0);
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t k = 0; k < s.dim; ++k) total[k] += s.v[i * s.dim + k];
  }
  return total;
}

ModelParams pair_model(Interaction in, std::size_t d, double sigma = 0.0) {
  return ModelParams(in, d, 2, sigma);
}

IntegratorConfig rk4_config(double dt, double t_end, std::size_t record_every, bool adaptive) {
  IntegratorConfig c;
  c.scheme = Scheme::rk4;
  c.dt = dt;
  c.t_end = t_end;
  c.record_every = record_every;
  c.adaptive = adaptive;
  return c;
}

// Square lattice of spacing r, each coordinate jittered by up to jitter*r.
SwarmState perturbed_lattice(NoiseStream& rng, std::size_t n, std::size_t d, double r,
                             double jitter, double v_max) {
  const auto side = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 1.0 / d) - 1e-9));
  SwarmState s(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rest = i;
    for (std::size_t k = 0; k < d; ++k) {
      const auto cell = static_cast<double>(rest % side);
      rest /= side;
      s.x[i * d + k] = r * cell + rng.uniform(-jitter, jitter) * r;
      s.v[i * d + k] = rng.uniform(-v_max, v_max);
    }
  }
  return s;
}

bool same_bytes(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a, std::ios::binary);
  std::ifstream fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                    std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::optional<std::filesystem::path>& requested) {
    if (requested) {
      path_ = *requested;
    } else {
      std::random_device rd;
      path_ = std::filesystem::temp_directory_path() /
              ("fishschool-verify-" + std::to_string(rd()) + std::to_string(rd()));
    }
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

std::string format_result(const CriterionResult& result) {
  return std::string(result.passed ? "PASS" : "FAIL") + " " + (result.id < 10 ? " " : "") +
         std::to_string(result.id) + " " + result.name + ": " + result.detail;
}

void CauchySchwarzMonitor::observe(const SwarmState& state) {
  if (state.n != 2) return;
  ReducedState red;
  try {
    red = reduce(state);
  } catch (const SingularForce&) {
    return;
  }
  if (!std::isfinite(red.X) || !std::isfinite(red.Y) || !std::isfinite(red.Z)) return;
  ++checked_;
  const double rel = cauchy_schwarz_gap(red) / (1.0 + red.Y);
  worst_ = std::min(worst_, rel);
  if (rel < -tolerance) ++violations_;
}

void CauchySchwarzMonitor::observe(const Trajectory& trajectory) {
  for (const auto& s : trajectory.samples) observe(s);
}

double fitted_order(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size() || steps.size() < 2) {
    throw InvalidParameter("fitted_order needs at least two (step, error) pairs");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const double lx = std::log(steps[k]);
    const double ly = std::log(errors[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SwarmState random_pair_state(NoiseStream& rng, std::size_t d, double s_lo, double s_hi,
                             double v_max) {
  SwarmState s(2, d);
  std::vector<double> dir(d);
  double len = 0.0;
  while (len < 1e-6) {
    for (auto& c : dir) c = rng.normal();
    len = vec_norm(dir);
  }
  const double sep = rng.uniform(s_lo, s_hi);
  for (std::size_t k = 0; k < d; ++k) {
    s.x[k] = rng.uniform(-1.0, 1.0);
    s.x[d + k] = s.x[k] + sep * dir[k] / len;
  }
  for (auto& c : s.v) c = rng.uniform(-v_max, v_max);
  return s;
}

CriterionResult check_pair_equilibrium(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{1, "pair-equilibrium", true, ""};
  const double t_end = quick(options) ? 50.0 : 200.0;
  const auto drag = ExternalForceSpec::linear_drag(1.0);
  double worst = 0.0;
  NoiseStream rng(1001, StreamDomain::initial_positions, 0);
  for (double r : {0.5, 1.0, 2.0}) {
    const auto params = pair_model({1.0, 0.5, r, 3.0, 4.0}, 2);
    for (double start : {0.6, 1.8}) {
      auto init = random_pair_state(rng, 2, start * r, start * r, 0.5);
      const auto traj = simulate(init, params, drag, rk4_config(1e-3, t_end, 1000, true));
      cs.observe(traj);
      const auto& last = traj.samples.back();
      const double rel = std::abs(distance(last.pos(0), last.pos(1)) - r) / r;
      worst = std::max(worst, rel);
      if (traj.termination != Termination::completed || !(rel <= 1e-3)) res.passed = false;
    }
  }
  res.detail = "worst |s(T) - r|/r = " + fmt(worst) + " at T=" + fmt(t_end) + " (limit 1e-3)";
  return res;
}

CriterionResult check_momentum_conservation(const VerifyOptions& options) {
  CriterionResult res{2, "momentum-conservation", true, ""};
  const double t_end = quick(options) ? 1.0 : 10.0;
  double worst = 0.0;
  NoiseStream rng(1002, StreamDomain::initial_positions, 0);
  for (std::size_t n : {2u, 10u, 100u}) {
    const ModelParams params({1.0, 0.5, 1.0, 3.0, 4.0}, 2, n, 0.0);
    const auto init = perturbed_lattice(rng, n, 2, 1.0, 0.2, 0.5);
    auto config = rk4_config(1e-3, t_end, 1000000, true);
    config.threads = options.workers;
    const auto traj = simulate(init, params, ExternalForceSpec::none(), config);
    auto p0 = total_velocity(traj.samples.front());
    const auto p1 = total_velocity(traj.samples.back());
    for (std::size_t k = 0; k < p0.size(); ++k) p0[k] -= p1[k];
    const double drift = vec_norm(p0);
    worst = std::max(worst, drift);
    if (traj.termination != Termination::completed || !(drift <= 1e-8)) res.passed = false;
  }
  res.detail = "worst |sum v(T) - sum v(0)| = " + fmt(worst) + " over N in {2,10,100} (limit 1e-8)";
  return res;
}

CriterionResult check_reduction_equivalence(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{3, "reduction-equivalence", true, ""};
  const std::size_t cases = quick(options) ? 5 : 20;
  const double t_end = 5.0;
  const double dt = 1e-4;
  const std::size_t every = 100;
  const auto params = pair_model({1.0, 0.5, 1.0, 3.0, 4.0}, 2);
  NoiseStream rng(1003, StreamDomain::initial_positions, 0);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto init = random_pair_state(rng, 2, 0.5, 2.0, 0.5);
    const auto full = simulate(init, params, ExternalForceSpec::none(), rk4_config(dt, t_end, every, false));
    cs.observe(full);
    const auto red = integrate_reduced_rk4(reduce(init), params, dt, t_end, every);
    if (full.termination != Termination::completed || full.samples.size() != red.size()) {
      res.passed = false;
      continue;
    }
    for (std::size_t k = 0; k < red.size(); ++k) {
      const auto f = reduce(full.samples[k]);
      worst = std::max({worst, std::abs(f.X - red[k].X), std::abs(f.Y - red[k].Y),
                        std::abs(f.Z - red[k].Z)});
    }
  }
  if (!(worst <= 1e-6)) res.passed = false;
  res.detail = "max |full - reduced| over X,Y,Z = " + fmt(worst) + " in " + std::to_string(cases) +
               " cases (limit 1e-6)";
  return res;
}

CriterionResult check_cauchy_schwarz(const CauchySchwarzMonitor& cs) {
  CriterionResult res{4, "cauchy-schwarz-monitor", true, ""};
  res.passed = cs.states_checked() > 0 && cs.violations() == 0;
  res.detail = std::to_string(cs.states_checked()) + " states, " +
               std::to_string(cs.violations()) + " violations, worst (Y - X^2 Z^2)/(1+Y) = " +
               fmt(cs.worst_relative_gap());
  return res;
}

CriterionResult check_deterministic_lyapunov(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{5, "lyapunov-H-growth", true, ""};
  const std::size_t cases = quick(options) ? 10 : 100;
  const double t_end = quick(options) ? 20.0 : 100.0;
  const auto params = pair_model({1.0, 0.5, 1.0, 3.0, 4.0}, 2);
  const double M = default_lyapunov_M(params);
  NoiseStream rng(1005, StreamDomain::initial_positions, 0);
  std::size_t completed = 0;
  std::size_t bound_failures = 0;
  double m1_max = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto init = random_pair_state(rng, 2, 0.5, 2.0, 1.0);
    const auto traj = simulate(init, params, ExternalForceSpec::none(), rk4_config(1e-3, t_end, 100, true));
    cs.observe(traj);
    if (traj.termination == Termination::completed) ++completed;
    // M1: smallest constant with dH/dt <= M1 H at every recorded state.
    double m1 = 0.0;
    std::vector<double> h;
    for (const auto& s : traj.samples) {
      const auto red = reduce(s);
      h.push_back(lyapunov_H(red, M, params.q()));
      m1 = std::max(m1, lyapunov_H_rate(red, params, M) / h.back());
    }
    if (!std::isfinite(m1)) {
      ++bound_failures;
      continue;
    }
    m1_max = std::max(m1_max, m1);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double t = traj.samples[k].t;
      if (!(h[k] <= h.front() * std::exp((m1 + 0.1) * t))) {
        ++bound_failures;
        break;
      }
    }
  }
  res.passed = completed == cases && bound_failures == 0;
  res.detail = std::to_string(completed) + "/" + std::to_string(cases) + " completed to T=" +
               fmt(t_end) + ", largest fitted M1 = " + fmt(m1_max) + ", " +
               std::to_string(bound_failures) + " bound violations";
  return res;
}

CriterionResult check_stochastic_lyapunov(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{6, "lyapunov-V-growth", true, ""};
  const std::size_t seeds = quick(options) ? 10 : 100;
  const double t_end = quick(options) ? 10.0 : 50.0;
  const std::size_t d = 3;
  const double sigma = 0.1;
  const double theta = 0.5;
  const double k_window = 100.0;
  const auto params = pair_model({1.0, 0.5, 1.0, 3.0, 4.0}, d, sigma);
  const double M = default_lyapunov_M(params);
  const double sig = combined_sigma(params);

  IntegratorConfig config;
  config.scheme = Scheme::euler_maruyama;
  config.dt = 1e-3;
  config.t_end = t_end;
  config.record_every = 100;

  std::vector<double> grid;
  std::vector<double> mean_v;
  std::size_t clean = 0;
  double m2 = 0.0;
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    NoiseStream rng(seed, StreamDomain::initial_positions, 0);
    const auto init = random_pair_state(rng, d, 0.5, 2.0, 0.5);
    config.seed = seed;
    const auto traj = simulate(init, params, ExternalForceSpec::none(), config);
    cs.observe(traj);
    if (traj.termination == Termination::completed) ++clean;

    std::vector<double> times;
    std::vector<ReducedState> path;
    for (const auto& s : traj.samples) {
      times.push_back(s.t);
      path.push_back(reduce(s));
    }
    const auto tau = tau_k(times, path, k_window);
    if (grid.empty()) {
      grid = times;
      mean_v.assign(grid.size(), 0.0);
    }
    const std::size_t stop = tau ? static_cast<std::size_t>(
                                       std::find(times.begin(), times.end(), *tau) - times.begin())
                                 : path.size() - 1;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& st = path[std::min({k, stop, path.size() - 1})];
      mean_v[k] += lyapunov_V(st, M, theta, d, params.q()) / static_cast<double>(seeds);
    }
    for (std::size_t k = 0; k <= std::min(stop, path.size() - 1); ++k) {
      const auto& st = path[k];
      m2 = std::max(m2, lyapunov_V_generator(st, params, M, theta, sig, d) /
                            lyapunov_V(st, M, theta, d, params.q()));
    }
  }
  bool bounded = std::isfinite(m2);
  for (std::size_t k = 0; bounded && k < grid.size(); ++k) {
    if (!(mean_v[k] <= mean_v.front() * std::exp((m2 + 0.1) * grid[k]))) bounded = false;
  }
  res.passed = clean == seeds && bounded;
  res.detail = std::to_string(clean) + "/" + std::to_string(seeds) +
               " seeds completed to T=" + fmt(t_end) + ", fitted M2 = " + fmt(m2) +
               (bounded ? ", mean V(t^tau_k) within bound" : ", mean V(t^tau_k) exceeds bound");
  return res;
}

CriterionResult check_collision_contrast(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{7, "collision-contrast", true, ""};
  const std::size_t seeds = quick(options) ? 20 : 100;
  const auto base = *find_builtin("collision-1d");
  std::size_t collided[2] = {0, 0};
  const double sigmas[2] = {0.0, 5.0};
  for (int k = 0; k < 2; ++k) {
    const auto spec = with_override(base, "sigma", sigmas[k]);
    for (std::size_t seed = 0; seed < seeds; ++seed) {
      const auto run = run_scenario(spec, seed);
      cs.observe(run.trajectory);
      if (run.record.classification == Classification::collided) ++collided[k];
    }
  }
  res.passed = collided[0] == 0 && collided[1] >= 1;
  res.detail = "collided: sigma=0 " + std::to_string(collided[0]) + "/" + std::to_string(seeds) +
               " (need 0), sigma=5 " + std::to_string(collided[1]) + "/" + std::to_string(seeds) +
               " (need >= 1)";
  return res;
}

CriterionResult check_schooling(const VerifyOptions& options) {
  CriterionResult res{8, "schooling-robustness", true, ""};
  const std::size_t seeds = quick(options) ? 2 : 10;
  auto spec = *find_builtin("schooling-2d");
  spec.integrator.threads = options.workers;
  const double r = spec.params.r();
  const double diagonal = (spec.init_box.hi - spec.init_box.lo) * std::sqrt(2.0);
  std::size_t ok = 0;
  double min_sep = std::numeric_limits<double>::infinity();
  double max_diam = 0.0;
  double max_speed = 0.0;
  for (std::size_t seed = 0; seed < seeds; ++seed) {
    const auto run = run_scenario(spec, seed);
    const auto& d = run.record.final_diagnostics;
    min_sep = std::min(min_sep, d.min_pair_distance);
    max_diam = std::max(max_diam, d.max_pair_distance);
    max_speed = std::max(max_speed, d.mean_speed);
    const bool good = run.record.termination == Termination::completed &&
                      run.record.t_final == spec.integrator.t_end &&
                      d.min_pair_distance > 0.2 * r && d.max_pair_distance < diagonal &&
                      d.mean_speed < 0.05;
    if (good) ++ok;
  }
  res.passed = ok == seeds;
  res.detail = std::to_string(ok) + "/" + std::to_string(seeds) + " seeds ok; final min distance " +
               fmt(min_sep) + " (> " + fmt(0.2 * r) + "), diameter " + fmt(max_diam) + " (< " +
               fmt(diagonal) + "), mean speed " + fmt(max_speed) + " (< 0.05)";
  return res;
}

CriterionResult check_integrator_orders(const VerifyOptions& options, CauchySchwarzMonitor& cs) {
  CriterionResult res{9, "integrator-orders", true, ""};

  // rk4 against a much finer rk4 solution on a smooth pair orbit.
  const auto det = pair_model({1.0, 0.5, 1.0, 3.0, 4.0}, 2);
  SwarmState init(2, 2);
  init.x = {0.0, 0.0, 1.4, 0.3};
  init.v = {0.3, -0.2, -0.4, 0.5};
  const double T = 2.0;
  auto final_state = [&](double dt) {
    auto traj = simulate(init, det, ExternalForceSpec::none(), rk4_config(dt, T, 1000000, false));
    cs.observe(traj);
    return traj.samples.back();
  };
  const auto reference = final_state(T / 4096);
  std::vector<double> hs, errs;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    const auto s = final_state(dt);
    double e = 0.0;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      e = std::max({e, std::abs(s.x[k] - reference.x[k]), std::abs(s.v[k] - reference.v[k])});
    }
    hs.push_back(dt);
    errs.push_back(e);
  }
  const double rk4_order = fitted_order(hs, errs);

  // Euler-Maruyama strong error E|X_h(T) - X_ref(T)| for h in 1e-2 .. 1e-4,
  // every step size driven by the same Brownian paths on a 1e-5 grid.
  const double sigma = 0.2;
  const auto sto = pair_model({1.0, 0.5, 1.0, 3.0, 4.0}, 2, sigma);
  const double h_fine = 1e-5;
  const std::size_t n_fine = 20000;
  const std::vector<std::size_t> strides = {1000, 500, 200, 100, 50, 20, 10};
  const std::size_t paths = quick(options) ? 50 : 400;
  std::vector<double> em_err(strides.size(), 0.0);
  const std::size_t width = init.x.size();
  std::vector<double> dw(n_fine * width);
  for (std::size_t path = 0; path < paths; ++path) {
    NoiseStream rng(path, StreamDomain::noise, 7);
    for (auto& w : dw) w = rng.normal() * std::sqrt(h_fine);
    auto solve = [&](std::size_t stride) {
      const double h = h_fine * static_cast<double>(stride);
      SwarmState s = init;
      std::vector<double> inc(width);
      for (std::size_t n = 0; n < n_fine / stride; ++n) {
        std::fill(inc.begin(), inc.end(), 0.0);
        for (std::size_t f = n * stride; f < (n + 1) * stride; ++f) {
          for (std::size_t k = 0; k < width; ++k) inc[k] += dw[f * width + k];
        }
        s = step_euler_maruyama(s, h, sto, ExternalForceSpec::none(), inc);
      }
      cs.observe(s);
      return s;
    };
    const auto ref = solve(1);
    for (std::size_t l = 0; l < strides.size(); ++l) {
      const auto s = solve(strides[l]);
      double e = 0.0;
      for (std::size_t k = 0; k < width; ++k) e += (s.x[k] - ref.x[k]) * (s.x[k] - ref.x[k]);
      em_err[l] += std::sqrt(e) / static_cast<double>(paths);
    }
  }
  std::vector<double> em_h;
  for (std::size_t stride : strides) em_h.push_back(h_fine * static_cast<double>(stride));
  const double em_order = fitted_order(em_h, em_err);

  const bool rk4_ok = rk4_order >= 3.8;
  const bool em_ok = em_order >= 0.4 && em_order <= 0.7;
  res.passed = rk4_ok && em_ok;
  res.detail = "rk4 order " + fmt(rk4_order) + (rk4_ok ? " (>= 3.8 ok)" : " (need >= 3.8)") +
               "; Euler-Maruyama strong order " + fmt(em_order) +
               (em_ok ? " (in [0.4, 0.7] ok)" : " (need [0.4, 0.7])");
  return res;
}

CriterionResult check_determinism(const VerifyOptions& options) {
  CriterionResult res{10, "determinism", true, ""};
  ScratchDir scratch(options.scratch_dir);
  const auto& root = scratch.path();
  std::size_t compared = 0;
  std::vector<std::string> mismatched;
  const std::uint64_t seed = 7;
  for (auto spec : builtin_scenarios()) {
    if (spec.params.n_particles() > 2) spec.integrator.t_end = quick(options) ? 0.2 : 1.0;
    const auto dir = root / spec.name;
    spec.integrator.threads = 1;
    run_scenario(spec, seed, {dir / "a"});
    run_scenario(spec, seed, {dir / "b"});
    spec.integrator.threads = 4;
    run_scenario(spec, seed, {dir / "c"});
    for (const char* file : {"trajectory.csv", "diagnostics.csv", "snapshots.dat"}) {
      if (!std::filesystem::exists(dir / "a" / file)) continue;
      for (const char* other : {"b", "c"}) {
        ++compared;
        if (!same_bytes(dir / "a" / file, dir / other / file)) {
          mismatched.push_back(spec.name + "/" + other + "/" + file);
        }
      }
    }
  }

  // Concurrent replicates must write the same files as sequential ones.
  const auto spec = *find_builtin("collision-2d");
  const std::size_t count = 4;
  run_replicates(spec, 0, count, 1, {root / "replicates-1"});
  run_replicates(spec, 0, count, 4, {root / "replicates-4"});
  for (std::size_t s = 0; s < count; ++s) {
    const auto name = "seed-" + std::to_string(s);
    ++compared;
    if (!same_bytes(root / "replicates-1" / name / "trajectory.csv",
                    root / "replicates-4" / name / "trajectory.csv")) {
      mismatched.push_back("replicates/" + name);
    }
  }

  res.passed = mismatched.empty() && compared > 0;
  res.detail = std::to_string(compared) + " file pairs compared, " +
               std::to_string(mismatched.size()) + " differ";
  if (!mismatched.empty()) res.detail += " (first: " + mismatched.front() + ")";
  return res;
}

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options) {
  CauchySchwarzMonitor cs;
  std::vector<CriterionResult> out;
  out.push_back(check_pair_equilibrium(options, cs));
  out.push_back(check_momentum_conservation(options));
  out.push_back(check_reduction_equivalence(options, cs));
  out.push_back(check_deterministic_lyapunov(options, cs));
  out.push_back(check_stochastic_lyapunov(options, cs));
  out.push_back(check_collision_contrast(options, cs));
  out.push_back(check_schooling(options));
  out.push_back(check_integrator_orders(options, cs));
  out.push_back(check_determinism(options));
  out.insert(out.begin() + 3, check_cauchy_schwarz(cs));
  return out;
}

}  // namespace fishschool
