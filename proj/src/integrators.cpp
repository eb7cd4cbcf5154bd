#include "fishschool/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "fishschool/forces.hpp"

namespace fishschool {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::rk4: return "rk4";
    case Scheme::euler_maruyama: return "euler_maruyama";
    case Scheme::euler: return "euler";
  }
  return "?";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::completed: return "completed";
    case Termination::collision: return "collision";
    case Termination::explosion: return "explosion";
    case Termination::singular_force: return "singular_force";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (auto s : {Scheme::rk4, Scheme::euler_maruyama, Scheme::euler}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidParameter("unknown integration scheme '" + std::string(name) + "'");
}

Termination parse_termination(std::string_view name) {
  for (auto t : {Termination::completed, Termination::collision, Termination::explosion,
                 Termination::singular_force}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidParameter("unknown termination '" + std::string(name) + "'");
}

void IntegratorConfig::validate(const ModelParams& params) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be > 0");
  if (!(dt_min > 0.0) || dt_min > dt) throw InvalidParameter("need 0 < dt_min <= dt");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidParameter("t_end must be >= 0");
  if (!(close_approach_factor > 0.0 && close_approach_factor < 1.0)) {
    throw InvalidParameter("close_approach_factor must lie in (0, 1)");
  }
  if (!(stiffness_safety > 0.0)) throw InvalidParameter("stiffness_safety must be > 0");
  if (record_every < 1) throw InvalidParameter("record_every must be >= 1");
  if (!(collision_eps_for(params) >= 0.0)) throw InvalidParameter("collision_eps must be >= 0");
  if (!(overflow_bound > 0.0)) throw InvalidParameter("overflow_bound must be > 0");
  if (!(min_separation_for(params) >= 0.0)) throw InvalidParameter("min_separation must be >= 0");
  if (scheme == Scheme::rk4 && !params.is_deterministic()) {
    throw InvalidParameter("rk4 requires all sigma_i = 0; use euler_maruyama for noisy runs");
  }
}

namespace {

// Reusable buffers for one model; every step writes into `out`.
class Stepper {
 public:
  Stepper(const ModelParams& params, const ExternalForceSpec& external, unsigned threads)
      : params_(params), external_(external), kernel_(params), threads_(threads) {}

  /// Alignment of pairs faster than split_rate is left out of the drift and
  /// applied exactly by euler / euler_maruyama steps; `split` lists the pairs
  /// that exceed it in the current state.
  void set_split(double split_rate, std::vector<std::pair<std::size_t, std::size_t>> split) {
    split_rate_ = split_rate;
    split_ = std::move(split);
  }

  void euler_maruyama(const SwarmState& s, double h, std::span<NoiseStream> streams,
                      SwarmState& out) {
    accel(s, a1_, split_rate_);
    advance_explicit(s, h, out);
    relax_split_pairs(s, h, out);
    if (streams.empty()) return;
    const std::size_t d = s.dim;
    for (std::size_t i = 0; i < s.n; ++i) {
      const double sigma = params_.sigma(i);
      if (sigma == 0.0) continue;
      const double scale = sigma * std::sqrt(h);
      for (std::size_t k = 0; k < d; ++k) out.x[i * d + k] += scale * streams[i].normal();
    }
  }

  void euler_maruyama(const SwarmState& s, double h, std::span<const double> dw, SwarmState& out) {
    accel(s, a1_, split_rate_);
    advance_explicit(s, h, out);
    relax_split_pairs(s, h, out);
    const std::size_t d = s.dim;
    for (std::size_t i = 0; i < s.n; ++i) {
      const double sigma = params_.sigma(i);
      if (sigma == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) out.x[i * d + k] += sigma * dw[i * d + k];
    }
  }

  void euler(const SwarmState& s, double h, SwarmState& out) {
    accel(s, a1_, split_rate_);
    advance_explicit(s, h, out);
    relax_split_pairs(s, h, out);
  }

  void rk4(const SwarmState& s, double h, SwarmState& out) {
    const std::size_t m = s.x.size();
    const double half = 0.5 * h;
    accel(s, a1_);

    stage_ = s;
    stage_.t = s.t + half;
    for (std::size_t k = 0; k < m; ++k) {
      stage_.x[k] = s.x[k] + half * s.v[k];
      stage_.v[k] = s.v[k] + half * a1_[k];
    }
    v2_ = stage_.v;
    accel(stage_, a2_);

    for (std::size_t k = 0; k < m; ++k) {
      stage_.x[k] = s.x[k] + half * v2_[k];
      stage_.v[k] = s.v[k] + half * a2_[k];
    }
    v3_ = stage_.v;
    accel(stage_, a3_);

    stage_.t = s.t + h;
    for (std::size_t k = 0; k < m; ++k) {
      stage_.x[k] = s.x[k] + h * v3_[k];
      stage_.v[k] = s.v[k] + h * a3_[k];
    }
    accel(stage_, a4_);

    out.n = s.n;
    out.dim = s.dim;
    out.t = s.t + h;
    out.x.resize(m);
    out.v.resize(m);
    const double sixth = h / 6.0;
    for (std::size_t k = 0; k < m; ++k) {
      out.x[k] = s.x[k] + sixth * (s.v[k] + 2.0 * v2_[k] + 2.0 * v3_[k] + stage_.v[k]);
      out.v[k] = s.v[k] + sixth * (a1_[k] + 2.0 * a2_[k] + 2.0 * a3_[k] + a4_[k]);
    }
  }

  PairScan scan(const SwarmState& s, double split_rate) const {
    return scan_pairs(s, external_, kernel_, split_rate);
  }

 private:
  void accel(const SwarmState& s, std::vector<double>& a,
             double split_rate = std::numeric_limits<double>::infinity()) {
    a.resize(s.v.size());
    acceleration_into(s, external_, kernel_, a, threads_, split_rate);
  }

  // Exponential Euler for the relative velocity u = v_i - v_j of each split
  // pair: u' = da - w u with w frozen at the pre-step positions and da the
  // relative explicit acceleration, so that u(h) = e u(0) + (1 - e)/w da with
  // e = exp(-w h). The pair's mean velocity keeps its explicit update.
  void relax_split_pairs(const SwarmState& s, double h, SwarmState& out) const {
    const std::size_t d = s.dim;
    for (const auto& [i, j] : split_) {
      const double rate = kernel_.rates(squared_distance(s.pos(i), s.pos(j))).damping;
      const double decay = std::exp(-rate * h);
      const double gain = -std::expm1(-rate * h) / rate;
      for (std::size_t k = 0; k < d; ++k) {
        const double da = a1_[i * d + k] - a1_[j * d + k];
        const double u_explicit = out.v[i * d + k] - out.v[j * d + k];
        const double u_start = u_explicit - h * da;
        const double half_change = 0.5 * (decay * u_start + gain * da - u_explicit);
        out.v[i * d + k] += half_change;
        out.v[j * d + k] -= half_change;
      }
    }
  }

  // x + v h, v + a1 h
  void advance_explicit(const SwarmState& s, double h, SwarmState& out) {
    const std::size_t m = s.x.size();
    out.n = s.n;
    out.dim = s.dim;
    out.t = s.t + h;
    out.x.resize(m);
    out.v.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      out.x[k] = s.x[k] + s.v[k] * h;
      out.v[k] = s.v[k] + a1_[k] * h;
    }
  }

  const ModelParams& params_;
  ExternalForceSpec external_;
  PairKernel kernel_;
  unsigned threads_;
  double split_rate_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> split_;
  std::vector<double> a1_, a2_, a3_, a4_, v2_, v3_;
  SwarmState stage_;
};

void require_shape(const SwarmState& state, const ModelParams& params) {
  if (!state.consistent() || state.n != params.n_particles() || state.dim != params.dim()) {
    throw InvalidParameter("state shape does not match model parameters");
  }
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be > 0");
}

bool exceeds_bound(const SwarmState& s, double bound) {
  auto bad = [bound](double c) { return !std::isfinite(c) || std::abs(c) > bound; };
  return std::any_of(s.x.begin(), s.x.end(), bad) || std::any_of(s.v.begin(), s.v.end(), bad);
}

// In one dimension two particles cannot exchange order without meeting.
bool order_changed_1d(const SwarmState& before, const SwarmState& after) {
  for (std::size_t i = 0; i < before.n; ++i) {
    for (std::size_t j = i + 1; j < before.n; ++j) {
      const bool was_less = before.x[i] < before.x[j];
      const bool is_less = after.x[i] < after.x[j];
      if (was_less != is_less) return true;
    }
  }
  return false;
}

}  // namespace

SwarmState step_rk4(const SwarmState& state, double dt, const ModelParams& params,
                    const ExternalForceSpec& external, unsigned threads) {
  require_shape(state, params);
  require_dt(dt);
  if (!params.is_deterministic()) throw InvalidParameter("rk4 requires all sigma_i = 0");
  Stepper stepper(params, external, threads);
  SwarmState out;
  stepper.rk4(state, dt, out);
  return out;
}

SwarmState step_euler(const SwarmState& state, double dt, const ModelParams& params,
                      const ExternalForceSpec& external, unsigned threads) {
  require_shape(state, params);
  require_dt(dt);
  Stepper stepper(params, external, threads);
  SwarmState out;
  stepper.euler(state, dt, out);
  return out;
}

SwarmState step_euler_maruyama(const SwarmState& state, double dt, const ModelParams& params,
                               const ExternalForceSpec& external,
                               std::span<NoiseStream> streams, unsigned threads) {
  require_shape(state, params);
  require_dt(dt);
  if (streams.size() != state.n) throw InvalidParameter("need one noise stream per particle");
  Stepper stepper(params, external, threads);
  SwarmState out;
  stepper.euler_maruyama(state, dt, streams, out);
  return out;
}

SwarmState step_euler_maruyama(const SwarmState& state, double dt, const ModelParams& params,
                               const ExternalForceSpec& external, std::span<const double> dw,
                               unsigned threads) {
  require_shape(state, params);
  require_dt(dt);
  if (dw.size() != state.x.size()) throw InvalidParameter("need n*dim Wiener increments");
  Stepper stepper(params, external, threads);
  SwarmState out;
  stepper.euler_maruyama(state, dt, dw, out);
  return out;
}

Trajectory simulate(const SwarmState& initial, const ModelParams& params,
                    const ExternalForceSpec& external, const IntegratorConfig& config) {
  config.validate(params);
  require_shape(initial, params);
  const auto report = validate_state(initial, config.min_separation_for(params));
  if (!report.ok()) {
    throw InvalidParameter("initial state is not in the phase space: particles " +
                           std::to_string(report.offending_pairs.front().first) + " and " +
                           std::to_string(report.offending_pairs.front().second) +
                           " are too close");
  }

  Trajectory traj{params, external, config, {}, Termination::completed, 0,
                  report.min_distance, config.dt};
  SwarmState current = initial;
  current.t = 0.0;
  traj.samples.push_back(current);

  Stepper stepper(params, external, config.threads);
  auto streams = particle_streams(config.seed, params.n_particles());
  const double eps = config.collision_eps_for(params);
  const double shrink = config.close_approach_factor;
  const double close_distance = shrink * params.r();
  double dt_current = config.dt;
  const double split_rate = config.adaptive && config.scheme != Scheme::rk4
                                ? config.stiffness_safety / config.dt
                                : std::numeric_limits<double>::infinity();
  double noise_sq = 0.0;
  if (config.scheme == Scheme::euler_maruyama) {
    for (std::size_t i = 0; i < params.n_particles(); ++i) {
      noise_sq = std::max(noise_sq, 2.0 * params.sigma(i) * params.sigma(i));
    }
  }
  SwarmState next;

  while (current.t < config.t_end) {
    double h = config.dt;
    if (config.adaptive) {
      auto scan = stepper.scan(current, split_rate);
      double target = scan.min_distance < close_distance ? config.dt * shrink : config.dt;
      const double resolve_sq = scan.min_distance * scan.min_distance;
      while (target >= config.dt_min && (target * scan.max_rate > config.stiffness_safety ||
                                         target * noise_sq > resolve_sq)) {
        target *= shrink;
      }
      if (target < config.dt_min) {
        // Resolving this approach would need a step below the floor.
        traj.termination = Termination::collision;
        break;
      }
      dt_current = target < dt_current ? target : std::min(target, dt_current / shrink);
      h = dt_current;
      stepper.set_split(split_rate, std::move(scan.split_pairs));
    }

    const double remaining = config.t_end - current.t;
    const bool last = remaining <= h * (1.0 + 1e-9);
    if (last) h = remaining;
    traj.smallest_dt = std::min(traj.smallest_dt, h);

    try {
      switch (config.scheme) {
        case Scheme::rk4: stepper.rk4(current, h, next); break;
        case Scheme::euler: stepper.euler(current, h, next); break;
        case Scheme::euler_maruyama: stepper.euler_maruyama(current, h, streams, next); break;
      }
    } catch (const SingularForce&) {
      traj.termination = Termination::singular_force;
      break;
    }
    if (last) next.t = config.t_end;
    ++traj.steps;

    const double dmin = min_pair_distance(next);
    traj.min_distance_seen = std::min(traj.min_distance_seen, dmin);
    if (exceeds_bound(next, config.overflow_bound)) {
      traj.termination = Termination::explosion;
    } else if (dmin < eps || (next.dim == 1 && order_changed_1d(current, next))) {
      traj.termination = Termination::collision;
    }
    std::swap(current, next);
    if (traj.termination != Termination::completed) break;
    if (traj.steps % config.record_every == 0 || last) traj.samples.push_back(current);
  }

  if (traj.samples.back().t != current.t) traj.samples.push_back(current);
  return traj;
}

}  // namespace fishschool
