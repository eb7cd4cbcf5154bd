#include "fishschool/forces.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace fishschool {

namespace {

constexpr int kMaxIntegerExponent = 64;

int as_small_integer(double e) {
  if (e == std::floor(e) && e > 0.0 && e <= kMaxIntegerExponent) return static_cast<int>(e);
  return -1;
}

double ipow(double base, int e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

// Accumulates the interaction part of dv_i/dt for i in [begin, end).
void accumulate_block(const SwarmState& state, const PairKernel& kernel,
                      const ExternalForceSpec& external, double split_rate, std::size_t begin,
                      std::size_t end, std::span<double> dvdt) {
  const std::size_t d = state.dim;
  for (std::size_t i = begin; i < end; ++i) {
    const auto xi = state.pos(i);
    const auto vi = state.vel(i);
    auto out = dvdt.subspan(i * d, d);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < state.n; ++j) {
      if (j == i) continue;
      const auto xj = state.pos(j);
      const auto vj = state.vel(j);
      double d2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double dx = xi[k] - xj[k];
        d2 += dx * dx;
      }
      if (!(d2 > 0.0)) throw SingularForce(i, j);
      auto w = kernel.weights(d2);
      if (!std::isfinite(w.position) || !std::isfinite(w.velocity)) throw SingularForce(i, j);
      if (-2.0 * w.velocity > split_rate) w.velocity = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        out[k] += w.position * (xi[k] - xj[k]) + w.velocity * (vi[k] - vj[k]);
      }
    }
    add_external_force(external, state.t, xi, vi, out);
  }
}

}  // namespace

SingularForce::SingularForce(std::size_t first, std::size_t second)
    : std::runtime_error("coincident positions of particles " +
                         std::to_string(std::min(first, second)) + " and " +
                         std::to_string(std::max(first, second))),
      first_(std::min(first, second)),
      second_(std::max(first, second)) {}

PairKernel::PairKernel(const ModelParams& params)
    : alpha1_(params.alpha1()),
      beta1_(params.beta1()),
      gamma_(params.gamma()),
      p_(params.p()),
      q_(params.q()),
      p_int_(as_small_integer(params.p())),
      q_int_(as_small_integer(params.q())) {}

PairKernel::Powers PairKernel::inverse_powers(double dist_sq) const {
  if (p_int_ > 0 && q_int_ > 0) {
    const double inv2 = 1.0 / dist_sq;
    const bool need_odd = (p_int_ & 1) || (q_int_ & 1);
    const double inv1 = need_odd ? std::sqrt(inv2) : 0.0;
    double inv_p = ipow(inv2, p_int_ / 2);
    double inv_q = ipow(inv2, q_int_ / 2);
    if (p_int_ & 1) inv_p *= inv1;
    if (q_int_ & 1) inv_q *= inv1;
    return {inv_p, inv_q};
  }
  return {std::pow(dist_sq, -0.5 * p_), std::pow(dist_sq, -0.5 * q_)};
}

PairKernel::Weights PairKernel::weights(double dist_sq) const {
  const auto pw = inverse_powers(dist_sq);
  return {-alpha1_ * (pw.inv_p - gamma_ * pw.inv_q), -beta1_ * (pw.inv_p + gamma_ * pw.inv_q)};
}

PairKernel::Rates PairKernel::rates(double dist_sq) const {
  const auto pw = inverse_powers(dist_sq);
  return {2.0 * (beta1_ * (pw.inv_p + gamma_ * pw.inv_q)),
          2.0 * alpha1_ * (p_ * pw.inv_p + q_ * gamma_ * pw.inv_q)};
}

std::vector<double> pair_position_force(std::span<const double> x_i, std::span<const double> x_j,
                                        const ModelParams& params) {
  const double d2 = squared_distance(x_i, x_j);
  if (!(d2 > 0.0)) throw SingularForce(0, 1);
  const auto w = PairKernel(params).weights(d2);
  std::vector<double> f(x_i.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = w.position * (x_i[k] - x_j[k]);
  return f;
}

std::vector<double> pair_velocity_force(std::span<const double> x_i, std::span<const double> x_j,
                                        std::span<const double> v_i, std::span<const double> v_j,
                                        const ModelParams& params) {
  const double d2 = squared_distance(x_i, x_j);
  if (!(d2 > 0.0)) throw SingularForce(0, 1);
  const auto w = PairKernel(params).weights(d2);
  std::vector<double> f(v_i.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = w.velocity * (v_i[k] - v_j[k]);
  return f;
}

void acceleration_into(const SwarmState& state, const ExternalForceSpec& external,
                       const PairKernel& kernel, std::span<double> dvdt, unsigned threads,
                       double split_rate) {
  const std::size_t n = state.n;
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    accumulate_block(state, kernel, external, split_rate, 0, n, dvdt);
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          accumulate_block(state, kernel, external, split_rate, begin, end, dvdt);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  // Lowest block first, so the reported pair matches the serial path.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

DriftEval drift(const SwarmState& state, const ModelParams& params,
                const ExternalForceSpec& external, unsigned threads) {
  if (!state.consistent() || state.n != params.n_particles() || state.dim != params.dim()) {
    throw InvalidParameter("state shape does not match model parameters");
  }
  DriftEval out{state.v, std::vector<double>(state.v.size())};
  acceleration_into(state, external, PairKernel(params), out.dvdt, threads);
  return out;
}

PairScan scan_pairs(const SwarmState& state, const ExternalForceSpec& external,
                    const PairKernel& kernel, double split_rate) {
  const std::size_t n = state.n;
  std::vector<double> damping(n, 0.0);
  std::vector<double> spring(n, 0.0);
  double min_d2 = std::numeric_limits<double>::infinity();
  PairScan scan;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d2 = squared_distance(state.pos(i), state.pos(j));
      min_d2 = std::min(min_d2, d2);
      if (!(d2 > 0.0)) continue;
      const auto r = kernel.rates(d2);
      if (r.damping > split_rate) {
        scan.split_pairs.emplace_back(i, j);
      } else {
        damping[i] += r.damping;
        damping[j] += r.damping;
      }
      spring[i] += r.spring_sq;
      spring[j] += r.spring_sq;
    }
  }
  const double drag =
      external.kind == ExternalForceSpec::Kind::linear_drag ? external.drag_coefficient : 0.0;
  scan.min_distance = std::sqrt(min_d2);
  if (min_d2 == 0.0) {
    scan.max_rate = std::numeric_limits<double>::infinity();
    return scan;
  }
  for (std::size_t i = 0; i < n; ++i) {
    scan.max_rate = std::max(scan.max_rate, drag + damping[i] + std::sqrt(spring[i]));
  }
  return scan;
}

}  // namespace fishschool
