#include "fishschool/reduced2.hpp"

#include <algorithm>
#include <cmath>

#include "fishschool/forces.hpp"

namespace fishschool {

ReducedState reduce(std::span<const double> x1, std::span<const double> x2,
                    std::span<const double> v1, std::span<const double> v2) {
  double xi2 = 0.0, eta2 = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < x1.size(); ++k) {
    const double xi = x1[k] - x2[k];
    const double eta = v1[k] - v2[k];
    xi2 += xi * xi;
    eta2 += eta * eta;
    dot += xi * eta;
  }
  if (!(xi2 > 0.0)) throw SingularForce(0, 1);
  return {1.0 / std::sqrt(xi2), eta2, dot};
}

ReducedState reduce(const SwarmState& state) {
  if (state.n != 2) throw InvalidParameter("reduce() needs exactly two particles");
  return reduce(state.pos(0), state.pos(1), state.vel(0), state.vel(1));
}

ReducedRates xyz_drift_det(const ReducedState& s, const ModelParams& params) {
  const double a1 = params.alpha1();
  const double b1 = params.beta1();
  const double g = params.gamma();
  const double Xp = std::pow(s.X, params.p());
  const double Xq = std::pow(s.X, params.q());
  const double damping = b1 * Xp + b1 * g * Xq;
  ReducedRates r;
  r.dX = -s.X * s.X * s.X * s.Z;
  r.dY = -4.0 * a1 * Xp * s.Z + 4.0 * a1 * g * Xq * s.Z - 4.0 * damping * s.Y;
  r.dZ = s.Y - 2.0 * a1 * std::pow(s.X, params.p() - 2.0) +
         2.0 * a1 * g * std::pow(s.X, params.q() - 2.0) - 2.0 * damping * s.Z;
  return r;
}

ReducedRates xyz_drift_stoch(const ReducedState& s, const ModelParams& params, double sigma,
                             std::size_t d) {
  ReducedRates r = xyz_drift_det(s, params);
  const double ito = 0.5 * (static_cast<double>(d) - 3.0) * sigma * sigma;
  r.dX -= ito * s.X * s.X * s.X;
  return r;
}

double combined_sigma(const ModelParams& params) {
  if (params.n_particles() != 2) throw InvalidParameter("combined_sigma needs two particles");
  return std::hypot(params.sigma(0), params.sigma(1));
}

std::vector<ReducedState> integrate_reduced_rk4(const ReducedState& initial,
                                                const ModelParams& params, double dt,
                                                double t_end, std::size_t record_every) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidParameter("need dt > 0 and t_end >= 0");
  if (record_every < 1) throw InvalidParameter("record_every must be >= 1");
  auto add = [](const ReducedState& s, const ReducedRates& k, double h) {
    return ReducedState{s.X + h * k.dX, s.Y + h * k.dY, s.Z + h * k.dZ};
  };
  std::vector<ReducedState> out{initial};
  ReducedState s = initial;
  double t = 0.0;
  std::size_t steps = 0;
  while (t < t_end) {
    double h = dt;
    const double remaining = t_end - t;
    const bool last = remaining <= h * (1.0 + 1e-9);
    if (last) h = remaining;
    const auto k1 = xyz_drift_det(s, params);
    const auto k2 = xyz_drift_det(add(s, k1, 0.5 * h), params);
    const auto k3 = xyz_drift_det(add(s, k2, 0.5 * h), params);
    const auto k4 = xyz_drift_det(add(s, k3, h), params);
    s.X += h / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    s.Y += h / 6.0 * (k1.dY + 2.0 * k2.dY + 2.0 * k3.dY + k4.dY);
    s.Z += h / 6.0 * (k1.dZ + 2.0 * k2.dZ + 2.0 * k3.dZ + k4.dZ);
    t = last ? t_end : t + h;
    ++steps;
    if (steps % record_every == 0 || last) out.push_back(s);
  }
  return out;
}

double lyapunov_H(const ReducedState& s, double M, double q) {
  return std::pow(s.X, q - 4.0) + std::pow(s.X, q - 2.0) + s.Y * s.Y + M * s.Z * s.Z + s.Y +
         std::pow(s.X, -4.0) + M;
}

double lyapunov_H_rate(const ReducedState& s, const ModelParams& params, double M) {
  const double q = params.q();
  const auto r = xyz_drift_det(s, params);
  const double dHdX =
      (q - 4.0) * std::pow(s.X, q - 5.0) + (q - 2.0) * std::pow(s.X, q - 3.0) -
      4.0 * std::pow(s.X, -5.0);
  const double dHdY = 2.0 * s.Y + 1.0;
  const double dHdZ = 2.0 * M * s.Z;
  return dHdX * r.dX + dHdY * r.dY + dHdZ * r.dZ;
}

bool check_theta(std::size_t d, double q, double theta) {
  const auto interval = theta_interval(d, q);
  return interval && theta > interval->first && theta < interval->second;
}

std::optional<std::pair<double, double>> theta_interval(std::size_t d, double q) {
  const double lo = std::max(q - 6.0, 0.0);
  const double hi = std::min(static_cast<double>(d) - 2.0, q - 2.0);
  if (!(lo < hi)) return std::nullopt;
  return std::pair{lo, hi};
}

bool stochastic_global_regime(std::size_t d, double q) {
  return static_cast<double>(d) > std::max(q - 4.0, 2.0) && q > 2.0;
}

double lyapunov_V(const ReducedState& s, double M, double theta, std::size_t d, double q) {
  if (!check_theta(d, q, theta)) {
    throw InvalidParameter("theta is not admissible: need max{q-6,0} < theta < min{d-2,q-2}");
  }
  return std::pow(s.X, theta) + std::pow(s.X, -4.0) + s.Y * s.Y + M * s.Z * s.Z + M;
}

double lyapunov_V_generator(const ReducedState& s, const ModelParams& params, double M,
                            double theta, double sigma, std::size_t d) {
  const auto r = xyz_drift_stoch(s, params, sigma, d);
  const double s2 = sigma * sigma;
  const double dd = static_cast<double>(d);
  // first-order terms: grad V . drift
  double f = theta * std::pow(s.X, theta - 1.0) * r.dX + 4.0 * std::pow(s.X, -2.0) * s.Z +
             2.0 * s.Y * r.dY + 2.0 * M * s.Z * r.dZ;
  // second-order Ito terms from X^theta, |zeta|^4 and M Z^2
  f += 0.5 * theta * (theta - 1.0) * s2 * std::pow(s.X, theta + 2.0);
  f += 2.0 * (dd + 2.0) * s2 * std::pow(s.X, -2.0);
  f += s2 * M * s.Y;
  return f;
}

double default_lyapunov_M(const ModelParams& params) {
  return 10.0 * std::max({1.0, params.alpha1(), params.beta1(), params.gamma()});
}

std::optional<double> tau_k(std::span<const double> times, std::span<const ReducedState> path,
                            double k) {
  if (times.size() != path.size()) throw InvalidParameter("times and path lengths differ");
  auto outside = [k](const ReducedState& s) {
    return !(s.X > 1.0 / k && s.X < k) || !(s.Y >= 0.0 && s.Y < k);
  };
  if (path.empty()) return std::nullopt;
  if (outside(path.front())) {
    throw InvalidParameter("k too small: the initial state is already outside the window");
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (outside(path[i])) return times[i];
  }
  return std::nullopt;
}

}  // namespace fishschool
