#include <cmath>
#include <random>

#include "doctest.h"
#include "fishschool/forces.hpp"
#include "fishschool/integrators.hpp"
#include "fishschool/reduced2.hpp"
#include "fishschool/verify.hpp"

using namespace fishschool;

namespace {

const Interaction kRef{1.0, 0.5, 1.0, 3.0, 4.0};

ModelParams unit_model(std::size_t d = 2, double sigma = 0.0) {
  return ModelParams({1.0, 1.0, 1.0, 3.0, 4.0}, d, 2, sigma);
}

SwarmState pair_from(std::vector<double> xi, std::vector<double> eta) {
  const std::size_t d = xi.size();
  SwarmState s(2, d);
  for (std::size_t k = 0; k < d; ++k) {
    s.x[k] = 0.25 + xi[k];
    s.x[d + k] = 0.25;
    s.v[k] = -0.5 + eta[k];
    s.v[d + k] = -0.5;
  }
  return s;
}

}  // namespace

TEST_SUITE("reduced2") {

TEST_CASE("reduce on hand-computed states") {
  const auto unit = fishschool::reduce(pair_from({0.6, 0.8}, {0.0, 0.0}));
  CHECK(unit.X == doctest::Approx(1.0));
  CHECK(unit.Y == 0.0);
  CHECK(unit.Z == 0.0);

  const std::vector<double> x1 = {2.0, 0.0}, x2 = {0.0, 0.0}, v1 = {1.0, 1.0}, v2 = {0.0, 0.0};
  const auto r = fishschool::reduce(x1, x2, v1, v2);
  CHECK(r.X == 0.5);
  CHECK(r.Y == 2.0);
  CHECK(r.Z == 2.0);

  CHECK_THROWS_AS(fishschool::reduce(x1, x1, v1, v2), SingularForce);
  CHECK_THROWS_AS(fishschool::reduce(SwarmState(3, 2)), InvalidParameter);
}

TEST_CASE("Cauchy-Schwarz holds for random inputs") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = 1 + trial % 4;
    std::vector<double> x1(d), x2(d), v1(d), v2(d);
    for (std::size_t k = 0; k < d; ++k) {
      x1[k] = u(gen);
      x2[k] = u(gen);
      v1[k] = u(gen);
      v2[k] = u(gen);
    }
    const auto r = fishschool::reduce(x1, x2, v1, v2);
    CHECK(r.X > 0.0);
    CHECK(r.Y >= 0.0);
    CHECK(cauchy_schwarz_gap(r) >= -1e-12 * (1.0 + r.Y));
  }
}

TEST_CASE("deterministic drift at reference points") {
  const auto params = unit_model();
  const auto zero = xyz_drift_det({1.0, 0.0, 0.0}, params);
  CHECK(zero.dX == 0.0);
  CHECK(zero.dY == 0.0);
  CHECK(zero.dZ == 0.0);

  const auto r = xyz_drift_det({1.0, 1.0, 1.0}, params);
  CHECK(r.dX == doctest::Approx(-1.0));
  CHECK(r.dY == doctest::Approx(-8.0));
  CHECK(r.dZ == doctest::Approx(-3.0));
}

TEST_CASE("deterministic drift is the time derivative of reduce along the full flow") {
  const ModelParams params(kRef, 3, 2, 0.0);
  SwarmState s(2, 3);
  s.x = {0.0, 0.1, -0.2, 0.9, 0.4, 0.3};
  s.v = {0.2, -0.3, 0.1, -0.4, 0.25, 0.0};
  for (int k = 0; k < 20; ++k) {
    const double h = 1e-6;
    const auto r0 = fishschool::reduce(s);
    const auto r1 = fishschool::reduce(step_rk4(s, h, params, ExternalForceSpec::none()));
    const auto rate = xyz_drift_det(r0, params);
    CHECK((r1.X - r0.X) / h == doctest::Approx(rate.dX).epsilon(1e-4).scale(1.0));
    CHECK((r1.Y - r0.Y) / h == doctest::Approx(rate.dY).epsilon(1e-4).scale(1.0));
    CHECK((r1.Z - r0.Z) / h == doctest::Approx(rate.dZ).epsilon(1e-4).scale(1.0));
    s = step_rk4(s, 0.05, params, ExternalForceSpec::none());
  }
}

TEST_CASE("stochastic drift") {
  const auto params = unit_model(5, 0.0);
  const ReducedState s{2.0, 0.7, 0.0};
  const auto det = xyz_drift_det(s, params);
  const auto none = xyz_drift_stoch(s, params, 0.0, 5);
  CHECK(none.dX == det.dX);
  CHECK(none.dY == det.dY);
  CHECK(none.dZ == det.dZ);

  CHECK(xyz_drift_stoch(s, params, 1.0, 5).dX == doctest::Approx(-8.0));
  const ReducedState moving{1.3, 0.4, -0.2};
  CHECK(xyz_drift_stoch(moving, params, 0.9, 3).dX == xyz_drift_det(moving, params).dX);
  CHECK(xyz_drift_stoch(moving, params, 0.9, 3).dY == xyz_drift_det(moving, params).dY);

  CHECK(combined_sigma(ModelParams(kRef, 2, std::vector<double>{0.3, 0.4})) == doctest::Approx(0.5));
}

TEST_CASE("Ito correction of X matches Monte Carlo over one Euler-Maruyama step") {
  // Particles at rest, so the only change in X over a step comes from noise;
  // antithetic increments cancel the leading martingale term.
  for (std::size_t d : {1u, 5u}) {
    CAPTURE(d);
    const double sigma_i = 0.5;
    const ModelParams params(kRef, d, 2, sigma_i);
    SwarmState s(2, d);
    for (std::size_t k = 0; k < d; ++k) s.x[d + k] = k == 0 ? 1.0 : 0.0;
    const double h = 1e-4;
    const auto r0 = fishschool::reduce(s);
    NoiseStream rng(314, StreamDomain::noise, d);
    const int pairs = 200000;
    std::vector<double> dw(2 * d), neg(2 * d);
    double mean = 0.0;
    for (int n = 0; n < pairs; ++n) {
      for (std::size_t k = 0; k < 2 * d; ++k) {
        dw[k] = rng.normal() * std::sqrt(h);
        neg[k] = -dw[k];
      }
      const double up = fishschool::reduce(step_euler_maruyama(s, h, params, ExternalForceSpec::none(), dw)).X;
      const double down = fishschool::reduce(step_euler_maruyama(s, h, params, ExternalForceSpec::none(), neg)).X;
      mean += (0.5 * (up + down) - r0.X) / h / pairs;
    }
    const double sigma = combined_sigma(params);
    const double ito = xyz_drift_stoch(r0, params, sigma, d).dX - xyz_drift_det(r0, params).dX;
    CHECK(ito == doctest::Approx(-0.5 * (static_cast<double>(d) - 3.0) * sigma * sigma));
    CHECK(mean == doctest::Approx(ito).epsilon(0.03));
  }
}

TEST_CASE("H at a reference point and its lower bound") {
  CHECK(lyapunov_H({1.0, 0.0, 0.0}, 10.0, 4.0) == 13.0);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const ReducedState s{u(gen), u(gen), u(gen) - 2.5};
    CHECK(lyapunov_H(s, 7.0, 3.5) >= 7.0);
  }
}

TEST_CASE("dH/dt matches a finite difference along the reduced flow") {
  const ModelParams params(kRef, 2, 2, 0.0);
  const double M = default_lyapunov_M(params);
  CHECK(M == 10.0);
  const ReducedState s{1.6, 0.5, 0.2};
  const double h = 1e-6;
  const auto path = integrate_reduced_rk4(s, params, h, h);
  const double fd = (lyapunov_H(path.back(), M, 4.0) - lyapunov_H(s, M, 4.0)) / h;
  CHECK(lyapunov_H_rate(s, params, M) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("V at a reference point, lower bound and admissibility") {
  CHECK(lyapunov_V({1.0, 0.0, 0.0}, 10.0, 1.0, 4, 4.0) == 12.0);
  CHECK_THROWS_AS(lyapunov_V({1.0, 0.0, 0.0}, 10.0, 1.0, 3, 4.0), InvalidParameter);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const ReducedState s{u(gen), u(gen), u(gen) - 2.5};
    CHECK(lyapunov_V(s, 4.0, 0.5, 3, 4.0) >= 4.0);
  }
}

TEST_CASE("V generator matches Monte Carlo over one Euler-Maruyama step") {
  const std::size_t d = 3;
  const double sigma_i = 0.4;
  const ModelParams params(kRef, d, 2, sigma_i);
  const double M = default_lyapunov_M(params);
  const double theta = 0.5;
  SwarmState s(2, d);
  s.x = {0.0, 0.0, 0.0, 0.8, 0.3, -0.1};
  s.v = {0.1, 0.2, 0.0, -0.3, 0.1, 0.2};
  const double h = 1e-5;
  const auto r0 = fishschool::reduce(s);
  const double v0 = lyapunov_V(r0, M, theta, d, 4.0);
  NoiseStream rng(2718, StreamDomain::noise, 0);
  const int pairs = 200000;
  std::vector<double> dw(2 * d), neg(2 * d);
  double mean = 0.0;
  for (int n = 0; n < pairs; ++n) {
    for (std::size_t k = 0; k < 2 * d; ++k) {
      dw[k] = rng.normal() * std::sqrt(h);
      neg[k] = -dw[k];
    }
    const auto up = fishschool::reduce(step_euler_maruyama(s, h, params, ExternalForceSpec::none(), dw));
    const auto down = fishschool::reduce(step_euler_maruyama(s, h, params, ExternalForceSpec::none(), neg));
    mean += (0.5 * (lyapunov_V(up, M, theta, d, 4.0) + lyapunov_V(down, M, theta, d, 4.0)) - v0) /
            h / pairs;
  }
  const double f = lyapunov_V_generator(r0, params, M, theta, combined_sigma(params), d);
  CHECK(mean == doctest::Approx(f).epsilon(0.02));
}

TEST_CASE("admissible theta") {
  CHECK_FALSE(check_theta(3, 4.0, 1.0));
  CHECK(check_theta(3, 4.0, 0.5));
  CHECK(check_theta(3, 6.5, 0.7));
  CHECK_FALSE(check_theta(3, 6.5, 0.4));
  CHECK_FALSE(theta_interval(3, 8.0).has_value());
  const auto iv = theta_interval(3, 6.5);
  REQUIRE(iv.has_value());
  CHECK(iv->first == doctest::Approx(0.5));
  CHECK(iv->second == doctest::Approx(1.0));
  CHECK(stochastic_global_regime(3, 4.0));
  CHECK_FALSE(stochastic_global_regime(2, 4.0));
  CHECK_FALSE(stochastic_global_regime(3, 2.0));
}

TEST_CASE("stopping times") {
  const std::vector<double> times = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const std::vector<ReducedState> flat(times.size(), ReducedState{1.0, 0.0, 0.0});
  CHECK_FALSE(tau_k(times, flat, 2.0).has_value());

  std::vector<ReducedState> rising;
  for (double t : times) rising.push_back({1.0 + 4.0 * t, 0.0, 0.0});
  CHECK(tau_k(times, rising, 10.0) == 2.5);

  std::mt19937_64 gen(4);
  std::normal_distribution<double> step(0.0, 0.3);
  std::vector<ReducedState> walk{{1.0, 0.5, 0.0}};
  std::vector<double> wt{0.0};
  for (int k = 1; k < 500; ++k) {
    const auto& b = walk.back();
    walk.push_back({b.X * std::exp(step(gen)), std::abs(b.Y + step(gen)), 0.0});
    wt.push_back(k * 0.01);
  }
  double prev = -1.0;
  for (double k : {1.5, 2.0, 3.0, 5.0, 10.0, 1e6}) {
    const double tau = tau_k(wt, walk, k).value_or(std::numeric_limits<double>::infinity());
    CHECK(tau >= prev);
    prev = tau;
  }
  CHECK_THROWS_AS(tau_k(times, rising, 1.0), InvalidParameter);
  CHECK_THROWS_AS(tau_k(times, std::vector<ReducedState>(2), 3.0), InvalidParameter);
}

TEST_CASE("reduced rk4 tracks the full two-particle system") {
  const ModelParams params(kRef, 2, 2, 0.0);
  SwarmState s(2, 2);
  s.x = {0.0, 0.0, 1.2, -0.5};
  s.v = {0.3, 0.1, -0.2, 0.2};
  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 1e-3;
  cfg.t_end = 3.0;
  cfg.record_every = 100;
  const auto full = simulate(s, params, ExternalForceSpec::none(), cfg);
  const auto red = integrate_reduced_rk4(fishschool::reduce(s), params, 1e-3, 3.0, 100);
  REQUIRE(full.samples.size() == red.size());
  for (std::size_t k = 0; k < red.size(); ++k) {
    const auto f = fishschool::reduce(full.samples[k]);
    CHECK(f.X == doctest::Approx(red[k].X).epsilon(1e-9));
    CHECK(f.Y == doctest::Approx(red[k].Y).epsilon(1e-9).scale(1.0));
    CHECK(f.Z == doctest::Approx(red[k].Z).epsilon(1e-9).scale(1.0));
  }
}

}  // TEST_SUITE
