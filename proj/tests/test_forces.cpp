#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fishschool/forces.hpp"

using namespace fishschool;

namespace {

// Closed-form kernels evaluated with std::pow, independent of PairKernel.
std::vector<double> oracle_position(const std::vector<double>& xi, const std::vector<double>& xj,
                                    double a1, double g, double p, double q) {
  double s2 = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) s2 += (xi[k] - xj[k]) * (xi[k] - xj[k]);
  const double s = std::sqrt(s2);
  const double w = -a1 * (std::pow(s, -p) - g * std::pow(s, -q));
  std::vector<double> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) out[k] = w * (xi[k] - xj[k]);
  return out;
}

std::vector<double> oracle_velocity(const std::vector<double>& xi, const std::vector<double>& xj,
                                    const std::vector<double>& vi, const std::vector<double>& vj,
                                    double b1, double g, double p, double q) {
  double s2 = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k) s2 += (xi[k] - xj[k]) * (xi[k] - xj[k]);
  const double s = std::sqrt(s2);
  const double w = -b1 * (std::pow(s, -p) + g * std::pow(s, -q));
  std::vector<double> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) out[k] = w * (vi[k] - vj[k]);
  return out;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(std::abs(a[k] - b[k]) <= rel * (1.0 + std::abs(b[k])));
  }
}

SwarmState random_swarm(std::mt19937_64& gen, std::size_t n, std::size_t d, double box) {
  std::uniform_real_distribution<double> u(-box, box);
  SwarmState s(n, d);
  for (auto& c : s.x) c = u(gen);
  for (auto& c : s.v) c = u(gen);
  return s;
}

}  // namespace

TEST_SUITE("forces") {

TEST_CASE("position kernel vanishes at the critical radius") {
  for (double r : {0.5, 1.0, 2.0}) {
    const ModelParams params({1.0, 0.5, r, 3.0, 4.0}, 2, 2, 0.0);
    const std::vector<double> xi = {0.3, 0.1};
    const std::vector<double> xj = {0.3 + r * 0.6, 0.1 + r * 0.8};
    for (double c : pair_position_force(xi, xj, params)) CHECK(std::abs(c) < 1e-14);
  }
}

TEST_CASE("position kernel reference value in one dimension") {
  const ModelParams params({1.0, 1.0, 1.0, 3.0, 4.0}, 1, 2, 0.0);
  const std::vector<double> xi = {2.0}, xj = {0.0};
  const auto f = pair_position_force(xi, xj, params);
  CHECK(f[0] == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(pair_position_force(xj, xi, params)[0] == -f[0]);
}

TEST_CASE("velocity kernel reference value and antisymmetry") {
  const ModelParams params({1.0, 1.0, 1.0, 3.0, 4.0}, 1, 2, 0.0);
  const std::vector<double> xi = {1.0}, xj = {0.0}, vi = {1.0}, vj = {0.0};
  CHECK(pair_velocity_force(xi, xj, vi, vj, params)[0] == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(pair_velocity_force(xj, xi, vj, vi, params)[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pair_velocity_force(xi, xj, vi, vi, params)[0] == 0.0);
}

TEST_CASE("coincident positions raise SingularForce") {
  const ModelParams params({}, 2, 2, 0.0);
  const std::vector<double> x = {1.0, 1.0}, v = {0.0, 1.0};
  CHECK_THROWS_AS(pair_position_force(x, x, params), SingularForce);
  CHECK_THROWS_AS(pair_velocity_force(x, x, v, v, params), SingularForce);

  SwarmState s(3, 2);
  s.x = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
  try {
    drift(s, ModelParams({}, 2, 3, 0.0), ExternalForceSpec::none());
    FAIL("expected SingularForce");
  } catch (const SingularForce& e) {
    CHECK(e.first() == 1);
    CHECK(e.second() == 2);
  }
}

TEST_CASE("1000 random kernel evaluations match the closed form") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.2, 3.0);
  const std::vector<std::pair<double, double>> exponents = {{3, 4}, {2, 5}, {1.5, 2.5}, {3, 6.5}};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [p, q] = exponents[trial % exponents.size()];
    const Interaction in{pos(gen), pos(gen), pos(gen), p, q};
    const std::size_t d = 1 + trial % 3;
    const ModelParams params(in, d, 2, 0.0);
    std::vector<double> xi(d), xj(d), vi(d), vj(d);
    for (std::size_t k = 0; k < d; ++k) {
      xi[k] = u(gen);
      xj[k] = u(gen);
      vi[k] = u(gen);
      vj[k] = u(gen);
    }
    check_close(pair_position_force(xi, xj, params),
                oracle_position(xi, xj, params.alpha1(), params.gamma(), p, q), 1e-12);
    check_close(pair_velocity_force(xi, xj, vi, vj, params),
                oracle_velocity(xi, xj, vi, vj, params.beta1(), params.gamma(), p, q), 1e-12);
  }
}

TEST_CASE("drift of configurations at equilibrium") {
  const ModelParams pair({1.0, 0.5, 1.0, 3.0, 4.0}, 2, 2, 0.0);
  SwarmState s(2, 2);
  s.x = {0.0, 0.0, 1.0, 0.0};
  const auto ev = drift(s, pair, ExternalForceSpec::none());
  for (double c : ev.dvdt) CHECK(std::abs(c) < 1e-15);

  const double r = 1.3;
  const ModelParams tri({1.0, 0.5, r, 3.0, 4.0}, 2, 3, 0.0);
  SwarmState t(3, 2);
  t.x = {0.0, 0.0, r, 0.0, r / 2, r * std::sqrt(3.0) / 2};
  for (double c : drift(t, tri, ExternalForceSpec::none()).dvdt) CHECK(std::abs(c) < 1e-13);
}

TEST_CASE("dxdt is the velocity and pair accelerations cancel") {
  std::mt19937_64 gen(7);
  const ModelParams params({1.0, 0.5, 1.0, 3.0, 4.0}, 3, 2, 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_swarm(gen, 2, 3, 2.0);
    const auto ev = drift(s, params, ExternalForceSpec::none());
    CHECK(ev.dxdt == s.v);
    for (std::size_t k = 0; k < 3; ++k) CHECK(ev.dvdt[k] + ev.dvdt[3 + k] == 0.0);
  }
}

TEST_CASE("total internal force vanishes for larger swarms") {
  std::mt19937_64 gen(8);
  const ModelParams params({1.0, 0.5, 1.0, 3.0, 4.0}, 2, 40, 0.0);
  const auto s = random_swarm(gen, 40, 2, 5.0);
  const auto ev = drift(s, params, ExternalForceSpec::none());
  double scale = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < 40; ++i) {
    sx += ev.dvdt[2 * i];
    sy += ev.dvdt[2 * i + 1];
    scale = std::max({scale, std::abs(ev.dvdt[2 * i]), std::abs(ev.dvdt[2 * i + 1])});
  }
  CHECK(std::abs(sx) <= 1e-12 * scale * 40);
  CHECK(std::abs(sy) <= 1e-12 * scale * 40);
}

TEST_CASE("drift is invariant under translation and rotation") {
  std::mt19937_64 gen(9);
  const ModelParams params({2.0, 0.7, 1.2, 3.0, 4.0}, 2, 12, 0.0);
  const auto s = random_swarm(gen, 12, 2, 3.0);
  const auto base = drift(s, params, ExternalForceSpec::linear_drag(0.5));

  auto shifted = s;
  for (std::size_t i = 0; i < s.n; ++i) {
    shifted.x[2 * i] += 17.25;
    shifted.x[2 * i + 1] -= 3.5;
  }
  const auto moved = drift(shifted, params, ExternalForceSpec::linear_drag(0.5));
  for (std::size_t k = 0; k < base.dvdt.size(); ++k) {
    CHECK(moved.dvdt[k] == doctest::Approx(base.dvdt[k]).epsilon(1e-9).scale(1.0));
  }

  const double th = 0.83;
  const double c = std::cos(th), sn = std::sin(th);
  auto rotated = s;
  for (std::size_t i = 0; i < s.n; ++i) {
    rotated.x[2 * i] = c * s.x[2 * i] - sn * s.x[2 * i + 1];
    rotated.x[2 * i + 1] = sn * s.x[2 * i] + c * s.x[2 * i + 1];
    rotated.v[2 * i] = c * s.v[2 * i] - sn * s.v[2 * i + 1];
    rotated.v[2 * i + 1] = sn * s.v[2 * i] + c * s.v[2 * i + 1];
  }
  const auto turned = drift(rotated, params, ExternalForceSpec::linear_drag(0.5));
  for (std::size_t i = 0; i < s.n; ++i) {
    const double ax = c * base.dvdt[2 * i] - sn * base.dvdt[2 * i + 1];
    const double ay = sn * base.dvdt[2 * i] + c * base.dvdt[2 * i + 1];
    CHECK(turned.dvdt[2 * i] == doctest::Approx(ax).epsilon(1e-9).scale(1.0));
    CHECK(turned.dvdt[2 * i + 1] == doctest::Approx(ay).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("drift does not depend on the thread count") {
  std::mt19937_64 gen(10);
  const ModelParams params({1.0, 0.5, 1.0, 3.0, 4.0}, 3, 57, 0.0);
  const auto s = random_swarm(gen, 57, 3, 4.0);
  const auto one = drift(s, params, ExternalForceSpec::linear_drag(5.0), 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    CHECK(drift(s, params, ExternalForceSpec::linear_drag(5.0), threads).dvdt == one.dvdt);
  }
}

TEST_CASE("step-size rates grow as a pair closes in") {
  const ModelParams params({1.0, 0.5, 1.0, 3.0, 4.0}, 2, 2, 0.0);
  const PairKernel kernel(params);
  const auto far = kernel.rates(4.0);
  const auto near = kernel.rates(0.01);
  CHECK(far.damping > 0.0);
  CHECK(far.spring_sq > 0.0);
  CHECK(near.damping > far.damping);
  CHECK(near.spring_sq > far.spring_sq);
  // s = 1: damping 2 beta1 (1 + gamma) = 2, spring 2 alpha1 (p + q gamma) = 14
  CHECK(kernel.rates(1.0).damping == doctest::Approx(2.0));
  CHECK(kernel.rates(1.0).spring_sq == doctest::Approx(14.0));
}

}  // TEST_SUITE
