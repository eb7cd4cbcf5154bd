#include <cmath>
#include <limits>

#include "doctest.h"
#include "fishschool/external_force.hpp"
#include "fishschool/params.hpp"
#include "fishschool/state.hpp"

using namespace fishschool;

TEST_SUITE("model-core") {

TEST_CASE("derive_params on the reference parameter sets") {
  SUBCASE("unit radius leaves alpha and beta unchanged") {
    const auto c = derive_params(1.0, 0.5, 1.0, 3.0, 4.0);
    CHECK(c.alpha1 == 1.0);
    CHECK(c.beta1 == 0.5);
    CHECK(c.gamma == 1.0);
  }
  SUBCASE("r = 0.5") {
    const auto c = derive_params(5.0, 1.0, 0.5, 3.0, 4.0);
    CHECK(c.alpha1 == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(c.beta1 == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(c.gamma == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("two-dimensional collision constants") {
    const auto c = derive_params(7.0, 19.0, 1.0, 3.0, 4.0);
    CHECK(c.alpha1 == 7.0);
    CHECK(c.beta1 == 19.0);
    CHECK(c.gamma == 1.0);
  }
  SUBCASE("non-integer exponents") {
    const auto c = derive_params(2.0, 3.0, 1.7, 1.5, 2.25);
    CHECK(c.alpha1 == doctest::Approx(2.0 * std::exp(1.5 * std::log(1.7))));
    CHECK(c.beta1 == doctest::Approx(3.0 * std::exp(1.5 * std::log(1.7))));
    CHECK(c.gamma == doctest::Approx(std::exp(0.75 * std::log(1.7))));
  }
}

TEST_CASE("derive_params rejects values outside the model's domain") {
  CHECK_THROWS_AS(derive_params(0.0, 1.0, 1.0, 3.0, 4.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, -1.0, 1.0, 3.0, 4.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, 1.0, 0.0, 3.0, 4.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, 1.0, 1.0, 1.0, 4.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, 1.0, 1.0, 4.0, 4.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, 1.0, 1.0, 4.0, 3.0), InvalidParameter);
  CHECK_THROWS_AS(derive_params(1.0, 1.0, 1.0, 3.0, std::numeric_limits<double>::infinity()),
                  InvalidParameter);
  CHECK_THROWS_AS(derive_params(std::nan(""), 1.0, 1.0, 3.0, 4.0), InvalidParameter);
}

TEST_CASE("ModelParams keeps derived constants consistent") {
  const ModelParams params({5.0, 1.0, 0.5, 3.0, 4.0}, 1, 2, 0.15);
  CHECK(params.derived() == derive_params(5.0, 1.0, 0.5, 3.0, 4.0));
  CHECK(params.n_particles() == 2);
  CHECK(params.dim() == 1);
  CHECK(params.sigma(1) == 0.15);
  CHECK_FALSE(params.is_deterministic());
  CHECK(ModelParams({}, 2, 3, 0.0).is_deterministic());

  CHECK_THROWS_AS(ModelParams({}, 0, 2, 0.0), InvalidParameter);
  CHECK_THROWS_AS(ModelParams({}, 2, std::vector<double>{}), InvalidParameter);
  CHECK_THROWS_AS(ModelParams({}, 2, std::vector<double>{0.1, -0.1}), InvalidParameter);
}

TEST_CASE("validate_state") {
  SUBCASE("two particles at distance 1") {
    SwarmState s(2, 2);
    s.x = {0.0, 0.0, 1.0, 0.0};
    CHECK(validate_state(s, 1e-9).ok());
    CHECK(validate_state(s, 1e-9).min_distance == 1.0);
  }
  SUBCASE("coincident particles are reported") {
    SwarmState s(2, 3);
    s.x = {1.0, 2.0, 3.0, 1.0, 2.0, 3.0};
    const auto report = validate_state(s, 1e-9);
    REQUIRE(report.offending_pairs.size() == 1);
    CHECK(report.offending_pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
  }
  SUBCASE("only the close pair of three is reported") {
    SwarmState s(3, 1);
    s.x = {0.0, 5.0, 5.0 + 1e-12};
    const auto report = validate_state(s, 1e-9);
    REQUIRE(report.offending_pairs.size() == 1);
    CHECK(report.offending_pairs[0] == std::pair<std::size_t, std::size_t>{1, 2});
  }
  SUBCASE("inconsistent shapes are rejected") {
    SwarmState s(2, 2);
    s.v.pop_back();
    CHECK_THROWS_AS(validate_state(s, 1e-9), InvalidParameter);
  }
}

TEST_CASE("pair distances") {
  SwarmState s(3, 2);
  s.x = {0.0, 0.0, 3.0, 4.0, 0.0, 2.0};
  CHECK(distance(s.pos(0), s.pos(1)) == 5.0);
  CHECK(squared_distance(s.pos(1), s.pos(2)) == 9.0 + 4.0);
  CHECK(min_pair_distance(s) == 2.0);
  CHECK(min_pair_distance(SwarmState(1, 2)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("external forces") {
  const std::vector<double> x = {0.3, -1.0};
  SUBCASE("none is zero") {
    const std::vector<double> v = {4.0, -2.0};
    CHECK(external_force(ExternalForceSpec::none(), 1.5, x, v) == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("drag c = 5") {
    const std::vector<double> v = {1.0, 0.0};
    const auto f = external_force(ExternalForceSpec::linear_drag(5.0), 0.0, x, v);
    CHECK(f[0] == -5.0);
    CHECK(f[1] == 0.0);
  }
  SUBCASE("drag c = 1") {
    const std::vector<double> v = {0.0, -2.0};
    const auto f = external_force(ExternalForceSpec::linear_drag(1.0), 0.0, x, v);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 2.0);
  }
  CHECK_THROWS_AS(ExternalForceSpec::linear_drag(-1.0), InvalidParameter);
}

}  // TEST_SUITE
