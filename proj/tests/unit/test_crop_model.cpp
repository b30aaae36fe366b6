#include <random>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "yieldgap/crop_model.hpp"
#include "yieldgap/error.hpp"

using namespace yieldgap;

TEST_CASE("conditional yield matches independently computed values") {
  const auto farm = test::reference_farm();
  const auto& n = farm.factor("nitrogen");
  // mpmath, 30 digits
  CHECK(conditional_yield(n, 8.4, 0.0) == doctest::Approx(4.2).epsilon(1e-15));
  CHECK(conditional_yield(n, 8.4, 10.0) == doctest::Approx(6.09499112840508898).epsilon(1e-14));
  CHECK(conditional_yield(n, 8.4, 50.13) == doctest::Approx(8.19251899272608675).epsilon(1e-14));
  CHECK(conditional_yield(n, 8.4, 200.0) == doctest::Approx(8.39997419430811602).epsilon(1e-14));
}

TEST_CASE("required input inverts the response curve") {
  const auto farm = test::reference_farm();
  const auto& n = farm.factor("nitrogen");
  CHECK(required_input(n, 8.4, 8.0) == doctest::Approx(39.1895876193912948).epsilon(1e-13));
  CHECK(required_input(n, 8.4, 4.2) == 0.0);
  CHECK(required_input(n, 8.4, 3.0) == 0.0);
  CHECK_THROWS_AS(required_input(n, 8.4, 8.4), InfeasibleTargetError);
  CHECK_THROWS_AS(required_input(n, 8.4, 9.0), InfeasibleTargetError);
}

TEST_CASE("response curve properties on random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    StressFactorParams p{"f", 0.05 + 0.9 * u(rng), 0.0, 0.01 + 2.0 * u(rng), 1.0};
    p.s_bar = (0.05 + 0.95 * u(rng)) * 1.0;
    const double ybar = 2.0 + 10.0 * u(rng);
    const double floor = ybar * (1.0 - p.s);
    const double ceiling = ybar * p.ceiling_share();
    double prev = conditional_yield(p, ybar, 0.0);
    CHECK(prev == doctest::Approx(floor));
    double prev_slope = 1e300;
    for (int k = 1; k <= 20; ++k) {
      const double x = k * 0.5 / p.lambda;
      const double y = conditional_yield(p, ybar, x);
      CHECK(y > prev);                   // increasing
      CHECK(y < ceiling);                // bounded by the attainable ceiling
      const double slope = (y - prev) / (0.5 / p.lambda);
      CHECK(slope <= prev_slope * (1.0 + 1e-12));  // concave
      prev_slope = slope;
      // round trip through the inverse
      CHECK(required_input(p, ybar, y) == doctest::Approx(x).epsilon(1e-8));
      prev = y;
    }
  }
}

TEST_CASE("realized yield is the minimum of conditional yields") {
  std::vector<double> ys = {7.5, 6.1, 8.0};
  CHECK(realized_yield(ys) == 6.1);
  std::vector<double> none;
  CHECK_THROWS_AS(realized_yield(none), DomainError);

  const auto farm = test::reference_farm();
  auto cy = conditional_yields(farm, {{"nitrogen", 50.13}, {"weeds", 5.57}, {"insects", 3.57}});
  REQUIRE(cy.size() == 3);
  CHECK(cy[0] == doctest::Approx(8.19251899272608672).epsilon(1e-13));
  CHECK(cy[1] == doctest::Approx(8.19259026085597843).epsilon(1e-13));
  CHECK(cy[2] == doctest::Approx(8.19293884580966023).epsilon(1e-13));
  CHECK(realized_yield(cy) == cy[0]);
}

TEST_CASE("parameter validation") {
  StressFactorParams ok{"n", 0.5, 0.5, 0.06, 1.5};
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.s = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.s = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.s_bar = 1.5;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.input_price = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);

  auto farm = test::reference_farm();
  CHECK_NOTHROW(farm.validate());
  farm.stress_factors.push_back(farm.stress_factors.front());
  CHECK_THROWS_AS(farm.validate(), DomainError);
  farm = test::reference_farm();
  farm.potential_yield = 0.0;
  CHECK_THROWS_AS(farm.validate(), DomainError);
  farm = test::reference_farm();
  farm.stress_factors.clear();
  CHECK_THROWS_AS(farm.validate(), DomainError);
  CHECK_THROWS_AS(test::reference_farm().factor("water"), DomainError);

  CHECK_THROWS_AS(conditional_yield(ok, 8.4, -1.0), DomainError);
  CHECK_THROWS_AS((Prices{0.0}.validate()), DomainError);
}
