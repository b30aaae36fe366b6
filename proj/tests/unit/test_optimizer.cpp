#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "yieldgap/error.hpp"
#include "yieldgap/optimizer.hpp"

using namespace yieldgap;

namespace {

const Prices kWheat300{300.0};

double spread(const FarmSpec& farm, const Decision& d) {
  auto ys = conditional_yields(farm, d.inputs);
  auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
  return *hi - *lo;
}

}  // namespace

TEST_CASE("reference farm optimum") {
  const auto farm = test::reference_farm();
  const Decision d = optimal_inputs(farm, kWheat300);
  // With s = s_bar for every factor the condition reduces to
  // y = ybar - (sum p_i / lambda_i) / p_w; values from mpmath.
  CHECK(d.target_yield == doctest::Approx(8.20238095238095238).epsilon(1e-12));
  CHECK(d.inputs.at("nitrogen") == doctest::Approx(50.9416438128356448).epsilon(1e-9));
  CHECK(d.inputs.at("weeds") == doctest::Approx(5.66671015491185787).epsilon(1e-9));
  CHECK(d.inputs.at("insects") == doctest::Approx(3.63667572143449715).epsilon(1e-9));
  CHECK(d.profit == doctest::Approx(2291.26796123156870).epsilon(1e-11));
  CHECK_FALSE(d.corner);
  CHECK(foc_residual(farm, kWheat300, d.target_yield) == doctest::Approx(0.0).epsilon(1e-8).scale(300.0));
}

TEST_CASE("printed worked-example inputs lie within 2.5 percent of the optimum") {
  const Decision d = optimal_inputs(test::reference_farm(), kWheat300);
  CHECK(test::rel_err(50.13, d.inputs.at("nitrogen")) < 0.025);
  CHECK(test::rel_err(5.57, d.inputs.at("weeds")) < 0.025);
  CHECK(test::rel_err(3.57, d.inputs.at("insects")) < 0.025);
}

TEST_CASE("bracket and first-order condition") {
  const auto farm = test::reference_farm();
  const auto b = target_bracket(farm);
  CHECK(b.lower == doctest::Approx(4.2));
  CHECK(b.upper < 8.4);
  CHECK(b.upper == doctest::Approx(8.4).epsilon(1e-11));
  CHECK_THROWS_AS(foc_residual(farm, kWheat300, 8.4), DomainError);

  // The residual is strictly decreasing on the bracket, and its analytic
  // derivative matches a central difference.
  double prev = foc_residual(farm, kWheat300, 7.0);
  for (double y = 7.05; y < 8.39; y += 0.05) {
    const double r = foc_residual(farm, kWheat300, y);
    CHECK(r < prev);
    prev = r;
    const double h = 1e-6;
    const double numeric = (foc_residual(farm, kWheat300, y + h) - foc_residual(farm, kWheat300, y - h)) / (2 * h);
    CHECK(foc_residual_derivative(farm, kWheat300, y) == doctest::Approx(numeric).epsilon(1e-5));
  }
}

TEST_CASE("optimum maximizes profit among nearby targets") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto farm = test::random_farm(rng);
    const auto d = optimal_inputs(farm, kWheat300);
    const double best = profit_at_target(farm, kWheat300, d.target_yield);
    CHECK(best == doctest::Approx(d.profit).epsilon(1e-12));
    const auto b = target_bracket(farm);
    for (double frac : {0.0, 0.25, 0.5, 0.9, 0.99, 0.999}) {
      const double y = b.lower + frac * (b.upper - b.lower);
      CHECK(profit_at_target(farm, kWheat300, y) <= best + 1e-9 * std::abs(best));
    }
  }
}

TEST_CASE("leveling: conditional yields coincide at the optimum") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto farm = test::random_farm(rng);
    const auto d = optimal_inputs(farm, kWheat300);
    REQUIRE_FALSE(d.corner);
    CHECK(spread(farm, d) <= 1e-6 * d.target_yield);
  }
}

TEST_CASE("closed-form single-factor solution agrees with the solver") {
  const auto farm = test::reference_farm();
  auto one = one_factor_solution(farm.factor("nitrogen"), 8.4, kWheat300);
  CHECK(one.target_yield == doctest::Approx(8.31666666666666667).epsilon(1e-14));
  CHECK(one.input == doctest::Approx(65.3331862512887155).epsilon(1e-12));
  one = one_factor_solution(farm.factor("weeds"), 8.4, kWheat300);
  CHECK(one.target_yield == doctest::Approx(8.33333333333333333).epsilon(1e-14));
  CHECK(one.input == doctest::Approx(7.83998235015464586).epsilon(1e-12));

  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const auto f = test::random_farm(rng, 1);
    const auto closed = one_factor_solution(f.stress_factors[0], f.potential_yield, kWheat300);
    REQUIRE_FALSE(closed.corner);
    const auto numeric = optimal_inputs(f, kWheat300);
    CHECK(test::rel_err(numeric.target_yield, closed.target_yield) <= 1e-8);
    CHECK(test::rel_err(numeric.inputs.begin()->second, closed.input) <= 1e-8);
  }
}

TEST_CASE("corner solutions") {
  // Input too expensive to pay off at any level: plan for the unmitigated yield.
  FarmSpec f;
  f.farm_id = "dear";
  f.potential_yield = 8.4;
  f.stress_factors = {{"nitrogen", 0.5, 0.5, 0.06, 500.0}};
  auto closed = one_factor_solution(f.stress_factors[0], 8.4, kWheat300);
  CHECK(closed.corner);
  CHECK(closed.input == 0.0);
  auto d = optimal_inputs(f, kWheat300);
  CHECK(d.corner);
  CHECK(d.target_yield == doctest::Approx(4.2));
  CHECK(d.inputs.at("nitrogen") == 0.0);

  // Free input: the target approaches the ceiling from below.
  f.stress_factors[0].input_price = 0.0;
  d = optimal_inputs(f, kWheat300);
  CHECK(d.corner);
  CHECK(d.target_yield < 8.4);
  CHECK(d.target_yield == doctest::Approx(8.4).epsilon(1e-10));
  CHECK_THROWS_AS(one_factor_solution(f.stress_factors[0], 8.4, kWheat300), DomainError);
}

TEST_CASE("a factor whose unmitigated yield exceeds the target needs no input") {
  // Insects barely matter here; at the optimum their conditional yield without
  // treatment is already above the target.
  FarmSpec f;
  f.farm_id = "mild";
  f.potential_yield = 8.0;
  f.stress_factors = {{"nitrogen", 0.5, 0.5, 0.02, 2.0}, {"insects", 0.02, 0.02, 0.5, 10.0}};
  const auto d = optimal_inputs(f, kWheat300);
  CHECK(d.inputs.at("insects") == 0.0);
  CHECK(d.target_yield < 8.0 * 0.98);
  // The remaining factor then follows its own closed form.
  auto single = one_factor_solution(f.stress_factors[0], 8.0, kWheat300);
  CHECK(d.target_yield == doctest::Approx(single.target_yield).epsilon(1e-10));
  CHECK(d.profit >= profit_at_target(f, kWheat300, d.target_yield * 1.001) - 1e-9);
}

TEST_CASE("exploitable yield cap") {
  SolverSettings s;
  s.exploitable_cap = 0.8;
  const auto farm = test::reference_farm();
  const auto d = optimal_inputs(farm, kWheat300, s);
  CHECK(d.corner);
  CHECK(d.target_yield == doctest::Approx(0.8 * 8.4));
  CHECK(spread(farm, d) <= 1e-9);
}

TEST_CASE("target yield rises with the wheat price") {
  const auto farm = test::reference_farm();
  double prev = 0.0;
  for (double pw = 100; pw <= 1000; pw += 50) {
    const auto t = solve_target_yield(farm, Prices{pw});
    CHECK(t.value > prev);
    prev = t.value;
  }
}

TEST_CASE("solver settings and inputs are validated") {
  SolverSettings s;
  s.tolerance = 0.0;
  CHECK_THROWS_AS(solve_target_yield(test::reference_farm(), kWheat300, s), DomainError);
  s = {};
  s.max_iterations = 0;
  CHECK_THROWS_AS(solve_target_yield(test::reference_farm(), kWheat300, s), DomainError);
  CHECK_THROWS_AS(solve_target_yield(test::reference_farm(), Prices{-1.0}), DomainError);

  Decision d;
  d.target_yield = 8.0;
  d.inputs = {{"nitrogen", 1.0}};
  CHECK_THROWS_AS(profit(d, test::reference_farm(), kWheat300), DomainError);
}

TEST_CASE("too few iterations report the last bracket") {
  SolverSettings s;
  s.max_iterations = 3;
  s.tolerance = 1e-15;
  try {
    solve_target_yield(test::reference_farm(), kWheat300, s);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.lower() < e.upper());
    CHECK(e.lower() >= 4.2);
  }
}
