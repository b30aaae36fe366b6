#include "yieldgap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yieldgap/error.hpp"

namespace yieldgap {

namespace {

double pole(const FarmSpec& farm) {
  double u = std::numeric_limits<double>::infinity();
  for (const auto& f : farm.stress_factors) u = std::min(u, f.ceiling_share() * farm.potential_yield);
  return u;
}

// Distance to factor f's pole, scaled by lambda; throws when not positive.
double scaled_gap(const StressFactorParams& f, double potential_yield, double y) {
  const double d = f.lambda * (f.ceiling_share() * potential_yield - y);
  if (!(d > 0.0)) throw DomainError("target yield at or beyond the attainable ceiling of '" + f.name + "'");
  return d;
}

bool is_active(const StressFactorParams& f, double potential_yield, double y) {
  return y >= potential_yield * (1.0 - f.s);
}

double marginal_profit_derivative(const FarmSpec& farm, double y) {
  double d = 0.0;
  for (const auto& f : farm.stress_factors) {
    if (!is_active(f, farm.potential_yield, y)) continue;
    const double g = scaled_gap(f, farm.potential_yield, y);
    d -= f.input_price * f.lambda / (g * g);
  }
  return d;
}

}  // namespace

void SolverSettings::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iterations < 1) throw DomainError("solver needs at least one iteration");
  if (!(bracket_shrink >= 0.0 && bracket_shrink < 1.0)) throw DomainError("bracket shrink must lie in [0,1)");
  if (exploitable_cap && !(*exploitable_cap > 0.0 && *exploitable_cap <= 2.0)) {
    throw DomainError("exploitable yield cap must lie in (0,2]");
  }
}

YieldBracket target_bracket(const FarmSpec& farm, const SolverSettings& settings) {
  YieldBracket b;
  b.lower = std::numeric_limits<double>::infinity();
  for (const auto& f : farm.stress_factors) b.lower = std::min(b.lower, farm.potential_yield * (1.0 - f.s));
  b.upper = pole(farm) * (1.0 - settings.bracket_shrink);
  if (settings.exploitable_cap) b.upper = std::min(b.upper, *settings.exploitable_cap * farm.potential_yield);
  return b;
}

double foc_residual(const FarmSpec& farm, const Prices& prices, double target_yield) {
  double r = prices.wheat_price;
  for (const auto& f : farm.stress_factors) r -= f.input_price / scaled_gap(f, farm.potential_yield, target_yield);
  return r;
}

double foc_residual_derivative(const FarmSpec& farm, const Prices&, double target_yield) {
  double d = 0.0;
  for (const auto& f : farm.stress_factors) {
    const double g = scaled_gap(f, farm.potential_yield, target_yield);
    d -= f.input_price * f.lambda / (g * g);
  }
  return d;
}

double marginal_profit(const FarmSpec& farm, const Prices& prices, double target_yield) {
  double r = prices.wheat_price;
  for (const auto& f : farm.stress_factors) {
    if (!is_active(f, farm.potential_yield, target_yield)) continue;
    r -= f.input_price / scaled_gap(f, farm.potential_yield, target_yield);
  }
  return r;
}

double profit_at_target(const FarmSpec& farm, const Prices& prices, double target_yield) {
  double cost = 0.0;
  for (const auto& f : farm.stress_factors) {
    cost += f.input_price * required_input(f, farm.potential_yield, target_yield);
  }
  return prices.wheat_price * target_yield - cost;
}

TargetYield solve_target_yield(const FarmSpec& farm, const Prices& prices, const SolverSettings& settings) {
  farm.validate();
  prices.validate();
  settings.validate();

  const YieldBracket bracket = target_bracket(farm, settings);
  if (bracket.upper <= bracket.lower) return {bracket.lower, true, 0};

  const double tol = settings.tolerance * prices.wheat_price;
  if (marginal_profit(farm, prices, bracket.lower) <= 0.0) return {bracket.lower, true, 0};
  if (marginal_profit(farm, prices, bracket.upper) >= 0.0) return {bracket.upper, true, 0};

  double lo = bracket.lower;
  double hi = bracket.upper;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    const double r = marginal_profit(farm, prices, mid);
    if (std::abs(r) <= tol) {
      // Newton polish inside the bracket; the residual is smooth away from kinks.
      double y = mid;
      double ry = r;
      for (int k = 0; k < 4 && ry != 0.0; ++k) {
        const double step = ry / marginal_profit_derivative(farm, y);
        const double next = y - step;
        if (!(next > lo && next < hi)) break;
        const double rn = marginal_profit(farm, prices, next);
        if (!(std::abs(rn) < std::abs(ry))) break;
        y = next;
        ry = rn;
      }
      return {y, false, it};
    }
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    // The marginal jumps where a factor starts to need input; the optimum
    // then sits exactly on that kink.
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return {hi, false, it};
  }
  throw NumericError("target yield solver did not converge in " + std::to_string(settings.max_iterations) +
                         " iterations",
                     lo, hi);
}

Decision optimal_inputs(const FarmSpec& farm, const Prices& prices, const SolverSettings& settings) {
  const TargetYield t = solve_target_yield(farm, prices, settings);
  Decision d;
  d.target_yield = t.value;
  d.corner = t.corner;
  for (const auto& f : farm.stress_factors) d.inputs[f.name] = required_input(f, farm.potential_yield, t.value);
  d.profit = profit(d, farm, prices);
  return d;
}

OneFactorSolution one_factor_solution(const StressFactorParams& p, double potential_yield, const Prices& prices) {
  p.validate();
  prices.validate();
  if (!(potential_yield > 0.0)) throw DomainError("potential yield must be positive");
  const double arg = p.input_price / (prices.wheat_price * p.lambda * p.s_bar * potential_yield);
  if (!(arg > 0.0)) throw DomainError("closed form needs a positive input price");
  if (arg > 1.0) return {potential_yield * (1.0 - p.s), 0.0, true};
  return {p.ceiling_share() * potential_yield - p.input_price / (prices.wheat_price * p.lambda),
          -std::log(arg) / p.lambda, false};
}

double profit(const Decision& decision, const FarmSpec& farm, const Prices& prices) {
  double cost = 0.0;
  for (const auto& f : farm.stress_factors) {
    auto it = decision.inputs.find(f.name);
    if (it == decision.inputs.end()) throw DomainError("decision has no input for stress factor '" + f.name + "'");
    cost += f.input_price * it->second;
  }
  return prices.wheat_price * decision.target_yield - cost;
}

}  // namespace yieldgap
