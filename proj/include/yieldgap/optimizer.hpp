#pragma once

#include <optional>

#include "yieldgap/crop_model.hpp"

namespace yieldgap {

struct SolverSettings {
  double tolerance = 1e-10;  // residual tolerance, relative to the wheat price
  int max_iterations = 200;
  double bracket_shrink = 1e-12;  // relative back-off from the pole
  /// Optional ceiling on the target yield as a share of potential yield
  /// (the exploitable-yield-gap rule of thumb uses 0.8). Off by default.
  std::optional<double> exploitable_cap;

  void validate() const;
};

/// Interval that contains the profit-maximizing target yield.
struct YieldBracket {
  double lower = 0.0;  // min_i potential * (1 - s_i)
  double upper = 0.0;  // min_i potential * (1 + s_bar_i - s_i), backed off
};

struct TargetYield {
  double value = 0.0;
  bool corner = false;
  int iterations = 0;
};

struct OneFactorSolution {
  double target_yield = 0.0;
  double input = 0.0;
  bool corner = false;
};

YieldBracket target_bracket(const FarmSpec& farm, const SolverSettings& settings = {});

/// First-order condition p_w - sum_i p_i / (lambda_i ((1+s_bar_i-s_i) ybar - y)).
/// Throws DomainError at or beyond the first pole.
double foc_residual(const FarmSpec& farm, const Prices& prices, double target_yield);

/// d/dy of foc_residual.
double foc_residual_derivative(const FarmSpec& farm, const Prices& prices, double target_yield);

/// Right derivative of profit with respect to the target yield. Factors whose
/// unmitigated yield already exceeds the target need no input and drop out;
/// above max_i potential*(1-s_i) this equals foc_residual.
double marginal_profit(const FarmSpec& farm, const Prices& prices, double target_yield);

/// Profit per ha when planning for `target_yield` with every input at the
/// level that brings its conditional yield up to the target.
double profit_at_target(const FarmSpec& farm, const Prices& prices, double target_yield);

TargetYield solve_target_yield(const FarmSpec& farm, const Prices& prices, const SolverSettings& settings = {});

Decision optimal_inputs(const FarmSpec& farm, const Prices& prices, const SolverSettings& settings = {});

/// Closed form for a single stress factor; independent of the numeric solver.
OneFactorSolution one_factor_solution(const StressFactorParams& p, double potential_yield, const Prices& prices);

double profit(const Decision& decision, const FarmSpec& farm, const Prices& prices);

}  // namespace yieldgap
