#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace yieldgap {

/// Response of yield to one stress factor and the input that relieves it.
///
/// `s` is the share of potential yield lost when the stress is left alone,
/// `s_bar` the largest share an unlimited amount of input can win back and
/// `lambda` how quickly each unit of input closes that gap.
struct StressFactorParams {
  std::string name;
  double s = 0.0;
  double s_bar = 0.0;
  double lambda = 0.0;
  double input_price = 0.0;
  std::string input_unit = "kg/ha";

  /// 1 + s_bar - s; the attainable yield is this share of potential yield.
  double ceiling_share() const noexcept { return 1.0 + s_bar - s; }

  void validate() const;
};

/// The unit of decision making. Yields and inputs are per hectare.
struct FarmSpec {
  std::string farm_id;
  double potential_yield = 0.0;  // t/ha
  std::vector<StressFactorParams> stress_factors;
  double hectares = 1.0;
  double tractor_energy = 0.0;  // MJ/ha

  void validate() const;
  const StressFactorParams& factor(const std::string& name) const;
};

struct Prices {
  double wheat_price = 0.0;  // currency per tonne

  void validate() const;
};

/// Output of the optimizer.
struct Decision {
  double target_yield = 0.0;
  std::map<std::string, double> inputs;  // stress factor name -> input per ha
  double profit = 0.0;                   // per ha
  bool corner = false;
};

/// Yield when only stress factor `p` binds and `x` units of input are applied.
double conditional_yield(const StressFactorParams& p, double potential_yield, double x);

/// Input needed to lift the conditional yield of `p` to `target`; 0 when the
/// unmitigated yield already reaches it.
double required_input(const StressFactorParams& p, double potential_yield, double target);

/// Leontief composition: the most binding factor decides.
double realized_yield(std::span<const double> conditional_yields);

/// Conditional yields of every factor of `farm` under `inputs`.
std::vector<double> conditional_yields(const FarmSpec& farm, const std::map<std::string, double>& inputs);

}  // namespace yieldgap
