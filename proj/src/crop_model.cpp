#include "yieldgap/crop_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "yieldgap/error.hpp"

namespace yieldgap {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void StressFactorParams::validate() const {
  const std::string who = "stress factor '" + name + "': ";
  if (!finite(s) || !(s > 0.0 && s < 1.0)) throw DomainError(who + "s must lie in (0,1)");
  if (!finite(s_bar) || !(s_bar > 0.0 && s_bar <= 1.0)) throw DomainError(who + "s_bar must lie in (0,1]");
  if (!finite(lambda) || !(lambda > 0.0)) throw DomainError(who + "lambda must be positive");
  if (!finite(input_price) || input_price < 0.0) throw DomainError(who + "input price must be non-negative");
}

void FarmSpec::validate() const {
  const std::string who = "farm '" + farm_id + "': ";
  if (!finite(potential_yield) || !(potential_yield > 0.0)) throw DomainError(who + "potential yield must be positive");
  if (stress_factors.empty()) throw DomainError(who + "at least one stress factor is required");
  if (!finite(hectares) || !(hectares > 0.0)) throw DomainError(who + "hectares must be positive");
  if (!finite(tractor_energy) || tractor_energy < 0.0) throw DomainError(who + "tractor energy must be non-negative");
  std::set<std::string> names;
  for (const auto& f : stress_factors) {
    f.validate();
    if (!names.insert(f.name).second) throw DomainError(who + "duplicate stress factor '" + f.name + "'");
  }
}

const StressFactorParams& FarmSpec::factor(const std::string& name) const {
  auto it = std::find_if(stress_factors.begin(), stress_factors.end(),
                         [&](const StressFactorParams& f) { return f.name == name; });
  if (it == stress_factors.end()) throw DomainError("farm '" + farm_id + "' has no stress factor '" + name + "'");
  return *it;
}

void Prices::validate() const {
  if (!finite(wheat_price) || !(wheat_price > 0.0)) throw DomainError("wheat price must be positive");
}

double conditional_yield(const StressFactorParams& p, double potential_yield, double x) {
  if (!(potential_yield > 0.0)) throw DomainError("potential yield must be positive");
  if (!(x >= 0.0)) throw DomainError("input quantity must be non-negative");
  // -expm1(-lambda x) keeps precision for small lambda x.
  return potential_yield * ((1.0 - p.s) + p.s_bar * -std::expm1(-p.lambda * x));
}

double required_input(const StressFactorParams& p, double potential_yield, double target) {
  if (!(potential_yield > 0.0)) throw DomainError("potential yield must be positive");
  if (target <= potential_yield * (1.0 - p.s)) return 0.0;
  const double gap = p.ceiling_share() * potential_yield - target;
  if (!(gap > 0.0)) {
    throw InfeasibleTargetError("target yield " + std::to_string(target) + " is unreachable for stress factor '" +
                                p.name + "'");
  }
  return std::max(0.0, -std::log(gap / (p.s_bar * potential_yield)) / p.lambda);
}

double realized_yield(std::span<const double> conditional_yields) {
  if (conditional_yields.empty()) throw DomainError("realized yield needs at least one conditional yield");
  return *std::min_element(conditional_yields.begin(), conditional_yields.end());
}

std::vector<double> conditional_yields(const FarmSpec& farm, const std::map<std::string, double>& inputs) {
  std::vector<double> out;
  out.reserve(farm.stress_factors.size());
  for (const auto& f : farm.stress_factors) {
    auto it = inputs.find(f.name);
    if (it == inputs.end()) throw DomainError("no input level for stress factor '" + f.name + "'");
    out.push_back(conditional_yield(f, farm.potential_yield, it->second));
  }
  return out;
}

}  // namespace yieldgap
