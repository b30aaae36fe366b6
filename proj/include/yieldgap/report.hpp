#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yieldgap/calibration.hpp"
#include "yieldgap/crop_model.hpp"
#include "yieldgap/lca.hpp"
#include "yieldgap/simulation.hpp"

namespace yieldgap {

enum class OutputFormat { Table, Csv, Json };

std::optional<OutputFormat> parse_output_format(std::string_view s);

/// Rows as produced by assess; the table form is ranked per endpoint unit.
std::string format_impacts(const ImpactResult& result, OutputFormat fmt);

/// Reads back the JSON written by format_impacts.
ImpactResult impacts_from_json(std::string_view json_text);

struct FarmDecision {
  FarmSpec farm;
  Decision decision;
};

std::string format_decisions(const std::vector<FarmDecision>& decisions, OutputFormat fmt);

/// Evaluation of a fixed input plan: conditional yield of each factor, the
/// realized (minimum) yield and the resulting profit.
struct PlanEvaluation {
  std::map<std::string, double> inputs;
  std::map<std::string, double> conditional;
  double realized_yield = 0.0;
  double spread = 0.0;  // max - min conditional yield
  double profit = 0.0;
};

PlanEvaluation evaluate_plan(const FarmSpec& farm, const Prices& prices, const std::map<std::string, double>& inputs);
std::string format_plan(const FarmSpec& farm, const PlanEvaluation& plan, OutputFormat fmt);

using StratumCalibration = std::map<std::string, std::map<std::string, FactorCalibration>>;
std::string format_calibration(const StratumCalibration& result, OutputFormat fmt);

/// Per-farm rows follow the aggregates when `per_farm` is set.
std::string format_scenario(const ScenarioResult& result, OutputFormat fmt, bool per_farm = false);

/// One tidy row per grid value.
std::string format_sweep(const SweepParameter& parameter, const std::vector<SweepPoint>& points, OutputFormat fmt);

}  // namespace yieldgap
