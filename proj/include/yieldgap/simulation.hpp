#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "yieldgap/crop_model.hpp"
#include "yieldgap/lca.hpp"
#include "yieldgap/optimizer.hpp"

namespace yieldgap {

/// Parameter distribution for synthetic farms. Normal draws outside
/// [lower, upper] are redrawn, so the normal is truncated.
struct Distribution {
  enum class Kind { Point, Uniform, Normal };
  Kind kind = Kind::Point;
  double a = 0.0;  // point value, uniform low, or normal mean
  double b = 0.0;  // uniform high, or normal standard deviation
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static Distribution point(double v) { return {Kind::Point, v, v}; }
  static Distribution uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, lo, hi}; }
  static Distribution normal(double mean, double sd, double lo, double hi) { return {Kind::Normal, mean, sd, lo, hi}; }

  double sample(std::mt19937_64& rng) const;
  void validate(const std::string& what) const;
};

struct FactorDistribution {
  std::string name;
  std::string input_unit = "kg/ha";
  Distribution s, s_bar, lambda, input_price;
};

struct PopulationSpec {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string id_prefix = "farm";
  Distribution potential_yield = Distribution::point(0.0);
  Distribution hectares = Distribution::point(1.0);
  Distribution tractor_energy = Distribution::point(0.0);  // MJ/ha
  std::vector<FactorDistribution> factors;
  int max_redraws = 1000;  // per farm, for draws that violate parameter invariants

  void validate() const;
};

/// Farm i depends only on (seed, i), so populations are reproducible and
/// prefixes of a larger population match a smaller one.
std::vector<FarmSpec> generate_population(const PopulationSpec& spec);

/// How a stress-factor input becomes demand for an LCA process.
struct InputBinding {
  enum class Mode {
    PerUnit,       // amount * input level
    PerTreatment,  // amount whenever the input level is positive
  };
  std::string factor;
  std::string process;
  Mode mode = Mode::PerUnit;
  double amount = 1.0;
};

struct LcaContext {
  ProcessDatabase processes;
  std::vector<ImpactMethodSpec> methods;
  std::vector<InputBinding> bindings;
  std::string tractor_process = "tractor_work";  // driven by FarmSpec::tractor_energy

  void validate() const;
};

/// Default bindings for the nitrogen / weeds / insects factors: fertilizer per
/// kg N, and one treatment of 2,4-D (0.54 kg) or Pirimicarb (0.13 kg).
std::vector<InputBinding> default_bindings();

/// Process demand of one hectare of `farm` under `decision`.
std::map<std::string, double> process_demand(const FarmSpec& farm, const Decision& decision, const LcaContext& ctx);

struct RunSettings {
  SolverSettings solver;
  unsigned threads = 1;
  std::uint64_t seed = 0;   // recorded in the result metadata
  std::string config_hash;  // recorded in the result metadata
};

struct FarmOutcome {
  std::size_t index = 0;
  std::string farm_id;
  double hectares = 0.0;
  Decision decision;
  ImpactResult impacts;  // whole farm (per-ha inventory times hectares)
};

struct FarmFailure {
  std::size_t index = 0;
  std::string farm_id;
  std::string message;
};

struct ScenarioAggregates {
  std::size_t farms = 0;
  std::size_t failures = 0;
  double hectares = 0.0;
  double total_profit = 0.0;
  double mean_target_yield = 0.0;
  double total_daly = 0.0;
  double total_species_year = 0.0;
  double total_usd = 0.0;
  double daly_per_ha = 0.0;
  double species_year_per_ha = 0.0;
  std::map<std::string, double> input_totals;  // factor -> input summed over hectares
};

struct ScenarioMetadata {
  double wheat_price = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t population = 0;
};

struct ScenarioResult {
  std::vector<FarmOutcome> farms;  // in population order
  std::vector<FarmFailure> failures;
  ScenarioAggregates aggregates;
  ScenarioMetadata metadata;
};

/// Optimizes and assesses each farm. Work is spread over `settings.threads`
/// workers; per-farm results are reduced in population order so the outcome
/// does not depend on the thread count. Farms that fail are quarantined.
ScenarioResult run_scenario(std::span<const FarmSpec> farms, const Prices& prices, const LcaContext& ctx,
                            const RunSettings& settings = {});

ScenarioAggregates aggregate(std::span<const FarmOutcome> farms, std::size_t failures);

struct SweepParameter {
  enum class Kind { WheatPrice, InputPrice };
  Kind kind = Kind::WheatPrice;
  std::string factor;  // for InputPrice

  /// "wheat_price" or "input_price:<factor>".
  static SweepParameter parse(const std::string& text);
  std::string to_string() const;
};

struct SweepPoint {
  double value = 0.0;
  ScenarioResult result;
};

std::vector<SweepPoint> sweep(const SweepParameter& parameter, std::span<const double> grid,
                              std::span<const FarmSpec> farms, const Prices& prices, const LcaContext& ctx,
                              const RunSettings& settings = {});

/// FNV-1a, 64 bit, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace yieldgap
