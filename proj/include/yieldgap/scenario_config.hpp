#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yieldgap/data_io.hpp"
#include "yieldgap/simulation.hpp"

namespace yieldgap {

/// A binding as written in a scenario file. Either `amount` is given, or the
/// dose is looked up from `pesticide_type` and `toxicity` in the active
/// ingredient map.
struct BindingSpec {
  InputBinding binding;
  std::optional<PesticideType> pesticide_type;
  std::string toxicity;
};

/// Scenario file (JSON). Relative paths resolve against the file's directory,
/// then $YIELDGAP_DATA_DIR. Unknown keys are rejected.
///
///   {
///     "prices": {"wheat": 300, "inputs": {"nitrogen": 1.5}},
///     "solver": {"tolerance": 1e-10, "max_iterations": 200, "exploitable_cap": 0.8},
///     "farms": "farms.csv"  |  "population": {...},
///     "cf_db": "...", "process_db": "...", "methods": "methods.csv" | [ {...}, ... ],
///     "active_ingredients": "active_ingredients.csv",
///     "bindings": [{"factor": "weeds", "process": "...", "mode": "per_treatment",
///                   "pesticide": {"type": "herbicide", "toxicity": "irritating"}}],
///     "tractor_process": "tractor_work",
///     "threads": 4, "seed": 7,
///     "sweep": {"parameter": "wheat_price", "grid": [200, 300, 400]}
///   }
struct ScenarioConfig {
  Prices prices;
  std::map<std::string, double> input_prices;  // overrides applied to every farm
  SolverSettings solver;
  std::optional<std::filesystem::path> farms_file;
  std::optional<PopulationSpec> population;
  std::filesystem::path cf_db;
  std::filesystem::path process_db;
  std::optional<std::filesystem::path> methods_file;
  std::vector<MethodKey> methods;  // inline list; empty means every method in the database
  std::optional<std::filesystem::path> active_ingredients;
  std::vector<BindingSpec> bindings;
  std::string tractor_process = "tractor_work";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::optional<SweepParameter> sweep_parameter;
  std::vector<double> sweep_grid;

  std::filesystem::path base_dir;
  std::string hash;  // of the normalized JSON document
};

ScenarioConfig parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Everything a run needs, with files loaded and bindings resolved.
struct LoadedScenario {
  std::vector<FarmSpec> farms;
  LcaContext lca;
  RunSettings run;
};

/// `seed_override` replaces the configured seed, which drives the synthetic
/// population.
LoadedScenario materialize(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override = {});

}  // namespace yieldgap
