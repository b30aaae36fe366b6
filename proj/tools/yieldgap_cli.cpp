// yieldgap: command line front end for calibration, optimization, LCA and
// scenario runs. Exit status: 0 ok, 1 data or model error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "yieldgap/calibration.hpp"
#include "yieldgap/data_io.hpp"
#include "yieldgap/error.hpp"
#include "yieldgap/lca.hpp"
#include "yieldgap/optimizer.hpp"
#include "yieldgap/report.hpp"
#include "yieldgap/scenario_config.hpp"
#include "yieldgap/simulation.hpp"

namespace yg = yieldgap;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string format = "table";
  std::string output;
  bool strict = false;
  bool verbose = false;
  std::optional<std::uint64_t> seed;
};

// Input levels of the worked example as printed in the source publication;
// --replay-paper evaluates them on the supplied farm.
const std::map<std::string, double> kPublishedPlan = {{"nitrogen", 50.13}, {"weeds", 5.57}, {"insects", 3.57}};

yg::OutputFormat output_format(const Global& g) {
  auto f = yg::parse_output_format(g.format);
  if (!f) throw UsageError("unknown format '" + g.format + "'");
  return *f;
}

void emit(const Global& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
  } else {
    yg::write_text_file(g.output, text);
  }
}

void note(const Global& g, const std::string& msg) {
  if (g.verbose) std::cerr << msg << '\n';
}

std::filesystem::path data_path(const std::string& p) { return yg::resolve_data_path(p); }

// "wheat=300,nitrogen=1.5" -> {"wheat": 300, "nitrogen": 1.5}
std::map<std::string, double> parse_assignments(const std::string& text, const std::string& what) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError(what + ": expected name=value, got '" + item + "'");
    auto v = yg::parse_number(item.substr(eq + 1));
    if (!v) throw UsageError(what + ": '" + item.substr(eq + 1) + "' is not a number");
    out[item.substr(0, eq)] = *v;
  }
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = yg::parse_number(item);
    if (!v) throw UsageError("grid value '" + item + "' is not a number");
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError("grid is empty");
  return out;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::string observations, records, stratum;
  std::optional<double> potential_yield;
  std::size_t min_count = 4;
};

int run_calibrate(const Global& g, const CalibrateArgs& a) {
  if (a.observations.empty() == a.records.empty()) throw UsageError("give exactly one of --observations and --records");
  std::map<std::string, std::map<std::string, yg::ObservationSet>> obs;
  if (!a.observations.empty()) {
    obs = yg::load_observations(data_path(a.observations));
  } else {
    auto loaded = yg::load_farm_records(data_path(a.records), {g.strict, yg::kFarmRecordSchemaVersion});
    for (const auto& e : loaded.errors) std::cerr << "skipped line " << e.line << ": " << e.message << '\n';
    obs = yg::observations_from_records(loaded.records);
  }
  if (!a.stratum.empty()) {
    auto it = obs.find(a.stratum);
    if (it == obs.end()) throw yg::LookupError("no observations for stratum '" + a.stratum + "'");
    obs = {{it->first, it->second}};
  }
  yg::CalibrationSettings settings;
  settings.min_count = a.min_count;
  settings.potential_yield = a.potential_yield;
  yg::StratumCalibration result;
  bool any_failed = false;
  for (const auto& [stratum, factors] : obs) {
    result[stratum] = yg::calibrate_stratum(factors, settings);
    for (const auto& [_, c] : result[stratum]) any_failed = any_failed || c.status != yg::CalibrationStatus::Ok;
  }
  emit(g, yg::format_calibration(result, output_format(g)));
  return g.strict && any_failed ? 1 : 0;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string farms;
  std::string prices;
  std::optional<double> cap;
  bool replay = false;
  std::string replay_inputs;
};

int run_optimize(const Global& g, const OptimizeArgs& a) {
  if (a.farms.empty()) throw UsageError("--farms is required");
  if (a.prices.empty()) throw UsageError("--prices is required (e.g. wheat=300)");
  auto assignments = parse_assignments(a.prices, "--prices");
  auto wheat = assignments.find("wheat");
  if (wheat == assignments.end()) throw UsageError("--prices must include wheat=<price per tonne>");
  yg::Prices prices{wheat->second};
  assignments.erase(wheat);

  std::vector<yg::FarmSpec> farms = yg::load_farm_specs(data_path(a.farms));
  for (const auto& [name, price] : assignments) {
    bool used = false;
    for (auto& f : farms) {
      for (auto& s : f.stress_factors) {
        if (s.name == name) {
          s.input_price = price;
          used = true;
        }
      }
    }
    if (!used) throw UsageError("--prices names unknown stress factor '" + name + "'");
  }
  yg::SolverSettings solver;
  solver.exploitable_cap = a.cap;

  std::vector<yg::FarmDecision> decisions;
  for (const auto& f : farms) decisions.push_back({f, yg::optimal_inputs(f, prices, solver)});
  const auto fmt = output_format(g);
  std::string out = yg::format_decisions(decisions, fmt);

  if (a.replay || !a.replay_inputs.empty()) {
    std::map<std::string, double> plan = kPublishedPlan;
    if (!a.replay_inputs.empty()) plan = parse_assignments(a.replay_inputs, "--replay-inputs");
    for (const auto& f : farms) {
      std::map<std::string, double> inputs;
      for (const auto& s : f.stress_factors) {
        auto it = plan.find(s.name);
        if (it == plan.end()) throw UsageError("replayed plan has no input for '" + s.name + "'");
        inputs[s.name] = it->second;
      }
      auto eval = yg::evaluate_plan(f, prices, inputs);
      if (fmt == yg::OutputFormat::Table) out += "\nreplayed plan on farm " + f.farm_id + "\n";
      out += yg::format_plan(f, eval, fmt);
    }
  }
  emit(g, out);
  return 0;
}

// ---------------------------------------------------------------------------

struct AssessArgs {
  std::string cf_db, process_db, methods;
  std::string inventory, demand, records, farm_id, active_ingredients;
  double mj_per_hour = 150.0;
};

int run_assess(const Global& g, const AssessArgs& a) {
  int sources = !a.inventory.empty() + !a.demand.empty() + !a.records.empty();
  if (sources != 1) throw UsageError("give exactly one of --inventory, --demand and --records");
  if (a.cf_db.empty()) throw UsageError("--cf-db is required");
  yg::CharacterizationDatabase db = yg::load_cf_database(data_path(a.cf_db));
  std::vector<yg::ImpactMethodSpec> methods =
      a.methods.empty() ? db.methods() : db.select(yg::load_method_list(data_path(a.methods)));

  yg::InventoryVector inv;
  if (!a.inventory.empty()) {
    inv = yg::load_inventory(data_path(a.inventory));
  } else {
    if (a.process_db.empty()) throw UsageError("--process-db is required with --demand or --records");
    yg::ProcessDatabase processes = yg::load_process_db(data_path(a.process_db));
    std::map<std::string, double> demand;
    if (!a.demand.empty()) {
      demand = yg::load_demand(data_path(a.demand));
    } else {
      auto loaded = yg::load_farm_records(data_path(a.records), {g.strict, yg::kFarmRecordSchemaVersion});
      for (const auto& e : loaded.errors) std::cerr << "skipped line " << e.line << ": " << e.message << '\n';
      const yg::FarmRecord* rec = nullptr;
      for (const auto& r : loaded.records) {
        if (a.farm_id.empty() ? rec == nullptr : r.farm_id == a.farm_id) rec = &r;
      }
      if (!rec) throw yg::LookupError("no farm record" + (a.farm_id.empty() ? std::string() : " '" + a.farm_id + "'"));
      yg::ActiveIngredientMap ai = a.active_ingredients.empty()
                                       ? yg::ActiveIngredientMap::defaults()
                                       : yg::load_active_ingredient_map(data_path(a.active_ingredients));
      demand = yg::record_demand(yg::derive_inputs(*rec, ai, a.mj_per_hour));
    }
    inv = yg::expand_inventory(demand, processes);
  }

  // A flow that no selected method characterizes drops out of every score.
  std::map<yg::ElementaryFlow, std::size_t> misses;
  for (const auto& m : methods) {
    for (const auto& f : yg::characterize_midpoint(inv, m).uncharacterized) ++misses[f];
  }
  for (const auto& [f, n] : misses) {
    if (n != methods.size()) continue;
    std::string msg = "no selected method characterizes " + f.substance + " (" +
                      std::string(yg::to_string(f.compartment)) + ")";
    if (g.strict) throw yg::LookupError(msg);
    note(g, msg);
  }
  emit(g, yg::format_impacts(yg::assess(inv, methods), output_format(g)));
  return 0;
}

// ---------------------------------------------------------------------------

struct ScenarioArgs {
  std::string config;
  std::optional<unsigned> threads;
  bool per_farm = false;
  std::string parameter, grid;
};

yg::LoadedScenario load_scenario(const Global& g, const ScenarioArgs& a, yg::ScenarioConfig& cfg) {
  if (a.config.empty()) throw UsageError("--config is required");
  cfg = yg::load_scenario_config(data_path(a.config));
  yg::LoadedScenario s = yg::materialize(cfg, g.seed);
  if (a.threads) s.run.threads = *a.threads;
  return s;
}

int report_failures(const Global& g, const yg::ScenarioResult& r) {
  for (const auto& f : r.failures) note(g, "farm " + f.farm_id + " failed: " + f.message);
  return g.strict && !r.failures.empty() ? 1 : 0;
}

int run_simulate(const Global& g, const ScenarioArgs& a) {
  yg::ScenarioConfig cfg;
  auto s = load_scenario(g, a, cfg);
  auto result = yg::run_scenario(s.farms, cfg.prices, s.lca, s.run);
  emit(g, yg::format_scenario(result, output_format(g), a.per_farm));
  return report_failures(g, result);
}

int run_sweep(const Global& g, const ScenarioArgs& a) {
  yg::ScenarioConfig cfg;
  auto s = load_scenario(g, a, cfg);
  std::optional<yg::SweepParameter> param = cfg.sweep_parameter;
  std::vector<double> grid = cfg.sweep_grid;
  if (!a.parameter.empty()) param = yg::SweepParameter::parse(a.parameter);
  if (!a.grid.empty()) grid = parse_grid(a.grid);
  if (!param || grid.empty()) throw UsageError("sweep needs a parameter and a grid (config or --parameter/--grid)");
  auto points = yg::sweep(*param, grid, s.farms, cfg.prices, s.lca, s.run);
  emit(g, yg::format_sweep(*param, points, output_format(g)));
  int rc = 0;
  for (const auto& p : points) rc = std::max(rc, report_failures(g, p.result));
  return rc;
}

int run_report(const Global& g, const std::string& input) {
  if (input.empty()) throw UsageError("--input is required");
  auto result = yg::impacts_from_json(yg::read_text_file(input));
  emit(g, yg::format_impacts(result, output_format(g)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yield-gap economics and life-cycle impacts of wheat farms"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("-o,--output", g.output, "Write the result to this file instead of stdout");
  app.add_flag("--strict", g.strict, "Treat skipped rows, failed farms and missing factors as errors");
  app.add_flag("-v,--verbose", g.verbose, "Report diagnostics on stderr");
  app.add_option("--seed", g.seed, "Seed for synthetic populations");

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "Fit conditional yield curves to best-practice frontiers");
  cal->add_option("--observations", ca.observations, "CSV with stratum,factor,x,y");
  cal->add_option("--records", ca.records, "Farm record CSV");
  cal->add_option("--stratum", ca.stratum, "Only this stratum");
  cal->add_option("--potential-yield", ca.potential_yield, "Known potential yield (t/ha)");
  cal->add_option("--min-count", ca.min_count, "Frontier points to collect by peeling")->check(CLI::PositiveNumber);

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "Profit-maximizing target yield and inputs per farm");
  opt->add_option("--farms", oa.farms, "Farm parameter CSV");
  opt->add_option("--prices", oa.prices, "wheat=<price>[,<factor>=<input price>...]");
  opt->add_option("--cap", oa.cap, "Cap target yield at this share of potential yield");
  opt->add_flag("--replay-paper", oa.replay, "Also evaluate the published input plan of the worked example");
  opt->add_option("--replay-inputs", oa.replay_inputs, "Evaluate this plan instead: <factor>=<input>,...");

  AssessArgs aa;
  auto* ass = app.add_subcommand("assess", "Midpoint and endpoint impacts of an inventory");
  ass->add_option("--cf-db", aa.cf_db, "Characterization factor CSV");
  ass->add_option("--process-db", aa.process_db, "Process dataset CSV");
  ass->add_option("--methods", aa.methods, "Method list CSV (default: all methods)");
  ass->add_option("--inventory", aa.inventory, "Elementary flow CSV");
  ass->add_option("--demand", aa.demand, "Process demand CSV");
  ass->add_option("--records", aa.records, "Farm record CSV");
  ass->add_option("--farm-id", aa.farm_id, "Record to assess (default: first)");
  ass->add_option("--active-ingredients", aa.active_ingredients, "Active ingredient map CSV");
  ass->add_option("--mj-per-hour", aa.mj_per_hour, "Tractor energy per working hour")->check(CLI::NonNegativeNumber);

  ScenarioArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run a scenario over a farm population");
  sim->add_option("--config", sa.config, "Scenario JSON");
  sim->add_option("--threads", sa.threads, "Worker threads (0: all cores)");
  sim->add_flag("--per-farm", sa.per_farm, "Include per-farm rows");

  auto* swp = app.add_subcommand("sweep", "Repeat a scenario over a price grid");
  swp->add_option("--config", sa.config, "Scenario JSON");
  swp->add_option("--threads", sa.threads, "Worker threads (0: all cores)");
  swp->add_option("--parameter", sa.parameter, "wheat_price or input_price:<factor>");
  swp->add_option("--grid", sa.grid, "Comma separated values");

  std::string report_input;
  auto* rep = app.add_subcommand("report", "Render saved assess JSON as ranked tables");
  rep->add_option("--input", report_input, "JSON written by 'assess --format json'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*cal) return run_calibrate(g, ca);
    if (*opt) return run_optimize(g, oa);
    if (*ass) return run_assess(g, aa);
    if (*sim) return run_simulate(g, sa);
    if (*swp) return run_sweep(g, sa);
    if (*rep) return run_report(g, report_input);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const yg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
