#include "yieldgap/scenario_config.hpp"

#include <set>

#include "json.hpp"
#include "yieldgap/error.hpp"

namespace yieldgap {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be a string");
  return j.get<std::string>();
}

Distribution distribution(const json& j, const std::string& where) {
  Distribution d;
  if (j.is_number()) {
    d = Distribution::point(j.get<double>());
  } else if (j.is_object() && j.size() == 1 && j.contains("point")) {
    d = Distribution::point(number(j["point"], where + ".point"));
  } else if (j.is_object() && j.size() == 1 && j.contains("uniform")) {
    const json& u = j["uniform"];
    if (!u.is_array() || u.size() != 2) throw ConfigError(where + ".uniform must be [low, high]");
    d = Distribution::uniform(number(u[0], where), number(u[1], where));
  } else if (j.is_object() && j.size() == 1 && j.contains("normal")) {
    const json& n = j["normal"];
    check_keys(n, {"mean", "sd", "min", "max"}, where + ".normal");
    if (!n.contains("mean") || !n.contains("sd")) throw ConfigError(where + ".normal needs mean and sd");
    d = Distribution::normal(number(n["mean"], where), number(n["sd"], where),
                             n.contains("min") ? number(n["min"], where) : -std::numeric_limits<double>::infinity(),
                             n.contains("max") ? number(n["max"], where) : std::numeric_limits<double>::infinity());
  } else {
    throw ConfigError(where + " must be a number or one of {point}, {uniform}, {normal}");
  }
  d.validate(where);
  return d;
}

PopulationSpec population(const json& j, std::uint64_t seed) {
  check_keys(j, {"count", "id_prefix", "potential_yield", "hectares", "tractor_energy", "factors", "max_redraws"},
             "population");
  PopulationSpec p;
  p.seed = seed;
  if (!j.contains("count") || !j["count"].is_number_unsigned()) throw ConfigError("population.count must be a non-negative integer");
  p.count = j["count"].get<std::size_t>();
  if (j.contains("id_prefix")) p.id_prefix = text(j["id_prefix"], "population.id_prefix");
  if (!j.contains("potential_yield")) throw ConfigError("population.potential_yield is required");
  p.potential_yield = distribution(j["potential_yield"], "population.potential_yield");
  if (j.contains("hectares")) p.hectares = distribution(j["hectares"], "population.hectares");
  if (j.contains("tractor_energy")) p.tractor_energy = distribution(j["tractor_energy"], "population.tractor_energy");
  if (j.contains("max_redraws")) p.max_redraws = j["max_redraws"].get<int>();
  if (!j.contains("factors") || !j["factors"].is_array()) throw ConfigError("population.factors must be an array");
  for (const auto& f : j["factors"]) {
    check_keys(f, {"name", "input_unit", "s", "s_bar", "lambda", "input_price"}, "population.factors[]");
    for (const char* k : {"name", "s", "s_bar", "lambda", "input_price"}) {
      if (!f.contains(k)) throw ConfigError(std::string("population factor is missing '") + k + "'");
    }
    FactorDistribution d;
    d.name = text(f["name"], "factor name");
    if (f.contains("input_unit")) d.input_unit = text(f["input_unit"], "input_unit");
    d.s = distribution(f["s"], d.name + ".s");
    d.s_bar = distribution(f["s_bar"], d.name + ".s_bar");
    d.lambda = distribution(f["lambda"], d.name + ".lambda");
    d.input_price = distribution(f["input_price"], d.name + ".input_price");
    p.factors.push_back(std::move(d));
  }
  p.validate();
  return p;
}

BindingSpec binding(const json& j) {
  check_keys(j, {"factor", "process", "mode", "amount", "pesticide"}, "bindings[]");
  BindingSpec b;
  if (!j.contains("factor") || !j.contains("process")) throw ConfigError("binding needs factor and process");
  b.binding.factor = text(j["factor"], "binding factor");
  b.binding.process = text(j["process"], "binding process");
  std::string mode = j.contains("mode") ? text(j["mode"], "binding mode") : "per_unit";
  if (mode == "per_unit") {
    b.binding.mode = InputBinding::Mode::PerUnit;
  } else if (mode == "per_treatment") {
    b.binding.mode = InputBinding::Mode::PerTreatment;
  } else {
    throw ConfigError("binding mode must be per_unit or per_treatment, got '" + mode + "'");
  }
  if (j.contains("amount") && j.contains("pesticide")) throw ConfigError("binding takes amount or pesticide, not both");
  if (j.contains("amount")) b.binding.amount = number(j["amount"], "binding amount");
  if (j.contains("pesticide")) {
    const json& p = j["pesticide"];
    check_keys(p, {"type", "toxicity"}, "binding pesticide");
    b.pesticide_type = parse_pesticide_type(text(p.value("type", json()), "pesticide type"));
    if (!b.pesticide_type) throw ConfigError("unknown pesticide type in binding for '" + b.binding.factor + "'");
    b.toxicity = text(p.value("toxicity", json()), "pesticide toxicity");
  }
  return b;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  c.base_dir = base_dir;
  try {
    check_keys(doc, {"prices", "solver", "farms", "population", "cf_db", "process_db", "methods",
                     "active_ingredients", "bindings", "tractor_process", "threads", "seed", "sweep"},
               "scenario");
    c.hash = fnv1a_hex(doc.dump());

    if (!doc.contains("prices")) throw ConfigError("scenario needs prices");
    const json& prices = doc["prices"];
    check_keys(prices, {"wheat", "inputs"}, "prices");
    if (!prices.contains("wheat")) throw ConfigError("prices.wheat is required");
    c.prices.wheat_price = number(prices["wheat"], "prices.wheat");
    c.prices.validate();
    if (prices.contains("inputs")) {
      if (!prices["inputs"].is_object()) throw ConfigError("prices.inputs must be an object");
      for (const auto& [name, v] : prices["inputs"].items()) {
        double p = number(v, "prices.inputs." + name);
        if (p < 0.0) throw ConfigError("input price for '" + name + "' must be non-negative");
        c.input_prices[name] = p;
      }
    }

    if (doc.contains("solver")) {
      const json& s = doc["solver"];
      check_keys(s, {"tolerance", "max_iterations", "bracket_shrink", "exploitable_cap"}, "solver");
      if (s.contains("tolerance")) c.solver.tolerance = number(s["tolerance"], "solver.tolerance");
      if (s.contains("max_iterations")) c.solver.max_iterations = s["max_iterations"].get<int>();
      if (s.contains("bracket_shrink")) c.solver.bracket_shrink = number(s["bracket_shrink"], "solver.bracket_shrink");
      if (s.contains("exploitable_cap") && !s["exploitable_cap"].is_null()) {
        c.solver.exploitable_cap = number(s["exploitable_cap"], "solver.exploitable_cap");
      }
      try {
        c.solver.validate();
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }

    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("threads")) {
      if (!doc["threads"].is_number_unsigned()) throw ConfigError("threads must be a non-negative integer");
      c.threads = doc["threads"].get<unsigned>();
    }

    if (doc.contains("farms") == doc.contains("population")) {
      throw ConfigError("scenario needs exactly one of 'farms' and 'population'");
    }
    if (doc.contains("farms")) c.farms_file = text(doc["farms"], "farms");
    if (doc.contains("population")) c.population = population(doc["population"], c.seed);

    if (!doc.contains("cf_db") || !doc.contains("process_db")) throw ConfigError("scenario needs cf_db and process_db");
    c.cf_db = text(doc["cf_db"], "cf_db");
    c.process_db = text(doc["process_db"], "process_db");
    if (doc.contains("methods")) {
      const json& m = doc["methods"];
      if (m.is_string()) {
        c.methods_file = m.get<std::string>();
      } else if (m.is_array()) {
        for (const auto& k : m) {
          check_keys(k, {"method", "sub_label", "geography", "perspective"}, "methods[]");
          MethodKey key;
          key.name = text(k.value("method", json()), "method");
          key.sub_label = k.contains("sub_label") ? text(k["sub_label"], "sub_label") : "";
          auto g = parse_geography(k.contains("geography") ? text(k["geography"], "geography") : "Global");
          auto p = parse_perspective(k.contains("perspective") ? text(k["perspective"], "perspective") : "Hierarchist");
          if (!g || !p) throw ConfigError("bad geography or perspective for method '" + key.name + "'");
          key.geography = *g;
          key.perspective = *p;
          c.methods.push_back(std::move(key));
        }
      } else {
        throw ConfigError("methods must be a file name or an array");
      }
    }
    if (doc.contains("active_ingredients")) c.active_ingredients = text(doc["active_ingredients"], "active_ingredients");
    if (doc.contains("bindings")) {
      if (!doc["bindings"].is_array()) throw ConfigError("bindings must be an array");
      for (const auto& b : doc["bindings"]) c.bindings.push_back(binding(b));
    } else {
      for (auto& b : default_bindings()) c.bindings.push_back({b, std::nullopt, ""});
    }
    if (doc.contains("tractor_process")) c.tractor_process = text(doc["tractor_process"], "tractor_process");

    if (doc.contains("sweep")) {
      const json& s = doc["sweep"];
      check_keys(s, {"parameter", "grid"}, "sweep");
      c.sweep_parameter = SweepParameter::parse(text(s.value("parameter", json()), "sweep.parameter"));
      if (!s.contains("grid") || !s["grid"].is_array() || s["grid"].empty()) {
        throw ConfigError("sweep.grid must be a non-empty array");
      }
      for (const auto& v : s["grid"]) c.sweep_grid.push_back(number(v, "sweep.grid[]"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario file: ") + e.what());
  }
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  return parse_scenario_config(read_text_file(path), path.parent_path());
}

LoadedScenario materialize(const ScenarioConfig& config, std::optional<std::uint64_t> seed_override) {
  auto resolve = [&](const std::filesystem::path& p) { return resolve_data_path(p, config.base_dir); };
  LoadedScenario out;
  out.run.solver = config.solver;
  out.run.threads = config.threads;
  out.run.seed = seed_override.value_or(config.seed);
  out.run.config_hash = config.hash;

  if (config.farms_file) {
    out.farms = load_farm_specs(resolve(*config.farms_file));
  } else {
    PopulationSpec spec = *config.population;
    spec.seed = out.run.seed;
    out.farms = generate_population(spec);
  }
  for (auto& f : out.farms) {
    for (auto& s : f.stress_factors) {
      if (auto it = config.input_prices.find(s.name); it != config.input_prices.end()) s.input_price = it->second;
    }
  }

  CharacterizationDatabase cfs = load_cf_database(resolve(config.cf_db));
  std::vector<MethodKey> keys = config.methods;
  if (config.methods_file) keys = load_method_list(resolve(*config.methods_file));
  if (keys.empty()) {
    out.lca.methods = cfs.methods();
  } else {
    out.lca.methods = cfs.select(keys);
  }
  out.lca.processes = load_process_db(resolve(config.process_db));
  out.lca.tractor_process = config.tractor_process;

  ActiveIngredientMap ai = config.active_ingredients ? load_active_ingredient_map(resolve(*config.active_ingredients))
                                                     : ActiveIngredientMap::defaults();
  for (const auto& b : config.bindings) {
    InputBinding ib = b.binding;
    if (b.pesticide_type) {
      const ActiveIngredient* a = ai.find(*b.pesticide_type, b.toxicity);
      if (!a) {
        throw ResolutionError("no active ingredient for " + std::string(to_string(*b.pesticide_type)) +
                              " with toxicity '" + b.toxicity + "'");
      }
      ib.amount = a->default_dose_g_per_ha / 1000.0;
    }
    out.lca.bindings.push_back(std::move(ib));
  }
  out.lca.validate();
  return out;
}

}  // namespace yieldgap
