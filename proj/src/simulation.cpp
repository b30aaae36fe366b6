#include "yieldgap/simulation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <thread>

#include "yieldgap/error.hpp"

namespace yieldgap {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr int kTruncationTries = 10000;

}  // namespace

double Distribution::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::Point:
      return a;
    case Kind::Uniform:
      return a == b ? a : std::uniform_real_distribution<double>(a, b)(rng);
    case Kind::Normal: {
      std::normal_distribution<double> n(a, b);
      for (int i = 0; i < kTruncationTries; ++i) {
        double v = n(rng);
        if (v >= lower && v <= upper) return v;
      }
      throw ConfigError("truncated normal has negligible mass inside its bounds");
    }
  }
  return a;
}

void Distribution::validate(const std::string& what) const {
  auto fail = [&](const std::string& msg) { throw ConfigError(what + ": " + msg); };
  switch (kind) {
    case Kind::Point:
      if (!std::isfinite(a)) fail("point value must be finite");
      break;
    case Kind::Uniform:
      if (!std::isfinite(a) || !std::isfinite(b) || a > b) fail("uniform needs finite low <= high");
      break;
    case Kind::Normal:
      if (!std::isfinite(a) || !std::isfinite(b) || !(b > 0.0)) fail("normal needs a finite mean and positive sd");
      if (!(lower < upper)) fail("normal bounds must satisfy lower < upper");
      break;
  }
}

void PopulationSpec::validate() const {
  if (factors.empty()) throw ConfigError("population needs at least one stress factor");
  if (max_redraws < 1) throw ConfigError("max_redraws must be positive");
  potential_yield.validate("potential_yield");
  hectares.validate("hectares");
  tractor_energy.validate("tractor_energy");
  for (const auto& f : factors) {
    if (f.name.empty()) throw ConfigError("stress factor without a name");
    f.s.validate(f.name + ".s");
    f.s_bar.validate(f.name + ".s_bar");
    f.lambda.validate(f.name + ".lambda");
    f.input_price.validate(f.name + ".input_price");
  }
}

std::vector<FarmSpec> generate_population(const PopulationSpec& spec) {
  spec.validate();
  std::vector<FarmSpec> farms;
  farms.reserve(spec.count);
  const int width = spec.count > 1 ? static_cast<int>(std::to_string(spec.count - 1).size()) : 1;
  for (std::size_t i = 0; i < spec.count; ++i) {
    std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(i)));
    char id[64];
    std::snprintf(id, sizeof id, "%s-%0*zu", spec.id_prefix.c_str(), width, i);
    std::optional<FarmSpec> farm;
    std::string last_error;
    for (int attempt = 0; attempt < spec.max_redraws && !farm; ++attempt) {
      FarmSpec f;
      f.farm_id = id;
      f.potential_yield = spec.potential_yield.sample(rng);
      f.hectares = spec.hectares.sample(rng);
      f.tractor_energy = spec.tractor_energy.sample(rng);
      for (const auto& d : spec.factors) {
        StressFactorParams p;
        p.name = d.name;
        p.input_unit = d.input_unit;
        p.s = d.s.sample(rng);
        p.s_bar = d.s_bar.sample(rng);
        p.lambda = d.lambda.sample(rng);
        p.input_price = d.input_price.sample(rng);
        f.stress_factors.push_back(std::move(p));
      }
      try {
        f.validate();
        farm = std::move(f);
      } catch (const DomainError& e) {
        last_error = e.what();
      }
    }
    if (!farm) {
      throw ConfigError("could not draw a valid farm after " + std::to_string(spec.max_redraws) +
                        " attempts: " + last_error);
    }
    farms.push_back(std::move(*farm));
  }
  return farms;
}

void LcaContext::validate() const {
  for (const auto& b : bindings) {
    if (!processes.contains(b.process)) {
      throw ConfigError("binding for '" + b.factor + "' refers to unknown process '" + b.process + "'");
    }
    if (!std::isfinite(b.amount) || b.amount < 0.0) throw ConfigError("binding amount must be non-negative");
  }
  if (!tractor_process.empty() && !processes.contains(tractor_process)) {
    throw ConfigError("unknown tractor process '" + tractor_process + "'");
  }
  for (const auto& m : methods) m.validate();
}

std::vector<InputBinding> default_bindings() {
  return {
      {"nitrogen", "nitrogen_fertilization", InputBinding::Mode::PerUnit, 1.0},
      {"weeds", "herbicide_2,4-D_application", InputBinding::Mode::PerTreatment, 0.54},
      {"insects", "insecticide_pirimicarb_application", InputBinding::Mode::PerTreatment, 0.13},
  };
}

std::map<std::string, double> process_demand(const FarmSpec& farm, const Decision& decision, const LcaContext& ctx) {
  std::map<std::string, double> demand;
  if (!ctx.tractor_process.empty() && farm.tractor_energy > 0.0) demand[ctx.tractor_process] += farm.tractor_energy;
  for (const auto& b : ctx.bindings) {
    auto it = decision.inputs.find(b.factor);
    if (it == decision.inputs.end()) continue;
    const double x = it->second;
    if (b.mode == InputBinding::Mode::PerUnit) {
      if (x > 0.0) demand[b.process] += b.amount * x;
    } else if (x > 0.0) {
      demand[b.process] += b.amount;
    }
  }
  return demand;
}

namespace {

// Expansion is linear in demand, so each bound process is expanded once.
std::map<std::string, InventoryVector> unit_inventories(const LcaContext& ctx) {
  std::map<std::string, InventoryVector> out;
  auto add = [&](const std::string& id) {
    if (!id.empty() && !out.count(id)) out[id] = expand_inventory({{id, 1.0}}, ctx.processes);
  };
  add(ctx.tractor_process);
  for (const auto& b : ctx.bindings) add(b.process);
  return out;
}

FarmOutcome evaluate_farm(std::size_t index, const FarmSpec& farm, const Prices& prices, const LcaContext& ctx,
                          const std::map<std::string, InventoryVector>& units, const SolverSettings& solver) {
  farm.validate();
  FarmOutcome o;
  o.index = index;
  o.farm_id = farm.farm_id;
  o.hectares = farm.hectares;
  o.decision = optimal_inputs(farm, prices, solver);
  InventoryVector inv;
  for (const auto& [process, amount] : process_demand(farm, o.decision, ctx)) {
    inv += units.at(process).scaled(amount * farm.hectares);
  }
  o.impacts = assess(inv, ctx.methods);
  return o;
}

}  // namespace

ScenarioAggregates aggregate(std::span<const FarmOutcome> farms, std::size_t failures) {
  ScenarioAggregates a;
  a.farms = farms.size();
  a.failures = failures;
  double yield_sum = 0.0;
  for (const auto& f : farms) {
    a.hectares += f.hectares;
    a.total_profit += f.decision.profit * f.hectares;
    yield_sum += f.decision.target_yield;
    a.total_daly += f.impacts.endpoint_total(EndpointUnit::DALY);
    a.total_species_year += f.impacts.endpoint_total(EndpointUnit::SpeciesYear);
    a.total_usd += f.impacts.endpoint_total(EndpointUnit::USD);
    for (const auto& [name, x] : f.decision.inputs) a.input_totals[name] += x * f.hectares;
  }
  if (!farms.empty()) a.mean_target_yield = yield_sum / static_cast<double>(farms.size());
  if (a.hectares > 0.0) {
    a.daly_per_ha = a.total_daly / a.hectares;
    a.species_year_per_ha = a.total_species_year / a.hectares;
  }
  return a;
}

ScenarioResult run_scenario(std::span<const FarmSpec> farms, const Prices& prices, const LcaContext& ctx,
                            const RunSettings& settings) {
  prices.validate();
  settings.solver.validate();
  ctx.validate();
  const auto units = unit_inventories(ctx);

  struct Slot {
    std::optional<FarmOutcome> outcome;
    std::string error;
  };
  std::vector<Slot> slots(farms.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < farms.size(); i = next++) {
      try {
        slots[i].outcome = evaluate_farm(i, farms[i], prices, ctx, units, settings.solver);
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  unsigned threads = settings.threads ? settings.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, farms.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ScenarioResult r;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].outcome) {
      r.farms.push_back(std::move(*slots[i].outcome));
    } else {
      r.failures.push_back({i, farms[i].farm_id, slots[i].error});
    }
  }
  r.aggregates = aggregate(r.farms, r.failures.size());
  r.metadata = {prices.wheat_price, settings.seed, settings.config_hash, farms.size()};
  return r;
}

SweepParameter SweepParameter::parse(const std::string& text) {
  if (text == "wheat_price") return {Kind::WheatPrice, ""};
  const std::string prefix = "input_price:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) return {Kind::InputPrice, text.substr(prefix.size())};
  throw ConfigError("unknown sweep parameter '" + text + "' (expected wheat_price or input_price:<factor>)");
}

std::string SweepParameter::to_string() const {
  return kind == Kind::WheatPrice ? "wheat_price" : "input_price:" + factor;
}

std::vector<SweepPoint> sweep(const SweepParameter& parameter, std::span<const double> grid,
                              std::span<const FarmSpec> farms, const Prices& prices, const LcaContext& ctx,
                              const RunSettings& settings) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  if (parameter.kind == SweepParameter::Kind::InputPrice) {
    bool any = false;
    for (const auto& f : farms) {
      for (const auto& p : f.stress_factors) any = any || p.name == parameter.factor;
    }
    if (!any) throw ConfigError("no farm has a stress factor named '" + parameter.factor + "'");
  }
  std::vector<SweepPoint> out;
  for (double v : grid) {
    Prices p = prices;
    std::vector<FarmSpec> scenario(farms.begin(), farms.end());
    if (parameter.kind == SweepParameter::Kind::WheatPrice) {
      p.wheat_price = v;
    } else {
      for (auto& f : scenario) {
        for (auto& s : f.stress_factors) {
          if (s.name == parameter.factor) s.input_price = v;
        }
      }
    }
    out.push_back({v, run_scenario(scenario, p, ctx, settings)});
  }
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace yieldgap
