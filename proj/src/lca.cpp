#include "yieldgap/lca.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "yieldgap/error.hpp"

namespace yieldgap {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [e, label] : table) {
    if (label == s) return e;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view label(E e, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [v, l] : table) {
    if (v == e) return l;
  }
  return "?";
}

constexpr std::pair<Compartment, std::string_view> kCompartments[] = {
    {Compartment::Air, "air"},
    {Compartment::UrbanAir, "urban air"},
    {Compartment::Soil, "soil"},
    {Compartment::IndustrialSoil, "industrial soil"},
    {Compartment::Freshwater, "freshwater"},
    {Compartment::MarineWater, "marine water"},
};
constexpr std::pair<DamageCategory, std::string_view> kDamages[] = {
    {DamageCategory::HumanHealth, "human_health"},
    {DamageCategory::EcosystemQuality, "ecosystem_quality"},
    {DamageCategory::ResourceScarcity, "resource_scarcity"},
};
constexpr std::pair<EndpointUnit, std::string_view> kEndpointUnits[] = {
    {EndpointUnit::DALY, "DALY"},
    {EndpointUnit::SpeciesYear, "species.year"},
    {EndpointUnit::USD, "USD"},
};
constexpr std::pair<Geography, std::string_view> kGeographies[] = {
    {Geography::Global, "Global"},
    {Geography::Italy, "Italy"},
};
constexpr std::pair<Perspective, std::string_view> kPerspectives[] = {
    {Perspective::Individualist, "Individualist"},
    {Perspective::Hierarchist, "Hierarchist"},
    {Perspective::Egalitarian, "Egalitarian"},
};

int block_order(EndpointUnit u) {
  switch (u) {
    case EndpointUnit::DALY: return 0;
    case EndpointUnit::SpeciesYear: return 1;
    case EndpointUnit::USD: return 2;
  }
  return 3;
}

std::string flow_label(const ElementaryFlow& f) {
  return f.substance + " (" + std::string(to_string(f.compartment)) + ")";
}

}  // namespace

std::string_view to_string(Compartment c) { return label(c, kCompartments); }
std::string_view to_string(DamageCategory d) { return label(d, kDamages); }
std::string_view to_string(EndpointUnit u) { return label(u, kEndpointUnits); }
std::string_view to_string(Geography g) { return label(g, kGeographies); }
std::string_view to_string(Perspective p) { return label(p, kPerspectives); }

std::optional<Compartment> parse_compartment(std::string_view s) { return lookup(s, kCompartments); }
std::optional<DamageCategory> parse_damage_category(std::string_view s) { return lookup(s, kDamages); }
std::optional<EndpointUnit> parse_endpoint_unit(std::string_view s) { return lookup(s, kEndpointUnits); }
std::optional<Geography> parse_geography(std::string_view s) { return lookup(s, kGeographies); }
std::optional<Perspective> parse_perspective(std::string_view s) { return lookup(s, kPerspectives); }

EndpointUnit endpoint_unit_for(DamageCategory d) {
  switch (d) {
    case DamageCategory::HumanHealth: return EndpointUnit::DALY;
    case DamageCategory::EcosystemQuality: return EndpointUnit::SpeciesYear;
    case DamageCategory::ResourceScarcity: return EndpointUnit::USD;
  }
  return EndpointUnit::DALY;
}

std::string to_string(const MethodKey& k) {
  return k.name + " | " + k.sub_label + " | " + std::string(to_string(k.geography)) + " | " +
         std::string(to_string(k.perspective));
}

void ProcessDataset::validate() const {
  if (process_id.empty()) throw ConfigError("process id must not be empty");
  if (!std::isfinite(functional_unit) || !(functional_unit > 0.0)) {
    throw ConfigError("process '" + process_id + "': functional unit must be positive");
  }
  for (const auto& [id, amount] : technosphere_inputs) {
    if (!std::isfinite(amount)) throw ConfigError("process '" + process_id + "': non-finite input from '" + id + "'");
  }
  for (const auto& [flow, amount] : biosphere_exchanges) {
    if (!std::isfinite(amount)) {
      throw ConfigError("process '" + process_id + "': non-finite exchange " + flow_label(flow));
    }
  }
}

void ProcessDatabase::add(ProcessDataset p) {
  p.validate();
  const std::string id = p.process_id;
  if (!processes_.emplace(id, std::move(p)).second) throw ConfigError("duplicate process '" + id + "'");
}

const ProcessDataset& ProcessDatabase::at(const std::string& id) const {
  auto it = processes_.find(id);
  if (it == processes_.end()) throw LookupError("unknown process '" + id + "'");
  return it->second;
}

InventoryVector& InventoryVector::operator+=(const InventoryVector& other) {
  for (const auto& [flow, q] : other.flows) flows[flow] += q;
  return *this;
}

InventoryVector InventoryVector::scaled(double factor) const {
  InventoryVector out = *this;
  for (auto& [flow, q] : out.flows) q *= factor;
  return out;
}

double InventoryVector::amount(const ElementaryFlow& f) const {
  auto it = flows.find(f);
  return it == flows.end() ? 0.0 : it->second;
}

void ImpactMethodSpec::validate() const {
  const std::string who = "method '" + to_string(key) + "': ";
  if (endpoint_unit != endpoint_unit_for(damage)) {
    throw ConfigError(who + "endpoint unit " + std::string(to_string(endpoint_unit)) + " does not match damage " +
                      std::string(to_string(damage)));
  }
  if (!std::isfinite(mid_to_end_factor) || mid_to_end_factor < 0.0) {
    throw ConfigError(who + "midpoint-to-endpoint factor must be non-negative");
  }
  for (const auto& [flow, cf] : midpoint_cfs) {
    if (!std::isfinite(cf) || cf < 0.0) throw ConfigError(who + "negative factor for " + flow_label(flow));
  }
}

bool is_regionalizable(const MethodKey& key) {
  static const std::set<std::string> names = {"Particulate Matter Formation", "Ozone Formation",
                                              "Terrestrial Acidification", "Freshwater Eutrophication"};
  return names.count(key.name) != 0;
}

double ImpactResult::endpoint_total(EndpointUnit unit) const {
  double sum = 0.0;
  for (const auto& r : rows) {
    if (r.endpoint_unit == unit) sum += r.endpoint;
  }
  return sum;
}

InventoryVector expand_inventory(const std::map<std::string, double>& demand, const ProcessDatabase& db) {
  for (const auto& [id, amount] : demand) {
    db.at(id);
    if (!std::isfinite(amount) || amount < 0.0) throw DomainError("demand for '" + id + "' must be non-negative");
  }

  // Iterative DFS: post-order gives children before parents; gray nodes on
  // the stack expose cycles.
  enum class Mark { White, Gray, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> post;
  for (const auto& [root, amount] : demand) {
    if (mark[root] != Mark::White) continue;
    std::vector<std::pair<std::string, std::map<std::string, double>::const_iterator>> stack;
    mark[root] = Mark::Gray;
    stack.emplace_back(root, db.at(root).technosphere_inputs.begin());
    while (!stack.empty()) {
      auto& [id, it] = stack.back();
      const auto& inputs = db.at(id).technosphere_inputs;
      if (it == inputs.end()) {
        mark[id] = Mark::Black;
        post.push_back(id);
        stack.pop_back();
        continue;
      }
      const std::string child = it->first;
      ++it;
      db.at(child);
      Mark& m = mark[child];
      if (m == Mark::Gray) {
        std::vector<std::string> cycle;
        auto from = std::find_if(stack.begin(), stack.end(), [&](const auto& e) { return e.first == child; });
        for (auto s = from; s != stack.end(); ++s) cycle.push_back(s->first);
        cycle.push_back(child);
        std::string path;
        for (const auto& c : cycle) path += (path.empty() ? "" : " -> ") + c;
        throw CycleError("technosphere cycle: " + path, cycle);
      }
      if (m == Mark::White) {
        m = Mark::Gray;
        stack.emplace_back(child, db.at(child).technosphere_inputs.begin());
      }
    }
  }

  std::map<std::string, double> activity(demand.begin(), demand.end());
  for (auto p = post.rbegin(); p != post.rend(); ++p) {
    const ProcessDataset& ds = db.at(*p);
    const double scale = activity[*p] / ds.functional_unit;
    if (scale == 0.0) continue;
    for (const auto& [child, amount] : ds.technosphere_inputs) activity[child] += scale * amount;
  }

  InventoryVector inv;
  for (const auto& id : post) {
    const ProcessDataset& ds = db.at(id);
    const double scale = activity[id] / ds.functional_unit;
    if (scale == 0.0) continue;
    for (const auto& [flow, amount] : ds.biosphere_exchanges) {
      if (amount != 0.0) inv.flows[flow] += scale * amount;
    }
  }
  return inv;
}

MidpointScore characterize_midpoint(const InventoryVector& inv, const ImpactMethodSpec& method) {
  MidpointScore out;
  for (const auto& [flow, q] : inv.flows) {
    auto it = method.midpoint_cfs.find(flow);
    if (it == method.midpoint_cfs.end()) {
      out.uncharacterized.push_back(flow);
      continue;
    }
    out.value += q * it->second;
  }
  return out;
}

double midpoint_to_endpoint(double midpoint, const ImpactMethodSpec& method) {
  if (!std::isfinite(midpoint)) throw DomainError("midpoint score must be finite");
  if (method.endpoint_unit != endpoint_unit_for(method.damage)) {
    throw ConfigError("method '" + to_string(method.key) + "' pairs damage " +
                      std::string(to_string(method.damage)) + " with endpoint unit " +
                      std::string(to_string(method.endpoint_unit)));
  }
  return midpoint * method.mid_to_end_factor;
}

ImpactMethodSpec regionalize(const ImpactMethodSpec& method, const FlowMap& italy_cfs, const FlowMap& global_cfs) {
  if (!is_regionalizable(method.key)) {
    throw DomainError("method '" + to_string(method.key) + "' has no country-specific factors");
  }
  auto global_of = [&](const ElementaryFlow& f, double own) {
    auto it = global_cfs.find(f);
    return it == global_cfs.end() ? own : it->second;
  };
  auto ratio_of = [&](const ElementaryFlow& f, double italy, double global) {
    if (global == 0.0) {
      if (italy != 0.0) throw RegionalizationError("zero global factor for " + flow_label(f) + " with non-zero Italian factor");
      return 1.0;
    }
    return italy / global;
  };

  std::optional<double> fallback;
  for (const auto& [flow, cf] : method.midpoint_cfs) {
    auto it = italy_cfs.find(flow);
    if (it != italy_cfs.end() && global_of(flow, cf) == 1.0) {
      fallback = ratio_of(flow, it->second, 1.0);
      break;
    }
  }

  ImpactMethodSpec out = method;
  out.key.geography = Geography::Italy;
  for (auto& [flow, cf] : out.midpoint_cfs) {
    auto it = italy_cfs.find(flow);
    double ratio;
    if (it != italy_cfs.end()) {
      ratio = ratio_of(flow, it->second, global_of(flow, cf));
    } else if (fallback) {
      ratio = *fallback;
    } else {
      throw RegionalizationError("no Italian reference for " + flow_label(flow) + " in '" + to_string(method.key) +
                                 "' and no reference-flow ratio to fall back on");
    }
    cf *= ratio;
  }
  return out;
}

ImpactResult assess(const InventoryVector& inv, std::span<const ImpactMethodSpec> methods) {
  ImpactResult out;
  for (const auto& m : methods) {
    m.validate();
    ImpactRow row;
    row.method = m.key;
    row.damage = m.damage;
    row.midpoint_unit = m.midpoint_unit;
    row.endpoint_unit = m.endpoint_unit;
    row.midpoint = characterize_midpoint(inv, m).value;
    row.factor = m.mid_to_end_factor;
    row.endpoint = midpoint_to_endpoint(row.midpoint, m);
    out.rows.push_back(std::move(row));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ImpactRow& a, const ImpactRow& b) {
    return block_order(a.endpoint_unit) < block_order(b.endpoint_unit);
  });
  return out;
}

std::vector<RankedBlock> rank_impacts(const ImpactResult& result) {
  if (result.rows.empty()) throw DomainError("cannot rank an empty impact result");
  std::vector<RankedBlock> out;
  for (EndpointUnit u : {EndpointUnit::DALY, EndpointUnit::SpeciesYear, EndpointUnit::USD}) {
    RankedBlock block;
    block.unit = u;
    for (const auto& r : result.rows) {
      if (r.endpoint_unit == u) block.rows.push_back(r);
    }
    if (block.rows.empty()) continue;
    std::stable_sort(block.rows.begin(), block.rows.end(),
                     [](const ImpactRow& a, const ImpactRow& b) { return a.endpoint > b.endpoint; });
    out.push_back(std::move(block));
  }
  return out;
}

void CharacterizationDatabase::add_method(ImpactMethodSpec m) {
  m.validate();
  if (index_.count(m.key)) throw ConfigError("duplicate method '" + to_string(m.key) + "'");
  index_[m.key] = methods_.size();
  methods_.push_back(std::move(m));
}

void CharacterizationDatabase::add_regional_reference(const MethodKey& key, const ElementaryFlow& flow, double value) {
  if (!std::isfinite(value) || value < 0.0) throw ConfigError("regional factor must be non-negative");
  if (!regional_[key].emplace(flow, value).second) {
    throw ConfigError("duplicate regional factor for " + flow_label(flow) + " in '" + to_string(key) + "'");
  }
}

void CharacterizationDatabase::derive_regional_methods() {
  for (const auto& [key, refs] : regional_) {
    if (contains(key)) continue;
    MethodKey global = key;
    global.geography = Geography::Global;
    if (!contains(global)) throw ConfigError("regional factors for '" + to_string(key) + "' have no global method");
    const ImpactMethodSpec& base = at(global);
    ImpactMethodSpec italy = regionalize(base, refs, base.midpoint_cfs);
    italy.key = key;
    add_method(std::move(italy));
    derived_.insert(key);
  }
}

const ImpactMethodSpec& CharacterizationDatabase::at(const MethodKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw LookupError("unknown impact method '" + to_string(key) + "'");
  return methods_[it->second];
}

bool CharacterizationDatabase::contains(const MethodKey& key) const { return index_.count(key) != 0; }

std::vector<ImpactMethodSpec> CharacterizationDatabase::select(std::span<const MethodKey> keys) const {
  std::vector<ImpactMethodSpec> out;
  out.reserve(keys.size());
  for (const auto& k : keys) out.push_back(at(k));
  return out;
}

}  // namespace yieldgap
