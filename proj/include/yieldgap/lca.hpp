#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace yieldgap {

enum class Compartment { Air, UrbanAir, Soil, IndustrialSoil, Freshwater, MarineWater };
enum class DamageCategory { HumanHealth, EcosystemQuality, ResourceScarcity };
enum class EndpointUnit { DALY, SpeciesYear, USD };
enum class Geography { Global, Italy };
enum class Perspective { Individualist, Hierarchist, Egalitarian };

std::string_view to_string(Compartment c);
std::string_view to_string(DamageCategory d);
std::string_view to_string(EndpointUnit u);
std::string_view to_string(Geography g);
std::string_view to_string(Perspective p);

// Parsers accept the labels produced by to_string and return nullopt otherwise.
std::optional<Compartment> parse_compartment(std::string_view s);
std::optional<DamageCategory> parse_damage_category(std::string_view s);
std::optional<EndpointUnit> parse_endpoint_unit(std::string_view s);
std::optional<Geography> parse_geography(std::string_view s);
std::optional<Perspective> parse_perspective(std::string_view s);

/// Endpoint unit that belongs to a damage category.
EndpointUnit endpoint_unit_for(DamageCategory d);

/// A biosphere item: a substance released into (or taken from) a compartment.
/// Quantities attached to flows are always kg.
struct ElementaryFlow {
  std::string substance;
  Compartment compartment = Compartment::Air;

  friend auto operator<=>(const ElementaryFlow&, const ElementaryFlow&) = default;
  friend bool operator==(const ElementaryFlow&, const ElementaryFlow&) = default;
};

using FlowMap = std::map<ElementaryFlow, double>;

struct ProcessDataset {
  std::string process_id;
  double functional_unit = 1.0;
  std::string unit;
  std::map<std::string, double> technosphere_inputs;  // process id -> amount per functional unit
  FlowMap biosphere_exchanges;                        // flow -> kg per functional unit

  void validate() const;
};

/// Immutable-after-load store of process datasets, keyed by id.
class ProcessDatabase {
 public:
  void add(ProcessDataset p);
  const ProcessDataset& at(const std::string& id) const;
  bool contains(const std::string& id) const { return processes_.count(id) != 0; }
  const std::map<std::string, ProcessDataset>& processes() const { return processes_; }
  std::size_t size() const { return processes_.size(); }

 private:
  std::map<std::string, ProcessDataset> processes_;
};

struct InventoryVector {
  FlowMap flows;

  InventoryVector& operator+=(const InventoryVector& other);
  friend InventoryVector operator+(InventoryVector a, const InventoryVector& b) { return a += b; }
  InventoryVector scaled(double factor) const;
  double amount(const ElementaryFlow& f) const;
};

/// Identity of an impact method; several perspectives and geographies of the
/// same method coexist in one database.
struct MethodKey {
  std::string name;       // e.g. "Toxicity"
  std::string sub_label;  // e.g. "Humans - Carcinogenic"
  Geography geography = Geography::Global;
  Perspective perspective = Perspective::Hierarchist;

  friend auto operator<=>(const MethodKey&, const MethodKey&) = default;
  friend bool operator==(const MethodKey&, const MethodKey&) = default;
};

std::string to_string(const MethodKey& k);

struct ImpactMethodSpec {
  MethodKey key;
  DamageCategory damage = DamageCategory::HumanHealth;
  std::string midpoint_unit;  // e.g. "kg CO2-eq"
  EndpointUnit endpoint_unit = EndpointUnit::DALY;
  FlowMap midpoint_cfs;             // midpoint units per kg
  double mid_to_end_factor = 0.0;   // endpoint units per midpoint unit

  void validate() const;
};

/// The five method families that carry country-specific factors.
bool is_regionalizable(const MethodKey& key);

struct MidpointScore {
  double value = 0.0;
  std::vector<ElementaryFlow> uncharacterized;  // flows with no factor in the method
};

struct ImpactRow {
  MethodKey method;
  DamageCategory damage = DamageCategory::HumanHealth;
  std::string midpoint_unit;
  EndpointUnit endpoint_unit = EndpointUnit::DALY;
  double midpoint = 0.0;
  double factor = 0.0;
  double endpoint = 0.0;
};

struct ImpactResult {
  std::vector<ImpactRow> rows;

  double endpoint_total(EndpointUnit unit) const;
};

struct RankedBlock {
  EndpointUnit unit = EndpointUnit::DALY;
  std::vector<ImpactRow> rows;  // descending endpoint score
  const ImpactRow& top() const { return rows.front(); }
};

/// Life-cycle inventory of `demand` (process id -> amount in functional-unit
/// terms), summing biosphere exchanges over the technosphere closure.
InventoryVector expand_inventory(const std::map<std::string, double>& demand, const ProcessDatabase& db);

MidpointScore characterize_midpoint(const InventoryVector& inv, const ImpactMethodSpec& method);

double midpoint_to_endpoint(double midpoint, const ImpactMethodSpec& method);

/// Copy of `method` rescaled to Italy. Each midpoint factor is multiplied by
/// italy/global for its flow; flows without an Italian reference use the ratio
/// of the method's reference flow (the one with global factor 1). Endpoint
/// factors follow because they are midpoint factor times mid_to_end_factor.
ImpactMethodSpec regionalize(const ImpactMethodSpec& method, const FlowMap& italy_cfs, const FlowMap& global_cfs);

/// One row per method, DALY block first, then species.year, then USD; input
/// order is kept inside a block.
ImpactResult assess(const InventoryVector& inv, std::span<const ImpactMethodSpec> methods);

std::vector<RankedBlock> rank_impacts(const ImpactResult& result);

/// Characterization database: impact methods plus the regional reference
/// factors used to derive Italian variants.
class CharacterizationDatabase {
 public:
  void add_method(ImpactMethodSpec m);
  void add_regional_reference(const MethodKey& key, const ElementaryFlow& flow, double value);

  /// Builds the Italian variant of every regionalizable global method that has
  /// regional references and no explicit Italian definition.
  void derive_regional_methods();

  const ImpactMethodSpec& at(const MethodKey& key) const;
  bool contains(const MethodKey& key) const;
  /// True for methods built by derive_regional_methods rather than loaded.
  bool is_derived(const MethodKey& key) const { return derived_.count(key) != 0; }
  const std::vector<ImpactMethodSpec>& methods() const { return methods_; }
  const std::map<MethodKey, FlowMap>& regional_references() const { return regional_; }

  std::vector<ImpactMethodSpec> select(std::span<const MethodKey> keys) const;

 private:
  std::vector<ImpactMethodSpec> methods_;
  std::map<MethodKey, std::size_t> index_;
  std::map<MethodKey, FlowMap> regional_;
  std::set<MethodKey> derived_;
};

}  // namespace yieldgap
