#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "yieldgap/error.hpp"
#include "yieldgap/lca.hpp"

using namespace yieldgap;

namespace {

const ElementaryFlow kCO2{"CO2", Compartment::Air};
const ElementaryFlow kCH4{"CH4", Compartment::Air};
const ElementaryFlow kNOx{"NOx", Compartment::Air};
const ElementaryFlow kNMVOC{"NMVOC", Compartment::Air};
const ElementaryFlow kZn{"Zinc", Compartment::IndustrialSoil};

ProcessDataset proc(std::string id, std::map<std::string, double> tech, FlowMap bio, double fu = 1.0) {
  ProcessDataset p;
  p.process_id = std::move(id);
  p.functional_unit = fu;
  p.unit = "unit";
  p.technosphere_inputs = std::move(tech);
  p.biosphere_exchanges = std::move(bio);
  return p;
}

ProcessDatabase diamond() {
  // top -> left, right; left -> base; right -> base (x2)
  ProcessDatabase db;
  db.add(proc("top", {{"left", 1.0}, {"right", 0.5}}, {{kCO2, 1.0}}));
  db.add(proc("left", {{"base", 2.0}}, {{kCO2, 0.25}}));
  db.add(proc("right", {{"base", 2.0}}, {{kCH4, 0.1}}));
  db.add(proc("base", {}, {{kCO2, 0.5}, {kZn, 0.01}}, 2.0));  // per 2 units
  return db;
}

ImpactMethodSpec gwp() {
  ImpactMethodSpec m;
  m.key = {"Global Warming", "Humans and Ecosystems", Geography::Global, Perspective::Hierarchist};
  m.damage = DamageCategory::HumanHealth;
  m.endpoint_unit = EndpointUnit::DALY;
  m.midpoint_unit = "kg CO2-eq";
  m.midpoint_cfs = {{kCO2, 1.0}, {kCH4, 34.0}};
  m.mid_to_end_factor = 9.28e-7;
  return m;
}

ImpactMethodSpec ozone_eco() {
  ImpactMethodSpec m;
  m.key = {"Ozone Formation", "Ecosystems", Geography::Global, Perspective::Hierarchist};
  m.damage = DamageCategory::EcosystemQuality;
  m.endpoint_unit = EndpointUnit::SpeciesYear;
  m.midpoint_unit = "kg NOx-eq";
  m.midpoint_cfs = {{kNOx, 1.0}, {kNMVOC, 0.29}};
  m.mid_to_end_factor = 1.29e-7;
  return m;
}

}  // namespace

TEST_CASE("inventory expansion over a shared sub-process") {
  auto db = diamond();
  auto inv = expand_inventory({{"top", 2.0}}, db);
  // activities: top 2, left 2, right 1, base (2*2 + 1*2) = 6 -> 3 functional units
  CHECK(inv.amount(kCO2) == doctest::Approx(2.0 * 1.0 + 2.0 * 0.25 + 3.0 * 0.5));
  CHECK(inv.amount(kCH4) == doctest::Approx(0.1));
  CHECK(inv.amount(kZn) == doctest::Approx(0.03));
  CHECK(inv.amount({"Lead", Compartment::Air}) == 0.0);

  auto sum = expand_inventory({{"left", 1.0}}, db) + expand_inventory({{"right", 3.0}}, db);
  auto joint = expand_inventory({{"left", 1.0}, {"right", 3.0}}, db);
  for (const auto& [f, q] : joint.flows) CHECK(sum.amount(f) == doctest::Approx(q).epsilon(1e-14));

  CHECK(expand_inventory({}, db).flows.empty());
  CHECK(expand_inventory({{"top", 0.0}}, db).flows.empty());
}

TEST_CASE("expansion errors") {
  auto db = diamond();
  CHECK_THROWS_AS(expand_inventory({{"nowhere", 1.0}}, db), LookupError);
  CHECK_THROWS_AS(expand_inventory({{"top", -1.0}}, db), DomainError);

  ProcessDatabase cyc;
  cyc.add(proc("a", {{"b", 1.0}}, {}));
  cyc.add(proc("b", {{"c", 1.0}}, {}));
  cyc.add(proc("c", {{"a", 0.5}}, {}));
  cyc.add(proc("d", {{"a", 1.0}}, {}));
  try {
    expand_inventory({{"d", 1.0}}, cyc);
    FAIL("expected a cycle error");
  } catch (const CycleError& e) {
    CHECK(e.cycle() == std::vector<std::string>{"a", "b", "c", "a"});
    CHECK(std::string(e.what()).find("a -> b -> c -> a") != std::string::npos);
  }

  ProcessDatabase self;
  self.add(proc("s", {{"s", 0.1}}, {}));
  CHECK_THROWS_AS(expand_inventory({{"s", 1.0}}, self), CycleError);

  ProcessDatabase dangling;
  dangling.add(proc("x", {{"ghost", 1.0}}, {}));
  CHECK_THROWS_AS(expand_inventory({{"x", 1.0}}, dangling), LookupError);

  ProcessDatabase dup;
  dup.add(proc("x", {}, {}));
  CHECK_THROWS_AS(dup.add(proc("x", {}, {})), ConfigError);
  CHECK_THROWS_AS(dup.add(proc("y", {}, {}, 0.0)), ConfigError);
}

TEST_CASE("midpoint and endpoint characterization") {
  InventoryVector inv;
  inv.flows = {{kCO2, 10.0}, {kCH4, 0.5}, {kZn, 2.0}};
  auto m = gwp();
  auto score = characterize_midpoint(inv, m);
  CHECK(score.value == doctest::Approx(10.0 + 17.0));
  REQUIRE(score.uncharacterized.size() == 1);
  CHECK(score.uncharacterized[0] == kZn);
  CHECK(midpoint_to_endpoint(score.value, m) == doctest::Approx(27.0 * 9.28e-7));

  auto broken = m;
  broken.endpoint_unit = EndpointUnit::SpeciesYear;
  CHECK_THROWS_AS(midpoint_to_endpoint(1.0, broken), ConfigError);
  CHECK_THROWS_AS(broken.validate(), ConfigError);
  CHECK_THROWS_AS(midpoint_to_endpoint(NAN, m), DomainError);
  broken = m;
  broken.midpoint_cfs[kZn] = -1.0;
  CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("assess groups rows by endpoint unit and ranking sorts within blocks") {
  InventoryVector inv;
  inv.flows = {{kCO2, 100.0}, {kNOx, 3.0}, {kNMVOC, 1.0}};
  auto low = gwp();
  low.key.sub_label = "low";
  low.mid_to_end_factor = 1e-9;
  std::vector<ImpactMethodSpec> methods = {ozone_eco(), low, gwp()};
  auto result = assess(inv, methods);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].method.sub_label == "low");  // DALY block first, input order kept
  CHECK(result.rows[1].method == gwp().key);
  CHECK(result.rows[2].endpoint_unit == EndpointUnit::SpeciesYear);
  CHECK(result.rows[2].midpoint == doctest::Approx(3.29));
  CHECK(result.endpoint_total(EndpointUnit::DALY) == doctest::Approx(100 * 9.28e-7 + 100 * 1e-9));
  CHECK(result.endpoint_total(EndpointUnit::USD) == 0.0);

  auto ranked = rank_impacts(result);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].unit == EndpointUnit::DALY);
  CHECK(ranked[0].top().method == gwp().key);
  CHECK(ranked[1].top().method == ozone_eco().key);
  CHECK_THROWS_AS(rank_impacts(ImpactResult{}), DomainError);
}

TEST_CASE("regionalization rescales factors per flow") {
  auto m = ozone_eco();
  FlowMap italy = {{kNOx, 2.0}};
  auto it = regionalize(m, italy, m.midpoint_cfs);
  CHECK(it.key.geography == Geography::Italy);
  CHECK(it.midpoint_cfs.at(kNOx) == doctest::Approx(2.0));
  // NMVOC has no Italian reference: it follows the reference flow (NOx, global 1).
  CHECK(it.midpoint_cfs.at(kNMVOC) == doctest::Approx(0.29 * 2.0));
  CHECK(it.mid_to_end_factor == m.mid_to_end_factor);

  italy[kNMVOC] = 0.29 * 1.8;
  it = regionalize(m, italy, m.midpoint_cfs);
  CHECK(it.midpoint_cfs.at(kNMVOC) == doctest::Approx(0.29 * 1.8));

  // Without a reference-flow entry the missing ratio cannot be inferred.
  CHECK_THROWS_AS(regionalize(m, FlowMap{{kNMVOC, 0.3}}, m.midpoint_cfs), RegionalizationError);
  CHECK_THROWS_AS(regionalize(gwp(), italy, gwp().midpoint_cfs), DomainError);
  CHECK(is_regionalizable(m.key));
  CHECK_FALSE(is_regionalizable(gwp().key));
}

TEST_CASE("characterization database") {
  CharacterizationDatabase db;
  db.add_method(gwp());
  db.add_method(ozone_eco());
  CHECK_THROWS_AS(db.add_method(gwp()), ConfigError);
  MethodKey italy = ozone_eco().key;
  italy.geography = Geography::Italy;
  db.add_regional_reference(italy, kNOx, 2.0);
  CHECK_THROWS_AS(db.add_regional_reference(italy, kNOx, 2.0), ConfigError);
  db.derive_regional_methods();
  CHECK(db.contains(italy));
  CHECK(db.is_derived(italy));
  CHECK_FALSE(db.is_derived(gwp().key));
  CHECK(db.at(italy).midpoint_cfs.at(kNMVOC) == doctest::Approx(0.58));
  CHECK_THROWS_AS(db.at(MethodKey{"Nope", "", Geography::Global, Perspective::Hierarchist}), LookupError);

  std::vector<MethodKey> keys = {italy, gwp().key};
  auto sel = db.select(keys);
  REQUIRE(sel.size() == 2);
  CHECK(sel[0].key == italy);

  CharacterizationDatabase orphan;
  orphan.add_regional_reference(italy, kNOx, 2.0);
  CHECK_THROWS_AS(orphan.derive_regional_methods(), ConfigError);
}

TEST_CASE("labels round-trip") {
  for (auto c : {Compartment::Air, Compartment::UrbanAir, Compartment::Soil, Compartment::IndustrialSoil,
                 Compartment::Freshwater, Compartment::MarineWater}) {
    CHECK(parse_compartment(to_string(c)) == c);
  }
  for (auto d : {DamageCategory::HumanHealth, DamageCategory::EcosystemQuality, DamageCategory::ResourceScarcity}) {
    CHECK(parse_damage_category(to_string(d)) == d);
    CHECK(parse_endpoint_unit(to_string(endpoint_unit_for(d))) == endpoint_unit_for(d));
  }
  for (auto p : {Perspective::Individualist, Perspective::Hierarchist, Perspective::Egalitarian}) {
    CHECK(parse_perspective(to_string(p)) == p);
  }
  CHECK_FALSE(parse_compartment("space").has_value());
  CHECK(to_string(gwp().key) == "Global Warming | Humans and Ecosystems | Global | Hierarchist");
}
