#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "yieldgap/data_io.hpp"
#include "yieldgap/error.hpp"

using namespace yieldgap;

namespace {

const char* kRecordHeader =
    "schema_version,farm_id,year,stratum,hectares,tractor_hours_per_ha,nitrogen_kg_per_ha,"
    "phosphorus_kg_per_ha,potassium_kg_per_ha,herbicide_toxicity,herbicide_kg_per_ha,"
    "insecticide_toxicity,insecticide_kg_per_ha,fungicide_toxicity,fungicide_kg_per_ha,yield_t_per_ha\n";

}  // namespace

TEST_CASE("csv parsing") {
  auto t = parse_csv("a,b,c\n1, two ,\"x,\"\"y\"\"\"\r\n\n4,5,6");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "two", "x,\"y\""});
  CHECK(t.rows[1][2] == "6");
  CHECK(t.lines == std::vector<std::size_t>{2, 4});
  CHECK(t.column("c") == 2u);
  CHECK_FALSE(t.column("d").has_value());

  auto ml = parse_csv("a,b\n\"line1\nline2\",2\n");
  CHECK(ml.rows[0][0] == "line1\nline2");

  CHECK(parse_csv("\xEF\xBB\xBFh1,h2\n1,2\n").header[0] == "h1");
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,a\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,\n1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n\"1,2\n"), ParseError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\r2,3\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(std::string_view("a,b\n1,\0\n", 7)), ParseError);
  try {
    parse_csv("a,b\n1,2\n3\n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  const std::vector<std::string> fields = {"plain", "with,comma", "quote\"d", " padded ", ""};
  auto back = parse_csv("h1,h2,h3,h4,h5\n" + csv_line(fields) + "\n");
  CHECK(back.rows[0] == fields);
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(u(rng), static_cast<int>(u(rng)));
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK_FALSE(parse_number("1.5x").has_value());
  CHECK_FALSE(parse_number("").has_value());
  CHECK_FALSE(parse_number("nan").has_value());
  CHECK_FALSE(parse_number("inf").has_value());
  CHECK(parse_number("1e-3") == 0.001);
}

TEST_CASE("malformed bytes raise library errors only") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "ab,\"\n\r\0 1.5-e";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 120);
  int parsed = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) text.push_back(alphabet[pick(rng)]);
    if (i % 3 == 0) text = std::string(kRecordHeader) + text;
    try {
      parse_csv(text);
      ++parsed;
      parse_farm_records(text);
      parse_inventory(text);
      parse_process_db(text);
      parse_cf_database(text);
    } catch (const Error&) {
    }
  }
  CHECK(parsed > 0);
}

TEST_CASE("farm records: strict and lenient loading") {
  std::string text = kRecordHeader;
  text += "1,A,2015,s,2,6,50,0,0,irritating,1.2,toxic,0.4,,0,7.9\n";
  text += "1,B,2015,s,-2,6,50,0,0,,0,,0,,0,7.9\n";               // negative area
  text += "1,A,2015,s,2,6,50,0,0,,0,,0,,0,7.9\n";                // duplicate key
  text += "1,C,2015,s,2,6,50,0,0,,1.0,,0,,0,7.9\n";              // quantity without toxicity
  text += "2,D,2015,s,2,6,50,0,0,,0,,0,,0,7.9\n";                // schema version
  text += "1,E,2016,s,3,6,abc,0,0,,0,,0,,0,7.9\n";              // not a number
  text += "1,F,2016,s,3,6,40,0,0,,0,,0,mild,0.2,7.0\n";

  auto r = parse_farm_records(text);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].farm_id == "A");
  REQUIRE(r.records[0].pesticides.size() == 2);
  CHECK(r.records[0].pesticides[1].type == PesticideType::Insecticide);
  CHECK(r.records[1].pesticides[0].type == PesticideType::Fungicide);
  REQUIRE(r.errors.size() == 5);
  CHECK(r.errors[0].line == 3);
  CHECK(r.errors[4].line == 7);

  LoadOptions strict;
  strict.strict = true;
  try {
    parse_farm_records(text, strict);
    FAIL("strict mode should throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  auto again = parse_farm_records(write_farm_records(r.records), strict);
  REQUIRE(again.records.size() == 2);
  CHECK(again.records[0].nitrogen_kg_per_ha == 50.0);
  CHECK(again.records[1].pesticides[0].toxicity_level == "mild");
}

TEST_CASE("farm records: header problems") {
  std::string missing = kRecordHeader;
  missing.replace(missing.find("yield_t_per_ha"), 14, "yield_other");
  CHECK_THROWS_AS(parse_farm_records(missing), ParseError);

  std::string unit = kRecordHeader;
  unit.replace(unit.find("nitrogen_kg_per_ha"), 18, "nitrogen_g_per_ha");
  try {
    parse_farm_records(unit);
    FAIL("expected a unit error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unit") != std::string::npos);
  }
}

TEST_CASE("active ingredient resolution") {
  auto map = ActiveIngredientMap::defaults();
  auto file = load_active_ingredient_map(test::data_dir() / "active_ingredients.csv");
  CHECK(file.entries().size() == map.entries().size());
  const auto* ai = file.find(PesticideType::Herbicide, "irritating");
  REQUIRE(ai);
  CHECK(ai->ingredient == "2,4-D");
  CHECK(ai->default_dose_g_per_ha == 540.0);

  CHECK_THROWS_AS(map.add(PesticideType::Fungicide, "x", {"bad", 10, 5, 7}), ConfigError);

  auto records = load_farm_records(test::data_dir() / "farm_records_example.csv", {true});
  const auto& ref = records.records.at(0);
  auto ais = resolve_active_ingredients(ref, map);
  CHECK(ais.at("2,4-D") == doctest::Approx(0.54));
  CHECK(ais.at("Pirimicarb") == doctest::Approx(0.13));

  auto derived = derive_inputs(ref, map, 150.0);
  CHECK(derived.tractor_energy_mj == doctest::Approx(900.0));
  CHECK(derived.nitrogen_kg == 50.0);
  auto demand = record_demand(derived);
  CHECK(demand.at("tractor_work") == doctest::Approx(900.0));
  CHECK(demand.at("herbicide_2,4-D_application") == doctest::Approx(0.54));

  FarmRecord odd = ref;
  odd.pesticides = {{PesticideType::Herbicide, "very toxic", 1.0}};
  CHECK_THROWS_AS(resolve_active_ingredients(odd, map), ResolutionError);
  derived.active_ingredients_kg["Glyphosate"] = 1.0;
  CHECK_THROWS_AS(record_demand(derived), ResolutionError);

  auto obs = observations_from_records(records.records);
  CHECK(obs.at("center-hills").at("nitrogen").points.size() == 3);
  CHECK(obs.at("north-plain").at("weeds").points.at(0).x == doctest::Approx(1.5));
}

TEST_CASE("farm specs round-trip") {
  auto farms = load_farm_specs(test::data_dir() / "farms_reference.csv");
  REQUIRE(farms.size() == 1);
  const auto ref = test::reference_farm();
  CHECK(farms[0].potential_yield == ref.potential_yield);
  REQUIRE(farms[0].stress_factors.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(farms[0].stress_factors[i].lambda == ref.stress_factors[i].lambda);
    CHECK(farms[0].stress_factors[i].input_price == ref.stress_factors[i].input_price);
  }
  auto again = parse_farm_specs(write_farm_specs(farms));
  CHECK(again[0].stress_factors[2].s == farms[0].stress_factors[2].s);
  CHECK(again[0].tractor_energy == farms[0].tractor_energy);

  CHECK_THROWS_AS(parse_farm_specs("farm_id,potential_yield_t_per_ha,hectares,tractor_energy_mj_per_ha,factor,s,"
                                   "s_bar,lambda,input_price,input_unit\n"
                                   "a,8,1,0,n,0.5,0.5,0.1,1,kg\n"
                                   "a,9,1,0,w,0.5,0.5,0.1,1,kg\n"),
                  ParseError);
}

TEST_CASE("inventory, demand and method lists") {
  auto inv = parse_inventory("substance,compartment,amount_kg\nCO2,air,10\nCO2,air,5\nZinc,industrial soil,0.1\n");
  CHECK(inv.amount({"CO2", Compartment::Air}) == 15.0);
  auto back = parse_inventory(write_inventory(inv));
  CHECK(back.flows == inv.flows);
  CHECK_THROWS_AS(parse_inventory("substance,compartment,amount_kg\nCO2,space,1\n"), ParseError);
  CHECK_THROWS_AS(parse_inventory("substance,compartment,amount_kg\nCO2,air,lots\n"), ParseError);
  // Uptake from the environment is a negative flow.
  CHECK(parse_inventory("substance,compartment,amount_kg\nCO2,air,-1\n").amount({"CO2", Compartment::Air}) == -1.0);

  auto demand = load_demand(test::data_dir() / "reference_demand.csv");
  CHECK(demand.at("tractor_work") == 900.0);

  auto methods = load_method_list(test::data_dir() / "methods_reference.csv");
  CHECK(methods.size() == 10);
  CHECK_THROWS_AS(parse_method_list("method,sub_label,geography,perspective\nX,Y,Mars,Hierarchist\n"), ParseError);
}

TEST_CASE("lca databases round-trip") {
  auto cf = load_cf_database(test::data_dir() / "recipe_fixture_cfs.csv");
  auto cf2 = parse_cf_database(write_cf_database(cf));
  REQUIRE(cf2.methods().size() == cf.methods().size());
  for (const auto& m : cf.methods()) {
    const auto& other = cf2.at(m.key);
    CHECK(other.mid_to_end_factor == m.mid_to_end_factor);
    CHECK(other.midpoint_cfs == m.midpoint_cfs);
    CHECK(cf2.is_derived(m.key) == cf.is_derived(m.key));
  }

  auto pdb = load_process_db(test::data_dir() / "processes_fixture.csv");
  auto pdb2 = parse_process_db(write_process_db(pdb));
  REQUIRE(pdb2.processes().size() == pdb.processes().size());
  for (const auto& [id, p] : pdb.processes()) {
    const auto& q = pdb2.at(id);
    CHECK(q.functional_unit == p.functional_unit);
    CHECK(q.technosphere_inputs == p.technosphere_inputs);
    CHECK(q.biosphere_exchanges == p.biosphere_exchanges);
  }
}

TEST_CASE("lca database validation") {
  const std::string head = "record,method,sub_label,damage,geography,perspective,substance,compartment,value,unit\n";
  const std::string method = "method,GW,H,human_health,Global,Hierarchist,,,1e-6,DALY/kg CO2-eq\n";
  CHECK_NOTHROW(parse_cf_database(head + method + "cf,GW,H,,Global,Hierarchist,CO2,air,1,kg CO2-eq/kg\n"));
  CHECK_THROWS_AS(parse_cf_database(head + method + "cf,GW,H,,Global,Hierarchist,CO2,air,1,kg CH4-eq/kg\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_cf_database(head + "method,GW,H,human_health,Global,Hierarchist,,,1e-6,species.year/kg\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_cf_database(head + "cf,GW,H,,Global,Hierarchist,CO2,air,1,kg CO2-eq/kg\n"), ParseError);

  const std::string phead = "record,process,amount,unit,input,substance,compartment\n";
  CHECK_THROWS_AS(parse_process_db(phead + "process,a,1,kg,,,\nbiosphere,a,1,g,,CO2,air\n"), ParseError);
  CHECK_THROWS_AS(parse_process_db(phead + "process,a,1,kg,,,\ntechnosphere,a,1,kg,b,,\n"), ParseError);
  // Cycles are legal data; expansion reports them.
  auto cyc = parse_process_db(phead + "process,a,1,kg,,,\nprocess,b,1,kg,,,\n"
                                      "technosphere,a,1,kg,b,,\ntechnosphere,b,1,kg,a,,\n");
  CHECK_THROWS_AS(expand_inventory({{"a", 1.0}}, cyc), CycleError);
}

TEST_CASE("data paths resolve against a base directory") {
  CHECK(resolve_data_path("farms_reference.csv", test::data_dir()) == test::data_dir() / "farms_reference.csv");
  CHECK(resolve_data_path("no_such_file.csv", test::data_dir()) == "no_such_file.csv");
  CHECK_THROWS_AS(read_text_file("/nonexistent/file.csv"), ConfigError);
}
