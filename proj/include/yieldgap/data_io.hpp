#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yieldgap/calibration.hpp"
#include "yieldgap/crop_model.hpp"
#include "yieldgap/lca.hpp"

namespace yieldgap {

// ---------------------------------------------------------------------------
// Delimited text

/// RFC 4180 style CSV: comma separated, optional double quotes, "" escapes,
/// LF or CRLF line ends. Blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  /// Index of `column` in the header, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
std::string csv_field(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);
/// Strict number parsing: the whole field must be a finite number.
std::optional<double> parse_number(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Absolute paths and paths that exist relative to the working directory are
/// returned as is; otherwise `base`, then $YIELDGAP_DATA_DIR, are tried.
/// Returns `path` unchanged when no location has the file.
std::filesystem::path resolve_data_path(const std::filesystem::path& path, const std::filesystem::path& base = {});

constexpr const char* kDataDirEnv = "YIELDGAP_DATA_DIR";

// ---------------------------------------------------------------------------
// Farm records

enum class PesticideType { Herbicide, Insecticide, Fungicide };
std::string_view to_string(PesticideType t);
std::optional<PesticideType> parse_pesticide_type(std::string_view s);

struct PesticideEntry {
  PesticideType type = PesticideType::Herbicide;
  std::string toxicity_level;
  double quantity_kg_per_ha = 0.0;
};

struct FarmRecord {
  std::string farm_id;
  int year = 0;
  std::string stratum;
  double hectares = 0.0;
  double tractor_hours_per_ha = 0.0;
  double nitrogen_kg_per_ha = 0.0;
  double phosphorus_kg_per_ha = 0.0;
  double potassium_kg_per_ha = 0.0;
  std::vector<PesticideEntry> pesticides;
  double yield_t_per_ha = 0.0;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

template <typename T>
struct LoadResult {
  std::vector<T> records;
  std::vector<RowError> errors;
};

struct LoadOptions {
  bool strict = false;     // abort on the first row error
  int schema_version = 1;  // expected value of the schema_version column
};

constexpr int kFarmRecordSchemaVersion = 1;

/// Header-level problems (missing column, wrong unit) always throw ParseError;
/// row-level problems are collected, or thrown in strict mode.
LoadResult<FarmRecord> parse_farm_records(std::string_view text, const LoadOptions& options = {});
LoadResult<FarmRecord> load_farm_records(const std::filesystem::path& path, const LoadOptions& options = {});
std::string write_farm_records(const std::vector<FarmRecord>& records);

// ---------------------------------------------------------------------------
// Active ingredients

struct ActiveIngredient {
  std::string ingredient;
  double dose_min_g_per_ha = 0.0;
  double dose_max_g_per_ha = 0.0;
  double default_dose_g_per_ha = 0.0;
};

/// (pesticide type, toxicity level) -> active ingredient and dose per ha.
class ActiveIngredientMap {
 public:
  void add(PesticideType type, const std::string& toxicity, ActiveIngredient ai);
  const ActiveIngredient* find(PesticideType type, const std::string& toxicity) const;
  const std::map<std::pair<PesticideType, std::string>, ActiveIngredient>& entries() const { return entries_; }

  /// 2,4-D for irritating herbicides (360-720 g/ha, midpoint 540) and
  /// Pirimicarb for toxic insecticides (130 g/ha).
  static ActiveIngredientMap defaults();

 private:
  std::map<std::pair<PesticideType, std::string>, ActiveIngredient> entries_;
};

ActiveIngredientMap parse_active_ingredient_map(std::string_view text);
ActiveIngredientMap load_active_ingredient_map(const std::filesystem::path& path);

/// Active-ingredient mass (kg/ha) per ingredient. Each treated pesticide entry
/// contributes its default dose; the product quantity only signals treatment.
std::map<std::string, double> resolve_active_ingredients(const FarmRecord& record, const ActiveIngredientMap& map);

/// LCA-relevant inputs of one hectare derived from a farm record.
struct DerivedInputs {
  double tractor_energy_mj = 0.0;
  double nitrogen_kg = 0.0;
  std::map<std::string, double> active_ingredients_kg;
};

DerivedInputs derive_inputs(const FarmRecord& record, const ActiveIngredientMap& map, double mj_per_tractor_hour);

/// Processes that carry the LCA burden of the inputs in a farm record.
struct RecordProcesses {
  std::string tractor = "tractor_work";                  // per MJ
  std::string nitrogen = "nitrogen_fertilization";       // per kg N
  std::map<std::string, std::string> ingredients = {     // per kg active ingredient
      {"2,4-D", "herbicide_2,4-D_application"},
      {"Pirimicarb", "insecticide_pirimicarb_application"}};
};

/// Process demand of one hectare. Throws ResolutionError for an ingredient
/// without a process.
std::map<std::string, double> record_demand(const DerivedInputs& inputs, const RecordProcesses& processes = {});

/// Observation sets per stratum and factor ("nitrogen", "weeds", "insects").
std::map<std::string, std::map<std::string, ObservationSet>> observations_from_records(
    const std::vector<FarmRecord>& records);

// ---------------------------------------------------------------------------
// Observations, farms, method lists, inventories

/// Columns: stratum,factor,x,y. Result is keyed by stratum, then factor.
std::map<std::string, std::map<std::string, ObservationSet>> parse_observations(std::string_view text);
std::map<std::string, std::map<std::string, ObservationSet>> load_observations(const std::filesystem::path& path);

/// One row per (farm, stress factor). Columns: farm_id,potential_yield_t_per_ha,
/// hectares,tractor_energy_mj_per_ha,factor,s,s_bar,lambda,input_price,input_unit.
std::vector<FarmSpec> parse_farm_specs(std::string_view text);
std::vector<FarmSpec> load_farm_specs(const std::filesystem::path& path);
std::string write_farm_specs(const std::vector<FarmSpec>& farms);

/// Columns: method,sub_label,geography,perspective.
std::vector<MethodKey> parse_method_list(std::string_view text);
std::vector<MethodKey> load_method_list(const std::filesystem::path& path);

/// Columns: process,amount (functional units).
std::map<std::string, double> parse_demand(std::string_view text);
std::map<std::string, double> load_demand(const std::filesystem::path& path);

/// Columns: substance,compartment,amount_kg.
InventoryVector parse_inventory(std::string_view text);
InventoryVector load_inventory(const std::filesystem::path& path);
std::string write_inventory(const InventoryVector& inv);

// ---------------------------------------------------------------------------
// LCA databases

/// Columns: record,method,sub_label,damage,geography,perspective,substance,
/// compartment,value,unit. `record` is one of
///   method    value = midpoint-to-endpoint factor, unit = "<endpoint>/<midpoint unit>"
///   cf        value = midpoint factor, unit = "<midpoint unit>/kg"
///   regional  country-specific reference factor used to derive a regional method
/// Italian variants of regionalizable methods are derived after loading.
CharacterizationDatabase parse_cf_database(std::string_view text);
CharacterizationDatabase load_cf_database(const std::filesystem::path& path);
std::string write_cf_database(const CharacterizationDatabase& db);

/// Columns: record,process,amount,unit,input,substance,compartment with
/// `record` one of process (functional unit), technosphere, biosphere (kg).
ProcessDatabase parse_process_db(std::string_view text);
ProcessDatabase load_process_db(const std::filesystem::path& path);
std::string write_process_db(const ProcessDatabase& db);

}  // namespace yieldgap
