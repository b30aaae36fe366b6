#include "yieldgap/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "yieldgap/error.hpp"

namespace yieldgap {

// ---------------------------------------------------------------------------
// CSV

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  std::size_t line = 1;
  std::size_t row_line = 1;
  bool in_quotes = false;
  bool quoted = false;  // current field was quoted
  bool row_has_content = false;

  // Skip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  auto end_field = [&] {
    row.push_back(quoted ? field : std::string(trim(field)));
    field.clear();
    quoted = false;
  };
  auto end_row = [&] {
    end_field();
    bool blank = !row_has_content && row.size() == 1 && row[0].empty();
    if (!blank) {
      if (table.header.empty() && table.rows.empty() && table.lines.empty()) {
        table.header = std::move(row);
      } else {
        table.rows.push_back(std::move(row));
        table.lines.push_back(row_line);
      }
    }
    row.clear();
    row_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!trim(field).empty() || quoted) throw ParseError("unexpected quote inside field", line);
        field.clear();
        in_quotes = true;
        quoted = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        throw ParseError("stray carriage return", line);
      case '\n':
        end_row();
        ++line;
        row_line = line;
        break;
      case '\0':
        throw ParseError("NUL byte in text", line);
      default:
        if (quoted) throw ParseError("text after closing quote", line);
        field.push_back(c);
        if (c != ' ' && c != '\t') row_has_content = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", row_line);
  if (!field.empty() || !row.empty() || quoted) end_row();

  if (table.header.empty()) throw ParseError("empty file");
  std::set<std::string> seen;
  for (const auto& h : table.header) {
    if (h.empty()) throw ParseError("empty column name in header", 1);
    if (!seen.insert(h).second) throw ParseError("duplicate column '" + h + "'", 1);
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size()) {
      throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(table.rows[r].size()),
                       table.lines[r]);
    }
  }
  return table;
}

std::string csv_field(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  out.push_back('\n');
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

std::filesystem::path resolve_data_path(const std::filesystem::path& path, const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  if (path.is_absolute()) return path;
  std::error_code ec;
  if (fs::exists(path, ec)) return path;
  if (!base.empty() && fs::exists(base / path, ec)) return base / path;
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir) {
    fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate, ec)) return candidate;
  }
  return path;
}

namespace {

// Column access with row context for error messages.
class Row {
 public:
  Row(const CsvTable& t, std::size_t r) : t_(t), r_(r) {}
  std::size_t line() const { return t_.lines[r_]; }
  const std::string& str(std::size_t col) const { return t_.rows[r_][col]; }
  double num(std::size_t col) const {
    auto v = parse_number(str(col));
    if (!v) throw ParseError(t_.header[col] + ": '" + str(col) + "' is not a number", line());
    return *v;
  }
  double num_or(std::size_t col, double fallback) const { return str(col).empty() ? fallback : num(col); }
  double nonneg(std::size_t col) const {
    double v = num(col);
    if (v < 0.0) throw ParseError(t_.header[col] + " must be non-negative", line());
    return v;
  }
  const std::string& required(std::size_t col) const {
    if (str(col).empty()) throw ParseError(t_.header[col] + " is empty", line());
    return str(col);
  }

 private:
  const CsvTable& t_;
  std::size_t r_;
};

// Finds `name` (e.g. "nitrogen_kg_per_ha"). A column with the same base but a
// different unit suffix is reported as a unit mismatch rather than missing.
std::size_t require_column(const CsvTable& t, const std::string& name, const std::string& unit_suffix = "") {
  if (auto c = t.column(name)) return *c;
  if (!unit_suffix.empty()) {
    std::string base = name.substr(0, name.size() - unit_suffix.size());
    for (const auto& h : t.header) {
      if (h.size() <= base.size() || h.compare(0, base.size(), base) != 0 || h[base.size()] != '_') continue;
      bool per_area = h.find("_per_", base.size()) != std::string::npos;
      if (per_area == (unit_suffix.find("_per_") != std::string::npos)) {
        throw ParseError("column '" + h + "' has unit '" + h.substr(base.size()) + "', expected '" + unit_suffix + "'", 1);
      }
    }
  }
  throw ParseError("missing column '" + name + "'", 1);
}

template <typename F>
auto with_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Farm records

std::string_view to_string(PesticideType t) {
  switch (t) {
    case PesticideType::Herbicide: return "herbicide";
    case PesticideType::Insecticide: return "insecticide";
    case PesticideType::Fungicide: return "fungicide";
  }
  return "?";
}

std::optional<PesticideType> parse_pesticide_type(std::string_view s) {
  for (auto t : {PesticideType::Herbicide, PesticideType::Insecticide, PesticideType::Fungicide}) {
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

namespace {

struct FarmColumns {
  std::size_t schema, farm_id, year, stratum, hectares, tractor, n, p, k, yield;
  std::size_t pest_tox[3];
  std::size_t pest_kg[3];
};

FarmColumns farm_columns(const CsvTable& t) {
  FarmColumns c{};
  c.schema = require_column(t, "schema_version");
  c.farm_id = require_column(t, "farm_id");
  c.year = require_column(t, "year");
  c.stratum = require_column(t, "stratum");
  c.hectares = require_column(t, "hectares");
  c.tractor = require_column(t, "tractor_hours_per_ha", "_per_ha");
  c.n = require_column(t, "nitrogen_kg_per_ha", "_kg_per_ha");
  c.p = require_column(t, "phosphorus_kg_per_ha", "_kg_per_ha");
  c.k = require_column(t, "potassium_kg_per_ha", "_kg_per_ha");
  c.yield = require_column(t, "yield_t_per_ha", "_t_per_ha");
  int i = 0;
  for (auto type : {PesticideType::Herbicide, PesticideType::Insecticide, PesticideType::Fungicide}) {
    std::string base(to_string(type));
    c.pest_tox[i] = require_column(t, base + "_toxicity");
    c.pest_kg[i] = require_column(t, base + "_kg_per_ha", "_kg_per_ha");
    ++i;
  }
  return c;
}

FarmRecord parse_farm_row(const Row& row, const FarmColumns& c, int schema_version) {
  FarmRecord r;
  double schema = row.num(c.schema);
  if (schema != schema_version) {
    throw ParseError("schema_version " + row.str(c.schema) + " is not supported (expected " +
                         std::to_string(schema_version) + ")",
                     row.line());
  }
  r.farm_id = row.required(c.farm_id);
  double year = row.num(c.year);
  if (year != std::floor(year) || year < 1 || year > 9999) throw ParseError("year must be an integer", row.line());
  r.year = static_cast<int>(year);
  r.stratum = row.str(c.stratum);
  r.hectares = row.num(c.hectares);
  if (r.hectares <= 0.0) throw ParseError("hectares must be positive", row.line());
  r.tractor_hours_per_ha = row.nonneg(c.tractor);
  r.nitrogen_kg_per_ha = row.nonneg(c.n);
  r.phosphorus_kg_per_ha = row.nonneg(c.p);
  r.potassium_kg_per_ha = row.nonneg(c.k);
  r.yield_t_per_ha = row.nonneg(c.yield);
  int i = 0;
  for (auto type : {PesticideType::Herbicide, PesticideType::Insecticide, PesticideType::Fungicide}) {
    const std::string& tox = row.str(c.pest_tox[i]);
    double kg = row.str(c.pest_kg[i]).empty() ? 0.0 : row.nonneg(c.pest_kg[i]);
    if (kg > 0.0 && tox.empty()) {
      throw ParseError(std::string(to_string(type)) + " quantity given without a toxicity level", row.line());
    }
    if (!tox.empty() || kg > 0.0) r.pesticides.push_back({type, tox, kg});
    ++i;
  }
  return r;
}

}  // namespace

LoadResult<FarmRecord> parse_farm_records(std::string_view text, const LoadOptions& options) {
  CsvTable t = parse_csv(text);
  FarmColumns cols = farm_columns(t);
  LoadResult<FarmRecord> out;
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    try {
      FarmRecord rec = parse_farm_row(row, cols, options.schema_version);
      if (!seen.emplace(rec.farm_id, rec.year).second) {
        throw ParseError("duplicate record for farm '" + rec.farm_id + "' in " + std::to_string(rec.year), row.line());
      }
      out.records.push_back(std::move(rec));
    } catch (const ParseError& e) {
      if (options.strict) throw;
      out.errors.push_back({row.line(), e.what()});
    }
  }
  return out;
}

LoadResult<FarmRecord> load_farm_records(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_farm_records(read_text_file(path), options);
}

std::string write_farm_records(const std::vector<FarmRecord>& records) {
  std::string out = csv_line({"schema_version", "farm_id", "year", "stratum", "hectares", "tractor_hours_per_ha",
                              "nitrogen_kg_per_ha", "phosphorus_kg_per_ha", "potassium_kg_per_ha",
                              "herbicide_toxicity", "herbicide_kg_per_ha", "insecticide_toxicity",
                              "insecticide_kg_per_ha", "fungicide_toxicity", "fungicide_kg_per_ha", "yield_t_per_ha"});
  for (const auto& r : records) {
    std::vector<std::string> f = {std::to_string(kFarmRecordSchemaVersion), r.farm_id, std::to_string(r.year),
                                  r.stratum, format_number(r.hectares), format_number(r.tractor_hours_per_ha),
                                  format_number(r.nitrogen_kg_per_ha), format_number(r.phosphorus_kg_per_ha),
                                  format_number(r.potassium_kg_per_ha)};
    for (auto type : {PesticideType::Herbicide, PesticideType::Insecticide, PesticideType::Fungicide}) {
      auto it = std::find_if(r.pesticides.begin(), r.pesticides.end(), [&](const auto& p) { return p.type == type; });
      if (it == r.pesticides.end()) {
        f.push_back("");
        f.push_back("0");
      } else {
        f.push_back(it->toxicity_level);
        f.push_back(format_number(it->quantity_kg_per_ha));
      }
    }
    f.push_back(format_number(r.yield_t_per_ha));
    out += csv_line(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Active ingredients

void ActiveIngredientMap::add(PesticideType type, const std::string& toxicity, ActiveIngredient ai) {
  if (ai.ingredient.empty()) throw ConfigError("active ingredient name is empty");
  if (!(ai.dose_min_g_per_ha >= 0.0 && ai.dose_min_g_per_ha <= ai.default_dose_g_per_ha &&
        ai.default_dose_g_per_ha <= ai.dose_max_g_per_ha && std::isfinite(ai.dose_max_g_per_ha))) {
    throw ConfigError("dose range for '" + ai.ingredient + "' must satisfy 0 <= min <= default <= max");
  }
  if (!entries_.emplace(std::make_pair(type, toxicity), std::move(ai)).second) {
    throw ConfigError("duplicate active ingredient mapping for " + std::string(to_string(type)) + " '" + toxicity + "'");
  }
}

const ActiveIngredient* ActiveIngredientMap::find(PesticideType type, const std::string& toxicity) const {
  auto it = entries_.find({type, toxicity});
  return it == entries_.end() ? nullptr : &it->second;
}

ActiveIngredientMap ActiveIngredientMap::defaults() {
  ActiveIngredientMap m;
  m.add(PesticideType::Herbicide, "irritating", {"2,4-D", 360.0, 720.0, 540.0});
  m.add(PesticideType::Insecticide, "toxic", {"Pirimicarb", 130.0, 130.0, 130.0});
  return m;
}

ActiveIngredientMap parse_active_ingredient_map(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t ctype = require_column(t, "pesticide_type");
  std::size_t ctox = require_column(t, "toxicity");
  std::size_t cai = require_column(t, "active_ingredient");
  std::size_t cmin = require_column(t, "dose_min_g_per_ha", "_g_per_ha");
  std::size_t cmax = require_column(t, "dose_max_g_per_ha", "_g_per_ha");
  std::size_t cdef = require_column(t, "default_dose_g_per_ha", "_g_per_ha");
  ActiveIngredientMap m;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    auto type = parse_pesticide_type(row.str(ctype));
    if (!type) throw ParseError("unknown pesticide type '" + row.str(ctype) + "'", row.line());
    ActiveIngredient ai{row.required(cai), row.num(cmin), row.num(cmax), 0.0};
    ai.default_dose_g_per_ha = row.num_or(cdef, 0.5 * (ai.dose_min_g_per_ha + ai.dose_max_g_per_ha));
    with_line(row.line(), [&] { m.add(*type, row.required(ctox), ai); });
  }
  return m;
}

ActiveIngredientMap load_active_ingredient_map(const std::filesystem::path& path) {
  return parse_active_ingredient_map(read_text_file(path));
}

std::map<std::string, double> resolve_active_ingredients(const FarmRecord& record, const ActiveIngredientMap& map) {
  std::map<std::string, double> out;
  for (const auto& p : record.pesticides) {
    if (!(p.quantity_kg_per_ha > 0.0)) continue;
    const ActiveIngredient* ai = map.find(p.type, p.toxicity_level);
    if (!ai) {
      throw ResolutionError("no active ingredient for " + std::string(to_string(p.type)) + " with toxicity '" +
                            p.toxicity_level + "' (farm '" + record.farm_id + "')");
    }
    out[ai->ingredient] += ai->default_dose_g_per_ha / 1000.0;
  }
  return out;
}

DerivedInputs derive_inputs(const FarmRecord& record, const ActiveIngredientMap& map, double mj_per_tractor_hour) {
  if (!(mj_per_tractor_hour >= 0.0) || !std::isfinite(mj_per_tractor_hour)) {
    throw ConfigError("tractor energy per hour must be non-negative");
  }
  DerivedInputs d;
  d.tractor_energy_mj = record.tractor_hours_per_ha * mj_per_tractor_hour;
  d.nitrogen_kg = record.nitrogen_kg_per_ha;
  d.active_ingredients_kg = resolve_active_ingredients(record, map);
  return d;
}

std::map<std::string, double> record_demand(const DerivedInputs& inputs, const RecordProcesses& processes) {
  std::map<std::string, double> demand;
  if (inputs.tractor_energy_mj > 0.0) demand[processes.tractor] += inputs.tractor_energy_mj;
  if (inputs.nitrogen_kg > 0.0) demand[processes.nitrogen] += inputs.nitrogen_kg;
  for (const auto& [ingredient, kg] : inputs.active_ingredients_kg) {
    auto it = processes.ingredients.find(ingredient);
    if (it == processes.ingredients.end()) {
      throw ResolutionError("no application process for active ingredient '" + ingredient + "'");
    }
    demand[it->second] += kg;
  }
  return demand;
}

std::map<std::string, std::map<std::string, ObservationSet>> observations_from_records(
    const std::vector<FarmRecord>& records) {
  std::map<std::string, std::map<std::string, ObservationSet>> out;
  for (const auto& r : records) {
    auto add = [&](const std::string& factor, double x) {
      auto& set = out[r.stratum][factor];
      set.stratum = r.stratum;
      set.points.push_back({x, r.yield_t_per_ha});
    };
    add("nitrogen", r.nitrogen_kg_per_ha);
    double weeds = 0.0, insects = 0.0;
    for (const auto& p : r.pesticides) {
      if (p.type == PesticideType::Herbicide) weeds += p.quantity_kg_per_ha;
      if (p.type == PesticideType::Insecticide) insects += p.quantity_kg_per_ha;
    }
    add("weeds", weeds);
    add("insects", insects);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observations, farms, method lists, inventories

std::map<std::string, std::map<std::string, ObservationSet>> parse_observations(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t cs = require_column(t, "stratum");
  std::size_t cf = require_column(t, "factor");
  std::size_t cx = require_column(t, "x");
  std::size_t cy = require_column(t, "y");
  std::map<std::string, std::map<std::string, ObservationSet>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    double x = row.nonneg(cx);
    double y = row.nonneg(cy);
    auto& set = out[row.str(cs)][row.required(cf)];
    set.stratum = row.str(cs);
    set.points.push_back({x, y});
  }
  return out;
}

std::map<std::string, std::map<std::string, ObservationSet>> load_observations(const std::filesystem::path& path) {
  return parse_observations(read_text_file(path));
}

std::vector<FarmSpec> parse_farm_specs(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t cid = require_column(t, "farm_id");
  std::size_t cy = require_column(t, "potential_yield_t_per_ha", "_t_per_ha");
  std::size_t cha = require_column(t, "hectares");
  std::size_t ce = require_column(t, "tractor_energy_mj_per_ha", "_mj_per_ha");
  std::size_t cf = require_column(t, "factor");
  std::size_t cs = require_column(t, "s");
  std::size_t csb = require_column(t, "s_bar");
  std::size_t cl = require_column(t, "lambda");
  std::size_t cp = require_column(t, "input_price");
  auto cu = t.column("input_unit");

  std::vector<FarmSpec> farms;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::size_t> first_line;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    const std::string& id = row.required(cid);
    FarmSpec head;
    head.farm_id = id;
    head.potential_yield = row.num(cy);
    head.hectares = row.num_or(cha, 1.0);
    head.tractor_energy = row.num_or(ce, 0.0);
    auto [it, fresh] = index.emplace(id, farms.size());
    if (fresh) {
      farms.push_back(head);
      first_line[id] = row.line();
    } else {
      const FarmSpec& f = farms[it->second];
      if (f.potential_yield != head.potential_yield || f.hectares != head.hectares ||
          f.tractor_energy != head.tractor_energy) {
        throw ParseError("farm '" + id + "' disagrees with its row on line " + std::to_string(first_line[id]),
                         row.line());
      }
    }
    StressFactorParams p;
    p.name = row.required(cf);
    p.s = row.num(cs);
    p.s_bar = row.num(csb);
    p.lambda = row.num(cl);
    p.input_price = row.num(cp);
    if (cu && !row.str(*cu).empty()) p.input_unit = row.str(*cu);
    with_line(row.line(), [&] { p.validate(); });
    farms[it->second].stress_factors.push_back(std::move(p));
  }
  for (const auto& f : farms) with_line(first_line[f.farm_id], [&] { f.validate(); });
  return farms;
}

std::vector<FarmSpec> load_farm_specs(const std::filesystem::path& path) { return parse_farm_specs(read_text_file(path)); }

std::string write_farm_specs(const std::vector<FarmSpec>& farms) {
  std::string out = csv_line({"farm_id", "potential_yield_t_per_ha", "hectares", "tractor_energy_mj_per_ha", "factor",
                              "s", "s_bar", "lambda", "input_price", "input_unit"});
  for (const auto& f : farms) {
    for (const auto& p : f.stress_factors) {
      out += csv_line({f.farm_id, format_number(f.potential_yield), format_number(f.hectares),
                       format_number(f.tractor_energy), p.name, format_number(p.s), format_number(p.s_bar),
                       format_number(p.lambda), format_number(p.input_price), p.input_unit});
    }
  }
  return out;
}

namespace {

MethodKey method_key(const Row& row, std::size_t cm, std::size_t csub, std::size_t cg, std::size_t cp) {
  MethodKey k;
  k.name = row.required(cm);
  k.sub_label = row.str(csub);
  auto g = parse_geography(row.str(cg));
  if (!g) throw ParseError("unknown geography '" + row.str(cg) + "'", row.line());
  auto p = parse_perspective(row.str(cp));
  if (!p) throw ParseError("unknown perspective '" + row.str(cp) + "'", row.line());
  k.geography = *g;
  k.perspective = *p;
  return k;
}

ElementaryFlow flow_of(const Row& row, std::size_t csub, std::size_t ccomp) {
  auto c = parse_compartment(row.str(ccomp));
  if (!c) throw ParseError("unknown compartment '" + row.str(ccomp) + "'", row.line());
  return {row.required(csub), *c};
}

}  // namespace

std::vector<MethodKey> parse_method_list(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t cm = require_column(t, "method");
  std::size_t cs = require_column(t, "sub_label");
  std::size_t cg = require_column(t, "geography");
  std::size_t cp = require_column(t, "perspective");
  std::vector<MethodKey> keys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) keys.push_back(method_key(Row(t, r), cm, cs, cg, cp));
  return keys;
}

std::vector<MethodKey> load_method_list(const std::filesystem::path& path) {
  return parse_method_list(read_text_file(path));
}

std::map<std::string, double> parse_demand(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t cp = require_column(t, "process");
  std::size_t ca = require_column(t, "amount");
  std::map<std::string, double> demand;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    demand[row.required(cp)] += row.num(ca);
  }
  return demand;
}

std::map<std::string, double> load_demand(const std::filesystem::path& path) { return parse_demand(read_text_file(path)); }

InventoryVector parse_inventory(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t cs = require_column(t, "substance");
  std::size_t cc = require_column(t, "compartment");
  std::size_t ca = require_column(t, "amount_kg", "_kg");
  InventoryVector inv;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    inv.flows[flow_of(row, cs, cc)] += row.num(ca);
  }
  return inv;
}

InventoryVector load_inventory(const std::filesystem::path& path) { return parse_inventory(read_text_file(path)); }

std::string write_inventory(const InventoryVector& inv) {
  std::string out = csv_line({"substance", "compartment", "amount_kg"});
  for (const auto& [flow, kg] : inv.flows) {
    out += csv_line({flow.substance, std::string(to_string(flow.compartment)), format_number(kg)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Characterization database

namespace {

// "DALY/kg CO2-eq" -> ("DALY", "kg CO2-eq")
std::pair<std::string, std::string> split_unit(const std::string& unit) {
  auto slash = unit.find('/');
  if (slash == std::string::npos) return {unit, ""};
  return {unit.substr(0, slash), unit.substr(slash + 1)};
}

// "kg CO2-eq/kg" -> "kg CO2-eq"; nullopt when the unit is not per kg.
std::optional<std::string> per_kg(const std::string& unit) {
  const std::string suffix = "/kg";
  if (unit.size() <= suffix.size() || unit.compare(unit.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  return unit.substr(0, unit.size() - suffix.size());
}

}  // namespace

CharacterizationDatabase parse_cf_database(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t crec = require_column(t, "record");
  std::size_t cm = require_column(t, "method");
  std::size_t csub = require_column(t, "sub_label");
  std::size_t cd = require_column(t, "damage");
  std::size_t cg = require_column(t, "geography");
  std::size_t cp = require_column(t, "perspective");
  std::size_t cs = require_column(t, "substance");
  std::size_t cc = require_column(t, "compartment");
  std::size_t cv = require_column(t, "value");
  std::size_t cu = require_column(t, "unit");

  // Methods first so factor rows may appear in any order.
  std::map<MethodKey, ImpactMethodSpec> specs;
  std::vector<MethodKey> order;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    const std::string& rec = row.str(crec);
    if (rec != "method" && rec != "cf" && rec != "regional") {
      throw ParseError("unknown record type '" + rec + "'", row.line());
    }
    if (rec != "method") continue;
    ImpactMethodSpec m;
    m.key = method_key(row, cm, csub, cg, cp);
    auto d = parse_damage_category(row.str(cd));
    if (!d) throw ParseError("unknown damage category '" + row.str(cd) + "'", row.line());
    m.damage = *d;
    m.endpoint_unit = endpoint_unit_for(*d);
    auto [end_unit, mid_unit] = split_unit(row.required(cu));
    if (end_unit != to_string(m.endpoint_unit)) {
      throw ParseError("unit '" + row.str(cu) + "' does not match damage category " + row.str(cd) + " (" +
                           std::string(to_string(m.endpoint_unit)) + ")",
                       row.line());
    }
    if (mid_unit.empty()) throw ParseError("method unit must be '<endpoint>/<midpoint unit>'", row.line());
    m.midpoint_unit = mid_unit;
    m.mid_to_end_factor = row.num(cv);
    if (!specs.emplace(m.key, m).second) {
      throw ParseError("duplicate method '" + to_string(m.key) + "'", row.line());
    }
    order.push_back(m.key);
  }

  CharacterizationDatabase db;
  struct Regional {
    MethodKey key;
    ElementaryFlow flow;
    double value;
    std::size_t line;
  };
  std::vector<Regional> regional;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    const std::string& rec = row.str(crec);
    if (rec == "method") continue;
    MethodKey key = method_key(row, cm, csub, cg, cp);
    ElementaryFlow flow = flow_of(row, cs, cc);
    double value = row.num(cv);
    auto mid = per_kg(row.str(cu));
    if (!mid) throw ParseError("factor unit '" + row.str(cu) + "' is not per kg", row.line());

    MethodKey owner = key;
    if (rec == "regional") owner.geography = Geography::Global;
    auto it = specs.find(owner);
    if (it == specs.end()) throw ParseError("factor refers to unknown method '" + to_string(owner) + "'", row.line());
    if (*mid != it->second.midpoint_unit) {
      throw ParseError("factor unit '" + row.str(cu) + "' does not match method unit '" + it->second.midpoint_unit +
                           "'",
                       row.line());
    }
    if (rec == "cf") {
      if (value < 0.0) throw ParseError("characterization factor must be non-negative", row.line());
      if (!it->second.midpoint_cfs.emplace(flow, value).second) {
        throw ParseError("duplicate factor for " + flow.substance + " in '" + to_string(key) + "'", row.line());
      }
    } else {
      if (key.geography == Geography::Global) throw ParseError("regional factor must name a country", row.line());
      regional.push_back({key, flow, value, row.line()});
    }
  }
  for (const auto& k : order) {
    with_line(0, [&] { db.add_method(specs.at(k)); });
  }
  for (const auto& g : regional) {
    with_line(g.line, [&] { db.add_regional_reference(g.key, g.flow, g.value); });
  }
  with_line(0, [&] { db.derive_regional_methods(); });
  return db;
}

CharacterizationDatabase load_cf_database(const std::filesystem::path& path) {
  return parse_cf_database(read_text_file(path));
}

std::string write_cf_database(const CharacterizationDatabase& db) {
  std::string out =
      csv_line({"record", "method", "sub_label", "damage", "geography", "perspective", "substance", "compartment",
                "value", "unit"});
  auto key_fields = [](const MethodKey& k) {
    return std::vector<std::string>{k.name, k.sub_label};
  };
  for (const auto& m : db.methods()) {
    if (db.is_derived(m.key)) continue;
    auto kf = key_fields(m.key);
    out += csv_line({"method", kf[0], kf[1], std::string(to_string(m.damage)), std::string(to_string(m.key.geography)),
                     std::string(to_string(m.key.perspective)), "", "", format_number(m.mid_to_end_factor),
                     std::string(to_string(m.endpoint_unit)) + "/" + m.midpoint_unit});
    for (const auto& [flow, v] : m.midpoint_cfs) {
      out += csv_line({"cf", kf[0], kf[1], "", std::string(to_string(m.key.geography)),
                       std::string(to_string(m.key.perspective)), flow.substance,
                       std::string(to_string(flow.compartment)), format_number(v), m.midpoint_unit + "/kg"});
    }
    for (const auto& [rkey, flows] : db.regional_references()) {
      MethodKey owner = rkey;
      owner.geography = Geography::Global;
      if (!(owner == m.key)) continue;
      for (const auto& [flow, v] : flows) {
        out += csv_line({"regional", rkey.name, rkey.sub_label, "", std::string(to_string(rkey.geography)),
                         std::string(to_string(rkey.perspective)), flow.substance,
                         std::string(to_string(flow.compartment)), format_number(v), m.midpoint_unit + "/kg"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Process database

ProcessDatabase parse_process_db(std::string_view text) {
  CsvTable t = parse_csv(text);
  std::size_t crec = require_column(t, "record");
  std::size_t cp = require_column(t, "process");
  std::size_t ca = require_column(t, "amount");
  std::size_t cu = require_column(t, "unit");
  std::size_t ci = require_column(t, "input");
  std::size_t cs = require_column(t, "substance");
  std::size_t cc = require_column(t, "compartment");

  std::map<std::string, ProcessDataset> processes;
  std::map<std::string, std::size_t> defined_at;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    const std::string& rec = row.str(crec);
    if (rec != "process" && rec != "technosphere" && rec != "biosphere") {
      throw ParseError("unknown record type '" + rec + "'", row.line());
    }
    if (rec != "process") continue;
    ProcessDataset p;
    p.process_id = row.required(cp);
    p.functional_unit = row.num(ca);
    p.unit = row.str(cu);
    if (!(p.functional_unit > 0.0)) throw ParseError("functional unit must be positive", row.line());
    if (!processes.emplace(p.process_id, p).second) {
      throw ParseError("duplicate process '" + p.process_id + "'", row.line());
    }
    defined_at[p.process_id] = row.line();
    order.push_back(p.process_id);
  }
  std::vector<std::pair<std::string, std::size_t>> references;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row row(t, r);
    const std::string& rec = row.str(crec);
    if (rec == "process") continue;
    auto it = processes.find(row.required(cp));
    if (it == processes.end()) throw ParseError("exchange for unknown process '" + row.str(cp) + "'", row.line());
    double amount = row.num(ca);
    if (rec == "technosphere") {
      const std::string& input = row.required(ci);
      if (!it->second.technosphere_inputs.emplace(input, amount).second) {
        throw ParseError("duplicate input '" + input + "' in '" + it->first + "'", row.line());
      }
      references.emplace_back(input, row.line());
    } else {
      if (row.str(cu) != "kg") throw ParseError("biosphere exchange unit must be kg, got '" + row.str(cu) + "'", row.line());
      ElementaryFlow flow = flow_of(row, cs, cc);
      if (!it->second.biosphere_exchanges.emplace(flow, amount).second) {
        throw ParseError("duplicate exchange of " + flow.substance + " in '" + it->first + "'", row.line());
      }
    }
  }
  for (const auto& [input, line] : references) {
    if (!processes.count(input)) throw ParseError("technosphere input '" + input + "' is not defined", line);
  }
  ProcessDatabase db;
  for (const auto& id : order) {
    with_line(defined_at[id], [&] { db.add(processes.at(id)); });
  }
  return db;
}

ProcessDatabase load_process_db(const std::filesystem::path& path) { return parse_process_db(read_text_file(path)); }

std::string write_process_db(const ProcessDatabase& db) {
  std::string out = csv_line({"record", "process", "amount", "unit", "input", "substance", "compartment"});
  for (const auto& [id, p] : db.processes()) {
    out += csv_line({"process", id, format_number(p.functional_unit), p.unit, "", "", ""});
    for (const auto& [input, amount] : p.technosphere_inputs) {
      out += csv_line({"technosphere", id, format_number(amount), "", input, "", ""});
    }
    for (const auto& [flow, kg] : p.biosphere_exchanges) {
      out += csv_line({"biosphere", id, format_number(kg), "kg", "", flow.substance,
                       std::string(to_string(flow.compartment))});
    }
  }
  return out;
}

}  // namespace yieldgap
