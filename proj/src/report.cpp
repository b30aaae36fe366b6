#include "yieldgap/report.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "yieldgap/data_io.hpp"
#include "yieldgap/error.hpp"

namespace yieldgap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Plain aligned text table. Numeric-looking cells are right aligned.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto numeric = [](const std::string& s) { return !s.empty() && parse_number(s).has_value(); };
  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t c = 0; c < r.size(); ++c) {
      std::string pad(width[c] - r[c].size(), ' ');
      if (c) out += "  ";
      out += numeric(r[c]) ? pad + r[c] : r[c] + (c + 1 < r.size() ? pad : "");
    }
    out += '\n';
    return out;
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string render_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = csv_line(header);
  for (const auto& r : rows) out += csv_line(r);
  return out;
}

ordered_json row_json(const ImpactRow& r) {
  ordered_json j;
  j["method"] = r.method.name;
  j["sub_label"] = r.method.sub_label;
  j["geography"] = std::string(to_string(r.method.geography));
  j["perspective"] = std::string(to_string(r.method.perspective));
  j["damage"] = std::string(to_string(r.damage));
  j["midpoint"] = r.midpoint;
  j["midpoint_unit"] = r.midpoint_unit;
  j["factor"] = r.factor;
  j["endpoint"] = r.endpoint;
  j["endpoint_unit"] = std::string(to_string(r.endpoint_unit));
  return j;
}

ordered_json impacts_json(const ImpactResult& result) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : result.rows) rows.push_back(row_json(r));
  return rows;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "table") return OutputFormat::Table;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

std::string format_impacts(const ImpactResult& result, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    ordered_json j;
    j["impacts"] = impacts_json(result);
    return dump(j);
  }
  if (fmt == OutputFormat::Csv) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : result.rows) {
      rows.push_back({r.method.name, r.method.sub_label, std::string(to_string(r.method.geography)),
                      std::string(to_string(r.method.perspective)), std::string(to_string(r.damage)),
                      format_number(r.midpoint), r.midpoint_unit, format_number(r.factor), format_number(r.endpoint),
                      std::string(to_string(r.endpoint_unit))});
    }
    return render_csv({"method", "sub_label", "geography", "perspective", "damage", "midpoint", "midpoint_unit",
                       "factor", "endpoint", "endpoint_unit"},
                      rows);
  }
  std::string out;
  for (const auto& block : rank_impacts(result)) {
    std::vector<std::vector<std::string>> rows;
    int rank = 1;
    for (const auto& r : block.rows) {
      std::string label = r.method.name;
      if (!r.method.sub_label.empty()) label += " (" + r.method.sub_label + ")";
      if (r.method.geography != Geography::Global) label += " [" + std::string(to_string(r.method.geography)) + "]";
      rows.push_back({std::to_string(rank++), label, general(r.midpoint), r.midpoint_unit, sci(r.endpoint)});
    }
    if (!out.empty()) out += '\n';
    out += "Endpoint unit: " + std::string(to_string(block.unit)) + "\n";
    out += render_table({"rank", "impact", "midpoint", "unit", std::string(to_string(block.unit))}, rows);
  }
  return out;
}

ImpactResult impacts_from_json(std::string_view json_text) {
  ImpactResult result;
  try {
    json doc = json::parse(json_text);
    const json& rows = doc.is_object() && doc.contains("impacts") ? doc["impacts"] : doc;
    if (!rows.is_array()) throw ParseError("expected an array of impact rows");
    for (const auto& j : rows) {
      ImpactRow r;
      r.method.name = j.at("method").get<std::string>();
      r.method.sub_label = j.at("sub_label").get<std::string>();
      auto g = parse_geography(j.at("geography").get<std::string>());
      auto p = parse_perspective(j.at("perspective").get<std::string>());
      auto d = parse_damage_category(j.at("damage").get<std::string>());
      auto u = parse_endpoint_unit(j.at("endpoint_unit").get<std::string>());
      if (!g || !p || !d || !u) throw ParseError("bad enum label in impact row '" + r.method.name + "'");
      r.method.geography = *g;
      r.method.perspective = *p;
      r.damage = *d;
      r.endpoint_unit = *u;
      r.midpoint = j.at("midpoint").get<double>();
      r.midpoint_unit = j.at("midpoint_unit").get<std::string>();
      r.factor = j.at("factor").get<double>();
      r.endpoint = j.at("endpoint").get<double>();
      result.rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("impact JSON: ") + e.what());
  }
  return result;
}

std::string format_decisions(const std::vector<FarmDecision>& decisions, OutputFormat fmt) {
  std::vector<std::string> factors;
  for (const auto& d : decisions) {
    for (const auto& f : d.farm.stress_factors) {
      if (std::find(factors.begin(), factors.end(), f.name) == factors.end()) factors.push_back(f.name);
    }
  }
  if (fmt == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : decisions) {
      ordered_json j;
      j["farm_id"] = d.farm.farm_id;
      j["target_yield"] = d.decision.target_yield;
      ordered_json inputs = ordered_json::object();
      for (const auto& f : d.farm.stress_factors) inputs[f.name] = d.decision.inputs.at(f.name);
      j["inputs"] = inputs;
      j["profit_per_ha"] = d.decision.profit;
      j["corner"] = d.decision.corner;
      arr.push_back(j);
    }
    ordered_json doc;
    doc["decisions"] = arr;
    return dump(doc);
  }
  std::vector<std::string> header = {"farm_id", "target_yield"};
  for (const auto& f : factors) header.push_back(f);
  header.push_back("profit_per_ha");
  header.push_back("corner");
  std::vector<std::vector<std::string>> rows;
  for (const auto& d : decisions) {
    const bool csv = fmt == OutputFormat::Csv;
    std::vector<std::string> r = {d.farm.farm_id, csv ? format_number(d.decision.target_yield)
                                                      : fixed(d.decision.target_yield, 5)};
    for (const auto& f : factors) {
      auto it = d.decision.inputs.find(f);
      r.push_back(it == d.decision.inputs.end() ? "" : csv ? format_number(it->second) : fixed(it->second, 4));
    }
    r.push_back(csv ? format_number(d.decision.profit) : fixed(d.decision.profit, 2));
    r.push_back(d.decision.corner ? "yes" : "no");
    rows.push_back(std::move(r));
  }
  return fmt == OutputFormat::Csv ? render_csv(header, rows) : render_table(header, rows);
}

PlanEvaluation evaluate_plan(const FarmSpec& farm, const Prices& prices, const std::map<std::string, double>& inputs) {
  farm.validate();
  prices.validate();
  PlanEvaluation e;
  e.inputs = inputs;
  std::vector<double> ys = conditional_yields(farm, inputs);
  for (std::size_t i = 0; i < ys.size(); ++i) e.conditional[farm.stress_factors[i].name] = ys[i];
  e.realized_yield = realized_yield(ys);
  e.spread = *std::max_element(ys.begin(), ys.end()) - e.realized_yield;
  Decision d;
  d.target_yield = e.realized_yield;
  d.inputs = inputs;
  e.profit = profit(d, farm, prices);
  return e;
}

std::string format_plan(const FarmSpec& farm, const PlanEvaluation& plan, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    ordered_json j;
    j["farm_id"] = farm.farm_id;
    ordered_json factors = ordered_json::array();
    for (const auto& f : farm.stress_factors) {
      factors.push_back({{"factor", f.name}, {"input", plan.inputs.at(f.name)},
                         {"conditional_yield", plan.conditional.at(f.name)}});
    }
    j["factors"] = factors;
    j["realized_yield"] = plan.realized_yield;
    j["spread"] = plan.spread;
    j["profit_per_ha"] = plan.profit;
    return dump(j);
  }
  const bool csv = fmt == OutputFormat::Csv;
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : farm.stress_factors) {
    double x = plan.inputs.at(f.name);
    double y = plan.conditional.at(f.name);
    rows.push_back({f.name, csv ? format_number(x) : fixed(x, 4), csv ? format_number(y) : fixed(y, 5)});
  }
  if (csv) {
    rows.push_back({"realized", "", format_number(plan.realized_yield)});
    return render_csv({"factor", "input", "conditional_yield"}, rows);
  }
  std::string out = render_table({"factor", "input", "conditional_yield"}, rows);
  out += "realized yield " + fixed(plan.realized_yield, 5) + " t/ha, spread " + fixed(plan.spread, 5) +
         " t/ha, profit " + fixed(plan.profit, 2) + " per ha\n";
  return out;
}

std::string format_calibration(const StratumCalibration& result, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& [stratum, factors] : result) {
      for (const auto& [factor, c] : factors) {
        ordered_json j;
        j["stratum"] = stratum;
        j["factor"] = factor;
        j["status"] = to_string(c.status);
        if (c.fit) {
          j["potential_yield"] = c.fit->potential_yield;
          j["potential_yield_fitted"] = c.fit->potential_yield_fitted;
          j["s"] = c.fit->params.s;
          j["s_bar"] = c.fit->params.s_bar;
          j["lambda"] = c.fit->params.lambda;
          j["rss"] = c.fit->rss;
          j["peel_rounds"] = c.fit->peel_rounds;
          ordered_json pts = ordered_json::array();
          for (const auto& p : c.fit->frontier_points) pts.push_back({p.x, p.y});
          j["frontier"] = pts;
        }
        if (!c.message.empty()) j["message"] = c.message;
        arr.push_back(j);
      }
    }
    ordered_json doc;
    doc["calibration"] = arr;
    return dump(doc);
  }
  const bool csv = fmt == OutputFormat::Csv;
  auto num = [&](double v, int digits) { return csv ? format_number(v) : fixed(v, digits); };
  std::vector<std::vector<std::string>> rows;
  for (const auto& [stratum, factors] : result) {
    for (const auto& [factor, c] : factors) {
      std::vector<std::string> r = {stratum, factor, to_string(c.status)};
      if (c.fit) {
        r.insert(r.end(), {num(c.fit->potential_yield, 4), num(c.fit->params.s, 4), num(c.fit->params.s_bar, 4),
                           num(c.fit->params.lambda, 5), csv ? format_number(c.fit->rss) : general(c.fit->rss),
                           std::to_string(c.fit->frontier_points.size()), std::to_string(c.fit->peel_rounds)});
      } else {
        r.insert(r.end(), 7, "");
      }
      r.push_back(c.message);
      rows.push_back(std::move(r));
    }
  }
  std::vector<std::string> header = {"stratum", "factor", "status", "potential_yield", "s", "s_bar", "lambda",
                                     "rss", "frontier_points", "peel_rounds", "message"};
  return csv ? render_csv(header, rows) : render_table(header, rows);
}

namespace {

ordered_json aggregates_json(const ScenarioAggregates& a) {
  ordered_json j;
  j["farms"] = a.farms;
  j["failures"] = a.failures;
  j["hectares"] = a.hectares;
  j["total_profit"] = a.total_profit;
  j["mean_target_yield"] = a.mean_target_yield;
  j["total_daly"] = a.total_daly;
  j["total_species_year"] = a.total_species_year;
  j["total_usd"] = a.total_usd;
  j["daly_per_ha"] = a.daly_per_ha;
  j["species_year_per_ha"] = a.species_year_per_ha;
  ordered_json inputs = ordered_json::object();
  for (const auto& [k, v] : a.input_totals) inputs[k] = v;
  j["input_totals"] = inputs;
  return j;
}

std::vector<std::pair<std::string, std::string>> aggregate_pairs(const ScenarioAggregates& a, bool csv) {
  auto num = [&](double v) { return csv ? format_number(v) : general(v); };
  std::vector<std::pair<std::string, std::string>> kv = {
      {"farms", std::to_string(a.farms)},
      {"failures", std::to_string(a.failures)},
      {"hectares", num(a.hectares)},
      {"total_profit", num(a.total_profit)},
      {"mean_target_yield", num(a.mean_target_yield)},
      {"total_daly", csv ? format_number(a.total_daly) : sci(a.total_daly)},
      {"total_species_year", csv ? format_number(a.total_species_year) : sci(a.total_species_year)},
      {"total_usd", num(a.total_usd)},
      {"daly_per_ha", csv ? format_number(a.daly_per_ha) : sci(a.daly_per_ha)},
      {"species_year_per_ha", csv ? format_number(a.species_year_per_ha) : sci(a.species_year_per_ha)},
  };
  for (const auto& [k, v] : a.input_totals) kv.emplace_back("input_total:" + k, num(v));
  return kv;
}

}  // namespace

std::string format_scenario(const ScenarioResult& result, OutputFormat fmt, bool per_farm) {
  if (fmt == OutputFormat::Json) {
    ordered_json doc;
    doc["metadata"] = {{"wheat_price", result.metadata.wheat_price},
                       {"seed", result.metadata.seed},
                       {"config_hash", result.metadata.config_hash},
                       {"population", result.metadata.population}};
    doc["aggregates"] = aggregates_json(result.aggregates);
    ordered_json failures = ordered_json::array();
    for (const auto& f : result.failures) {
      failures.push_back({{"index", f.index}, {"farm_id", f.farm_id}, {"message", f.message}});
    }
    doc["failures"] = failures;
    if (per_farm) {
      ordered_json farms = ordered_json::array();
      for (const auto& f : result.farms) {
        ordered_json j;
        j["farm_id"] = f.farm_id;
        j["hectares"] = f.hectares;
        j["target_yield"] = f.decision.target_yield;
        ordered_json inputs = ordered_json::object();
        for (const auto& [k, v] : f.decision.inputs) inputs[k] = v;
        j["inputs"] = inputs;
        j["profit_per_ha"] = f.decision.profit;
        j["daly"] = f.impacts.endpoint_total(EndpointUnit::DALY);
        j["species_year"] = f.impacts.endpoint_total(EndpointUnit::SpeciesYear);
        farms.push_back(j);
      }
      doc["farms"] = farms;
    }
    return dump(doc);
  }
  const bool csv = fmt == OutputFormat::Csv;
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"wheat_price", csv ? format_number(result.metadata.wheat_price) : general(result.metadata.wheat_price)});
  rows.push_back({"seed", std::to_string(result.metadata.seed)});
  rows.push_back({"config_hash", result.metadata.config_hash});
  for (auto& [k, v] : aggregate_pairs(result.aggregates, csv)) rows.push_back({k, v});
  std::string out = csv ? render_csv({"key", "value"}, rows) : render_table({"key", "value"}, rows);
  if (!csv) {
    for (const auto& f : result.failures) {
      out += "failed farm " + f.farm_id + " (index " + std::to_string(f.index) + "): " + f.message + "\n";
    }
  }
  if (per_farm) {
    std::vector<std::string> factors;
    for (const auto& f : result.farms) {
      for (const auto& [k, _] : f.decision.inputs) {
        if (std::find(factors.begin(), factors.end(), k) == factors.end()) factors.push_back(k);
      }
    }
    std::vector<std::string> header = {"farm_id", "hectares", "target_yield"};
    header.insert(header.end(), factors.begin(), factors.end());
    header.insert(header.end(), {"profit_per_ha", "daly", "species_year"});
    std::vector<std::vector<std::string>> frows;
    for (const auto& f : result.farms) {
      std::vector<std::string> r = {f.farm_id, format_number(f.hectares), format_number(f.decision.target_yield)};
      for (const auto& k : factors) {
        auto it = f.decision.inputs.find(k);
        r.push_back(it == f.decision.inputs.end() ? "" : format_number(it->second));
      }
      r.push_back(format_number(f.decision.profit));
      r.push_back(format_number(f.impacts.endpoint_total(EndpointUnit::DALY)));
      r.push_back(format_number(f.impacts.endpoint_total(EndpointUnit::SpeciesYear)));
      frows.push_back(std::move(r));
    }
    out += '\n';
    out += csv ? render_csv(header, frows) : render_table(header, frows);
  }
  return out;
}

std::string format_sweep(const SweepParameter& parameter, const std::vector<SweepPoint>& points, OutputFormat fmt) {
  if (fmt == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : points) {
      ordered_json j;
      j["value"] = p.value;
      j["aggregates"] = aggregates_json(p.result.aggregates);
      arr.push_back(j);
    }
    ordered_json doc;
    doc["parameter"] = parameter.to_string();
    doc["points"] = arr;
    return dump(doc);
  }
  const bool csv = fmt == OutputFormat::Csv;
  std::vector<std::string> header = {"parameter", "value"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : points) {
    auto kv = aggregate_pairs(p.result.aggregates, csv);
    if (header.size() == 2) {
      for (const auto& [k, _] : kv) header.push_back(k);
    }
    std::vector<std::string> r = {parameter.to_string(), csv ? format_number(p.value) : general(p.value)};
    for (const auto& [_, v] : kv) r.push_back(v);
    r.resize(header.size());
    rows.push_back(std::move(r));
  }
  return csv ? render_csv(header, rows) : render_table(header, rows);
}

}  // namespace yieldgap
