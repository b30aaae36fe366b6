#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "yieldgap/calibration.hpp"
#include "yieldgap/data_io.hpp"
#include "yieldgap/error.hpp"
#include "yieldgap/lca.hpp"
#include "yieldgap/optimizer.hpp"
#include "yieldgap/scenario_config.hpp"
#include "yieldgap/simulation.hpp"

namespace py = pybind11;
using namespace yieldgap;

namespace {

std::vector<Point2> to_points(const std::vector<std::pair<double, double>>& xy) {
  std::vector<Point2> out;
  out.reserve(xy.size());
  for (const auto& [x, y] : xy) out.push_back({x, y});
  return out;
}

std::vector<std::pair<double, double>> from_points(const std::vector<Point2>& pts) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}

py::dict fit_dict(const FrontierFit& f) {
  py::dict d;
  d["s"] = f.params.s;
  d["s_bar"] = f.params.s_bar;
  d["lambda"] = f.params.lambda;
  d["potential_yield"] = f.potential_yield;
  d["potential_yield_fitted"] = f.potential_yield_fitted;
  d["rss"] = f.rss;
  d["frontier"] = from_points(f.frontier_points);
  return d;
}

py::list rows_list(const ImpactResult& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["method"] = row.method.name;
    d["sub_label"] = row.method.sub_label;
    d["geography"] = std::string(to_string(row.method.geography));
    d["midpoint"] = row.midpoint;
    d["midpoint_unit"] = row.midpoint_unit;
    d["endpoint"] = row.endpoint;
    d["endpoint_unit"] = std::string(to_string(row.endpoint_unit));
    rows.append(d);
  }
  return rows;
}

py::dict aggregates_dict(const ScenarioAggregates& a) {
  py::dict d;
  d["farms"] = a.farms;
  d["failures"] = a.failures;
  d["hectares"] = a.hectares;
  d["total_profit"] = a.total_profit;
  d["mean_target_yield"] = a.mean_target_yield;
  d["total_daly"] = a.total_daly;
  d["total_species_year"] = a.total_species_year;
  d["total_usd"] = a.total_usd;
  d["daly_per_ha"] = a.daly_per_ha;
  d["species_year_per_ha"] = a.species_year_per_ha;
  d["input_totals"] = a.input_totals;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Yield-gap farm decisions and life-cycle impacts";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<LookupError>(m, "MissingEntryError", base.ptr());
  py::register_exception<CycleError>(m, "CycleError", base.ptr());

  py::class_<StressFactorParams>(m, "StressFactor")
      .def(py::init([](std::string name, double s, double s_bar, double lambda, double price, std::string unit) {
             StressFactorParams p{std::move(name), s, s_bar, lambda, price, std::move(unit)};
             p.validate();
             return p;
           }),
           py::arg("name"), py::arg("s"), py::arg("s_bar"), py::arg("lam"), py::arg("input_price") = 0.0,
           py::arg("input_unit") = "kg/ha")
      .def_readwrite("name", &StressFactorParams::name)
      .def_readwrite("s", &StressFactorParams::s)
      .def_readwrite("s_bar", &StressFactorParams::s_bar)
      .def_readwrite("lam", &StressFactorParams::lambda)
      .def_readwrite("input_price", &StressFactorParams::input_price)
      .def_readwrite("input_unit", &StressFactorParams::input_unit)
      .def("__repr__", [](const StressFactorParams& p) {
        return "StressFactor(" + p.name + ", s=" + format_number(p.s) + ", s_bar=" + format_number(p.s_bar) +
               ", lam=" + format_number(p.lambda) + ", price=" + format_number(p.input_price) + ")";
      });

  py::class_<FarmSpec>(m, "Farm")
      .def(py::init([](std::string id, double ybar, std::vector<StressFactorParams> factors, double ha, double mj) {
             FarmSpec f{std::move(id), ybar, std::move(factors), ha, mj};
             f.validate();
             return f;
           }),
           py::arg("farm_id"), py::arg("potential_yield"), py::arg("factors"), py::arg("hectares") = 1.0,
           py::arg("tractor_energy") = 0.0)
      .def_readwrite("farm_id", &FarmSpec::farm_id)
      .def_readwrite("potential_yield", &FarmSpec::potential_yield)
      .def_readwrite("factors", &FarmSpec::stress_factors)
      .def_readwrite("hectares", &FarmSpec::hectares)
      .def_readwrite("tractor_energy", &FarmSpec::tractor_energy);

  py::class_<Decision>(m, "Decision")
      .def_readonly("target_yield", &Decision::target_yield)
      .def_readonly("inputs", &Decision::inputs)
      .def_readonly("profit", &Decision::profit)
      .def_readonly("corner", &Decision::corner)
      .def("__repr__", [](const Decision& d) {
        return "Decision(target_yield=" + format_number(d.target_yield) + ", profit=" + format_number(d.profit) + ")";
      });

  m.def("conditional_yield", &conditional_yield, py::arg("factor"), py::arg("potential_yield"), py::arg("x"));
  m.def("required_input", &required_input, py::arg("factor"), py::arg("potential_yield"), py::arg("target"));
  m.def("conditional_yields", &conditional_yields, py::arg("farm"), py::arg("inputs"));

  m.def(
      "optimal_inputs",
      [](const FarmSpec& farm, double wheat_price, std::optional<double> cap) {
        SolverSettings s;
        s.exploitable_cap = cap;
        return optimal_inputs(farm, Prices{wheat_price}, s);
      },
      py::arg("farm"), py::arg("wheat_price"), py::arg("exploitable_cap") = py::none());

  m.def(
      "one_factor_solution",
      [](const StressFactorParams& p, double ybar, double wheat_price) {
        auto s = one_factor_solution(p, ybar, Prices{wheat_price});
        return py::make_tuple(s.target_yield, s.input, s.corner);
      },
      py::arg("factor"), py::arg("potential_yield"), py::arg("wheat_price"));

  m.def("load_farms", &load_farm_specs, py::arg("path"));

  m.def(
      "convex_hull", [](const std::vector<std::pair<double, double>>& xy) { return from_points(convex_hull(to_points(xy))); },
      py::arg("points"));
  m.def(
      "nw_frontier", [](const std::vector<std::pair<double, double>>& xy) { return from_points(nw_frontier(to_points(xy))); },
      py::arg("points"));
  m.def(
      "fit_frontier",
      [](const std::vector<std::pair<double, double>>& xy, std::optional<double> ybar) {
        return fit_dict(fit_conditional_yield(to_points(xy), ybar));
      },
      py::arg("points"), py::arg("potential_yield") = py::none());

  m.def(
      "assess",
      [](const std::filesystem::path& cf_db, const std::filesystem::path& process_db,
         const std::filesystem::path& methods, const std::map<std::string, double>& demand) {
        const auto cf = load_cf_database(cf_db);
        const auto pdb = load_process_db(process_db);
        const auto specs = cf.select(load_method_list(methods));
        py::gil_scoped_release release;
        auto result = assess(expand_inventory(demand, pdb), specs);
        py::gil_scoped_acquire acquire;
        return rows_list(result);
      },
      py::arg("cf_db"), py::arg("process_db"), py::arg("methods"), py::arg("demand"));

  m.def(
      "run_scenario",
      [](const std::filesystem::path& config, std::optional<unsigned> threads, std::optional<std::uint64_t> seed) {
        const auto cfg = load_scenario_config(config);
        auto loaded = materialize(cfg, seed);
        if (threads) loaded.run.threads = *threads;
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(loaded.farms, cfg.prices, loaded.lca, loaded.run);
        }
        py::dict d = aggregates_dict(r.aggregates);
        d["config_hash"] = r.metadata.config_hash;
        d["seed"] = r.metadata.seed;
        return d;
      },
      py::arg("config"), py::arg("threads") = py::none(), py::arg("seed") = py::none());
}
