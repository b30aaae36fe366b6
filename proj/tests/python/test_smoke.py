import os
from pathlib import Path

import pytest

import yieldgap as yg

DATA = Path(os.environ.get("YIELDGAP_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def reference_farm():
    return yg.Farm(
        "reference",
        8.4,
        [
            yg.StressFactor("nitrogen", 0.5, 0.5, 0.06, 1.5),
            yg.StressFactor("weeds", 0.4, 0.4, 0.5, 10.0),
            yg.StressFactor("insects", 0.3, 0.3, 0.7, 10.0),
        ],
    )


def test_reference_optimum():
    d = yg.optimal_inputs(reference_farm(), 300.0)
    assert d.target_yield == pytest.approx(8.20238095238095238, rel=1e-12)
    assert d.inputs["nitrogen"] == pytest.approx(50.9416438128356448, rel=1e-9)
    assert not d.corner
    ys = yg.conditional_yields(reference_farm(), d.inputs)
    assert max(ys) - min(ys) < 1e-9


def test_curve_and_inverse():
    n = yg.StressFactor("nitrogen", 0.5, 0.5, 0.06)
    y = yg.conditional_yield(n, 8.4, 30.0)
    assert yg.required_input(n, 8.4, y) == pytest.approx(30.0)
    with pytest.raises(yg.DomainError):
        yg.required_input(n, 8.4, 9.0)
    with pytest.raises(yg.DomainError):
        yg.StressFactor("bad", 1.5, 0.5, 0.06)


def test_frontier_fit():
    n = yg.StressFactor("nitrogen", 0.5, 0.5, 0.06)
    pts = [(x, yg.conditional_yield(n, 8.4, x)) for x in (0, 20, 45, 90, 160)]
    pts += [(50, 5.0), (100, 6.0)]
    assert yg.nw_frontier(pts) == sorted(pts[:5])
    fit = yg.fit_frontier(pts[:5], potential_yield=8.4)
    assert fit["lambda"] == pytest.approx(0.06, rel=1e-7)


def test_assess_reference_demand():
    rows = yg.assess(
        DATA / "recipe_fixture_cfs.csv",
        DATA / "processes_fixture.csv",
        DATA / "methods_reference.csv",
        {"tractor_work": 900, "nitrogen_fertilization": 50,
         "herbicide_2,4-D_application": 0.54, "insecticide_pirimicarb_application": 0.13},
    )
    gw = next(r for r in rows if r["method"] == "Global Warming")
    assert gw["midpoint"] == pytest.approx(943.1366, abs=5e-5)
    assert gw["endpoint_unit"] == "DALY"


def test_scenario_threads_agree():
    cfg = DATA / "scenario_population.json"
    a = yg.run_scenario(cfg, threads=1)
    b = yg.run_scenario(cfg, threads=3)
    assert a["farms"] == 1000
    assert a["total_daly"] == b["total_daly"]
    with pytest.raises(yg.Error):
        yg.run_scenario(DATA / "missing.json")
