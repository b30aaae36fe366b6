#!/usr/bin/env python3
"""Regenerate data/recipe_fixture_cfs.csv and data/processes_fixture.csv.

The characterization factors for the pesticide active ingredients and the
midpoint-to-endpoint factors of the reference method set are fixed inputs.
The remaining emission coefficients of the tractor and nitrogen processes are
solved so that the reference hectare (900 MJ tractor work, 50 kg N,
0.54 kg 2,4-D, 0.13 kg Pirimicarb) lands exactly on the reference midpoint
scores below. Everything else is illustrative data, not a published dataset.
"""
import csv
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"

TRACTOR_MJ = 900.0
NITROGEN_KG = 50.0
HERBICIDE_KG = 0.54
INSECTICIDE_KG = 0.13

# (method, sub_label, damage, midpoint unit, midpoint score, endpoint score)
REFERENCE = [
    ("Global Warming", "Humans and Ecosystems", "human_health", "kg CO2-eq", 943.1366, 8.752307e-04),
    ("Toxicity", "Humans - Carcinogenic", "human_health", "kg 1,4-DCB-eq", 1.1561, 3.838143e-06),
    ("Toxicity", "Humans - Non-carcinogenic", "human_health", "kg 1,4-DCB-eq", 0.2679, 6.108489e-08),
    ("Particulate Matter Formation", "Humans", "human_health", "kg PM2.5-eq", 2.6462, 6.250000e-11),
    ("Ozone Formation", "Humans", "human_health", "kg NOx-eq", 3.3371, 3.036748e-06),
    ("Terrestrial Acidification", "Ecosystems", "ecosystem_quality", "kg SO2-eq", 15.9803, 3.387814e-06),
    ("Ozone Formation", "Ecosystems", "ecosystem_quality", "kg NOx-eq", 7.6806, 9.908018e-07),
    ("Freshwater Eutrophication", "Ecosystems", "ecosystem_quality", "kg P-eq", 0.0166, 1.114726e-08),
    ("Toxicity", "Ecosystems - Terrestrial", "ecosystem_quality", "kg 1,4-DCB-eq", 185.9196, 2.119483e-09),
    ("Toxicity", "Ecosystems - Freshwater", "ecosystem_quality", "kg 1,4-DCB-eq", 0.0606, 4.211711e-11),
]
TARGET = {(m, s): mid for m, s, _, _, mid, _ in REFERENCE}

# Italian over global ratio per flow for the regionalizable methods.
OZ_H = {"NOx": 0.87, "NMVOC": 1.13}
OZ_E = {"NOx": 2.0, "NMVOC": 1.8}
ACID = {"SO2": 0.95, "NOx": 1.05, "NH3": 1.1}
PM = {"PM2.5": 0.9, "NOx": 0.9, "SO2": 0.9, "NH3": 0.9}
FEUT_P = 1.2

NH3_TOTAL = 6.0


def fmt(x):
    return "%.12g" % x


def g(x):
    return float("%.12g" % x)


def solve():
    # Ozone pair fixes NOx and NMVOC totals.
    a11, a12 = 1.0 * OZ_H["NOx"], 0.18 * OZ_H["NMVOC"]
    a21, a22 = 1.0 * OZ_E["NOx"], 0.29 * OZ_E["NMVOC"]
    b1 = TARGET[("Ozone Formation", "Humans")]
    b2 = TARGET[("Ozone Formation", "Ecosystems")]
    det = a11 * a22 - a12 * a21
    nox = (b1 * a22 - a12 * b2) / det
    nmvoc = (a11 * b2 - a21 * b1) / det
    so2 = (TARGET[("Terrestrial Acidification", "Ecosystems")]
           - 0.36 * ACID["NOx"] * nox - 1.96 * ACID["NH3"] * NH3_TOTAL) / ACID["SO2"]
    pm25 = (TARGET[("Particulate Matter Formation", "Humans")] / PM["PM2.5"]
            - 0.11 * nox - 0.29 * so2 - 0.24 * NH3_TOTAL)
    return nox, nmvoc, so2, pm25


def main():
    nox, nmvoc, so2, pm25 = solve()
    assert min(nox, nmvoc, so2, pm25) > 0

    diesel = {"CO2": 0.0098, "SO2": 0.00012, "NMVOC": 0.00004}
    diesel_per_work = 3.0
    an = {"N2O": 0.0095, "NOx": 0.0061, "NH3": 0.0036}
    field = {"N2O": 0.0157, "NH3": NH3_TOTAL / NITROGEN_KG - an["NH3"]}
    tractor = {"CO2": 0.2227}

    n2o_total = NITROGEN_KG * (an["N2O"] + field["N2O"])
    co2_rest = TARGET[("Global Warming", "Humans and Ecosystems")] - 298.0 * n2o_total
    co2_tractor = TRACTOR_MJ * (diesel_per_work * diesel["CO2"] + tractor["CO2"])
    an["CO2"] = g((co2_rest - co2_tractor) / NITROGEN_KG)
    tractor["NOx"] = g((nox - NITROGEN_KG * an["NOx"]) / TRACTOR_MJ)
    tractor["NMVOC"] = g((nmvoc - TRACTOR_MJ * diesel_per_work * diesel["NMVOC"]) / TRACTOR_MJ)
    an["SO2"] = g((so2 - TRACTOR_MJ * diesel_per_work * diesel["SO2"]) / NITROGEN_KG)
    tractor["PM2.5"] = g(pm25 / TRACTOR_MJ)
    an["Phosphate"] = g(TARGET[("Freshwater Eutrophication", "Ecosystems")] / (0.33 * FEUT_P) / NITROGEN_KG)
    tractor["Chromium VI"] = g(TARGET[("Toxicity", "Humans - Carcinogenic")] / 1000.0 / TRACTOR_MJ)
    tractor["Lead"] = g(TARGET[("Toxicity", "Humans - Non-carcinogenic")] / 1500.0 / TRACTOR_MJ)
    pest_terr = HERBICIDE_KG * 0.042 + INSECTICIDE_KG * 0.378
    tractor["Zinc"] = g((TARGET[("Toxicity", "Ecosystems - Terrestrial")] - pest_terr) / 25.0 / TRACTOR_MJ)
    tractor["Copper"] = g(TARGET[("Toxicity", "Ecosystems - Freshwater")] / 55.0 / TRACTOR_MJ)
    for v in list(an.values()) + list(tractor.values()):
        assert v > 0

    compartments = {
        "CO2": "air", "N2O": "air", "NOx": "air", "NMVOC": "air", "SO2": "air",
        "NH3": "air", "PM2.5": "air", "Phosphate": "freshwater",
        "Chromium VI": "urban air", "Lead": "urban air",
        "Zinc": "industrial soil", "Copper": "freshwater",
    }

    rows = [("record", "process", "amount", "unit", "input", "substance", "compartment")]

    def process(pid, fu, unit, tech, bio):
        rows.append(("process", pid, fmt(fu), unit, "", "", ""))
        for inp, amt in tech:
            rows.append(("technosphere", pid, fmt(amt), "", inp, "", ""))
        for sub, comp, amt in bio:
            rows.append(("biosphere", pid, fmt(amt), "kg", "", sub, comp))

    process("diesel_supply", 1.0, "MJ", [],
            [(k, compartments[k], v) for k, v in diesel.items()])
    process("tractor_work", 1.0, "MJ", [("diesel_supply", diesel_per_work)],
            [(k, compartments[k], v) for k, v in tractor.items()])
    process("ammonium_nitrate_production", 1.0, "kg N", [],
            [(k, compartments[k], v) for k, v in an.items()])
    process("nitrogen_fertilization", 1.0, "kg N", [("ammonium_nitrate_production", 1.0)],
            [(k, compartments[k], v) for k, v in field.items()])
    process("herbicide_2,4-D_application", 1.0, "kg", [],
            [("2,4-D", "industrial soil", 1.0)])
    process("insecticide_pirimicarb_application", 1.0, "kg", [],
            [("Pirimicarb", "industrial soil", 1.0)])

    with open(ROOT / "processes_fixture.csv", "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)

    cf = [("record", "method", "sub_label", "damage", "geography", "perspective",
           "substance", "compartment", "value", "unit")]
    ref = {(m, s): (d, u, e / mid) for m, s, d, u, mid, e in REFERENCE}

    def method(name, sub, geo, persp, factor=None, damage=None, unit=None, endpoint=None):
        d, u, f = ref.get((name, sub), (damage, unit, factor))
        if factor is not None:
            f = factor
        eu = endpoint or {"human_health": "DALY", "ecosystem_quality": "species.year"}[d]
        cf.append(("method", name, sub, d, geo, persp, "", "", "%.10g" % f, f"{eu}/{u}"))
        return u

    def cfs(name, sub, geo, persp, unit, entries, record="cf"):
        for sub_name, comp, val in entries:
            cf.append((record, name, sub, "", geo, persp, sub_name, comp, fmt(val), f"{unit}/kg"))

    H = "Hierarchist"
    u = method("Global Warming", "Humans and Ecosystems", "Global", H)
    cfs("Global Warming", "Humans and Ecosystems", "Global", H, u,
        [("CO2", "air", 1.0), ("N2O", "air", 298.0), ("CH4", "air", 34.0)])
    u = method("Global Warming", "Humans and Ecosystems", "Global", "Individualist", factor=8.12e-08)
    cfs("Global Warming", "Humans and Ecosystems", "Global", "Individualist", u,
        [("CO2", "air", 1.0), ("N2O", "air", 264.0), ("CH4", "air", 84.0)])
    u = method("Global Warming", "Humans and Ecosystems", "Global", "Egalitarian", factor=1.25e-05)
    cfs("Global Warming", "Humans and Ecosystems", "Global", "Egalitarian", u,
        [("CO2", "air", 1.0), ("N2O", "air", 298.0), ("CH4", "air", 34.0)])

    u = method("Toxicity", "Humans - Carcinogenic", "Global", H)
    cfs("Toxicity", "Humans - Carcinogenic", "Global", H, u,
        [("Chromium VI", "urban air", 1000.0), ("Benzene", "urban air", 0.011)])
    u = method("Toxicity", "Humans - Non-carcinogenic", "Global", H)
    cfs("Toxicity", "Humans - Non-carcinogenic", "Global", H, u,
        [("Lead", "urban air", 1500.0), ("Zinc", "urban air", 80.0)])

    def regional(name, sub, damage_flows, ratios, italy_only=None):
        u = method(name, sub, "Global", H)
        cfs(name, sub, "Global", H, u, damage_flows)
        refs = [(s, c, v * ratios[s]) for s, c, v in damage_flows if s in ratios]
        cfs(name, sub, "Italy", H, u, refs, record="regional")

    regional("Particulate Matter Formation", "Humans",
             [("PM2.5", "air", 1.0), ("NOx", "air", 0.11), ("SO2", "air", 0.29), ("NH3", "air", 0.24)], PM)
    regional("Ozone Formation", "Humans", [("NOx", "air", 1.0), ("NMVOC", "air", 0.18)], OZ_H)
    regional("Terrestrial Acidification", "Ecosystems",
             [("SO2", "air", 1.0), ("NOx", "air", 0.36), ("NH3", "air", 1.96)], ACID)
    regional("Ozone Formation", "Ecosystems", [("NOx", "air", 1.0), ("NMVOC", "air", 0.29)], OZ_E)
    # Phosphate has no Italian reference row: it takes the reference-flow ratio.
    regional("Freshwater Eutrophication", "Ecosystems",
             [("Phosphorus", "freshwater", 1.0), ("Phosphate", "freshwater", 0.33)], {"Phosphorus": FEUT_P})

    u = method("Toxicity", "Ecosystems - Terrestrial", "Global", H)
    cfs("Toxicity", "Ecosystems - Terrestrial", "Global", H, u,
        [("2,4-D", "industrial soil", 0.042), ("Pirimicarb", "industrial soil", 0.378),
         ("Zinc", "industrial soil", 25.0)])
    u = method("Toxicity", "Ecosystems - Freshwater", "Global", H)
    cfs("Toxicity", "Ecosystems - Freshwater", "Global", H, u,
        [("2,4-D", "freshwater", 0.359), ("Pirimicarb", "freshwater", 0.455),
         ("Copper", "freshwater", 55.0)])
    u = method("Toxicity", "Ecosystems - Marine", "Global", H, factor=1.05e-10,
               damage="ecosystem_quality", unit="kg 1,4-DCB-eq")
    cfs("Toxicity", "Ecosystems - Marine", "Global", H, u,
        [("2,4-D", "marine water", 0.02), ("Pirimicarb", "marine water", 0.038),
         ("Copper", "marine water", 1.2)])

    with open(ROOT / "recipe_fixture_cfs.csv", "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(cf)


if __name__ == "__main__":
    main()
