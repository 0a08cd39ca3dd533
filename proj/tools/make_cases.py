#!/usr/bin/env python3
"""Regenerate cases/*.gfcase from public PYPOWER and PGLib-OPF data.

usage: make_cases.py PYPOWER_DIR OUT_DIR
"""
import json
import os
import sys

import numpy as np


def write(path, case):
    with open(path, "w") as f:
        json.dump(case, f, indent=2)
        f.write("\n")


def line(fr, to, x, limit, circuit=1, beta=(0.0, 0.0), candidate=True):
    return {"from": int(fr), "to": int(to), "circuit": circuit, "x": float(x), "limit": float(limit),
            "beta_min": beta[0], "beta_max": beta[1], "candidate": candidate, "in_service": True}


def demand(p, u):
    return {"forecast": p, "upper": (1 + u) * p, "lower": (1 - u) * p}


def circuits(branch):
    seen = {}
    out = []
    for row in branch:
        key = (int(row[0]), int(row[1]))
        seen[key] = seen.get(key, 0) + 1
        out.append(seen[key])
    return out


def pjm5():
    # Line data per the 5-bus table; injections from the PJM 5-bus system.
    table = [(1, 2, 0.030, 240), (1, 4, 0.050, 270), (1, 5, 0.060, 250),
             (2, 3, 0.025, 270), (3, 4, 0.030, 270), (4, 5, 0.020, 270)]
    # PJM loads scaled by 1.24 so the forecast sits at the congestion margin.
    loads = {2: 372.0, 3: 372.0, 4: 496.0}
    buses = []
    for b in range(1, 6):
        entry = {"id": b, "weight": 1.0}
        if b in loads:
            entry["demand"] = demand(loads[b], 0.05)
        buses.append(entry)
    gens = [(1, 40), (1, 170), (3, 520), (4, 200), (5, 600)]
    return {
        "schema_version": "1.0",
        "name": "pjm5",
        "reconstructed": True,
        "notes": "Line data exact; PJM 5-bus generation, PJM loads scaled by 1.24, +/-5% fuzzy bounds.",
        "base_mva": 100.0,
        "reference_bus": 1,
        "default_uncertainty": 0.05,
        "buses": buses,
        "generators": [{"bus": b, "p_min": 0.0, "p_max": float(p)} for b, p in gens],
        "lines": [line(f, t, x, lim, beta=(-0.2, 0.2)) for f, t, x, lim in table],
    }


def ieee24(pp):
    sys.path.insert(0, pp)
    from pypower.case24_ieee_rts import case24_ieee_rts
    c = case24_ieee_rts()
    u = 0.10
    buses = []
    for row in c["bus"]:
        entry = {"id": int(row[0]), "weight": 1.0}
        if row[2] > 0:
            entry["demand"] = demand(float(row[2]), u)
        buses.append(entry)
    gens = [{"bus": int(g[0]), "p_min": float(g[9]), "p_max": float(g[8])} for g in c["gen"] if g[7] > 0 and g[8] > 0]
    lines = [line(r[0], r[1], r[3], r[5], circuit=k, beta=(-0.9, 0.9))
             for r, k in zip(c["branch"], circuits(c["branch"]))]
    return {
        "schema_version": "1.0",
        "name": "ieee24",
        "notes": "IEEE RTS 24-bus, public standard data; +/-10% fuzzy bounds.",
        "base_mva": float(c["baseMVA"]),
        "reference_bus": 13,
        "default_uncertainty": u,
        "buses": buses,
        "generators": gens,
        "lines": lines,
    }


# Lines at the buses repressed in the stressed Base study, then lines at
# their neighbours, each group by loading at alpha = 0 (first 12; both
# circuits of 42-49).
CANDIDATES_118 = {(69, 75), (42, 49), (25, 27), (15, 17), (69, 70), (76, 77),
                  (74, 75), (24, 70), (75, 77), (75, 118), (70, 71)}


def matpower_matrix(text, name):
    start = text.index(f"mpc.{name} = [")
    body = text[text.index("\n", start) + 1:text.index("];", start)]
    rows = []
    for ln in body.splitlines():
        ln = ln.split("%")[0].strip().rstrip(";")
        if ln:
            rows.append([float(v) for v in ln.split()])
    return np.array(rows)


def ieee118(path):
    text = open(path).read()
    bus, gen, branch = (matpower_matrix(text, k) for k in ("bus", "gen", "branch"))
    u = 0.10
    buses = []
    for row in bus:
        entry = {"id": int(row[0]), "weight": 1.0}
        if row[2] > 0:
            entry["demand"] = demand(float(row[2]), u)
        buses.append(entry)
    gens = [{"bus": int(g[0]), "p_min": 0.0, "p_max": float(g[8])} for g in gen if g[7] > 0 and g[8] > 0]
    lines = []
    for r, k in zip(branch, circuits(branch)):
        pair = tuple(sorted((int(r[0]), int(r[1]))))
        cand = pair in CANDIDATES_118
        lines.append(line(r[0], r[1], r[3], r[5], circuit=k, beta=(-0.15, 0.15) if cand else (0.0, 0.0),
                          candidate=cand))
    return {
        "schema_version": "1.0",
        "name": "ieee118",
        "reconstructed": True,
        "notes": "IEEE 118-bus from PGLib-OPF v23.07 (CC BY 4.0); candidate devices chosen by loading.",
        "base_mva": float(matpower_scalar(text, "baseMVA")),
        "reference_bus": 69,
        "default_uncertainty": u,
        "buses": buses,
        "generators": gens,
        "lines": lines,
    }


def matpower_scalar(text, name):
    start = text.index(f"mpc.{name} =")
    return float(text[start:text.index(";", start)].split("=")[1])


def main():
    pp, out = sys.argv[1], sys.argv[2]
    pglib118 = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "pglib_opf_case118_ieee.m")
    write(f"{out}/pjm5.gfcase", pjm5())
    write(f"{out}/ieee24.gfcase", ieee24(pp))
    base = ieee118(pglib118)
    write(f"{out}/ieee118.gfcase", base)
    stressed = json.loads(json.dumps(base))
    stressed["name"] = "ieee118_stressed"
    stressed["notes"] = "ieee118 with every limit at 0.7x; candidate lines chosen by loading."
    for ln in stressed["lines"]:
        ln["limit"] = round(0.7 * ln["limit"], 6)
    write(f"{out}/ieee118_stressed.gfcase", stressed)


if __name__ == "__main__":
    main()
