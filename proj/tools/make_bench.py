#!/usr/bin/env python3
"""Writes the canned 16-unit / 24-hour / 6-bus benchmark instance.

Usage: make_bench.py OUTPUT.json

The output is a pure function of the constants below. The mid-merit units
are the largest in the fleet and the ones whose commitment changes during
the day; within each class the largest unit is also the cheapest.
"""
import json
import random
import sys

BUSES = [f"n{i}" for i in range(1, 7)]
LINES = [
    ("n1", "n2", 8.0, 380.0), ("n2", "n3", 7.0, 320.0), ("n3", "n4", 9.0, 350.0),
    ("n4", "n5", 6.0, 300.0), ("n5", "n6", 8.0, 320.0), ("n6", "n1", 7.0, 360.0),
    ("n2", "n5", 5.0, 250.0),
]
# (kind, count, p_min, p_max, c, c_nl, c_su, ut, dt, ramp)
FLEET = [
    ("base", 5, 40.0, 200.0, 14.0, 52.0, 320.0, 6, 5, 80.0),
    ("mid", 5, 45.0, 270.0, 22.0, 30.0, 90.0, 3, 3, 130.0),
    ("peak", 6, 5.0, 60.0, 34.0, 11.0, 18.0, 1, 1, 60.0),
]
COST_SPREAD = 0.4
SHAPE = [0.58, 0.55, 0.53, 0.52, 0.54, 0.60, 0.70, 0.80, 0.87, 0.91, 0.94, 0.96,
         0.95, 0.94, 0.93, 0.94, 0.97, 1.00, 0.98, 0.93, 0.86, 0.77, 0.68, 0.62]
PEAK = 1750.0
BUS_SHARE = [0.12, 0.22, 0.18, 0.20, 0.13, 0.15]


def main() -> None:
    rng = random.Random(42)
    gens = []
    k = 0
    for kind, count, pmin, pmax, c, cnl, csu, ut, dt, ramp in FLEET:
        for i in range(count):
            k += 1
            offset = (i - (count - 1) / 2) / count
            scale = 1.0 + 0.08 * offset
            gmax = round(pmax * scale, 1)
            gmin = round(pmin * scale, 1)
            on = kind != "peak" and not (kind == "mid" and i >= 2)
            gens.append({
                "id": f"{kind}{i + 1}",
                "bus": BUSES[(k * 5) % len(BUSES)],
                "c": round(c * (1.0 - COST_SPREAD * offset + 0.03 * rng.uniform(-1, 1)), 3),
                "c_nl": round(cnl * (1.0 + 0.05 * rng.uniform(-1, 1)), 2),
                "c_su": round(csu * (1.0 + 0.05 * rng.uniform(-1, 1)), 2),
                "p_min": gmin,
                "p_max": gmax,
                "ut": ut,
                "dt": dt,
                "r_hr": ramp,
                "r_su": max(ramp, gmin),
                "r_sd": max(ramp, gmin),
                "u0": 1 if on else 0,
                "p0": round(gmin + 0.3 * (gmax - gmin), 1) if on else 0.0,
                "init_duration": ut + 2 if on else dt + 1,
            })
    demand = {}
    for n, share in zip(BUSES, BUS_SHARE):
        demand[n] = [round(PEAK * share * s * (1.0 + 0.02 * rng.uniform(-1, 1)), 2) for s in SHAPE]
    doc = {
        "buses": BUSES,
        "ref_bus": "n1",
        "generators": gens,
        "lines": [
            {"id": f"l{i + 1}", "from_bus": a, "to_bus": b, "b": bb, "f_max": f}
            for i, (a, b, bb, f) in enumerate(LINES)
        ],
        "horizon": len(SHAPE),
        "demand": demand,
    }
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
