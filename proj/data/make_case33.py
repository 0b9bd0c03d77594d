#!/usr/bin/env python3
"""Writes case33.json: the 33-node radial test feeder with a 24-hour horizon.

Line impedances and nominal loads are the widely used Baran & Wu 33-bus data
(12.66 kV). Generator placement and costs follow the feeder diagram; DG sizes,
storage parameters and the daily load/PV shapes are repository choices.
"""
import json
import math
import pathlib

BASE_MVA = 1.0
BASE_KV = 12.66
Z_BASE = BASE_KV ** 2 / BASE_MVA

# from, to, R (ohm), X (ohm), P (kW) and Q (kVAr) at the receiving node
BRANCHES = [
    (1, 2, 0.0922, 0.0470, 100, 60), (2, 3, 0.4930, 0.2511, 90, 40),
    (3, 4, 0.3660, 0.1864, 120, 80), (4, 5, 0.3811, 0.1941, 60, 30),
    (5, 6, 0.8190, 0.7070, 60, 20), (6, 7, 0.1872, 0.6188, 200, 100),
    (7, 8, 0.7114, 0.2351, 200, 100), (8, 9, 1.0300, 0.7400, 60, 20),
    (9, 10, 1.0440, 0.7400, 60, 20), (10, 11, 0.1966, 0.0650, 45, 30),
    (11, 12, 0.3744, 0.1238, 60, 35), (12, 13, 1.4680, 1.1550, 60, 35),
    (13, 14, 0.5416, 0.7129, 120, 80), (14, 15, 0.5910, 0.5260, 60, 10),
    (15, 16, 0.7463, 0.5450, 60, 20), (16, 17, 1.2890, 1.7210, 60, 20),
    (17, 18, 0.7320, 0.5740, 90, 40), (2, 19, 0.1640, 0.1565, 90, 40),
    (19, 20, 1.5042, 1.3554, 90, 40), (20, 21, 0.4095, 0.4784, 90, 40),
    (21, 22, 0.7089, 0.9373, 90, 40), (3, 23, 0.4512, 0.3083, 90, 50),
    (23, 24, 0.8980, 0.7091, 420, 200), (24, 25, 0.8960, 0.7011, 420, 200),
    (6, 26, 0.2030, 0.1034, 60, 25), (26, 27, 0.2842, 0.1447, 60, 25),
    (27, 28, 1.0590, 0.9337, 60, 20), (28, 29, 0.8042, 0.7006, 120, 70),
    (29, 30, 0.5075, 0.2585, 200, 600), (30, 31, 0.9744, 0.9630, 150, 70),
    (31, 32, 0.3105, 0.3619, 210, 100), (32, 33, 0.3410, 0.5302, 60, 40),
]

# Fraction of nominal load in each hour 1..24 (morning and evening peaks).
LOAD_SHAPE = [0.55, 0.50, 0.48, 0.47, 0.48, 0.55, 0.68, 0.80, 0.88, 0.90, 0.89, 0.87,
              0.85, 0.84, 0.85, 0.88, 0.93, 0.98, 1.00, 0.97, 0.90, 0.80, 0.68, 0.60]

HOURS = 24
PF_LIMIT = 1.5
QF_LIMIT = 3.0

# node, cost ($/pu), p_max (pu), attackable, in service
DGS = [
    (4, 5.0, 1.0, True, True),
    (10, 15.0, 0.6, True, True),
    (13, 3.0, 0.8, False, True),   # PV, capped by PV_SHAPE
    (18, 10.0, 0.5, True, True),
    (20, 11.0, 0.3, False, True),
    (25, 11.0, 0.5, False, True),
    (27, 15.0, 0.6, True, True),
    (30, 6.0, 0.6, False, True),
    (33, 13.0, 0.6, True, True),
]

# node, power rating (pu), energy capacity (pu h)
STORAGE = [(4, 1.0, 8.0), (10, 0.6, 4.8), (18, 0.5, 4.0), (25, 0.5, 4.0), (27, 0.6, 4.8), (33, 0.6, 4.8)]


def pv_shape(hour):
    """Clear-sky availability for hour index 0..23, zero at night."""
    return round(max(0.0, math.sin(math.pi * (hour - 5) / 14.0)), 4) if 5 <= hour <= 19 else 0.0


def main():
    nodes = [{"id": i, "v_min": 0.9, "v_max": 1.1} for i in range(1, 34)]
    lines = []
    load_p = {1: 0.0}
    load_q = {1: 0.0}
    for k, (a, b, r, x, p, q) in enumerate(BRANCHES, start=1):
        lines.append({"id": k, "from": a, "to": b,
                      "r": round(r / Z_BASE, 8), "x": round(x / Z_BASE, 8),
                      "pf_min": -PF_LIMIT, "pf_max": PF_LIMIT, "qf_min": -QF_LIMIT, "qf_max": QF_LIMIT})
        load_p[b] = p / 1000.0 / BASE_MVA
        load_q[b] = q / 1000.0 / BASE_MVA

    generators = [{"node": 1, "kind": "substation", "cost": 25.0, "p_min": 0.0, "p_max": 10.0,
                   "q_min": -10.0, "q_max": 10.0, "attackable": False}]
    for node, cost, p_max, attackable, in_service in DGS:
        g = {"node": node, "kind": "pv" if node == 13 else "dispatchable", "cost": cost,
             "p_min": 0.0, "p_max": p_max, "q_min": 0.0, "q_max": 0.0, "attackable": attackable}
        if node == 13:
            g["p_max_profile"] = [round(p_max * pv_shape(h), 4) for h in range(HOURS)]
        if not in_service:
            g["in_service"] = False
        generators.append(g)

    storage = [{"node": node, "e_max": e_max, "eta_ch": 0.95, "eta_dis": 0.95,
                "p_ch_min": 0.0, "p_ch_max": rating, "p_dis_min": 0.0, "p_dis_max": rating,
                "soc_min": 0.1, "soc_max": 1.0, "soc_init": 0.3, "cost": 20.0}
               for node, rating, e_max in STORAGE]

    demand = [{"node": i,
               "p": [round(load_p[i] * s, 6) for s in LOAD_SHAPE],
               "q": [round(load_q[i] * s, 6) for s in LOAD_SHAPE]} for i in range(1, 34)]

    case = {"name": "case33", "base_mva": BASE_MVA, "base_kv": BASE_KV, "horizon_hours": HOURS,
            "nodes": nodes, "lines": lines, "generators": generators, "storage": storage, "demand": demand}
    out = pathlib.Path(__file__).with_name("case33.json")
    out.write_text(json.dumps(case, indent=1) + "\n")


if __name__ == "__main__":
    main()
