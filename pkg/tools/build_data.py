"""Regenerate the bundled system files under src/latticerel/data."""

from __future__ import annotations

import json
from pathlib import Path

from latticerel.corpus import random_threshold_system

DATA = Path(__file__).resolve().parents[1] / "src" / "latticerel" / "data"
HOURS = 8760.0


def unavailability(rate: float, repair_hours: float) -> float:
    return round(rate * repair_hours / HOURS, 10)


def dump(name: str, doc: dict) -> None:
    (DATA / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def sys5() -> dict:
    return {
        "schema_version": 1,
        "name": "sys5",
        "description": "Five-component worked example defined by its minimal cut sets.",
        "evaluator": "cutsets",
        "components": [{"id": str(i), "failure_prob": 0.1} for i in range(1, 6)],
        "cutsets": [["1"], ["2", "3"], ["3", "4"], ["2", "4", "5"]],
    }


def test3() -> dict:
    return {
        "schema_version": 1,
        "name": "test3",
        "description": "Three-bus triangle: 100 MW at A, 50 MW loads at B and C, 60 MW lines.",
        "evaluator": "dcopf",
        "buses": [{"id": "A", "demand": 0}, {"id": "B", "demand": 50}, {"id": "C", "demand": 50}],
        "generators": [{"id": "G-A", "bus": "A", "capacity": 100, "failure_prob": 0.01}],
        "lines": [
            {"id": "A-B", "from": "A", "to": "B", "capacity": 60, "susceptance": 1.0, "failure_prob": 0.01},
            {"id": "A-C", "from": "A", "to": "C", "capacity": 60, "susceptance": 1.0, "failure_prob": 0.01},
            {"id": "B-C", "from": "B", "to": "C", "capacity": 60, "susceptance": 1.0, "failure_prob": 0.01},
        ],
    }


def threshold(seed: int) -> dict:
    s = random_threshold_system(seed)
    ev = s.evaluator
    return {
        "schema_version": 1,
        "name": f"threshold-{seed}",
        "description": f"Random single-bus capacity system (corpus seed {seed}).",
        "evaluator": "threshold",
        "demand": ev.demand,
        "components": [
            {"id": str(i + 1), "capacity": c, "failure_prob": p}
            for i, (c, p) in enumerate(zip(ev.capacities, s.reliability.p))
        ],
    }


RBTS_GENERATORS = [  # bus, MW, forced outage rate
    ("1", 40, 0.03), ("1", 40, 0.03), ("1", 10, 0.02), ("1", 20, 0.025),
    ("2", 5, 0.01), ("2", 5, 0.01), ("2", 40, 0.02),
    ("2", 20, 0.015), ("2", 20, 0.015), ("2", 20, 0.015), ("2", 20, 0.015),
]
RBTS_LINES = [  # from, to, reactance p.u., rating MW, outages per year
    ("1", "3", 0.18, 85, 1.5), ("2", "4", 0.6, 71, 5.0), ("1", "2", 0.48, 71, 4.0),
    ("3", "4", 0.12, 71, 1.0), ("3", "5", 0.12, 71, 1.0), ("1", "3", 0.18, 85, 1.5),
    ("2", "4", 0.6, 71, 5.0), ("4", "5", 0.12, 71, 1.0), ("5", "6", 0.12, 71, 1.0),
]
RBTS_LOADS = {"1": 0, "2": 20, "3": 85, "4": 40, "5": 20, "6": 20}


def rbts(rating_factor: float = 1.0) -> dict:
    if rating_factor == 1.0:
        name = "rbts"
        description = ("Six-bus test system at annual peak load (185 MW), assembled from "
                       "published data; see README.md in this directory.")
    else:
        name = f"rbts-rating{rating_factor:g}x"
        description = (f"Sensitivity variant of rbts.json with every line rating multiplied "
                       f"by {rating_factor:g}; see README.md in this directory.")
    return {
        "schema_version": 1,
        "name": name,
        "description": description,
        "evaluator": "dcopf",
        "buses": [{"id": b, "demand": d} for b, d in RBTS_LOADS.items()],
        "generators": [
            {"id": f"G{k}", "bus": bus, "capacity": mw, "failure_prob": p}
            for k, (bus, mw, p) in enumerate(RBTS_GENERATORS, start=1)
        ],
        "lines": [
            {"id": f"L{k}", "from": f, "to": t, "capacity": rating * rating_factor,
             "susceptance": round(1.0 / x, 10), "failure_prob": unavailability(rate, 10.0)}
            for k, (f, t, x, rating, rate) in enumerate(RBTS_LINES, start=1)
        ],
    }


RTS_GENERATORS = (  # bus, MW, forced outage rate
    [("1", 20, 0.10)] * 2 + [("1", 76, 0.02)] * 2
    + [("2", 20, 0.10)] * 2 + [("2", 76, 0.02)] * 2
    + [("7", 100, 0.04)] * 3
    + [("13", 197, 0.05)] * 3
    + [("15", 12, 0.02)] * 5 + [("15", 155, 0.04)]
    + [("16", 155, 0.04)]
    + [("18", 400, 0.12)]
    + [("21", 400, 0.12)]
    + [("22", 50, 0.01)] * 6
    + [("23", 155, 0.04)] * 2 + [("23", 350, 0.08)]
)
RTS_LINES = [  # from, to, outages per year, repair hours, reactance p.u., rating MW
    ("1", "2", .24, 16, .0139, 175), ("1", "3", .51, 10, .2112, 175),
    ("1", "5", .33, 10, .0845, 175), ("2", "4", .39, 10, .1267, 175),
    ("2", "6", .48, 10, .1920, 175), ("3", "9", .38, 10, .1190, 175),
    ("3", "24", .02, 768, .0839, 400), ("4", "9", .36, 10, .1037, 175),
    ("5", "10", .34, 10, .0883, 175), ("6", "10", .33, 35, .0605, 175),
    ("7", "8", .30, 10, .0614, 175), ("8", "9", .44, 10, .1651, 175),
    ("8", "10", .44, 10, .1651, 175), ("9", "11", .02, 768, .0839, 400),
    ("9", "12", .02, 768, .0839, 400), ("10", "11", .02, 768, .0839, 400),
    ("10", "12", .02, 768, .0839, 400), ("11", "13", .40, 11, .0476, 500),
    ("11", "14", .39, 11, .0418, 500), ("12", "13", .40, 11, .0476, 500),
    ("12", "23", .52, 11, .0966, 500), ("13", "23", .49, 11, .0865, 500),
    ("14", "16", .38, 11, .0389, 500), ("15", "16", .33, 11, .0173, 500),
    ("15", "21", .41, 11, .0490, 500), ("15", "21", .41, 11, .0490, 500),
    ("15", "24", .41, 11, .0519, 500), ("16", "17", .35, 11, .0259, 500),
    ("16", "19", .34, 11, .0231, 500), ("17", "18", .32, 11, .0144, 500),
    ("17", "22", .54, 11, .1053, 500), ("18", "21", .35, 11, .0259, 500),
    ("18", "21", .35, 11, .0259, 500), ("19", "20", .38, 11, .0396, 500),
    ("19", "20", .38, 11, .0396, 500), ("20", "23", .34, 11, .0216, 500),
    ("20", "23", .34, 11, .0216, 500), ("21", "22", .45, 11, .0678, 500),
]
RTS_LOADS = {
    "1": 108, "2": 97, "3": 180, "4": 74, "5": 71, "6": 136, "7": 125, "8": 171,
    "9": 175, "10": 195, "13": 265, "14": 194, "15": 317, "16": 100, "18": 333,
    "19": 181, "20": 128,
}


def rts79() -> dict:
    return {
        "schema_version": 1,
        "name": "rts79",
        "description": "24-bus test system at annual peak load (2850 MW), assembled from "
                       "published data; see README.md in this directory.",
        "evaluator": "dcopf",
        "buses": [{"id": str(b), "demand": RTS_LOADS.get(str(b), 0)} for b in range(1, 25)],
        "generators": [
            {"id": f"G{k}", "bus": bus, "capacity": mw, "failure_prob": p}
            for k, (bus, mw, p) in enumerate(RTS_GENERATORS, start=1)
        ],
        "lines": [
            {"id": f"A{k}", "from": f, "to": t, "capacity": rating,
             "susceptance": round(1.0 / x, 10), "failure_prob": unavailability(rate, r)}
            for k, (f, t, rate, r, x, rating) in enumerate(RTS_LINES, start=1)
        ],
    }


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    dump("sys5", sys5())
    dump("test3", test3())
    for seed in (1, 3, 5):
        dump(f"threshold-{seed}", threshold(seed))
    dump("rbts", rbts())
    dump("rbts-rating2x", rbts(2.0))
    dump("rts79", rts79())


if __name__ == "__main__":
    main()
