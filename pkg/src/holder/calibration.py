"""Calibration of the Meyers comparison constants.

The comparison between the seminorm and the dyadic mean oscillation holds up
to constants depending on the dimension and the doubling constant. They are
fixed here by one deterministic run over a frozen random-smooth suite:

``ceiling_1 = roundup(margin * max(ratio_1, averaged modulus ratio))``
``ceiling_2 = roundup(margin * max(ratio_2))``

rounded up to three significant digits. The resulting table ships as
``holder/data/calibration.json``; ``holder calibrate`` regenerates it and must
reproduce the pinned bytes.
"""
from __future__ import annotations

import json
from decimal import ROUND_CEILING, Decimal
from functools import lru_cache
from importlib import resources

from . import __version__
from .fixtures import FixtureSpec, generate
from .meanosc import averaged_modulus_ratio, build_cube_stats, meyers_compare
from .modulus import check_admissible, parse_modulus
from .oscillation import seminorm

__all__ = ["SUITE", "MODULUS", "MARGIN", "suite_fixtures", "run_calibration", "dumps", "load_calibration", "ceilings_for"]

MODULUS = "power:0.5"
MARGIN = 1.5
C_PIPE = 2.0

# dimension -> (first seed, count, spacing, modes)
SUITE = {
    1: (0, 20, 1.0 / 256, 8),
    2: (100, 10, 1.0 / 32, 6),
    3: (200, 5, 1.0 / 8, 4),
}


def round_up_sig(x: float, digits: int = 3) -> float:
    d = Decimal(repr(float(x)))
    if d == 0:
        return 0.0
    q = Decimal(1).scaleb(d.adjusted() - digits + 1)
    return float((d / q).to_integral_value(rounding=ROUND_CEILING) * q)


def suite_fixtures(dim: int):
    first, count, h, modes = SUITE[dim]
    for seed in range(first, first + count):
        spec = FixtureSpec(
            "random_smooth",
            {"seed": float(seed), "smoothness": 2.0, "modes": float(modes)},
            lo=0.0,
            hi=1.0,
            spacing=h,
            dim=dim,
        )
        yield generate(spec)


def run_calibration() -> dict:
    m = parse_modulus(MODULUS)
    cert = check_admissible(m)
    dims = {}
    for dim in sorted(SUITE):
        r1 = r2 = avg = 0.0
        n = 0
        for f in suite_fixtures(dim):
            stats = build_cube_stats(f, m)
            rec = meyers_compare(f, m, cert, stats=stats, semi=seminorm(f, m))
            r1 = max(r1, rec.ratio_1)
            r2 = max(r2, rec.ratio_2)
            avg = max(avg, averaged_modulus_ratio(stats, f.norms.x))
            n += 1
        first, count, h, modes = SUITE[dim]
        dims[str(dim)] = {
            "fixtures": n,
            "seeds": [first, first + count - 1],
            "spacing": h,
            "modes": modes,
            "max_ratio_1": r1,
            "max_ratio_2": r2,
            "max_averaged_modulus": avg,
            "ceiling_1": round_up_sig(MARGIN * max(r1, avg)),
            "ceiling_2": round_up_sig(MARGIN * r2),
        }
    return {
        "schema": 1,
        "generator": f"holder {__version__}",
        "modulus": MODULUS,
        "doubling_constant": cert.doubling_constant,
        "dini_constant": cert.dini_constant,
        "margin": MARGIN,
        "suite": "random_smooth on [0,1]^n, smoothness 2",
        "dimensions": dims,
        "pipeline": {
            "c_pipe": C_PIPE,
            "basis": "one epsilon for the truncation step plus one for the mollification step",
        },
    }


def dumps(table: dict) -> str:
    return json.dumps(table, indent=2, sort_keys=True) + "\n"


@lru_cache(maxsize=1)
def _packaged() -> str:
    return resources.files("holder").joinpath("data/calibration.json").read_text()


def load_calibration(path=None) -> dict:
    if path is None:
        return json.loads(_packaged())
    with open(path) as fh:
        return json.load(fh)


def ceilings_for(dim: int, table: dict | None = None) -> tuple[float, float] | None:
    table = table or load_calibration()
    entry = table["dimensions"].get(str(dim))
    if entry is None:
        return None
    return entry["ceiling_1"], entry["ceiling_2"]


def c_pipe(table: dict | None = None) -> float:
    table = table or load_calibration()
    return float(table["pipeline"]["c_pipe"])
