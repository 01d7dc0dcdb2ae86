"""Deterministic fixture families.

Literal syntax is ``family:key=value,...``; for example ``tent:n=2`` or
``random_smooth:seed=7,smoothness=2``. Grid extent and spacing come from
:class:`FixtureSpec` and default per family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .funcgrid import GridFunction, NormSpec, grid_from_box, vector_norm

__all__ = ["FixtureSpec", "FAMILIES", "parse_fixture", "parse_number", "generate"]


def parse_number(text: str) -> float:
    """Float from ``0.25``, ``1/64`` or ``-8``."""
    text = text.strip()
    if "/" in text:
        return float(Fraction(text))
    return float(text)


# family -> (parameter defaults, default box lo, default box hi, default spacing)
FAMILIES: dict[str, dict] = {
    "tent": {"n": 1.0},
    "appendix_a2": {"n": 1.0, "alpha": 0.5},
    "appendix_a3": {"n": 4.0},
    "affine": {"slope": 1.0},
    "sin_decay": {"freq": 1.0, "power": 1.0},
    "random_smooth": {"seed": 0.0, "smoothness": 2.0, "modes": 8.0},
    "constant": {"value": 1.0},
}


def _default_box(family: str, p: dict) -> tuple[float, float, float]:
    if family == "appendix_a2":
        return 0.0, 2.0 * p["n"], 1.0 / 64
    if family == "appendix_a3":
        return -1.0, 1.0, 1.0 / (4.0 * p["n"])
    if family == "sin_decay":
        return -20.0, 20.0, 1.0 / 16
    if family == "random_smooth":
        return 0.0, 1.0, 1.0 / 256
    return -8.0, 8.0, 1.0 / 64


@dataclass(frozen=True)
class FixtureSpec:
    family: str
    params: dict = field(default_factory=dict)
    lo: float | None = None
    hi: float | None = None
    spacing: float | None = None
    dim: int = 1
    norms: NormSpec = field(default_factory=NormSpec)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown fixture family {self.family!r}; choose from {sorted(FAMILIES)}")
        unknown = set(self.params) - set(FAMILIES[self.family])
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)} for family {self.family!r}")
        if self.family in ("appendix_a2", "appendix_a3") and self.dim != 1:
            raise ValueError(f"{self.family} is one-dimensional")

    @property
    def resolved(self) -> dict:
        return {**FAMILIES[self.family], **self.params}

    @property
    def literal(self) -> str:
        p = self.resolved
        body = ",".join(f"{k}={p[k]!r}" for k in sorted(p))
        return f"{self.family}:{body}"

    def box(self) -> tuple[float, float, float]:
        lo, hi, h = _default_box(self.family, self.resolved)
        return (
            lo if self.lo is None else self.lo,
            hi if self.hi is None else self.hi,
            h if self.spacing is None else self.spacing,
        )


def parse_fixture(literal: str, **grid) -> FixtureSpec:
    family, _, rest = literal.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"fixture parameter {item!r} is not key=value")
        try:
            params[key.strip()] = parse_number(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad value for fixture parameter {key!r}: {val!r}") from exc
    return FixtureSpec(family.strip(), params, **grid)


def _random_smooth(pts: np.ndarray, p: dict, lo: float, width: float) -> np.ndarray:
    rng = np.random.default_rng(int(p["seed"]))
    dim = pts.shape[-1]
    out = np.zeros(pts.shape[:-1])
    for k in range(1, int(p["modes"]) + 1):
        direction = rng.normal(size=dim)
        direction *= k / np.linalg.norm(direction)
        amp = rng.normal() / k ** p["smoothness"]
        phase = rng.uniform(0, 2 * math.pi)
        out += amp * np.sin(2 * math.pi * ((pts - lo) @ direction) / width + phase)
    return out


def generate(spec: FixtureSpec) -> GridFunction:
    lo, hi, h = spec.box()
    grid = grid_from_box(lo, hi, h, dim=spec.dim)
    pts = grid.points()
    p = spec.resolved
    r = vector_norm(pts, spec.norms.x)
    fam = spec.family
    if fam == "tent":
        vals = np.maximum(0.0, 1.0 - r / p["n"])
    elif fam == "appendix_a2":
        x = pts[..., 0]
        n = p["n"]
        vals = np.where((x >= 0) & (x <= n), x / n, np.where((x > n) & (x <= 2 * n), (2 * n - x) / n, 0.0))
    elif fam == "appendix_a3":
        x = np.abs(pts[..., 0])
        n = p["n"]
        vals = np.maximum(0.0, 1.0 - n * x) / math.sqrt(n)
    elif fam == "affine":
        vals = p["slope"] * pts[..., 0]
    elif fam == "sin_decay":
        vals = np.sin(p["freq"] * pts[..., 0]) * (1.0 + r) ** (-p["power"])
    elif fam == "random_smooth":
        vals = _random_smooth(pts, p, lo, hi - lo)
    else:
        vals = np.full(grid.shape, p["value"])
    return GridFunction(grid, vals, spec.norms, spec.literal)
