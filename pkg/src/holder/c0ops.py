"""Sup-norm constructions on R^n: soft threshold, coordinate locality, tensor mollification.

With the max norm on the source, coordinatewise soft thresholding makes a
function depend locally on only the coordinates that are not small, and
separable smoothing along chosen axes keeps the sup-norm seminorm under control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .approximators import bump_1d
from .funcgrid import GridFunction, interp, vector_norm
from .maps import SoftThresholdMap, soft_threshold

__all__ = [
    "UnsupportedGeometry",
    "CoordinateSet",
    "LocalityReport",
    "soft_threshold",
    "soft_threshold_map",
    "local_coordinate_dependence_check",
    "tensor_mollify",
]


class UnsupportedGeometry(ValueError):
    """The construction needs the max norm on the source space."""


def _require_linf(f: GridFunction) -> None:
    if f.norms.x != "linf":
        raise UnsupportedGeometry(f"soft thresholding needs the linf source norm, got {f.norms.x!r}")


@dataclass(frozen=True)
class CoordinateSet:
    indices: frozenset

    def __init__(self, indices=()):
        object.__setattr__(self, "indices", frozenset(int(i) for i in indices))

    def check(self, dim: int) -> None:
        if any(i < 0 or i >= dim for i in self.indices):
            raise ValueError(f"axes {sorted(self.indices)} are not all below dim={dim}")

    def project(self, pts: np.ndarray) -> np.ndarray:
        """``P_S``: zero every coordinate outside the set."""
        out = np.zeros_like(pts)
        for i in self.indices:
            out[..., i] = pts[..., i]
        return out


def soft_threshold_map(f: GridFunction, r: float) -> GridFunction:
    """``g = f o Phi`` with ``Phi`` the coordinatewise soft threshold at ``r``."""
    _require_linf(f)
    pts = SoftThresholdMap(r).apply(f.grid.points())
    return f.like(interp(f, pts))


@dataclass(frozen=True)
class LocalityReport:
    r: float
    centers: tuple[tuple[int, ...], ...]
    coordinate_sets: tuple[tuple[int, ...], ...]
    max_deviation: tuple[float, ...]
    checked_points: tuple[int, ...]
    tol: float

    @property
    def violations(self) -> list[int]:
        return [k for k, d in enumerate(self.max_deviation) if d > self.tol]

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "centers": [list(c) for c in self.centers],
            "coordinate_sets": [list(s) for s in self.coordinate_sets],
            "max_deviation": list(self.max_deviation),
            "checked_points": list(self.checked_points),
            "ok": self.ok,
        }


def local_coordinate_dependence_check(g: GridFunction, r: float, centers, tol: float = 1e-10) -> LocalityReport:
    """Check ``g(z) = g(P_S z)`` for grid points ``z`` with ``|z - x|_inf <= r/2``.

    ``S = {a : |x_a| > r/2}``. ``P_S z`` is evaluated by interpolation, so the
    grid needs 0 on every axis for the projected points to be grid points.
    """
    _require_linf(g)
    if g.grid.index_of(np.zeros(g.dim)) is None:
        raise ValueError("the grid must contain the origin")
    pts = g.grid.points()
    flat_pts = pts.reshape(-1, g.dim)
    flat_vals = g.values.reshape(-1, g.m)
    cs, sets, devs, counts = [], [], [], []
    for c in centers:
        c = tuple(int(v) for v in np.atleast_1d(c))
        x = pts[c]
        S = CoordinateSet(a for a in range(g.dim) if abs(x[a]) > r / 2)
        near = np.max(np.abs(flat_pts - x), axis=1) <= r / 2 * (1 + 1e-12)
        z = flat_pts[near]
        proj = interp(g, S.project(z))
        dev = vector_norm(flat_vals[near] - proj, g.norms.y)
        cs.append(c)
        sets.append(tuple(sorted(S.indices)))
        devs.append(float(np.max(dev)) if dev.size else 0.0)
        counts.append(int(near.sum()))
    return LocalityReport(float(r), tuple(cs), tuple(sets), tuple(devs), tuple(counts), tol)


def tensor_mollify(g: GridFunction, eta: float, axes=None) -> GridFunction:
    """Separable smoothing with the 1-D bump along ``axes`` (all axes by default).

    Near the boundary the truncated stencil is renormalised.
    """
    axes = CoordinateSet(range(g.dim)) if axes is None else (
        axes if isinstance(axes, CoordinateSet) else CoordinateSet(axes))
    axes.check(g.dim)
    vals = np.array(g.values)
    for a in sorted(axes.indices):
        h = g.grid.spacing[a]
        if eta < h:
            raise ValueError(f"eta={eta} is below the spacing {h} on axis {a}")
        k = int(math.floor(eta / h + 1e-9))
        w = bump_1d(np.arange(-k, k + 1) * h, eta)
        w = w / w.sum()
        norm = ndimage.correlate1d(np.ones(g.grid.shape), w, axis=a, mode="constant", cval=0.0)
        for c in range(g.m):
            vals[..., c] = ndimage.correlate1d(vals[..., c], w, axis=a, mode="constant", cval=0.0) / norm
    return g.like(vals)
