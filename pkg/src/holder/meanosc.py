"""Dyadic mean oscillation and the BMO-type comparison with the seminorm.

Cubes are anchored at the grid origin with base side equal to the widest box
side. A grid point with index ``i`` belongs to the level-``k`` cube whose
anchor is ``floor(i_a * h_a / base * 2**k)`` on each axis (half-open cubes;
the far boundary of the box is folded into the last cube).

Averages are ``math.fsum`` over members divided by the count, so they do not
depend on traversal order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .funcgrid import GridFunction, vector_norm
from .modulus import Modulus, ModulusCertificate
from .oscillation import seminorm

log = logging.getLogger(__name__)

__all__ = [
    "Cube",
    "CubeLevel",
    "CubeStats",
    "MeyersRecord",
    "TelescopeRecord",
    "cube_indices",
    "max_valid_level",
    "build_cube_stats",
    "bmo_norm",
    "vmo_profiles",
    "averaged_modulus_ratio",
    "meyers_compare",
    "dyadic_chain_reconstruct",
]

SNAP = 1e-9


@dataclass(frozen=True)
class Cube:
    level: int
    anchor: tuple[int, ...]
    sidelength: float

    def lower(self, origin) -> tuple[float, ...]:
        return tuple(o + a * self.sidelength for o, a in zip(origin, self.anchor))


def cube_indices(f_or_grid, level: int, base: float | None = None) -> np.ndarray:
    """Per-point cube anchors at ``level``, shape ``(*grid.shape, dim)``."""
    grid = getattr(f_or_grid, "grid", f_or_grid)
    base = max(grid.widths) if base is None else base
    n = 2 ** level
    out = []
    for a in range(grid.dim):
        pos = np.arange(grid.shape[a]) * grid.spacing[a] / base
        idx = np.minimum(np.floor(pos * n + SNAP).astype(np.int64), n - 1)
        out.append(idx)
    mesh = np.meshgrid(*out, indexing="ij")
    return np.stack(mesh, axis=-1)


def max_valid_level(grid, base: float | None = None, cap: int = 30) -> int:
    """Deepest level at which every occupied cube holds at least two points."""
    best = 0
    for k in range(cap + 1):
        idx = cube_indices(grid, k, base).reshape(-1, grid.dim)
        _, counts = np.unique(idx, axis=0, return_counts=True)
        if np.min(counts) < 2:
            break
        best = k
    return best


@dataclass(frozen=True, eq=False)
class CubeLevel:
    level: int
    sidelength: float
    anchors: np.ndarray  # (K, dim)
    counts: np.ndarray  # (K,)
    averages: np.ndarray  # (K, m)
    mean_osc: np.ndarray  # (K,)
    members: tuple  # per cube, flat point indices

    def lookup(self) -> dict:
        return {tuple(int(v) for v in a): k for k, a in enumerate(self.anchors)}


@dataclass(frozen=True, eq=False)
class CubeStats:
    grid: object
    m: Modulus
    base: float
    levels: tuple[CubeLevel, ...]
    build_log: tuple[str, ...] = field(default=())

    @property
    def min_level(self) -> int:
        return self.levels[0].level

    @property
    def max_level(self) -> int:
        return self.levels[-1].level

    def level(self, k: int) -> CubeLevel:
        return self.levels[k - self.min_level]

    def rows(self):
        """``(level, *anchor, sidelength, count, mean_osc)`` per cube."""
        for lv in self.levels:
            for a, c, o in zip(lv.anchors, lv.counts, lv.mean_osc):
                yield (lv.level, *[int(v) for v in a], lv.sidelength, int(c), float(o))


def build_cube_stats(
    f: GridFunction,
    m: Modulus,
    min_level: int = 0,
    max_level: int | None = None,
) -> CubeStats:
    grid = f.grid
    base = max(grid.widths)
    deepest = max_valid_level(grid, base)
    if max_level is None:
        max_level = deepest
    if min_level < 0 or max_level < min_level:
        raise ValueError(f"invalid level range {min_level}..{max_level}")
    if max_level > deepest:
        raise ValueError(
            f"level {max_level} leaves cubes with fewer than two grid points (deepest valid level is {deepest})"
        )
    flat = f.values.reshape(-1, f.m)
    build_log = []
    levels = []
    for k in range(min_level, max_level + 1):
        side = base / 2 ** k
        idx = cube_indices(grid, k, base).reshape(-1, grid.dim)
        anchors, inverse = np.unique(idx, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(anchors) + 1))
        w = m(side)
        counts, avgs, oscs, members = [], [], [], []
        for c in range(len(anchors)):
            pts = order[bounds[c]:bounds[c + 1]]
            vals = flat[pts]
            cnt = len(pts)
            avg = np.array([math.fsum(vals[:, j]) / cnt for j in range(f.m)])
            dev = vector_norm(vals - avg, f.norms.y)
            counts.append(cnt)
            avgs.append(avg)
            oscs.append((math.fsum(dev) / cnt) / w)
            members.append(pts)
        total = 2 ** (k * grid.dim)
        if len(anchors) < total:
            # cubes of the dyadic tree that miss the (non-square) box entirely
            build_log.append(f"level {k}: {total - len(anchors)} empty cubes omitted")
            log.debug(build_log[-1])
        levels.append(
            CubeLevel(k, side, anchors, np.array(counts), np.array(avgs).reshape(-1, f.m),
                      np.array(oscs), tuple(members))
        )
    return CubeStats(grid, m, base, tuple(levels), tuple(build_log))


def bmo_norm(stats: CubeStats) -> float:
    """Largest weighted mean oscillation over the cube tree."""
    if not stats.levels:
        raise ValueError("empty cube tree")
    return float(max(np.max(lv.mean_osc) for lv in stats.levels))


@dataclass(frozen=True, eq=False)
class VMOProfiles:
    sidelengths: np.ndarray  # ascending
    level_max: np.ndarray
    far_deltas: np.ndarray
    far_values: np.ndarray

    @property
    def small(self):
        return self.sidelengths, self.level_max

    @property
    def large(self):
        return self.sidelengths[::-1], self.level_max[::-1]

    def as_dict(self) -> dict:
        return {
            "sidelengths": self.sidelengths.tolist(),
            "level_max": self.level_max.tolist(),
            "far_deltas": self.far_deltas.tolist(),
            "far_values": self.far_values.tolist(),
        }


def cube_distance_to_origin(stats: CubeStats, lv: CubeLevel, kind: str) -> np.ndarray:
    """Source-norm distance from 0 to each closed cube."""
    origin = np.asarray(stats.grid.origin)
    lo = origin + lv.anchors * lv.sidelength
    hi = lo + lv.sidelength
    gap = np.maximum(np.maximum(lo, -hi), 0.0)
    return vector_norm(gap, kind)


def vmo_profiles(stats: CubeStats, far_deltas=None, kind: str = "l2") -> VMOProfiles:
    """Per-level maxima (ascending sidelength) and far maxima over ``dist(Q, 0) > delta``."""
    if len(stats.levels) < 3:
        raise ValueError("VMO profiles need a cube tree spanning at least three levels")
    lv_sorted = sorted(stats.levels, key=lambda lv: lv.sidelength)
    sides = np.array([lv.sidelength for lv in lv_sorted])
    maxima = np.array([float(np.max(lv.mean_osc)) for lv in lv_sorted])
    dists = np.concatenate([cube_distance_to_origin(stats, lv, kind) for lv in stats.levels])
    oscs = np.concatenate([lv.mean_osc for lv in stats.levels])
    if far_deltas is None:
        top = float(np.max(dists))
        far_deltas = [top * j / 8 for j in range(8)] if top > 0 else [0.0]
    keep_d, keep_v = [], []
    for d in far_deltas:
        mask = dists > d
        if np.any(mask):
            keep_d.append(float(d))
            keep_v.append(float(np.max(oscs[mask])))
    return VMOProfiles(sides, maxima, np.array(keep_d), np.array(keep_v))


def averaged_modulus_ratio(stats: CubeStats, kind: str = "l2") -> float:
    """``max_Q`` of the discrete double average of ``omega(|x - y|)`` over ``omega(side(Q))``."""
    grid = stats.grid
    pts = grid.points().reshape(-1, grid.dim)
    best = 0.0
    for lv in stats.levels:
        w = stats.m(lv.sidelength)
        for mem in lv.members:
            p = pts[mem]
            dist = vector_norm(p[:, None, :] - p[None, :, :], kind)
            val = float(np.mean(stats.m.values(dist))) / w
            best = max(best, val)
    return best


@dataclass(frozen=True)
class MeyersRecord:
    seminorm: float
    bmo: float
    dini_constant: float
    ratio_1: float | None
    ratio_2: float | None
    ceiling_1: float | None = None
    ceiling_2: float | None = None

    @property
    def degenerate(self) -> bool:
        return self.ratio_1 is None

    @property
    def within_ceilings(self) -> bool:
        if self.degenerate:
            return True
        ok1 = self.ceiling_1 is None or self.ratio_1 <= self.ceiling_1
        ok2 = self.ceiling_2 is None or self.ratio_2 <= self.ceiling_2
        return ok1 and ok2

    def as_dict(self) -> dict:
        return {
            "seminorm": self.seminorm,
            "bmo": self.bmo,
            "dini_constant": self.dini_constant,
            "ratio_1": self.ratio_1 if not self.degenerate else "degenerate",
            "ratio_2": self.ratio_2 if not self.degenerate else "degenerate",
            "ceiling_1": self.ceiling_1,
            "ceiling_2": self.ceiling_2,
            "within_ceilings": self.within_ceilings,
        }


def meyers_compare(
    f: GridFunction,
    m: Modulus,
    cert: ModulusCertificate,
    stats: CubeStats | None = None,
    ceilings: tuple[float, float] | None = None,
    semi: float | None = None,
) -> MeyersRecord:
    """``ratio_1 = bmo / seminorm`` and ``ratio_2 = seminorm / (dini * bmo)``.

    A constant ``f`` gives the degenerate record (both ratios ``None``).
    """
    if not cert.dini_finite:
        raise ValueError("the comparison needs a modulus with finite Dini constant")
    stats = stats if stats is not None else build_cube_stats(f, m)
    semi = seminorm(f, m) if semi is None else semi
    bmo = bmo_norm(stats)
    c1, c2 = ceilings if ceilings is not None else (None, None)
    if semi == 0.0 or bmo == 0.0:
        return MeyersRecord(semi, bmo, cert.dini_constant, None, None, c1, c2)
    return MeyersRecord(semi, bmo, cert.dini_constant, bmo / semi,
                        semi / (cert.dini_constant * bmo), c1, c2)


# ---------------------------------------------------------------------------
# telescoping along dyadic chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TelescopeRecord:
    x: tuple[int, ...]
    y: tuple[int, ...]
    ancestor_level: int
    ancestor_ratio: float  # side of the common ancestor over |x - y|
    increments_x: tuple[float, ...]
    increments_y: tuple[float, ...]
    boundary_x: float
    boundary_y: float
    residual: float
    bound_ok: bool  # increments within count(Q_k)/count(Q_{k+1}) * O(Q_k) * omega(side)
    dyadic_factor_ok: bool  # increments within 2**n * O(Q_k) * omega(side)


def _chain(stats: CubeStats, f: GridFunction, idx, k0: int):
    """Averages, counts and oscillation bounds along the chain containing ``idx``."""
    avgs, bounds_disc, bounds_dyad = [], [], []
    n = stats.grid.dim
    prev = None
    for k in range(k0, stats.max_level + 1):
        lv = stats.level(k)
        anchor = tuple(int(v) for v in cube_indices(stats.grid, k, stats.base)[idx])
        c = lv.lookup()[anchor]
        cur = (lv.averages[c], int(lv.counts[c]), float(lv.mean_osc[c]), lv.sidelength)
        if prev is not None:
            avg_p, cnt_p, osc_p, side_p = prev
            scale = osc_p * stats.m(side_p)
            bounds_disc.append(cnt_p / cur[1] * scale)
            bounds_dyad.append(2 ** n * scale)
        avgs.append(cur[0])
        prev = cur
    return avgs, bounds_disc, bounds_dyad


def dyadic_chain_reconstruct(stats: CubeStats, f: GridFunction, x, y) -> TelescopeRecord:
    """Telescoping identity ``f(x) - f(y)`` through dyadic averages.

    Starts at the deepest common ancestor of ``x`` and ``y`` and descends to
    the finest level, adding the boundary terms ``f - <f>_{Q_max}``.
    """
    x = tuple(int(v) for v in np.atleast_1d(x))
    y = tuple(int(v) for v in np.atleast_1d(y))
    k0 = None
    for k in range(stats.max_level, stats.min_level - 1, -1):
        idx = cube_indices(stats.grid, k, stats.base)
        if np.array_equal(idx[x], idx[y]):
            k0 = k
            break
    if k0 is None:
        raise ValueError(f"points {x} and {y} have no common ancestor in the cube tree")
    kind = f.norms.y
    ax, bdx, ddx = _chain(stats, f, x, k0)
    ay, bdy, ddy = _chain(stats, f, y, k0)
    inc_x = [ax[i + 1] - ax[i] for i in range(len(ax) - 1)]
    inc_y = [ay[i + 1] - ay[i] for i in range(len(ay) - 1)]
    fx, fy = f.values[x], f.values[y]
    bx = fx - ax[-1]
    by = fy - ay[-1]
    sx = sum(inc_x, np.zeros(f.m))
    sy = sum(inc_y, np.zeros(f.m))
    # <f>_{Q0} is shared, so f(x) - f(y) = (sum_x + b_x) - (sum_y + b_y)
    recon = (sx + bx) - (sy + by)
    residual = float(vector_norm(recon - (fx - fy), kind))
    nx = [float(vector_norm(v, kind)) for v in inc_x]
    ny = [float(vector_norm(v, kind)) for v in inc_y]

    def within(vals, bounds):
        return all(v <= b * (1 + 1e-12) + 1e-15 for v, b in zip(vals, bounds))

    sep = float(stats.grid.offset_distance(np.subtract(x, y), f.norms.x))
    ratio = stats.level(k0).sidelength / sep if sep > 0 else math.inf
    return TelescopeRecord(
        x=x,
        y=y,
        ancestor_level=k0,
        ancestor_ratio=ratio,
        increments_x=tuple(nx),
        increments_y=tuple(ny),
        boundary_x=float(vector_norm(bx, kind)),
        boundary_y=float(vector_norm(by, kind)),
        residual=residual,
        bound_ok=within(nx, bdx) and within(ny, bdy),
        dyadic_factor_ok=within(nx, ddx) and within(ny, ddy),
    )
