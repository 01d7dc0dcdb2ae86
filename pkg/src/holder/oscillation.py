"""Weighted oscillation of grid functions.

Everything here is built from one sweep over integer offsets ``d`` in the
lexicographic half-space. For each offset the grid pairs ``(i + d, i)`` share
a single distance ``|d * spacing|``, so per-offset maxima of ``|f(x) - f(y)|``
are enough to recover the seminorm, banded scale profiles and cumulative
profiles exactly.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .funcgrid import GridDomainError, GridFunction, interp, vector_norm
from .maps import AffineMap, LipschitzMap, SoftThresholdMap, TruncationMap
from .modulus import Modulus, ModulusCertificate, check_admissible

__all__ = [
    "PairTable",
    "SeminormResult",
    "ScaleProfile",
    "VanishingVerdict",
    "PrecomposeReport",
    "pair_table",
    "seminorm",
    "seminorm_scan",
    "lipschitz_constant",
    "interpolant_lipschitz",
    "scale_profile",
    "far_profile",
    "cumulative",
    "default_scales",
    "default_far_deltas",
    "classify_vanishing",
    "lip_precompose_check",
]

MAX_PAIRS = 400_000_000
LIP = Modulus.power(1.0)


def halfspace_offsets(shape) -> np.ndarray:
    """Nonzero integer offsets whose first nonzero entry is positive."""
    ranges = [range(-(s - 1), s) for s in shape]
    out = [d for d in itertools.product(*ranges) if next((v for v in d if v), 0) > 0]
    return np.array(out, dtype=int).reshape(-1, len(shape))


def offset_slices(d, shape):
    """Slices ``A``, ``B`` with ``index(A) - index(B) == d``."""
    a = tuple(slice(k, None) if k >= 0 else slice(None, s + k) for k, s in zip(d, shape))
    b = tuple(slice(None, s - k) if k >= 0 else slice(-k, None) for k, s in zip(d, shape))
    return a, b


def _pair_count(d, shape) -> int:
    return int(np.prod([s - abs(k) for k, s in zip(d, shape)]))


def _select_offsets(offsets, shape, max_pairs, seed):
    counts = np.array([_pair_count(d, shape) for d in offsets], dtype=np.int64)
    if counts.sum() <= max_pairs:
        return offsets, counts, False
    order = np.random.default_rng(seed).permutation(len(offsets))
    keep = order[np.cumsum(counts[order]) <= max_pairs]
    keep.sort()
    return offsets[keep], counts[keep], True


@dataclass(frozen=True, eq=False)
class PairTable:
    """Per-offset summary of all grid pairs."""

    offsets: np.ndarray
    dist: np.ndarray
    omega: np.ndarray
    maxnum: np.ndarray
    count: np.ndarray
    argmax: np.ndarray
    shape: tuple[int, ...]
    sampled: bool = False

    @property
    def ratio(self) -> np.ndarray:
        return self.maxnum / self.omega

    @property
    def pairs(self) -> int:
        return int(self.count.sum())

    def pair_of(self, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Grid indices ``(x, y)`` of the maximising pair for offset ``k``."""
        d = self.offsets[k]
        sub = [s - abs(int(v)) for v, s in zip(d, self.shape)]
        loc = np.unravel_index(int(self.argmax[k]), sub)
        x = tuple(int(l) + max(int(v), 0) for l, v in zip(loc, d))
        y = tuple(int(l) + max(-int(v), 0) for l, v in zip(loc, d))
        return x, y


def pair_table(f: GridFunction, m: Modulus, max_pairs: int = MAX_PAIRS, seed: int = 0) -> PairTable:
    shape = f.grid.shape
    offsets, counts, sampled = _select_offsets(halfspace_offsets(shape), shape, max_pairs, seed)
    dist = f.grid.offset_distance(offsets, f.norms.x)
    omega = m.values(dist)
    maxnum = np.empty(len(offsets))
    argmax = np.empty(len(offsets), dtype=np.int64)
    v = f.values
    for k, d in enumerate(offsets):
        a, b = offset_slices(d, shape)
        num = vector_norm(v[a] - v[b], f.norms.y)
        j = int(np.argmax(num))
        argmax[k] = j
        maxnum[k] = num.flat[j]
    return PairTable(offsets, dist, omega, maxnum, counts, argmax, shape, sampled)


@dataclass(frozen=True)
class SeminormResult:
    value: float
    argmax: tuple[tuple[int, ...], tuple[int, ...]] | None
    pairs: int
    sampled: bool

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [list(p) for p in self.argmax] if self.argmax else None,
            "pairs": self.pairs,
            "sampled": self.sampled,
        }


def seminorm_scan(f: GridFunction, m: Modulus, table: PairTable | None = None) -> SeminormResult:
    """Seminorm together with its maximising pair and pair count."""
    t = table if table is not None else pair_table(f, m)
    if len(t.offsets) == 0:
        return SeminormResult(0.0, None, 0, t.sampled)
    r = t.ratio
    k = int(np.argmax(r))
    return SeminormResult(float(r[k]), t.pair_of(k), t.pairs, t.sampled)


def seminorm(f: GridFunction, m: Modulus) -> float:
    """``sup |f(x) - f(y)| / omega(|x - y|)`` over distinct grid pairs."""
    return seminorm_scan(f, m).value


def lipschitz_constant(f: GridFunction) -> float:
    """Largest difference quotient over grid pairs."""
    return seminorm(f, LIP)


def interpolant_lipschitz(f: GridFunction) -> float:
    """Lipschitz bound for the multilinear interpolant of ``f``.

    Per-axis bounds ``L_a`` come from neighbouring differences; they combine
    as ``sqrt(sum L_a^2)`` for the Euclidean source norm and ``sum L_a`` for
    the max norm.
    """
    la = []
    for a, h in enumerate(f.grid.spacing):
        diff = np.diff(f.values, axis=a)
        la.append(float(np.max(vector_norm(diff, f.norms.y))) / h)
    la = np.array(la)
    if f.norms.x == "l2":
        return float(np.sqrt(np.sum(la * la)))
    return float(np.sum(la))


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScaleProfile:
    """Profile values keyed by scale; scales without pairs are omitted."""

    kind: str
    scales: np.ndarray
    values: np.ndarray
    pairs: np.ndarray
    band: float | None = None
    mode: str | None = None
    omitted: tuple[float, ...] = ()

    def __len__(self):
        return len(self.scales)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "band": self.band,
            "mode": self.mode,
            "scales": [float(s) for s in self.scales],
            "values": [float(v) for v in self.values],
            "pairs": [int(p) for p in self.pairs],
            "omitted": [float(s) for s in self.omitted],
        }

    def rows(self):
        return zip(self.scales.tolist(), self.values.tolist(), self.pairs.tolist())


def default_scales(f: GridFunction) -> np.ndarray:
    """``h_min * 2**k`` up to the diameter, ending exactly at the diameter."""
    h = f.grid.h_min
    diam = f.grid.diameter(f.norms.x)
    out = []
    s = h
    while s < diam * (1 - 1e-12):
        out.append(s)
        s *= 2.0
    out.append(diam)
    return np.array(out)


def default_far_deltas(f: GridFunction) -> np.ndarray:
    """Dyadic radii from ``1/16`` (or the grid spacing) up to the box's far corner."""
    r_max = float(np.max(f.grid.point_norms(f.norms.x)))
    out = []
    s = min(1.0 / 16.0, f.grid.h_min)
    while s < r_max:
        out.append(s)
        s *= 2.0
    return np.array(out)


def scale_profile(
    f: GridFunction,
    m: Modulus,
    scales=None,
    band: float = 0.25,
    table: PairTable | None = None,
) -> ScaleProfile:
    """Largest pair ratio with distance in ``[delta (1 - band), delta (1 + band)]``."""
    if not 0 < band <= 0.5:
        raise ValueError(f"band must lie in (0, 0.5], got {band}")
    scales = default_scales(f) if scales is None else np.asarray(scales, dtype=float)
    if np.any(scales <= 0):
        raise ValueError("scales must be positive")
    t = table if table is not None else pair_table(f, m)
    ratio = t.ratio
    keep, vals, counts, omitted = [], [], [], []
    for s in scales:
        mask = (t.dist >= s * (1 - band)) & (t.dist <= s * (1 + band))
        if not np.any(mask):
            omitted.append(float(s))
            continue
        keep.append(s)
        vals.append(float(np.max(ratio[mask])))
        counts.append(int(t.count[mask].sum()))
    return ScaleProfile("scale", np.array(keep), np.array(vals), np.array(counts, dtype=np.int64),
                        band=band, omitted=tuple(omitted))


def cumulative(table: PairTable, s: float, lip: float | None = None, m: Modulus | None = None) -> float:
    """``sup`` of pair ratios over distances ``<= s``.

    With ``lip`` and ``m`` given, pairs closer than the grid spacing are
    accounted for through the interpolant bound ``lip * d / omega(d)``.
    """
    mask = table.dist <= s
    val = float(np.max(table.ratio[mask])) if np.any(mask) else 0.0
    if lip is not None and m is not None and lip > 0:
        top = min(s, float(np.min(table.dist))) if len(table.dist) else s
        d = top * np.power(2.0, -np.arange(0, 400) / 8.0)
        w = m.values(d)
        ok = w > 0
        if np.any(ok):
            val = max(val, float(np.max(lip * d[ok] / w[ok])))
    return val


def far_profile(
    f: GridFunction,
    m: Modulus,
    deltas=None,
    mode: str = "min",
) -> ScaleProfile:
    """Largest pair ratio over pairs away from the origin.

    ``mode="min"`` keeps pairs with ``min(|x|, |y|) > delta``; ``mode="max"``
    keeps pairs with ``max(|x|, |y|) > delta``.
    """
    if mode not in ("min", "max"):
        raise ValueError(f"mode must be 'min' or 'max', got {mode!r}")
    deltas = default_far_deltas(f) if deltas is None else np.asarray(deltas, dtype=float)
    if np.any(deltas < 0):
        raise ValueError("far radii must be non-negative")
    deltas = np.unique(deltas)
    K = len(deltas)
    best = np.full(K + 1, -np.inf)
    counts = np.zeros(K + 1, dtype=np.int64)
    shape = f.grid.shape
    norms = f.grid.point_norms(f.norms.x)
    pick = np.minimum if mode == "min" else np.maximum
    offsets = halfspace_offsets(shape)
    omegas = m.values(f.grid.offset_distance(offsets, f.norms.x))
    v = f.values
    for d, w in zip(offsets, omegas):
        a, b = offset_slices(d, shape)
        ratio = (vector_norm(v[a] - v[b], f.norms.y) / w).ravel()
        key = pick(norms[a], norms[b]).ravel()
        # pair qualifies for deltas[k] iff key > deltas[k], i.e. k < bucket
        bucket = np.searchsorted(deltas, key, side="left")
        np.maximum.at(best, bucket, ratio)
        counts += np.bincount(bucket, minlength=K + 1)
    tail_best = np.maximum.accumulate(best[::-1])[::-1][1:]
    tail_count = np.cumsum(counts[::-1])[::-1][1:]
    has = tail_count > 0
    return ScaleProfile(
        "far",
        deltas[has],
        tail_best[has],
        tail_count[has],
        mode=mode,
        omitted=tuple(float(x) for x in deltas[~has]),
    )


# ---------------------------------------------------------------------------
# vanishing classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VanishingVerdict:
    small: bool
    large: bool
    far: bool
    thresholds: tuple[float, float, float]
    scale: ScaleProfile
    far_profile: ScaleProfile
    seminorm: float

    @property
    def evidence(self) -> dict:
        return {
            "small_value": float(self.scale.values[0]) if len(self.scale) else None,
            "small_scale": float(self.scale.scales[0]) if len(self.scale) else None,
            "large_value": float(self.scale.values[-1]) if len(self.scale) else None,
            "large_scale": float(self.scale.scales[-1]) if len(self.scale) else None,
            "far_value": float(self.far_profile.values[-1]) if len(self.far_profile) else None,
            "far_delta": float(self.far_profile.scales[-1]) if len(self.far_profile) else None,
        }

    def as_dict(self) -> dict:
        return {
            "small": self.small,
            "large": self.large,
            "far": self.far,
            "thresholds": list(self.thresholds),
            "evidence": self.evidence,
        }


def classify_vanishing(
    f: GridFunction,
    m: Modulus,
    thresholds=(0.1, 0.1, 0.1),
    scales=None,
    deltas=None,
    band: float = 0.25,
    table: PairTable | None = None,
) -> VanishingVerdict:
    """Decide the three vanishing conditions from the finite profiles.

    The small-scale condition is read at the finest reported scale, the
    large-scale condition at the coarsest, and the far condition at the
    largest radius that still has pairs in min-mode.
    """
    eps_small, eps_large, eps_far = (float(v) for v in thresholds)
    t = table if table is not None else pair_table(f, m)
    prof = scale_profile(f, m, scales, band, table=t)
    far = far_profile(f, m, deltas, mode="min")
    small = bool(len(prof)) and prof.values[0] <= eps_small
    large = bool(len(prof)) and prof.values[-1] <= eps_large
    far_ok = bool(len(far)) and far.values[-1] <= eps_far
    return VanishingVerdict(
        small=bool(small),
        large=bool(large),
        far=bool(far_ok),
        thresholds=(eps_small, eps_large, eps_far),
        scale=prof,
        far_profile=far,
        seminorm=seminorm_scan(f, m, t).value,
    )


# ---------------------------------------------------------------------------
# precomposition with Lipschitz maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrecomposeReport:
    tau: dict
    lipschitz: float
    constant: float
    scales: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    clipped: bool
    ok: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "ok", bool(np.all(self.lhs <= self.rhs * (1 + 1e-12) + 1e-15)))

    def as_dict(self) -> dict:
        return {
            "tau": self.tau,
            "lipschitz": self.lipschitz,
            "constant": self.constant,
            "scales": self.scales.tolist(),
            "lhs": self.lhs.tolist(),
            "rhs": self.rhs.tolist(),
            "clipped": self.clipped,
            "ok": self.ok,
        }


def compose(f: GridFunction, tau: LipschitzMap, clip: bool = True) -> tuple[GridFunction, bool]:
    """Sample ``f o tau`` on the grid of ``f`` via multilinear interpolation.

    Image points outside the box are clipped into it when ``clip`` is set; the
    second return value reports whether that happened.
    """
    pts = tau.apply(f.grid.points())
    inside = f.grid.contains(pts.reshape(-1, f.dim))
    clipped = not bool(np.all(inside))
    if clipped:
        if not clip:
            raise GridDomainError("map sends grid points outside the box")
        warnings.warn("image of the map leaves the grid box; clipping into the box", stacklevel=2)
        pts = np.clip(pts, np.asarray(f.grid.origin), np.asarray(f.grid.upper))
    return f.like(interp(f, pts)), clipped


def lip_precompose_check(
    f: GridFunction,
    tau: LipschitzMap,
    m: Modulus,
    scales=None,
    band: float = 0.25,
    cert: ModulusCertificate | None = None,
) -> PrecomposeReport:
    """Compare cumulative profiles of ``f o tau`` and ``f``.

    Asserts ``eps_g(s) <= C * eps_f(L s + 2 diam_cell)`` with ``s = delta (1 + band)``
    and ``C = C_db ** ceil(log2 L)``. In dimension one with concave ``omega``
    the piecewise-linear interpolant obeys this exactly; in higher dimension
    ``C`` is enlarged by ``sup_t omega(L t + 2 diam_cell) / omega(t)``.
    """
    if not isinstance(tau, (TruncationMap, SoftThresholdMap, AffineMap)):
        raise TypeError(f"map {tau!r} has no certified Lipschitz constant")
    cert = cert or check_admissible(m)
    L = tau.lipschitz(f.norms.x)
    # the tolerance absorbs the rounding pad that certified constants carry
    C = cert.doubling_constant ** max(0, math.ceil(math.log2(L) - 1e-9))
    g, clipped = compose(f, tau)
    scales = default_scales(f) if scales is None else np.asarray(scales, dtype=float)
    tf = pair_table(f, m)
    tg = pair_table(g, m)
    cell = 2.0 * f.grid.cell_diameter(f.norms.x)
    lhs, rhs = [], []
    for delta in scales:
        s = delta * (1 + band)
        c = C
        if f.dim > 1:
            t = tg.dist[tg.dist <= s]
            if t.size:
                c = max(C, float(np.max(m.values(L * t + cell) / m.values(t))))
        lhs.append(cumulative(tg, s))
        rhs.append(c * cumulative(tf, L * s + cell))
    return PrecomposeReport(tau.describe(), L, C, scales, np.array(lhs), np.array(rhs), clipped)
