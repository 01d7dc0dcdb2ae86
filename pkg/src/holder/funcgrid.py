"""Vector-valued samples on regular Cartesian grids.

A :class:`GridFunction` stores values of shape ``(*grid.shape, m)`` on the
points ``origin + index * spacing``. Norms are carried alongside: ``norms.y``
measures target vectors, ``norms.x`` measures source displacements.

Pair distances are always computed from integer index differences,
``norm((i - j) * spacing)``, accumulated in axis order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "Grid",
    "NormSpec",
    "GridFunction",
    "GridParseError",
    "GridDomainError",
    "vector_norm",
    "grid_from_box",
    "load_grid_function",
    "save_grid_function",
    "interp",
    "pair_oscillation",
]

Y_NORMS = ("l2", "linf", "l1")
X_NORMS = ("l2", "linf")


class GridParseError(ValueError):
    """Malformed grid-function file; carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GridDomainError(ValueError):
    """Query point lies outside the grid box."""


def vector_norm(v, kind: str) -> np.ndarray:
    """Norm over the last axis, accumulated component by component.

    The explicit left-to-right accumulation fixes the rounding so that a plain
    Python loop computing the same formula gets identical bits.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == 1:
        return np.abs(v[..., 0])
    if kind == "l2":
        acc = v[..., 0] * v[..., 0]
        for c in range(1, v.shape[-1]):
            acc = acc + v[..., c] * v[..., c]
        return np.sqrt(acc)
    if kind == "linf":
        acc = np.abs(v[..., 0])
        for c in range(1, v.shape[-1]):
            acc = np.maximum(acc, np.abs(v[..., c]))
        return acc
    if kind == "l1":
        acc = np.abs(v[..., 0])
        for c in range(1, v.shape[-1]):
            acc = acc + np.abs(v[..., c])
        return acc
    raise ValueError(f"unknown norm {kind!r}")


@dataclass(frozen=True)
class NormSpec:
    y: str = "l2"
    x: str = "l2"

    def __post_init__(self):
        if self.y not in Y_NORMS:
            raise ValueError(f"target norm must be one of {Y_NORMS}, got {self.y!r}")
        if self.x not in X_NORMS:
            raise ValueError(f"source norm must be one of {X_NORMS}, got {self.x!r}")


@dataclass(frozen=True)
class Grid:
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "spacing", tuple(float(v) for v in self.spacing))
        object.__setattr__(self, "shape", tuple(int(v) for v in self.shape))
        n = len(self.shape)
        if n == 0 or len(self.origin) != n or len(self.spacing) != n:
            raise ValueError("origin, spacing and shape must have the same positive length")
        if any(s < 2 for s in self.shape):
            raise ValueError(f"every axis needs at least two points, got shape {self.shape}")
        if any(not (h > 0 and math.isfinite(h)) for h in self.spacing):
            raise ValueError(f"spacing must be positive and finite, got {self.spacing}")
        if any(not math.isfinite(o) for o in self.origin):
            raise ValueError("origin must be finite")

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def h_min(self) -> float:
        return min(self.spacing)

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(o + (s - 1) * h for o, s, h in zip(self.origin, self.shape, self.spacing))

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple((s - 1) * h for s, h in zip(self.shape, self.spacing))

    def diameter(self, kind: str = "l2") -> float:
        return float(vector_norm(np.array(self.widths), kind))

    def cell_diameter(self, kind: str = "l2") -> float:
        return float(vector_norm(np.array(self.spacing), kind))

    def axis(self, a: int) -> np.ndarray:
        return self.origin[a] + np.arange(self.shape[a]) * self.spacing[a]

    def points(self) -> np.ndarray:
        """All grid points, shape ``(*shape, dim)``."""
        mesh = np.meshgrid(*[self.axis(a) for a in range(self.dim)], indexing="ij")
        return np.stack(mesh, axis=-1)

    def point(self, index) -> np.ndarray:
        index = np.atleast_1d(index)
        return np.array([self.origin[a] + int(index[a]) * self.spacing[a] for a in range(self.dim)])

    def point_norms(self, kind: str) -> np.ndarray:
        return vector_norm(self.points(), kind)

    def offset_distance(self, offsets, kind: str) -> np.ndarray:
        """Distance of integer offsets ``d``: ``norm(d * spacing)``."""
        d = np.asarray(offsets, dtype=float)
        return vector_norm(d * np.asarray(self.spacing), kind)

    def contains(self, pts, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        u = (pts - np.asarray(self.origin)) / np.asarray(self.spacing)
        return np.all((u >= -tol) & (u <= np.asarray(self.shape) - 1 + tol), axis=-1)

    def index_of(self, x, tol: float = 1e-9) -> tuple[int, ...] | None:
        """Index of the grid point at ``x`` or ``None`` if ``x`` is off-grid."""
        u = (np.asarray(x, dtype=float) - np.asarray(self.origin)) / np.asarray(self.spacing)
        r = np.round(u)
        if np.any(np.abs(u - r) > tol) or np.any(r < 0) or np.any(r > np.asarray(self.shape) - 1):
            return None
        return tuple(int(v) for v in r)


def grid_from_box(lo, hi, spacing, dim: int | None = None) -> Grid:
    """Grid on ``[lo, hi]`` per axis; ``hi - lo`` must be a multiple of ``spacing``."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    spacing = np.atleast_1d(np.asarray(spacing, dtype=float))
    n = dim or max(lo.size, hi.size, spacing.size)
    lo, hi, spacing = (np.broadcast_to(v, (n,)) for v in (lo, hi, spacing))
    steps = (hi - lo) / spacing
    shape = np.round(steps).astype(int)
    if np.any(np.abs(steps - shape) > 1e-9 * np.maximum(1.0, np.abs(steps))):
        raise ValueError(f"box widths {tuple(hi - lo)} are not multiples of spacing {tuple(spacing)}")
    return Grid(tuple(lo), tuple(spacing), tuple(shape + 1))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    norms: NormSpec = field(default_factory=NormSpec)
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape == self.grid.shape:
            v = v[..., None]
        if v.shape[:-1] != self.grid.shape or v.ndim != self.grid.dim + 1:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if v.shape[-1] < 1:
            raise ValueError("target dimension must be at least 1")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[-1]

    @property
    def dim(self) -> int:
        return self.grid.dim

    def like(self, values, label: str | None = None) -> "GridFunction":
        return GridFunction(self.grid, values, self.norms, self.label if label is None else label)

    def with_norms(self, y: str | None = None, x: str | None = None) -> "GridFunction":
        norms = NormSpec(y or self.norms.y, x or self.norms.x)
        return replace(self, norms=norms)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        if other.grid != self.grid:
            raise ValueError("grid functions live on different grids")
        return self.like(self.values - other.values)

    def sup_norm(self) -> float:
        return float(np.max(vector_norm(self.values, self.norms.y)))

    def at(self, index) -> np.ndarray:
        return self.values[tuple(np.atleast_1d(index))]


# ---------------------------------------------------------------------------
# CSV-like text format
# ---------------------------------------------------------------------------

_REQUIRED = ("dim", "shape", "origin", "spacing", "ycomp")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",")]


def save_grid_function(f: GridFunction, path) -> None:
    g = f.grid
    lines = [
        f"# dim={g.dim}",
        "# shape=" + ",".join(str(s) for s in g.shape),
        "# origin=" + ",".join(repr(float(v)) for v in g.origin),
        "# spacing=" + ",".join(repr(float(v)) for v in g.spacing),
        f"# ycomp={f.m}",
        f"# label={f.label}",
        f"# norm_y={f.norms.y}",
        f"# norm_x={f.norms.x}",
    ]
    flat = f.values.reshape(-1, f.m)
    lines.extend(",".join(repr(float(v)) for v in row) for row in flat)
    Path(path).write_text("\n".join(lines) + "\n")


def load_grid_function(path) -> GridFunction:
    """Read the ``# key=value`` header followed by row-major value rows."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GridParseError(0, f"cannot read {path}: {exc}") from exc
    header: dict[str, tuple[int, str]] = {}
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if rows:
                raise GridParseError(lineno, "header line after data rows")
            key, sep, val = line[1:].strip().partition("=")
            if not sep:
                raise GridParseError(lineno, f"header line is not key=value: {raw!r}")
            header[key.strip()] = (lineno, val.strip())
            continue
        try:
            row = _floats(line)
        except ValueError:
            raise GridParseError(lineno, f"cannot parse values {raw!r}") from None
        if not all(math.isfinite(v) for v in row):
            raise GridParseError(lineno, "non-finite value")
        rows.append(row)
        rows[-1].append(float(lineno))  # remember the line for later diagnostics

    # a missing key is reported where the header ended
    header_end = int(rows[0][-1]) if rows else len(text.splitlines())
    for key in _REQUIRED:
        if key not in header:
            raise GridParseError(header_end, f"missing header key {key!r}")

    def parse(key, conv):
        lineno, val = header[key]
        try:
            return conv(val)
        except ValueError:
            raise GridParseError(lineno, f"bad value for {key!r}: {val!r}") from None

    dim = parse("dim", int)
    shape = parse("shape", lambda s: tuple(int(t) for t in s.split(",")))
    origin = parse("origin", lambda s: tuple(_floats(s)))
    spacing = parse("spacing", lambda s: tuple(_floats(s)))
    ycomp = parse("ycomp", int)
    for key, vals in (("shape", shape), ("origin", origin), ("spacing", spacing)):
        if len(vals) != dim:
            raise GridParseError(header[key][0], f"{key} has {len(vals)} entries, expected dim={dim}")
    try:
        grid = Grid(origin, spacing, shape)
    except ValueError as exc:
        raise GridParseError(header["shape"][0], str(exc)) from None
    if ycomp < 1:
        raise GridParseError(header["ycomp"][0], "ycomp must be positive")

    for row in rows:
        if len(row) - 1 != ycomp:
            raise GridParseError(int(row[-1]), f"expected {ycomp} values, found {len(row) - 1}")
    if len(rows) != grid.size:
        line = int(rows[-1][-1]) + 1 if rows else len(text.splitlines()) + 1
        raise GridParseError(line, f"expected {grid.size} rows, found {len(rows)}")
    values = np.array([r[:-1] for r in rows], dtype=float).reshape(*shape, ycomp)
    norms = NormSpec(
        header.get("norm_y", (0, "l2"))[1] or "l2",
        header.get("norm_x", (0, "l2"))[1] or "l2",
    )
    return GridFunction(grid, values, norms, header.get("label", (0, ""))[1])


# ---------------------------------------------------------------------------
# interpolation and pair quantities
# ---------------------------------------------------------------------------


def interp(f: GridFunction, pts, snap: float = 1e-9) -> np.ndarray:
    """Multilinear interpolation at points of shape ``(..., dim)``.

    Positions within ``snap`` index units of a grid line are snapped onto it,
    so grid points reproduce stored values exactly.
    """
    g = f.grid
    pts = np.asarray(pts, dtype=float)
    lead = pts.shape[:-1]
    p = pts.reshape(-1, g.dim)
    u = (p - np.asarray(g.origin)) / np.asarray(g.spacing)
    r = np.round(u)
    u = np.where(np.abs(u - r) <= snap, r, u)
    upper = np.asarray(g.shape) - 1
    if np.any(u < 0) or np.any(u > upper):
        raise GridDomainError("interpolation point outside the grid box")
    i0 = np.minimum(np.floor(u).astype(int), upper - 1)
    frac = u - i0
    out = np.zeros((p.shape[0], f.m))
    for corner in range(2 ** g.dim):
        bits = [(corner >> a) & 1 for a in range(g.dim)]
        w = np.ones(p.shape[0])
        idx = []
        for a, b in enumerate(bits):
            w = w * (frac[:, a] if b else 1.0 - frac[:, a])
            idx.append(i0[:, a] + b)
        nz = w != 0
        if np.any(nz):
            out[nz] += w[nz, None] * f.values[tuple(ix[nz] for ix in idx)]
    return out.reshape(*lead, f.m)


def pair_oscillation(f: GridFunction, m, i, j) -> float:
    """``|f(x_i) - f(x_j)| / omega(|x_i - x_j|)`` for grid indices ``i != j``."""
    i = np.atleast_1d(np.asarray(i, dtype=int))
    j = np.atleast_1d(np.asarray(j, dtype=int))
    if np.array_equal(i, j):
        raise ValueError("pair oscillation needs two distinct points")
    num = float(vector_norm(f.values[tuple(i)] - f.values[tuple(j)], f.norms.y))
    dist = float(f.grid.offset_distance(i - j, f.norms.x))
    return num / m(dist)
