"""Moduli of continuity and their admissibility certificates.

A modulus is a continuous non-decreasing map ``omega`` on ``[0, inf)`` with
``omega(0) = 0``. Three families are supported:

``power:alpha``
    ``t ** alpha`` for ``0 < alpha <= 1``.
``log:c=C``
    ``C / log(1/t)`` for ``t <= 1/e`` continued linearly as ``C * e * t``
    beyond. Continuous and C^1 at the junction; not Dini-integrable.
``table:path.csv[,extrapolate]``
    Log-log interpolation between positive knots read from a CSV with header
    ``t,omega``.

All evaluation goes through one vectorised numpy path, so the scalar call
``m(t)`` returns exactly the same bits as ``m(np.array([t]))[0]``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "Modulus",
    "ModulusCertificate",
    "ModulusDomainError",
    "ModulusRangeError",
    "parse_modulus",
    "check_admissible",
    "dini_integral",
]


class ModulusDomainError(ValueError):
    """Raised when a modulus is evaluated at a negative or NaN argument."""


class ModulusRangeError(ValueError):
    """Raised when a tabulated modulus is evaluated beyond its last knot."""


@dataclass(frozen=True)
class Modulus:
    kind: str
    alpha: float = 1.0
    c: float = 1.0
    knots_t: tuple[float, ...] = ()
    knots_omega: tuple[float, ...] = ()
    extrapolate: bool = False
    source: str = ""

    def __post_init__(self):
        if self.kind == "power":
            if not (0.0 < self.alpha <= 1.0):
                raise ValueError(f"power exponent must lie in (0, 1], got {self.alpha}")
        elif self.kind == "log":
            if not (self.c > 0 and math.isfinite(self.c)):
                raise ValueError(f"log modulus constant must be positive, got {self.c}")
        elif self.kind == "table":
            t = np.asarray(self.knots_t, dtype=float)
            w = np.asarray(self.knots_omega, dtype=float)
            if t.size < 2 or t.size != w.size:
                raise ValueError("a tabulated modulus needs at least two (t, omega) knots")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
                raise ValueError("tabulated knots must be finite")
            if np.any(t <= 0) or np.any(np.diff(t) <= 0):
                raise ValueError("tabulated t values must be positive and strictly increasing")
            if np.any(w <= 0) or np.any(np.diff(w) < 0):
                raise ValueError("tabulated omega values must be positive and non-decreasing")
        else:
            raise ValueError(f"unknown modulus kind {self.kind!r}")

    # constructors -----------------------------------------------------------
    @classmethod
    def power(cls, alpha: float) -> "Modulus":
        return cls(kind="power", alpha=float(alpha))

    @classmethod
    def log(cls, c: float = 1.0) -> "Modulus":
        return cls(kind="log", c=float(c))

    @classmethod
    def table(cls, t, omega, extrapolate: bool = False, source: str = "") -> "Modulus":
        return cls(
            kind="table",
            knots_t=tuple(float(v) for v in t),
            knots_omega=tuple(float(v) for v in omega),
            extrapolate=bool(extrapolate),
            source=source,
        )

    # evaluation -------------------------------------------------------------
    @property
    def literal(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha!r}"
        if self.kind == "log":
            return f"log:c={self.c!r}"
        suffix = ",extrapolate" if self.extrapolate else ""
        return f"table:{self.source or '<inline>'}{suffix}"

    @property
    def t_max(self) -> float:
        """Largest argument at which evaluation is defined."""
        if self.kind == "table" and not self.extrapolate:
            return self.knots_t[-1]
        return math.inf

    def values(self, t) -> np.ndarray:
        """Vectorised evaluation; the single code path behind every call."""
        t = np.asarray(t, dtype=float)
        if np.any(np.isnan(t)) or np.any(t < 0):
            raise ModulusDomainError("modulus evaluated at a negative or NaN argument")
        out = np.zeros(t.shape, dtype=float)
        pos = t > 0
        tp = t[pos]
        if self.kind == "power":
            out[pos] = np.power(tp, self.alpha)
        elif self.kind == "log":
            small = tp <= math.exp(-1.0)
            res = np.empty_like(tp)
            res[small] = self.c / -np.log(tp[small])
            res[~small] = self.c * math.e * tp[~small]
            out[pos] = res
        else:
            out[pos] = self._table_values(tp)
        return out

    def _table_values(self, tp: np.ndarray) -> np.ndarray:
        lt = np.log(np.asarray(self.knots_t))
        lw = np.log(np.asarray(self.knots_omega))
        if not self.extrapolate and np.any(tp > self.knots_t[-1]):
            raise ModulusRangeError(
                f"tabulated modulus evaluated beyond its last knot t={self.knots_t[-1]!r}"
            )
        x = np.log(tp)
        y = np.interp(x, lt, lw)
        lo = x < lt[0]
        if np.any(lo):
            s0 = (lw[1] - lw[0]) / (lt[1] - lt[0])
            y[lo] = lw[0] + s0 * (x[lo] - lt[0])
        hi = x > lt[-1]
        if np.any(hi):
            s1 = (lw[-1] - lw[-2]) / (lt[-1] - lt[-2])
            y[hi] = lw[-1] + s1 * (x[hi] - lt[-1])
        return np.exp(y)

    def __call__(self, t):
        if np.ndim(t) == 0:
            return float(self.values(np.array([t], dtype=float))[0])
        return self.values(t)


def _load_table(path: str, extrapolate: bool) -> Modulus:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValueError(f"cannot read modulus table {path!r}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows or [c.strip() for c in rows[0]] != ["t", "omega"]:
        raise ValueError(f"modulus table {path!r} must start with header 't,omega'")
    ts, ws = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns")
        try:
            ts.append(float(row[0]))
            ws.append(float(row[1]))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return Modulus.table(ts, ws, extrapolate=extrapolate, source=path)


def parse_modulus(literal: str) -> Modulus:
    """Parse ``power:0.5``, ``log:c=1`` or ``table:path.csv[,extrapolate]``."""
    kind, _, rest = literal.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "power":
            return Modulus.power(float(rest))
        if kind == "log":
            c = 1.0
            if rest.strip():
                key, _, val = rest.partition("=")
                if key.strip() != "c":
                    raise ValueError(f"unknown log-modulus parameter {key!r}")
                c = float(val)
            return Modulus.log(c)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad modulus literal {literal!r}: {exc}") from exc
    if kind == "table":
        path, _, flag = rest.partition(",")
        if flag and flag.strip() != "extrapolate":
            raise ValueError(f"bad modulus literal {literal!r}: unknown flag {flag!r}")
        return _load_table(path.strip(), extrapolate=bool(flag))
    raise ValueError(f"bad modulus literal {literal!r}: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Dini integral
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(32)


def dini_integral(m: Modulus, s: float, rtol: float = 1e-13, max_u: float | None = None) -> float:
    """Return ``int_0^s omega(t) dt / t``, or ``inf`` if it does not settle.

    Substituting ``t = s * exp(-u)`` gives ``int_0^inf omega(s e^{-u}) du``,
    integrated with Gauss-Legendre on the dyadic panels [0,1], [1,2], [2,4], ...
    """
    if s <= 0:
        return 0.0
    if max_u is None:
        # below t ~ 1e-300 the integrand is no longer representable
        max_u = math.log(s) + 690.0
    total = 0.0
    a, b = 0.0, 1.0
    last = math.inf
    while a < max_u:
        b = min(b, max_u)
        u = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        part = 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, m.values(s * np.exp(-u))))
        total += part
        last = part
        if part <= rtol * total:
            return total
        a, b = b, 2.0 * b
    # reached the representable floor; accept only if the tail is negligible
    if last <= 1e-6 * total:
        return total
    return math.inf


# ---------------------------------------------------------------------------
# Admissibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModulusCertificate:
    literal: str
    doubling_constant: float
    dini_constant: float
    doubling: bool
    coercive_zero: bool
    coercive_infty: bool
    sublinear_zero: bool
    sample_range: tuple[float, float]
    probe_trace: tuple[str, ...] = field(default=(), compare=False)

    @property
    def dini_finite(self) -> bool:
        return math.isfinite(self.dini_constant)

    @property
    def admissible(self) -> bool:
        return self.doubling and self.coercive_zero and self.coercive_infty and self.sublinear_zero

    def as_dict(self) -> dict:
        return {
            "literal": self.literal,
            "doubling_constant": self.doubling_constant,
            "dini_constant": self.dini_constant,
            "doubling": self.doubling,
            "coercive_zero": self.coercive_zero,
            "coercive_infty": self.coercive_infty,
            "sublinear_zero": self.sublinear_zero,
            "sample_range": list(self.sample_range),
            "probe_trace": list(self.probe_trace),
        }


def _probe_limit(m: Modulus, ts: np.ndarray, f, target: str, tol: float, trace: list) -> bool:
    """Probe ``f(t, omega(t))`` along ``ts`` and decide whether it tends to ``target``."""
    ts = ts[ts <= m.t_max]
    if ts.size < 4:
        trace.append(f"{target}: inconclusive, fewer than four probes in range")
        return False
    vals = f(ts, m.values(ts))
    diffs = np.diff(vals)
    monotone = bool(np.all(diffs <= 0) or np.all(diffs >= 0))
    last = float(vals[-1])
    if target == "zero":
        ok = monotone and abs(last) <= tol
    else:
        ok = monotone and last >= 1.0 / tol
    trace.append(f"{target}: last probe t={float(ts[-1])!r} value={last!r} monotone={monotone}")
    return bool(ok)


def check_admissible(m: Modulus, depth: int = 40, limit_tol: float = 0.05) -> ModulusCertificate:
    """Estimate the doubling and Dini constants and probe the limit conditions.

    Limits are probed on ``2**k`` for ``k = 1..depth``. A limit counts as
    established when the probe values are monotone and the final probe lies
    within ``limit_tol`` of the target (relative to ``omega(1)`` where that
    matters). Probes beyond a non-extrapolating table are inconclusive.
    """
    trace: list[str] = []
    k = np.arange(1, depth + 1, dtype=float)
    down = np.power(2.0, -k)
    up = np.power(2.0, k)
    w1 = m(1.0) if m.t_max >= 1.0 else m(m.t_max)

    coercive_zero = _probe_limit(m, down, lambda t, w: w / w1, "zero", limit_tol, trace)
    trace[-1] = "omega(0+) -> 0 " + trace[-1]
    sublinear_zero = _probe_limit(m, down, lambda t, w: t / w, "zero", limit_tol, trace)
    trace[-1] = "t/omega(t) at 0+ -> 0 " + trace[-1]
    coercive_infty = _probe_limit(m, up, lambda t, w: w / w1, "infinity", limit_tol, trace)
    trace[-1] = "omega(t) at infinity -> inf " + trace[-1]

    # doubling on a quarter-octave grid
    j = np.arange(-4 * depth, 4 * depth + 1, dtype=float)
    ts = np.power(2.0, j / 4.0)
    ts = ts[2.0 * ts <= m.t_max]
    if ts.size == 0:
        doubling_constant = math.inf
        sample_range = (math.nan, math.nan)
    else:
        doubling_constant = float(np.max(m.values(2.0 * ts) / m.values(ts)))
        sample_range = (float(ts[0]), float(ts[-1]))
    doubling = math.isfinite(doubling_constant)
    trace.append(f"doubling sup over {ts.size} samples = {doubling_constant!r}")

    dini = 0.0
    s_grid = np.power(2.0, np.arange(-depth, depth + 1, dtype=float))
    s_grid = s_grid[s_grid <= m.t_max]
    for s in s_grid:
        val = dini_integral(m, float(s))
        if not math.isfinite(val):
            dini = math.inf
            trace.append(f"Dini integral diverges at s={float(s)!r}")
            break
        dini = max(dini, val / m(float(s)))
    else:
        trace.append(f"Dini constant sup over {s_grid.size} radii = {dini!r}")

    return ModulusCertificate(
        literal=m.literal,
        doubling_constant=doubling_constant,
        dini_constant=dini,
        doubling=doubling,
        coercive_zero=coercive_zero,
        coercive_infty=coercive_infty,
        sublinear_zero=sublinear_zero,
        sample_range=sample_range,
        probe_trace=tuple(trace),
    )
