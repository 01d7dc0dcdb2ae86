"""Constructive approximation operators with certified bounds.

* radial truncation ``tau_M`` and its Lipschitz/contraction certificates,
* parameter selection ``(r, R, M)`` for the truncation step,
* mollification with a normalised polynomial bump,
* the truncate-then-mollify pipeline,
* Lipschitz envelopes (inf-convolution) with optional localisation,
* a convergence check for uniform + bounded-Lipschitz sequences,
* multiplication by a smooth radial cut-off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .funcgrid import GridFunction, vector_norm
from .maps import TruncationMap
from .modulus import Modulus, ModulusCertificate, check_admissible
from .oscillation import (
    LIP,
    compose,
    cumulative,
    default_far_deltas,
    far_profile,
    interpolant_lipschitz,
    offset_slices,
    pair_table,
    seminorm,
)

__all__ = [
    "PlanError",
    "InvariantViolation",
    "ApproxPlan",
    "MollifierSpec",
    "BumpSpec",
    "EnvelopeParams",
    "TruncationCertificate",
    "PipelineResult",
    "ConvergenceReport",
    "truncation_apply",
    "truncation_certify",
    "contraction_ratio",
    "select_parameters",
    "truncate_compose",
    "mollifier_weights",
    "mollify",
    "pipeline_vc_to_smooth",
    "envelope_params",
    "lipschitz_envelope",
    "uniform_lip_convergence_check",
    "theta",
    "bump_values",
    "bump_multiply",
    "bump_certificate",
]

C_PIPE_DEFAULT = 2.0


class PlanError(RuntimeError):
    """No admissible parameter for the named clause within grid resolution or extent."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"{clause}: {message}")
        self.clause = clause


class InvariantViolation(RuntimeError):
    """A certified bound failed to hold."""


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


def truncation_apply(t: TruncationMap, x) -> np.ndarray:
    return t.apply(np.asarray(x, dtype=float))


def _qualifying_radius(t: TruncationMap, R: float) -> float:
    """Smallest norm beyond which images have norm below ``R`` (for ``R < M``)."""
    lo, hi = t.M, 2.0 * t.M
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t.image_norm(mid) < R:
            hi = mid
        else:
            lo = mid
    return hi


def contraction_ratio(t: TruncationMap, x, z, R: float) -> tuple[bool, float, float]:
    """``(qualifies, |tau x - tau z| / |x - z|, 5 R / sqrt(M))`` for one pair.

    A pair qualifies when ``M > R >= 1``, ``|x| >= M`` and both images lie in
    the open ball ``B(0, R)``.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    tx, tz = t.apply(x), t.apply(z)
    q = (
        t.M > R >= 1
        and float(vector_norm(x, t.norm)) >= t.M
        and float(vector_norm(tx, t.norm)) < R
        and float(vector_norm(tz, t.norm)) < R
    )
    ratio = float(vector_norm(tx - tz, t.norm)) / float(vector_norm(x - z, t.norm))
    return bool(q), ratio, 5.0 * R / math.sqrt(t.M)


@dataclass(frozen=True)
class TruncationCertificate:
    M: float
    norm: str
    samples: int
    lipschitz_max: float
    lipschitz_ok: bool
    contraction: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return self.lipschitz_ok and all(c["status"] != "fail" for c in self.contraction)

    def as_dict(self) -> dict:
        return {
            "M": self.M,
            "norm": self.norm,
            "samples": self.samples,
            "lipschitz_max": self.lipschitz_max,
            "lipschitz_ok": self.lipschitz_ok,
            "contraction": list(self.contraction),
            "ok": self.ok,
        }


def _random_points(rng, k, dim, rmax, norm):
    d = rng.normal(size=(k, dim))
    d /= vector_norm(d, norm)[:, None]
    return d * rng.uniform(0, rmax, size=(k, 1))


def truncation_certify(
    t: TruncationMap,
    samples: int = 10_000,
    seed: int = 0,
    dim: int = 2,
    radii=(1.0, 2.0, 5.0, 10.0, 20.0, 50.0),
) -> TruncationCertificate:
    """Seeded random check of the 5-Lipschitz bound and the contraction bound."""
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    rng = np.random.default_rng(seed)
    M = t.M
    # half the pairs anywhere in B(0, 3M), half as close pairs to probe local slopes
    half = samples // 2
    x = _random_points(rng, samples, dim, 3.0 * M, t.norm)
    z = np.empty_like(x)
    z[:half] = _random_points(rng, half, dim, 3.0 * M, t.norm)
    z[half:] = x[half:] + _random_points(rng, samples - half, dim, 1e-3 * M, t.norm)
    gap = vector_norm(x - z, t.norm)
    keep = gap > 0
    ratio = vector_norm(t.apply(x) - t.apply(z), t.norm)[keep] / gap[keep]
    lip_max = float(np.max(ratio))

    clauses = []
    for R in radii:
        if not (M > R >= 1):
            continue
        rho = _qualifying_radius(t, R)
        xs = _random_points(rng, samples, dim, 1.0, t.norm)
        xs = xs / vector_norm(xs, t.norm)[:, None]
        xs *= rng.uniform(rho, 3.0 * M, size=(samples, 1))
        zs = np.empty_like(xs)
        third = samples // 3
        # partners: far-out points, near neighbours, and points inside B(0, R)
        far = _random_points(rng, third, dim, 1.0, t.norm)
        far = far / vector_norm(far, t.norm)[:, None] * rng.uniform(rho, 3.0 * M, size=(third, 1))
        zs[:third] = far
        zs[third:2 * third] = xs[third:2 * third] + _random_points(rng, third, dim, 0.01 * M, t.norm)
        rest = samples - 2 * third
        zs[2 * third:] = _random_points(rng, rest, dim, R, t.norm)
        tx, tz = t.apply(xs), t.apply(zs)
        gap = vector_norm(xs - zs, t.norm)
        q = (
            (vector_norm(xs, t.norm) >= M)
            & (vector_norm(tx, t.norm) < R)
            & (vector_norm(tz, t.norm) < R)
            & (gap > 0)
        )
        bound = 5.0 * R / math.sqrt(M)
        if not np.any(q):
            clauses.append({"R": R, "bound": bound, "pairs": 0, "max_ratio": None, "status": "untested"})
            continue
        r = vector_norm(tx - tz, t.norm)[q] / gap[q]
        mx = float(np.max(r))
        clauses.append({
            "R": R,
            "bound": bound,
            "pairs": int(q.sum()),
            "max_ratio": mx,
            "status": "pass" if mx <= bound * (1 + 1e-9) else "fail",
        })
    return TruncationCertificate(M, t.norm, samples, lip_max, lip_max <= 5.0 + 1e-9, tuple(clauses))


# ---------------------------------------------------------------------------
# parameter selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproxPlan:
    epsilon: float
    r: float
    R: float
    M: float
    modulus: Modulus
    mollifier_radius: float | None = None
    evidence: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.M > self.R >= 1):
            raise ValueError(f"plan needs M > R >= 1, got M={self.M}, R={self.R}")
        s = self.slack
        if not (s["small_radius"] >= 0 and s["outer_gap"] >= 0):
            raise ValueError(f"plan violates the truncation radius inequalities: {s}")

    @property
    def slack(self) -> dict:
        return _slacks(self.modulus, self.epsilon, self.r, self.R, self.M)

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "r": self.r,
            "R": self.R,
            "M": self.M,
            "mollifier_radius": self.mollifier_radius,
            "modulus": self.modulus.literal,
            "evidence": {"slack": self.slack, **self.evidence},
        }


def _slacks(m: Modulus, eps: float, r: float, R: float, M: float) -> dict:
    return {
        "small_radius": eps * m(r) - m(R * M ** -0.25),
        "outer_gap": eps * m(M ** 0.25) - m(2.0 * R),
    }


def select_parameters(
    f: GridFunction,
    m: Modulus,
    epsilon: float,
    cert: ModulusCertificate | None = None,
    far_deltas=None,
    max_doublings: int = 1000,
) -> ApproxPlan:
    """Choose the small radius ``r``, far radius ``R`` and truncation radius ``M``.

    ``r`` is the largest ``h_min * 2**j`` whose cumulative profile at ``5 r``
    times ``C_db ** 3`` is at most ``epsilon``; ``R`` is the smallest far radius
    whose min-mode far profile is below ``epsilon`` (rounded up to 1); ``M``
    is the least power of two ``>= 2R`` satisfying both radius inequalities.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    cert = cert or check_admissible(m)
    c5 = cert.doubling_constant ** math.ceil(math.log2(5))
    table = pair_table(f, m)
    lip = interpolant_lipschitz(f)
    h = f.grid.h_min
    diam = f.grid.diameter(f.norms.x)

    r = None
    tried = []
    j = -60
    while h * 2.0 ** j * 5 <= diam:
        cand = h * 2.0 ** j
        val = c5 * cumulative(table, 5 * cand, lip, m)
        tried.append((cand, val))
        if val <= epsilon:
            r = cand
        elif r is not None:
            # cumulative profiles are non-decreasing, so no larger radius qualifies
            break
        j += 1
    if r is None:
        raise PlanError("small_radius", f"no radius r with C*profile(5r) <= {epsilon} at grid resolution")

    deltas = default_far_deltas(f) if far_deltas is None else np.asarray(far_deltas, dtype=float)
    prof = far_profile(f, m, deltas, mode="min")
    below = [d for d, v in zip(prof.scales, prof.values) if v < epsilon]
    if not below:
        raise PlanError("far_radius", f"far profile never drops below {epsilon} within the grid extent")
    R_far = float(below[0])
    R = max(1.0, R_far)

    k = max(0, math.ceil(math.log2(2.0 * R)))
    M = None
    for kk in range(k, k + max_doublings):
        cand = 2.0 ** kk
        s = _slacks(m, epsilon, r, R, cand)
        if cand > R and s["small_radius"] >= 0 and s["outer_gap"] >= 0:
            M = cand
            break
    if M is None:
        raise PlanError("truncation_radius", "no power of two satisfies the truncation radius inequalities")

    evidence = {
        "doubling_factor_5": c5,
        "interpolant_lipschitz": lip,
        "small_profile_at_5r": float(cumulative(table, 5 * r, lip, m)),
        "far_profile": {"deltas": prof.scales.tolist(), "values": prof.values.tolist()},
        "far_radius_raw": R_far,
    }
    return ApproxPlan(epsilon, r, R, M, m, evidence=evidence)


def truncate_compose(f: GridFunction, t: TruncationMap) -> GridFunction:
    """``f o tau_M`` sampled on the grid of ``f`` (clipped into the box with a warning)."""
    g, _ = compose(f, t)
    return g


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    radius: float
    profile: str = "radial"

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("mollifier radius must be positive")
        if self.profile not in ("radial", "tensor"):
            raise ValueError(f"profile must be 'radial' or 'tensor', got {self.profile!r}")


def bump_1d(t, r: float) -> np.ndarray:
    """Unnormalised polynomial bump ``(1 - (t/r)^2)^4`` on ``|t| < r``."""
    u = np.asarray(t, dtype=float) / r
    return np.where(np.abs(u) < 1, (1 - u * u) ** 4, 0.0)


def mollifier_weights(grid, spec: MollifierSpec, norm: str = "l2") -> np.ndarray:
    """Normalised stencil weights on the grid lattice."""
    if any(spec.radius < h for h in grid.spacing):
        raise ValueError(f"mollifier radius {spec.radius} is smaller than the grid spacing {grid.spacing}")
    half = [int(math.floor(spec.radius / h + 1e-9)) for h in grid.spacing]
    axes = [np.arange(-k, k + 1) * h for k, h in zip(half, grid.spacing)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    if spec.profile == "radial":
        w = bump_1d(vector_norm(mesh, norm), spec.radius)
    else:
        w = np.ones(mesh.shape[:-1])
        for a in range(grid.dim):
            w = w * bump_1d(mesh[..., a], spec.radius)
    return w / w.sum()


def _correlate(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    ones = np.ones(values.shape[:-1])
    norm = ndimage.correlate(ones, weights, mode="constant", cval=0.0)
    out = np.empty_like(values)
    for c in range(values.shape[-1]):
        out[..., c] = ndimage.correlate(values[..., c], weights, mode="constant", cval=0.0) / norm
    return out


def mollify(g: GridFunction, spec: MollifierSpec) -> GridFunction:
    """Discrete convolution with renormalised stencils at the boundary."""
    w = mollifier_weights(g.grid, spec, g.norms.x)
    return g.like(_correlate(np.asarray(g.values), w))


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PipelineResult:
    approximant: GridFunction
    plan: ApproxPlan
    errors: dict
    c_pipe: float

    @property
    def within_bound(self) -> bool:
        return self.errors["seminorm_error"] <= self.c_pipe * self.plan.epsilon

    def as_dict(self) -> dict:
        return {
            "plan": self.plan.as_dict(),
            "errors": self.errors,
            "c_pipe": self.c_pipe,
            "within_bound": self.within_bound,
        }


def pipeline_vc_to_smooth(
    f: GridFunction,
    m: Modulus,
    epsilon: float,
    cert: ModulusCertificate | None = None,
    c_pipe: float = C_PIPE_DEFAULT,
) -> PipelineResult:
    """Truncate with ``tau_M`` then mollify, choosing the mollifier radius by halving.

    The radius search starts at the largest ``h_min * 2**j`` not exceeding an
    eighth of the box width and halves until ``sup|g - h| <= eps/2 * omega(delta)``,
    where ``delta`` is the largest dyadic scale with ``2 * profile_g(delta) <= eps``.
    """
    cert = cert or check_admissible(m)
    plan = select_parameters(f, m, epsilon, cert)
    g = truncate_compose(f, TruncationMap(plan.M, f.norms.x))
    tg = pair_table(g, m)
    lip_g = interpolant_lipschitz(g)
    h = f.grid.h_min

    j = -60
    delta = None
    while h * 2.0 ** j <= f.grid.diameter(f.norms.x):
        if 2 * cumulative(tg, h * 2.0 ** j, lip_g, m) <= epsilon:
            delta = h * 2.0 ** j
        else:
            break
        j += 1
    if delta is None:
        raise PlanError("mollifier_scale", "no scale delta with 2 * profile(delta) <= epsilon")
    threshold = 0.5 * epsilon * m(delta)

    h_max = max(f.grid.spacing)
    top = min(f.grid.widths) / 8
    k = max(0, int(math.floor(math.log2(top / h_max)))) if top >= h_max else 0
    chosen = None
    for kk in range(k, -1, -1):
        rho = h_max * 2.0 ** kk
        cand = mollify(g, MollifierSpec(rho))
        sup = float(np.max(vector_norm(cand.values - g.values, g.norms.y)))
        if sup <= threshold:
            chosen = (rho, cand, sup)
            break
    if chosen is None:
        raise PlanError("mollifier_radius", "no stencil radius meets the uniform closeness criterion")
    rho, hfun, sup_gh = chosen
    plan = replace(plan, mollifier_radius=rho)

    const = None
    zero = f.grid.index_of(np.zeros(f.dim))
    if zero is not None:
        const = f.values[zero].tolist()
    errors = {
        "seminorm_error": seminorm(f - hfun, m),
        "truncation_error": seminorm(f - g, m),
        "mollification_error": seminorm(g - hfun, m),
        "sup_error": float(np.max(vector_norm(f.values - hfun.values, f.norms.y))),
        "sup_g_minus_h": sup_gh,
        "closeness_threshold": threshold,
        "delta": delta,
        "anchor_constant": const,
    }
    return PipelineResult(hfun, plan, errors, c_pipe)


# ---------------------------------------------------------------------------
# Lipschitz envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeParams:
    n: float
    localization_radius: float = math.inf
    threshold: float | None = None
    minimal_modulus: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError("envelope slope must be positive")
        if math.isfinite(self.localization_radius):
            if self.localization_radius != 1.0:
                raise ValueError("localisation is only certified for radius 1")
            if self.threshold is None or not self.n > self.threshold:
                raise ValueError("localisation needs n above 2 * omega(1) * seminorm(f)")


def minimal_modulus(f: GridFunction, ts=(1.0, 2.0, 4.0, 8.0)) -> dict:
    """Grid minimal modulus ``omega_f(t) = max |f(x) - f(y)|`` over ``|x - y| <= t``."""
    t = pair_table(f, LIP)
    w1 = float(np.max(t.maxnum[t.dist <= 1.0], initial=0.0))
    out = {"omega_f_1": w1, "values": [], "ok": True}
    for s in ts:
        ws = float(np.max(t.maxnum[t.dist <= s], initial=0.0))
        ok = ws <= 2 * s * w1 * (1 + 1e-12) + 1e-15
        out["values"].append({"t": s, "omega_f": ws, "bound": 2 * s * w1, "ok": ok})
        out["ok"] = out["ok"] and ok
    return out


def envelope_params(f: GridFunction, m: Modulus, n: float, localize: bool = True) -> EnvelopeParams:
    """Envelope parameters; localises to radius 1 when ``n > 2 omega(1) seminorm(f)``."""
    thr = 2.0 * m(1.0) * seminorm(f, m)
    radius = 1.0 if (localize and n > thr) else math.inf
    return EnvelopeParams(float(n), radius, thr, minimal_modulus(f))


def _full_offsets(shape) -> np.ndarray:
    import itertools

    ranges = [range(-(s - 1), s) for s in shape]
    return np.array([d for d in itertools.product(*ranges) if any(d)], dtype=int).reshape(-1, len(shape))


def lipschitz_envelope(f: GridFunction, p: EnvelopeParams | float) -> GridFunction:
    """``f_n(x) = min_y f(y) + n |x - y|`` over grid points (within the localisation ball)."""
    if f.m != 1:
        raise ValueError("Lipschitz envelopes are only supported for scalar functions (m = 1)")
    if not isinstance(p, EnvelopeParams):
        p = EnvelopeParams(float(p))
    shape = f.grid.shape
    offsets = _full_offsets(shape)
    dist = f.grid.offset_distance(offsets, f.norms.x)
    keep = dist <= p.localization_radius
    v = f.values[..., 0]
    out = v.copy()
    for d, s in zip(offsets[keep], dist[keep]):
        a, b = offset_slices(d, shape)
        np.minimum(out[a], v[b] + p.n * s, out=out[a])
    return f.like(out[..., None])


# ---------------------------------------------------------------------------
# uniform + Lipschitz convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceReport:
    sup_errors: tuple[float, ...]
    lipschitz: tuple[float, ...]
    lipschitz_f: float
    seminorm_errors: tuple[float, ...]
    ceilings: tuple[float, ...]
    uniform: bool
    lipschitz_bounded: bool
    converges: bool
    diverges: bool
    ceilings_hold: bool

    @property
    def hypothesis_holds(self) -> bool:
        return self.uniform and self.lipschitz_bounded

    @property
    def verdict(self) -> str:
        if not self.hypothesis_holds:
            return "hypothesis_violated"
        return "converges" if self.converges else "lemma_failure"

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        d["hypothesis_holds"] = self.hypothesis_holds
        d["verdict"] = self.verdict
        return d


def uniform_lip_convergence_check(
    seq,
    f: GridFunction,
    m: Modulus,
    sup_tol: float = 1e-3,
    sem_tol: float = 1e-3,
    lip_bound: float | None = None,
) -> ConvergenceReport:
    """Measure sup, Lipschitz and seminorm errors along ``seq`` against ``f``.

    ``ceilings[k]`` is the rigorous bound ``max_t min((L_k + L_f) t, 2 s_k) / omega(t)``
    over realised pair distances ``t``; it tends to zero exactly when the
    sup errors do and the Lipschitz constants stay bounded.
    """
    seq = list(seq)
    if any(g.grid != f.grid for g in seq):
        raise ValueError("all functions in the sequence must share the grid of f")
    lf = seminorm(f, LIP)
    sups, lips, sems, ceils = [], [], [], []
    dist = None
    for g in seq:
        e = g - f
        sups.append(e.sup_norm())
        lips.append(seminorm(g, LIP))
        te = pair_table(e, m)
        sems.append(float(np.max(te.ratio)) if len(te.ratio) else 0.0)
        if dist is None:
            dist, w = te.dist, te.omega
        ceils.append(float(np.max(np.minimum((lips[-1] + lf) * dist, 2 * sups[-1]) / w)))
    if lip_bound is None:
        lip_bound = 2.0 * max(lf, lips[0] if lips else 0.0)
    uniform = bool(sups) and sups[-1] <= sup_tol
    bounded = bool(lips) and max(lips) <= lip_bound
    converges = bool(sems) and sems[-1] <= sem_tol
    diverges = len(sems) > 1 and all(b >= a for a, b in zip(sems, sems[1:])) and sems[-1] > sems[0]
    holds = all(s <= c * (1 + 1e-12) + 1e-15 for s, c in zip(sems, ceils))
    return ConvergenceReport(tuple(sups), tuple(lips), lf, tuple(sems), tuple(ceils),
                             uniform, bounded, converges, diverges, holds)


# ---------------------------------------------------------------------------
# bump multiplication
# ---------------------------------------------------------------------------


def _smooth_step(u):
    """``e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})`` extended by 0 and 1."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def theta(s, inner: float, outer: float):
    """Smooth non-increasing cut-off: 1 for ``s <= inner``, 0 for ``s >= outer``."""
    return _smooth_step((outer - np.asarray(s, dtype=float)) / (outer - inner))


@dataclass(frozen=True)
class BumpSpec:
    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise ValueError("bump radii must satisfy 0 < inner < outer")

    @property
    def lipschitz(self) -> float:
        """The smooth step has maximal slope 2, attained at its midpoint."""
        return 2.0 / (self.outer_radius - self.inner_radius)


def bump_values(grid, b: BumpSpec, norm: str = "l2") -> np.ndarray:
    return theta(vector_norm(grid.points(), norm), b.inner_radius, b.outer_radius)


def bump_multiply(g: GridFunction, b: BumpSpec) -> GridFunction:
    phi = bump_values(g.grid, b, g.norms.x)
    return g.like(np.asarray(g.values) * phi[..., None])


def bump_certificate(g: GridFunction, b: BumpSpec) -> dict:
    """Grid Lipschitz constant of ``phi * g`` against ``Lip(g) + Lip(phi) sup|g|``."""
    h = bump_multiply(g, b)
    lip_g = seminorm(g, LIP)
    lip_h = seminorm(h, LIP)
    sup_g = g.sup_norm()
    bound = lip_g + b.lipschitz * sup_g
    norms = g.grid.point_norms(g.norms.x)
    outside = norms >= b.outer_radius
    support_ok = bool(np.all(vector_norm(h.values[outside], g.norms.y) == 0)) if np.any(outside) else True
    return {
        "lipschitz_g": lip_g,
        "lipschitz_phi": b.lipschitz,
        "sup_g": sup_g,
        "lipschitz_product": lip_h,
        "bound": bound,
        "ok": lip_h <= bound * (1 + 1e-12),
        "support_ok": support_ok,
    }
