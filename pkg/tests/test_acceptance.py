"""Acceptance gate: one PASS/FAIL line per criterion.

Run under pytest (lines are repeated in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from conftest import make, random_fixture  # noqa: E402
from holder.approximators import (  # noqa: E402
    MollifierSpec,
    contraction_ratio,
    envelope_params,
    lipschitz_envelope,
    mollify,
    pipeline_vc_to_smooth,
    truncate_compose,
    truncation_certify,
    uniform_lip_convergence_check,
)
from holder.c0ops import local_coordinate_dependence_check, soft_threshold_map, tensor_mollify  # noqa: E402
from holder.calibration import c_pipe, ceilings_for, dumps, run_calibration, suite_fixtures  # noqa: E402
from holder.cli import main  # noqa: E402
from holder.fixtures import generate, parse_fixture  # noqa: E402
from holder.maps import TruncationMap  # noqa: E402
from holder.meanosc import build_cube_stats, dyadic_chain_reconstruct, meyers_compare  # noqa: E402
from holder.modulus import Modulus, check_admissible  # noqa: E402
from holder.oscillation import (  # noqa: E402
    LIP,
    default_far_deltas,
    default_scales,
    far_profile,
    scale_profile,
    seminorm,
)

HALF = Modulus.power(0.5)
RESULTS: dict[int, str] = {}


def record(k, ok, elapsed, limit, detail):
    ok = bool(ok) and elapsed < limit
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s, limit {limit:g}s]"
    RESULTS[k] = line
    print(line)
    return ok


def as_dict(lv):
    return {
        tuple(int(v) for v in a): (int(c), avg.tolist(), float(o))
        for a, c, avg, o in zip(lv.anchors, lv.counts, lv.averages, lv.mean_osc)
    }


# ---------------------------------------------------------------------------


def test_criterion_01_appendix_a2(tmp_path):
    ok, worst, slowest = True, 0.0, 0.0
    for n in (1, 2, 4, 8):
        for alpha in (0.25, 0.5):
            inp, rep = tmp_path / f"a2_{n}_{alpha}.csv", tmp_path / f"a2_{n}_{alpha}.json"
            assert main(["fixtures", "--family", f"appendix_a2:n={n},alpha={alpha}", "--spacing", "1/64",
                         "--output", str(inp)]) == 0
            t0 = time.perf_counter()
            code = main(["analyze", "--input", str(inp), "--modulus", f"power:{alpha}", "--report", str(rep)])
            dt = time.perf_counter() - t0
            value = json.loads(rep.read_text())["seminorm"]["value"]
            err = abs(value - n ** -alpha)
            ok &= code == 0 and err <= 1e-9 and dt < 10
            worst, slowest = max(worst, err), max(slowest, dt)
    assert record(1, ok, slowest, 10, f"8 cases, max |seminorm - n^-alpha| = {worst:.1e}")


def test_criterion_02_appendix_a3():
    t0 = time.perf_counter()
    m = Modulus.power(0.75)
    ok, sup_err, margin = True, 0.0, math.inf
    for n in (4, 16, 64):
        f = generate(parse_fixture(f"appendix_a3:n={n}", lo=-1, hi=1, spacing=1 / (4 * n)))
        e = abs(f.sup_norm() - n ** -0.5)
        i, j = f.grid.index_of([0.0]), f.grid.index_of([1.0 / n])
        ratio = abs(f.values[i][0] - f.values[j][0]) / float(m(1.0 / n))
        ok &= e <= 1e-12 and ratio >= n ** 0.25 - 1e-9
        sup_err, margin = max(sup_err, e), min(margin, ratio - n ** 0.25)
    dt = time.perf_counter() - t0
    assert record(2, ok, dt, 30, f"sup error {sup_err:.1e}, min pair ratio - n^0.25 = {margin:.1e}")


def test_criterion_03_truncation():
    t0 = time.perf_counter()
    ok, lip, worst = True, 0.0, 0.0
    for M in (1.0, 10.0, 100.0):
        for norm in ("l2", "linf"):
            cert = truncation_certify(TruncationMap(M, norm), samples=10_000, seed=0, dim=2)
            ok &= cert.ok and cert.lipschitz_max <= 5 + 1e-9
            tested = [c for c in cert.contraction if c["status"] != "untested"]
            ok &= M == 1.0 or bool(tested)
            lip = max(lip, cert.lipschitz_max)
            worst = max([worst] + [c["max_ratio"] / c["bound"] for c in tested])
    # one explicit pair on the shell, both images inside B(0, R)
    q, ratio, bound = contraction_ratio(TruncationMap(100.0), [195.0, 0.0], [195.1, 0.0], R=2.0)
    ok &= q and ratio <= bound * (1 + 1e-9)
    dt = time.perf_counter() - t0
    assert record(3, ok, dt, 5, f"max Lipschitz ratio {lip:.6f}, max contraction/bound {worst:.4f}")


def test_criterion_04_oracle_equivalence():
    t0 = time.perf_counter()
    ok = True
    for seed in range(1000, 1030):
        f = random_fixture(seed)
        ok &= f.grid.size <= 15 ** 3
        ok &= seminorm(f, HALF) == oracles.seminorm(f, HALF)
        scales = default_scales(f)
        prof = scale_profile(f, HALF, scales, band=0.25)
        ok &= dict(zip(prof.scales.tolist(), prof.values.tolist())) == oracles.scale_profile(f, HALF, scales, 0.25)
        deltas = default_far_deltas(f)
        for mode in ("min", "max"):
            fp = far_profile(f, HALF, deltas, mode=mode)
            ok &= dict(zip(fp.scales.tolist(), fp.values.tolist())) == oracles.far_profile(f, HALF, deltas, mode)
        stats = build_cube_stats(f, HALF)
        for k in range(stats.min_level, stats.max_level + 1):
            ok &= as_dict(stats.level(k)) == oracles.cube_stats(f, HALF, k)
    dt = time.perf_counter() - t0
    assert record(4, ok, dt, 120, "30 random fixtures, bit-exact against brute-force oracles")


def test_criterion_05_meyers():
    t0 = time.perf_counter()
    cert = check_admissible(HALF)
    ok, r1, r2, count = True, 0.0, 0.0, 0
    for dim in (1, 2):
        ceilings = ceilings_for(dim)
        for f in suite_fixtures(dim):
            rec = meyers_compare(f, HALF, cert, ceilings=ceilings)
            ok &= rec.within_ceilings
            r1, r2, count = max(r1, rec.ratio_1), max(r2, rec.ratio_2), count + 1
    pinned = resources.files("holder").joinpath("data/calibration.json").read_text()
    same = dumps(run_calibration()) == pinned
    dt = time.perf_counter() - t0
    assert record(5, ok and same and count == 30, dt, 180,
                  f"{count} fixtures within ceilings (max ratios {r1:.3f}, {r2:.3f}), calibration reproduced={same}")


def test_criterion_06_telescoping():
    t0 = time.perf_counter()
    ok, worst, n = True, 0.0, 0
    for dim in (1, 2):
        for f in suite_fixtures(dim):
            stats = build_cube_stats(f, HALF)
            rng = np.random.default_rng(n)
            for _ in range(100):
                x = tuple(int(rng.integers(0, s)) for s in f.grid.shape)
                y = tuple(int(rng.integers(0, s)) for s in f.grid.shape)
                rec = dyadic_chain_reconstruct(stats, f, x, y)
                ok &= rec.residual < 1e-10
                worst = max(worst, rec.residual)
            n += 1
    dt = time.perf_counter() - t0
    assert record(6, ok, dt, 30, f"{100 * n} pairs over {n} fixtures, max residual {worst:.1e}")


def test_criterion_07_pipeline():
    f = generate(parse_fixture("tent:n=1", lo=-64, hi=64, spacing=1 / 64))
    cp = c_pipe()
    ok, errors, slowest = True, [], 0.0
    for eps in (0.2, 0.1, 0.05):
        t0 = time.perf_counter()
        res = pipeline_vc_to_smooth(f, HALF, eps, c_pipe=cp)
        dt = time.perf_counter() - t0
        err = res.errors["seminorm_error"]
        ok &= err <= cp * eps and dt < 60
        errors.append(err)
        slowest = max(slowest, dt)
    ok &= all(b <= a for a, b in zip(errors, errors[1:]))
    shown = ", ".join(f"{e:.4g}" for e in errors)
    assert record(7, ok, slowest, 60, f"errors [{shown}] with C_pipe={cp:g}")


def test_criterion_08_envelope():
    t0 = time.perf_counter()
    m = Modulus.power(1 / 3)
    x = np.arange(-1280, 1281) / 256
    f = make(np.sqrt(np.abs(x)) * np.maximum(0.0, 1 - np.abs(x) / 4), lo=-5, spacing=1 / 256)
    outside = np.abs(x) >= 4
    ok, sups, sems, local_dev, localized = True, [], [], 0.0, 0
    for n in range(1, 65):
        p = envelope_params(f, m, n)
        fn = lipschitz_envelope(f, p)
        ok &= seminorm(fn, LIP) <= n * (1 + 1e-12)
        ok &= bool(np.all(fn.values <= f.values))
        ok &= bool(np.all(fn.values[outside] == 0.0))
        if math.isfinite(p.localization_radius):
            full = lipschitz_envelope(f, float(n))
            local_dev = max(local_dev, float(np.max(np.abs(full.values - fn.values))))
            localized += 1
        e = f - fn
        sups.append(e.sup_norm())
        sems.append(seminorm(e, m))
    ok &= local_dev <= 1e-12 and localized > 0
    ok &= all(b <= a for a, b in zip(sups, sups[1:])) and sups[-1] <= 1e-12
    ok &= all(b <= a for a, b in zip(sems, sems[1:])) and sems[-1] < 0.05
    dt = time.perf_counter() - t0
    assert record(8, ok, dt, 60,
                  f"seminorm error {sems[0]:.4f} -> {sems[-1]:.2e}, {localized} localized, max deviation {local_dev:.1e}")


def _perturbed(f, p, ks=range(15)):
    return [f.like(f.values + p * 2.0 ** -k) for k in ks]


def convergence_suite():
    """Ten sequences with bounded Lipschitz constants converging uniformly."""
    out = {}
    tent = generate(parse_fixture("tent:n=1", lo=-2, hi=2, spacing=1 / 32))
    x = tent.grid.points()[..., :1]
    out["tent+sin"] = (tent, _perturbed(tent, np.sin(x)))
    sd = generate(parse_fixture("sin_decay:freq=3", lo=-4, hi=4, spacing=1 / 32))
    out["sin_decay+cos"] = (sd, _perturbed(sd, np.cos(3 * sd.grid.points()[..., :1])))
    rs = generate(parse_fixture("random_smooth:seed=5", spacing=1 / 128))
    other = generate(parse_fixture("random_smooth:seed=6", spacing=1 / 128))
    out["random+random"] = (rs, _perturbed(rs, other.values))
    r2 = generate(parse_fixture("random_smooth:seed=7,modes=4", spacing=1 / 16, dim=2))
    q2 = generate(parse_fixture("random_smooth:seed=8,modes=4", spacing=1 / 16, dim=2))
    out["2d random+random"] = (r2, _perturbed(r2, q2.values))
    r3 = generate(parse_fixture("random_smooth:seed=9,modes=3", spacing=1 / 6, dim=3))
    out["3d random+sin"] = (r3, _perturbed(r3, np.sin(r3.grid.points().sum(axis=-1, keepdims=True))))
    aff = generate(parse_fixture("affine:slope=1", lo=-2, hi=2, spacing=1 / 32))
    out["affine+square"] = (aff, _perturbed(aff, aff.grid.points()[..., :1] ** 2))
    vec = make(np.stack([np.sin(x[..., 0]), np.cos(x[..., 0])], axis=-1), lo=-2, spacing=1 / 32, vector=True)
    out["vector scaling"] = (vec, [vec.like((1 + 2.0 ** -k) * vec.values) for k in range(15)])
    sm = generate(parse_fixture("random_smooth:seed=11", spacing=1 / 128))
    out["mollify shrinking"] = (sm, [mollify(sm, MollifierSpec(2.0 ** -k)) for k in range(1, 8)])
    out["envelope growing"] = (sm, [lipschitz_envelope(sm, 2.0 ** k) for k in range(0, 10)])
    big = generate(parse_fixture("tent:n=1", spacing=1 / 16))
    out["truncation growing"] = (big, [truncate_compose(big, TruncationMap(M)) for M in (1.0, 2.0, 4.0, 8.0)])
    return out


def test_criterion_09_convergence():
    t0 = time.perf_counter()
    ok, worst = True, 0.0
    suite = convergence_suite()
    for name, (f, seq) in suite.items():
        rep = uniform_lip_convergence_check(seq, f, HALF, sup_tol=1e-3, sem_tol=1e-3)
        ok &= rep.verdict == "converges" and rep.ceilings_hold
        worst = max(worst, rep.seminorm_errors[-1])
    ns = [4, 16, 64, 256]
    seq = [generate(parse_fixture(f"appendix_a3:n={n}", spacing=1 / (4 * max(ns)))) for n in ns]
    zero = seq[0].like(np.zeros_like(seq[0].values))
    bad = uniform_lip_convergence_check(seq, zero, Modulus.power(0.75), sup_tol=0.1, lip_bound=4.0)
    flagged = bad.diverges and bad.verdict == "hypothesis_violated"
    dt = time.perf_counter() - t0
    assert record(9, ok and flagged and len(suite) == 10, dt, 60,
                  f"{len(suite)} sequences, max final seminorm error {worst:.1e}, divergent sequence flagged={flagged}")


def test_criterion_10_c0_operators():
    t0 = time.perf_counter()
    ok, count = True, 0
    eta = 1 / 8
    for f in suite_fixtures(2):
        f = f.with_norms(x="linf")
        sf = seminorm(f, HALF)
        for r in (1 / 8, 1 / 4):
            g = soft_threshold_map(f, r)
            ok &= float(np.max(np.abs(f.values - g.values))) <= float(HALF(r)) * sf
            rng = np.random.default_rng(count)
            centers = [tuple(int(rng.integers(0, s)) for s in f.grid.shape) for _ in range(50)]
            ok &= local_coordinate_dependence_check(g, r, centers, tol=1e-10).ok
            h = tensor_mollify(g, eta)
            sg = seminorm(g, HALF)
            ok &= seminorm(h, HALF) <= sg
            ok &= float(np.max(np.abs(h.values - g.values))) <= sg * float(HALF(eta))
        count += 1
    dt = time.perf_counter() - t0
    assert record(10, ok, dt, 60, f"{count} 2-D fixtures, two thresholds each, 50 locality centers per run")


def test_criterion_11_modulus_certificates():
    t0 = time.perf_counter()
    ok, dmax, imax = True, 0.0, 0.0
    for alpha in (0.25, 0.5, 0.75, 1.0):
        cert = check_admissible(Modulus.power(alpha))
        d = abs(cert.doubling_constant - 2 ** alpha)
        i = abs(cert.dini_constant - 1 / alpha)
        ok &= d <= 1e-12 and i <= 1e-6
        ok &= cert.sublinear_zero == (alpha < 1)
        dmax, imax = max(dmax, d), max(imax, i)
    dt = time.perf_counter() - t0
    assert record(11, ok, dt, 1, f"doubling error {dmax:.1e}, Dini error {imax:.1e}, alpha=1 not sublinear")


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
