"""Brute-force reference implementations used by the tests.

These loop over points and pairs in plain Python and share no code with the
library beyond the modulus evaluator (``m(t)``) and the stored values.
"""
from __future__ import annotations

import itertools
import math


def norm(vec, kind):
    vec = [float(v) for v in vec]
    if len(vec) == 1:
        return abs(vec[0])
    if kind == "l2":
        acc = vec[0] * vec[0]
        for v in vec[1:]:
            acc = acc + v * v
        return math.sqrt(acc)
    if kind == "linf":
        return max(abs(v) for v in vec)
    acc = abs(vec[0])
    for v in vec[1:]:
        acc = acc + abs(v)
    return acc


def indices(shape):
    return list(itertools.product(*[range(s) for s in shape]))


def coords(grid, idx):
    return [o + i * h for o, i, h in zip(grid.origin, idx, grid.spacing)]


def pairs(f, m):
    """Yield ``(i, j, dist, ratio)`` for every unordered pair of distinct points."""
    g = f.grid
    pts = indices(g.shape)
    vals = {p: [float(v) for v in f.values[p]] for p in pts}
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            i, j = pts[a], pts[b]
            dx = [(p - q) * h for p, q, h in zip(i, j, g.spacing)]
            dist = norm(dx, f.norms.x)
            num = norm([u - v for u, v in zip(vals[i], vals[j])], f.norms.y)
            yield i, j, dist, num / m(dist)


def seminorm(f, m):
    return max(r for *_, r in pairs(f, m))


def scale_profile(f, m, scales, band):
    out = {}
    for i, j, dist, r in pairs(f, m):
        for s in scales:
            if s * (1 - band) <= dist <= s * (1 + band):
                out[s] = max(out.get(s, -1.0), r)
    return out


def far_profile(f, m, deltas, mode):
    g = f.grid
    pick = min if mode == "min" else max
    out = {}
    for i, j, dist, r in pairs(f, m):
        key = pick(norm(coords(g, i), f.norms.x), norm(coords(g, j), f.norms.x))
        for d in deltas:
            if key > d:
                out[d] = max(out.get(d, -1.0), r)
    return out


def cube_stats(f, m, level):
    """``{anchor: (count, averages, mean_osc)}`` at one level."""
    g = f.grid
    base = max((s - 1) * h for s, h in zip(g.shape, g.spacing))
    n = 2 ** level
    groups = {}
    for idx in indices(g.shape):
        anchor = tuple(
            min(int(math.floor(i * h / base * n + 1e-9)), n - 1) for i, h in zip(idx, g.spacing)
        )
        groups.setdefault(anchor, []).append(idx)
    side = base / n
    out = {}
    for anchor, members in groups.items():
        cnt = len(members)
        avg = [math.fsum(float(f.values[p][c]) for p in members) / cnt for c in range(f.m)]
        devs = [norm([float(f.values[p][c]) - avg[c] for c in range(f.m)], f.norms.y) for p in members]
        out[anchor] = (cnt, avg, (math.fsum(devs) / cnt) / m(side))
    return out


def envelope(f, n, radius=math.inf):
    """Scalar inf-convolution by direct minimisation over grid points."""
    g = f.grid
    pts = indices(g.shape)
    out = {}
    for x in pts:
        best = float(f.values[x][0])
        for y in pts:
            d = norm([(p - q) * h for p, q, h in zip(x, y, g.spacing)], f.norms.x)
            if d <= radius:
                best = min(best, float(f.values[y][0]) + n * d)
        out[x] = best
    return out
