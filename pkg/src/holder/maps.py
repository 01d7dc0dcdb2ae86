"""Lipschitz self-maps of R^n with known constants."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .funcgrid import vector_norm

__all__ = ["LipschitzMap", "TruncationMap", "SoftThresholdMap", "AffineMap", "soft_threshold"]


class LipschitzMap:
    """Base class: ``apply`` acts on arrays of shape ``(..., n)``."""

    def apply(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def lipschitz(self, norm: str) -> float:  # pragma: no cover - interface
        raise NotImplementedError

    def describe(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError


@dataclass(frozen=True)
class TruncationMap(LipschitzMap):
    """Radial cut-off: identity on ``B(0, M)``, zero outside ``B(0, 2M)``.

    On the annulus ``M <= |x| < 2M`` the map is ``((2M - |x|) / M)**2 * x``.
    It is 5-Lipschitz for any norm.
    """

    M: float
    norm: str = "l2"

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"truncation radius must be positive, got {self.M}")

    def factor(self, rho):
        rho = np.asarray(rho, dtype=float)
        M = self.M
        shrink = ((2.0 * M - rho) / M) ** 2
        return np.where(rho < M, 1.0, np.where(rho < 2.0 * M, shrink, 0.0))

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.factor(vector_norm(pts, self.norm))[..., None] * pts

    def image_norm(self, rho):
        """Norm of the image of a point of norm ``rho``."""
        return self.factor(rho) * np.asarray(rho, dtype=float)

    def lipschitz(self, norm: str) -> float:
        return 5.0

    def describe(self) -> dict:
        return {"map": "truncation", "M": self.M, "norm": self.norm}


def soft_threshold(t, r: float):
    """Coordinatewise shrinkage towards zero by ``r``; zero on ``[-r, r]``."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= -r, t + r, np.where(t >= r, t - r, 0.0))


@dataclass(frozen=True)
class SoftThresholdMap(LipschitzMap):
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"threshold must be positive, got {self.r}")

    def apply(self, pts):
        return soft_threshold(pts, self.r)

    def lipschitz(self, norm: str) -> float:
        return 1.0

    def describe(self) -> dict:
        return {"map": "soft_threshold", "r": self.r}


@dataclass(frozen=True, eq=False)
class AffineMap(LipschitzMap):
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
            raise ValueError("affine map needs a square matrix and a matching shift")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def apply(self, pts):
        return np.asarray(pts, dtype=float) @ self.A.T + self.b

    def lipschitz(self, norm: str) -> float:
        if norm == "l2":
            op = float(np.linalg.norm(self.A, 2))
        else:
            op = float(np.max(np.sum(np.abs(self.A), axis=1)))
        return op * (1.0 + 1e-12)

    def describe(self) -> dict:
        return {"map": "affine", "A": self.A.tolist(), "b": self.b.tolist()}
