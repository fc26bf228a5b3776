"""Smooth localized test functions with analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["TestFunction", "gaussian", "plateau_monomial", "plateau_profile"]


@dataclass(frozen=True)
class TestFunction:
    """Scalar function on R^n with optional gradient, vectorized over points.

    ``value`` maps arrays of shape (..., n) to (...); ``grad`` to (..., n).
    """

    n: int
    value: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.value(np.asarray(x, dtype=float))

    def gradient(self, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.grad is not None:
            return self.grad(x)
        out = np.empty(x.shape)
        for j in range(self.n):
            step = np.zeros(self.n)
            step[j] = h
            out[..., j] = (self.value(x + step) - self.value(x - step)) / (2 * h)
        return out


def gaussian(center, width: float) -> TestFunction:
    """exp(-|x-c|^2 / (2 w^2)) with its analytic gradient."""
    center = np.asarray(center, dtype=float)
    w2 = float(width) ** 2

    def value(x):
        d = x - center
        return np.exp(-np.sum(d * d, axis=-1) / (2 * w2))

    def grad(x):
        d = x - center
        return -d / w2 * value(x)[..., None]

    return TestFunction(len(center), value, grad)


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for u<=0, 1 for u>=1."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return a / (a + b)


def plateau_profile(r: np.ndarray, r_plateau: float, r_support: float) -> np.ndarray:
    """Radial cutoff: 1 on [0, r_plateau], 0 beyond r_support, smooth between."""
    if not 0 < r_plateau < r_support:
        raise ValueError("need 0 < r_plateau < r_support")
    u = (r_support - np.asarray(r, dtype=float)) / (r_support - r_plateau)
    return _smoothstep(u)


def plateau_monomial(powers, r_plateau: float, r_support: float) -> TestFunction:
    """Monomial x^k times a radial plateau cutoff (no gradient).

    Identical to the plain monomial on the ball of radius ``r_plateau`` and
    compactly supported in the ball of radius ``r_support``.
    """
    powers = np.asarray(powers, dtype=int)

    def value(x):
        r = np.linalg.norm(x, axis=-1)
        mono = np.prod(x ** powers, axis=-1)
        return mono * plateau_profile(r, r_plateau, r_support)

    return TestFunction(len(powers), value, None)
