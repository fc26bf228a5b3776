"""Joint numerical range sampling and the circle-plus-point closed forms.

The pushforward of the unitarily invariant probability on the unit sphere of
C^N under ``h -> (<A_1 h, h>, ..., <A_n h, h>)`` is the numerical range
distribution of the tuple.  For the Pauli triple it is the uniform
probability on the unit sphere of R^3, which the Kolmogorov-Smirnov helpers
below check.  The module also evaluates, both in closed form and by adaptive
quadrature, the fundamental-solution integral

    I(a, x) = integral_0^1 (y^2 - |x - (1-y) a|^2)_+^(-1/2) dy,   |a| > 1,

attached to the block tuple ``(a_1 (+) sigma_1, a_2 (+) sigma_2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, SeedSequence, Philox
from scipy import integrate, stats

from .pencil import MatrixTuple

__all__ = [
    "EmpiricalMeasure",
    "UnresolvedRegimeError",
    "classify_regime",
    "fundamental_integral_closed",
    "fundamental_integral_quad",
    "pauli_uniformity_stats",
    "sample_range",
]

_CHUNK = 65536


class UnresolvedRegimeError(ValueError):
    """Raised when the closed-form map does not cover the requested input."""


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted-equal point cloud n_A(h_i) with its seed provenance."""

    points: np.ndarray = field(repr=False)
    seed: int
    N: int

    def __post_init__(self):
        pts = np.asarray(self.points)
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def sample_count(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return self.points.shape[1]


def sample_range(A: MatrixTuple, count: int, seed: int) -> EmpiricalMeasure:
    """Sample the joint numerical range map at uniform sphere points.

    Unit vectors are normalized standard complex Gaussians drawn from
    counter-based Philox streams split per chunk, so the output depends only
    on ``seed`` and ``count`` regardless of how chunks are scheduled.
    Hermitian tuples give real coordinates; otherwise the complex values are
    recorded.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    hermitian = A.hermitian
    stack = A.stack()
    out = np.empty((count, A.n), dtype=float if hermitian else complex)
    children = SeedSequence(seed).spawn((count + _CHUNK - 1) // _CHUNK)
    for c, child in enumerate(children):
        lo, hi = c * _CHUNK, min((c + 1) * _CHUNK, count)
        m = hi - lo
        rng = Generator(Philox(child))
        z = rng.standard_normal((m, A.N)) + 1j * rng.standard_normal((m, A.N))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        vals = np.einsum("jab,ma,mb->mj", stack, z.conj(), z)
        out[lo:hi] = vals.real if hermitian else vals
    return EmpiricalMeasure(out, seed, A.N)


def pauli_uniformity_stats(measure: EmpiricalMeasure) -> dict:
    """KS statistics of the 3rd coordinate and the azimuth against uniformity.

    Under the uniform sphere law the third coordinate is Uniform[-1, 1] and
    the azimuth of the first two is Uniform[0, 2*pi).
    """
    pts = np.asarray(measure.points, dtype=float)
    if pts.shape[1] != 3:
        raise ValueError("uniformity statistics expect three coordinates")
    x3 = pts[:, 2]
    azimuth = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * np.pi)
    ks_x3 = stats.kstest(x3, stats.uniform(loc=-1.0, scale=2.0).cdf)
    ks_az = stats.kstest(azimuth, stats.uniform(loc=0.0, scale=2.0 * np.pi).cdf)
    return {
        "x3_statistic": float(ks_x3.statistic),
        "x3_pvalue": float(ks_x3.pvalue),
        "azimuth_statistic": float(ks_az.statistic),
        "azimuth_pvalue": float(ks_az.pvalue),
        "sample_count": measure.sample_count,
    }


def _quadratic(a: np.ndarray, x: np.ndarray):
    """Coefficients of p(y) = y^2 - |x - (1-y) a|^2 = -(c + 2 b y + g y^2)."""
    d = x - a
    g = float(a @ a) - 1.0
    b = float(a @ d)
    c = float(d @ d)
    disc = b * b - g * c
    return g, b, c, disc


def classify_regime(a, x) -> str:
    """Name the closed-form regime of the integrand's positivity set."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if a.shape != (2,) or x.shape != (2,):
        raise ValueError("expected two 2-vectors")
    if a @ a <= 1.0:
        raise UnresolvedRegimeError("offset must lie outside the unit circle")
    g, b, c, disc = _quadratic(a, x)
    if disc <= 0.0:
        return "empty"
    root = math.sqrt(disc)
    lo, hi = (-b - root) / g, (-b + root) / g
    if hi <= 0.0 or lo >= 1.0:
        return "empty"
    if hi <= 1.0:
        return "interior_arc"  # both roots inside [0, 1]: full half-turn
    return "endpoint_arc"  # integration stops at y = 1 (|x| <= 1)


def fundamental_integral_closed(a, x) -> float:
    """Closed form of I(a, x); the positivity set decides the branch.

    With g = |a|^2 - 1, b = <a, x-a>, D = b^2 - g |x-a|^2:
    the integral is 0 when the set is empty, pi/sqrt(g) when both roots of
    the quadratic lie in (0, 1), and
    (pi/2 + arcsin((<a, x> - 1)/sqrt(D))) / sqrt(g) when it is cut at y = 1.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    regime = classify_regime(a, x)
    g, b, c, disc = _quadratic(a, x)
    if regime == "empty":
        return 0.0
    if regime == "interior_arc":
        return math.pi / math.sqrt(g)
    arg = (float(a @ x) - 1.0) / math.sqrt(disc)
    return (math.pi / 2.0 + math.asin(max(-1.0, min(1.0, arg)))) / math.sqrt(g)


def fundamental_integral_quad(a, x, tol: float = 1e-10) -> float:
    """Adaptive quadrature of I(a, x) with endpoint desingularisation.

    Splits the positivity interval at its midpoint and substitutes
    ``y = root +/- u^2`` near each endpoint that is a zero of the quadratic,
    turning the inverse-square-root singularity into a bounded integrand.
    The integrand itself is always evaluated from the primal expression
    ``y^2 - |x - (1-y) a|^2``.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if a @ a <= 1.0:
        raise UnresolvedRegimeError("offset must lie outside the unit circle")
    g, b, c, disc = _quadratic(a, x)
    if disc <= 0.0:
        return 0.0
    root = math.sqrt(disc)
    lo_root, hi_root = (-b - root) / g, (-b + root) / g
    lo, hi = max(lo_root, 0.0), min(hi_root, 1.0)
    if hi <= lo:
        return 0.0

    def p(y):
        d = x - np.multiply.outer(1.0 - y, a)
        return y * y - np.sum(d * d, axis=-1)

    mid = 0.5 * (lo + hi)
    total = 0.0

    def plain(y):
        return 1.0 / np.sqrt(np.maximum(p(y), 1e-300))

    def desingularised(root_at, away_sign, span):
        # After y = root_at + away_sign * u^2 the measure dy/sqrt(p) becomes
        # 2 du / sqrt(p/u^2); clamp u away from 0 where the primal quotient
        # would be evaluated as 0/0 (the integrand is smooth there).
        u_floor = 1e-7 * span

        def f(u):
            u = max(u, u_floor)
            return 2.0 / math.sqrt(max(p(root_at + away_sign * u * u) / (u * u), 1e-300))

        return integrate.quad(f, 0.0, math.sqrt(span), epsabs=tol, epsrel=1e-12, limit=200)[0]

    # Left half: singular iff lo is a root of p.
    if abs(lo - lo_root) < 1e-14:
        total += desingularised(lo, +1.0, mid - lo)
    else:
        total += integrate.quad(plain, lo, mid, epsabs=tol, epsrel=1e-12, limit=200)[0]
    # Right half.
    if abs(hi - hi_root) < 1e-14:
        total += desingularised(hi, -1.0, hi - mid)
    else:
        total += integrate.quad(plain, mid, hi, epsabs=tol, epsrel=1e-12, limit=200)[0]
    return total
