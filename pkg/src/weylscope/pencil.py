"""Matrix tuples, linear pencils and their determinantal polynomials.

A tuple ``A = (A_1, ..., A_n)`` of complex N-by-N matrices is *hyperbolic*
when every real linear combination ``<A, s>`` has purely real spectrum.  The
associated homogeneous degree-N polynomial is

    P(z) = det(z_0 I + z_1 A_1 + ... + z_n A_n),    z in C^{n+1}.

Its lowest-order behaviour along lines through a zero ``xi`` (the
*localisation*) drives the wave-front machinery in :mod:`weylscope.kippenhahn`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "HyperbolicityVerdict",
    "Localisation",
    "MatrixTuple",
    "det_poly",
    "hyperbolicity_check",
    "line_poly_coeffs",
    "localisation",
    "localise",
    "pencil_eval",
    "sample_directions",
    "support_function",
]

HERMITIAN_ATOL = 1e-12
LOCALISATION_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """Immutable n-tuple of N-by-N complex matrices."""

    matrices: tuple
    name: str = ""

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.matrices)
        if not mats:
            raise ValueError("tuple must contain at least one matrix")
        N = mats[0].shape[0]
        for m in mats:
            if m.shape != (N, N):
                raise ValueError("all matrices must be square and equally sized")
        frozen = []
        for m in mats:
            m = m.copy()
            m.setflags(write=False)
            frozen.append(m)
        object.__setattr__(self, "matrices", tuple(frozen))

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def N(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def hermitian(self) -> bool:
        return all(
            np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITIAN_ATOL) for m in self.matrices
        )

    def norm(self) -> float:
        """Module norm (sum of squared operator norms)^(1/2)."""
        return float(np.sqrt(sum(np.linalg.norm(m, 2) ** 2 for m in self.matrices)))

    def stack(self) -> np.ndarray:
        return np.stack(self.matrices)

    def transform(self, T: np.ndarray) -> "MatrixTuple":
        """Similarity transform (T A_j T^{-1})_j."""
        Tinv = np.linalg.inv(T)
        return MatrixTuple(tuple(T @ m @ Tinv for m in self.matrices))

    def affine_image(self, L: np.ndarray, b: np.ndarray | None = None) -> "MatrixTuple":
        """Tuple (sum_k L[j,k] A_k + b_j I)_j for an affine map of R^n."""
        L = np.asarray(L, dtype=float)
        mats = np.einsum("jk,kab->jab", L, self.stack())
        if b is not None:
            mats = mats + np.asarray(b, dtype=float)[:, None, None] * np.eye(self.N)
        return MatrixTuple(tuple(mats))

    def cache_key(self) -> str:
        h = hashlib.sha256()
        for m in self.matrices:
            h.update(np.ascontiguousarray(m).tobytes())
        return h.hexdigest()


def pencil_eval(A: MatrixTuple, xi) -> np.ndarray:
    """Linear combination <A, xi> = sum_j xi_j A_j."""
    xi = np.asarray(xi)
    if xi.shape != (A.n,):
        raise ValueError(f"direction must have length {A.n}")
    return np.einsum("j,jab->ab", xi, A.stack())


def det_poly(A: MatrixTuple, zeta) -> complex:
    """det(zeta_0 I + <A, zeta_vec>), homogeneous of degree N."""
    zeta = np.asarray(zeta, dtype=complex)
    if zeta.shape != (A.n + 1,):
        raise ValueError(f"argument must have length {A.n + 1}")
    M = zeta[0] * np.eye(A.N) + np.einsum("j,jab->ab", zeta[1:], A.stack())
    return complex(np.linalg.det(M))


@dataclass(frozen=True)
class HyperbolicityVerdict:
    verdict: str  # "hyperbolic" | "not_hyperbolic" | "inconclusive"
    worst_direction: np.ndarray
    worst_imag: float
    directions_tested: int

    @property
    def admissible(self) -> bool:
        """Whether downstream computations may proceed."""
        return self.verdict != "not_hyperbolic"


def sample_directions(n: int, count: int) -> np.ndarray:
    """Quasi-uniform unit directions on S^{n-1}.

    Uses the two antipodes for n=1, uniform angles for n=2, a Fibonacci
    lattice for n=3 and normalised low-discrepancy-seeded Gaussians beyond.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]])[: max(count, 1)]
    if n == 2:
        th = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
        return np.column_stack([np.cos(th), np.sin(th)])
    if n == 3:
        i = np.arange(count)
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        phi = golden * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(20210517)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def hyperbolicity_check(A: MatrixTuple, direction_count: int = 256, tol: float = 1e-9) -> HyperbolicityVerdict:
    """Assess spectral reality of <A, s> over sampled unit directions.

    Hermitian tuples are hyperbolic outright.  Otherwise sampling can only
    refute: a direction with an eigenvalue of imaginary part above ``tol``
    yields ``not_hyperbolic``; a clean sweep yields ``inconclusive`` because
    finitely many directions cannot certify the property.
    """
    if direction_count < 1:
        raise ValueError("direction_count must be at least 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if A.hermitian:
        e0 = np.zeros(A.n)
        e0[0] = 1.0
        return HyperbolicityVerdict("hyperbolic", e0, 0.0, 0)
    dirs = sample_directions(A.n, direction_count)
    pencils = np.einsum("kj,jab->kab", dirs, A.stack())
    eigs = np.linalg.eigvals(pencils)
    imag = np.abs(eigs.imag)
    flat = int(np.argmax(imag))
    k, _ = divmod(flat, A.N)
    worst = float(imag.flat[flat])
    verdict = "not_hyperbolic" if worst > tol else "inconclusive"
    return HyperbolicityVerdict(verdict, dirs[k], worst, len(dirs))


def support_function(A: MatrixTuple, s) -> float:
    """Largest eigenvalue of <A, s>; the support function of the range hull."""
    if not A.hermitian:
        raise ValueError("support function requires a hermitian tuple")
    H = pencil_eval(A, s)
    return float(np.linalg.eigvalsh(H)[-1])


def line_poly_coeffs(A: MatrixTuple, xi, zeta) -> np.ndarray:
    """Coefficients c_0..c_N of t -> det-poly(xi + t*zeta).

    The map is a degree-N polynomial in t, so interpolation through N+1
    Chebyshev nodes (scaled by 1/(1+|xi|) for conditioning) recovers it
    exactly up to roundoff.
    """
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    N = A.N
    k = np.arange(N + 1)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * (N + 1))) / (1.0 + np.linalg.norm(xi))
    vals = np.array([det_poly(A, xi + t * zeta) for t in nodes])
    coeffs = np.polyfit(nodes, vals, N)[::-1]
    return coeffs


def localisation(A: MatrixTuple, xi, zeta, rtol: float = LOCALISATION_RTOL) -> tuple[int, complex]:
    """Order of vanishing and leading coefficient of t -> det-poly(xi + t*zeta).

    Returns ``(mu, c_mu)`` where ``mu`` is the index of the first coefficient
    exceeding ``rtol`` relative to the coefficient 1-norm.  Raises when the
    polynomial vanishes identically along the line.
    """
    coeffs = line_poly_coeffs(A, xi, zeta)
    scale = np.sum(np.abs(coeffs))
    if scale == 0.0 or not np.isfinite(scale):
        raise ValueError("polynomial vanishes identically along this line")
    for k, c in enumerate(coeffs):
        if abs(c) > rtol * scale:
            return k, complex(c)
    raise ValueError("polynomial vanishes identically along this line")


@dataclass(frozen=True)
class Localisation:
    """Localised polynomial at a base point of the determinantal variety."""

    base_point: np.ndarray
    multiplicity: int
    evaluator: Callable[[np.ndarray], complex] = field(repr=False)

    def __call__(self, zeta) -> complex:
        return self.evaluator(np.asarray(zeta, dtype=float))


_GENERIC_PROBE = np.array([0.9134, 0.3701, 0.1729, 0.5812, 0.2041, 0.7333, 0.4289, 0.6177])


def localise(A: MatrixTuple, xi) -> Localisation:
    """Build the localisation of the determinantal polynomial at ``xi``.

    The multiplicity is read off along a fixed generic probe direction and
    cross-checked on a second one; the evaluator returns the coefficient of
    ``t^mu`` along ``xi + t*zeta``, which is the localised polynomial at
    ``zeta`` and is homogeneous of degree ``mu``.
    """
    xi = np.asarray(xi, dtype=float)
    probe = _GENERIC_PROBE[: A.n + 1]
    mu, _ = localisation(A, xi, probe)
    mu2, _ = localisation(A, xi, np.roll(probe, 1) + 0.1)
    mu = min(mu, mu2)

    def evaluator(zeta: np.ndarray) -> complex:
        coeffs = line_poly_coeffs(A, xi, zeta)
        return complex(coeffs[mu])

    return Localisation(xi, mu, evaluator)
