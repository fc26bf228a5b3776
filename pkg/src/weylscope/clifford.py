"""Complex Clifford algebras with scalar or matrix coefficients.

The algebra over ``n`` anticommuting generators is spanned by basis blades
``e_S`` indexed by subsets ``S`` of ``{1, ..., n}``, encoded here as n-bit
masks (bit ``j-1`` set means generator ``j`` belongs to ``S``).  The
generators satisfy ``e_j**2 = -1`` and ``e_j e_k = -e_k e_j``, so that a
vector ``x = sum x_j e_j`` obeys ``x**2 = -|x|**2``.  Paravectors
``x0*e0 + x`` model points of R^{n+1}; their conjugate is ``x0*e0 - x`` and
nonzero paravectors are invertible with inverse ``conj(x) / |x|**2``.

Coefficients are either complex scalars (:class:`CliffordElement`) or complex
N-by-N matrices (:class:`CliffordMatrix`); both share the same blade sign
bookkeeping, which is exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy.special import gamma as _gamma

__all__ = [
    "MAX_GENERATORS",
    "CliffordElement",
    "CliffordMatrix",
    "PairedVector",
    "blade_product",
    "cauchy_kernel",
    "chi_minus",
    "chi_plus",
    "dirac_residual",
    "kelvin_inverse",
    "sphere_area",
    "vector_func_calc",
]

MAX_GENERATORS = 8


def _popcount(v):
    return np.bitwise_count(np.asarray(v, dtype=np.uint32))


@lru_cache(maxsize=None)
def _blade_tables(n: int):
    """Sign and target-index tables for the blade product in dimension n.

    ``idx[S, R] = S ^ R`` and ``sign[S, R]`` counts generator transpositions
    plus squared generators, so ``e_S e_R = sign[S, R] * e_{idx[S, R]}``.
    """
    if not 0 <= n <= MAX_GENERATORS:
        raise ValueError(f"generator count must lie in [0, {MAX_GENERATORS}], got {n}")
    dim = 1 << n
    masks = np.arange(dim, dtype=np.uint32)
    s_col = masks[:, None]
    r_row = masks[None, :]
    swaps = np.zeros((dim, dim), dtype=np.int64)
    for j in range(n):
        above_j = np.uint32(~((1 << (j + 1)) - 1) & (dim - 1))
        swaps += ((r_row >> j) & 1) * _popcount(s_col & above_j)
    swaps += _popcount(s_col & r_row)
    sign = np.where(swaps % 2 == 0, 1, -1).astype(np.int8)
    idx = (s_col ^ r_row).astype(np.intp)
    return sign, idx


def blade_product(s_mask: int, r_mask: int, n: int) -> tuple[int, int]:
    """Multiply two basis blades: returns ``(sign, target_mask)``."""
    if s_mask >> n or r_mask >> n:
        raise ValueError("blade mask exceeds generator count")
    sign, idx = _blade_tables(n)
    return int(sign[s_mask, r_mask]), int(idx[s_mask, r_mask])


def _conj_signs(n: int) -> np.ndarray:
    """Per-blade conjugation signs: conj(e_S) = (-1)^(|S|(|S|+1)/2) e_S."""
    grades = _popcount(np.arange(1 << n, dtype=np.uint32)).astype(np.int64)
    return np.where((grades * (grades + 1) // 2) % 2 == 0, 1.0, -1.0)


def _mul_coeffs(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Blade-wise product of coefficient arrays indexed by mask."""
    sign, idx = _blade_tables(n)
    dim = 1 << n
    if u.ndim == 1 and v.ndim == 1:
        terms = sign * np.multiply.outer(u, v)
        out = np.zeros(dim, dtype=complex)
        np.add.at(out, idx, terms)
        return out
    # Matrix coefficients: loop over nonzero blades, products stay sparse.
    out_shape = (dim,) + np.broadcast_shapes(u.shape[1:], v.shape[1:])
    out = np.zeros(out_shape, dtype=complex)
    u_nz = [s for s in range(dim) if np.any(u[s])]
    v_nz = [r for r in range(dim) if np.any(v[r])]
    for s in u_nz:
        us = u[s]
        for r in v_nz:
            t = idx[s, r]
            if u.ndim > 1 and v.ndim > 1:
                out[t] += sign[s, r] * (us @ v[r])
            elif u.ndim > 1:
                out[t] += sign[s, r] * us * v[r]
            else:
                out[t] += sign[s, r] * us * v[r]
    return out


@dataclass(frozen=True, eq=False)
class CliffordElement:
    """Element of the complex Clifford algebra with scalar coefficients."""

    n: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_GENERATORS:
            raise ValueError(f"generator count must lie in [0, {MAX_GENERATORS}]")
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients, got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "CliffordElement":
        return cls(n, np.zeros(1 << n, dtype=complex))

    @classmethod
    def scalar(cls, n: int, value: complex) -> "CliffordElement":
        c = np.zeros(1 << n, dtype=complex)
        c[0] = value
        return cls(n, c)

    @classmethod
    def blade(cls, n: int, mask: int, value: complex = 1.0) -> "CliffordElement":
        c = np.zeros(1 << n, dtype=complex)
        c[mask] = value
        return cls(n, c)

    @classmethod
    def from_dict(cls, n: int, entries: Mapping[int, complex]) -> "CliffordElement":
        c = np.zeros(1 << n, dtype=complex)
        for mask, val in entries.items():
            c[mask] += val
        return cls(n, c)

    @classmethod
    def vector(cls, xvec: np.ndarray, n: int | None = None) -> "CliffordElement":
        xvec = np.asarray(xvec, dtype=float)
        n = len(xvec) if n is None else n
        c = np.zeros(1 << n, dtype=complex)
        for j, xj in enumerate(xvec):
            c[1 << j] = xj
        return cls(n, c)

    # -- structure ---------------------------------------------------------
    def coeff(self, mask: int) -> complex:
        return complex(self.coeffs[mask])

    @property
    def scalar_part(self) -> complex:
        return complex(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        return np.array([self.coeffs[1 << j] for j in range(self.n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def conj(self) -> "CliffordElement":
        return CliffordElement(self.n, _conj_signs(self.n) * np.conj(self.coeffs))

    def inner(self, other: "CliffordElement") -> complex:
        """(u, v) = [u conj(v)]_0 = sum_S u_S conj(v_S)."""
        return complex(np.sum(self.coeffs * np.conj(other.coeffs)))

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.n != other.n:
            raise ValueError("generator-count mismatch")

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        return CliffordElement(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        return CliffordElement(self.n, self.coeffs - other.coeffs)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.n, -self.coeffs)

    def scale(self, a: complex) -> "CliffordElement":
        return CliffordElement(self.n, a * self.coeffs)

    def __mul__(self, other):
        if isinstance(other, CliffordElement):
            self._check(other)
            return CliffordElement(self.n, _mul_coeffs(self.n, self.coeffs, other.coeffs))
        if isinstance(other, CliffordMatrix):
            self._check(other)
            return CliffordMatrix(self.n, other.N, _mul_coeffs(self.n, self.coeffs, other.coeffs))
        return self.scale(other)

    def __rmul__(self, a):
        return self.scale(a)

    def approx_eq(self, other: "CliffordElement", tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)


@dataclass(frozen=True, eq=False)
class CliffordMatrix:
    """Clifford element whose coefficients are complex N-by-N matrices.

    Models right-module homomorphisms; the module norm is
    ``sqrt(sum_S ||T_S||**2)`` with spectral norms of the coefficients.
    """

    n: int
    N: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.shape != (1 << self.n, self.N, self.N):
            raise ValueError(f"expected shape {(1 << self.n, self.N, self.N)}, got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zero(cls, n: int, N: int) -> "CliffordMatrix":
        return cls(n, N, np.zeros((1 << n, N, N), dtype=complex))

    @classmethod
    def from_matrix(cls, n: int, T: np.ndarray) -> "CliffordMatrix":
        T = np.asarray(T, dtype=complex)
        c = np.zeros((1 << n,) + T.shape, dtype=complex)
        c[0] = T
        return cls(n, T.shape[0], c)

    def coeff(self, mask: int) -> np.ndarray:
        return np.array(self.coeffs[mask])

    @property
    def e0_part(self) -> np.ndarray:
        return np.array(self.coeffs[0])

    def norm(self) -> float:
        return float(np.sqrt(sum(np.linalg.norm(c, 2) ** 2 for c in self.coeffs)))

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("generator-count mismatch")

    def __add__(self, other: "CliffordMatrix") -> "CliffordMatrix":
        self._check(other)
        return CliffordMatrix(self.n, self.N, self.coeffs + other.coeffs)

    def __sub__(self, other: "CliffordMatrix") -> "CliffordMatrix":
        self._check(other)
        return CliffordMatrix(self.n, self.N, self.coeffs - other.coeffs)

    def __neg__(self) -> "CliffordMatrix":
        return CliffordMatrix(self.n, self.N, -self.coeffs)

    def scale(self, a: complex) -> "CliffordMatrix":
        return CliffordMatrix(self.n, self.N, a * self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (CliffordElement, CliffordMatrix)):
            self._check(other)
            out = _mul_coeffs(self.n, self.coeffs, other.coeffs)
            return CliffordMatrix(self.n, self.N, out)
        return self.scale(other)

    def __rmul__(self, a):
        if isinstance(a, CliffordElement):
            return CliffordMatrix(self.n, self.N, _mul_coeffs(self.n, a.coeffs, self.coeffs))
        return self.scale(a)

    def approx_eq(self, other: "CliffordMatrix", tol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)


@dataclass(frozen=True)
class PairedVector:
    """Point x = x0*e0 + sum x_j e_j of R^{n+1} seen inside the algebra."""

    x0: float
    xvec: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.xvec, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "xvec", arr)
        object.__setattr__(self, "x0", float(self.x0))

    @classmethod
    def from_coords(cls, coords) -> "PairedVector":
        coords = np.asarray(coords, dtype=float)
        return cls(coords[0], coords[1:])

    @property
    def n(self) -> int:
        return len(self.xvec)

    def coords(self) -> np.ndarray:
        return np.concatenate(([self.x0], self.xvec))

    def norm(self) -> float:
        return float(math.hypot(self.x0, float(np.linalg.norm(self.xvec))))

    def as_element(self) -> CliffordElement:
        c = np.zeros(1 << self.n, dtype=complex)
        c[0] = self.x0
        for j, xj in enumerate(self.xvec):
            c[1 << j] = xj
        return CliffordElement(self.n, c)

    def conj_element(self) -> CliffordElement:
        c = np.zeros(1 << self.n, dtype=complex)
        c[0] = self.x0
        for j, xj in enumerate(self.xvec):
            c[1 << j] = -xj
        return CliffordElement(self.n, c)


def kelvin_inverse(x: PairedVector) -> CliffordElement:
    """Inverse conj(x)/|x|^2 of a nonzero paravector."""
    nrm2 = x.norm() ** 2
    if nrm2 == 0.0:
        raise ValueError("zero paravector has no inverse")
    return x.conj_element().scale(1.0 / nrm2)


def chi_plus(xvec: np.ndarray) -> CliffordElement:
    """Idempotent (e0 + i*x/|x|)/2 attached to a nonzero vector."""
    xvec = np.asarray(xvec, dtype=float)
    r = np.linalg.norm(xvec)
    if r == 0.0:
        raise ValueError("idempotents are undefined at the zero vector")
    n = len(xvec)
    out = CliffordElement.scalar(n, 0.5) + CliffordElement.vector(xvec / r).scale(0.5j)
    return out


def chi_minus(xvec: np.ndarray) -> CliffordElement:
    xvec = np.asarray(xvec, dtype=float)
    n = len(xvec)
    return CliffordElement.scalar(n, 1.0) - chi_plus(xvec)


def vector_func_calc(f: Callable[[float], complex], xvec: np.ndarray) -> CliffordElement:
    """Apply f to the element i*x via its two-point spectrum {|x|, -|x|}.

    Returns ``f(|x|)*chi_plus(x) + f(-|x|)*chi_minus(x)``; at ``x = 0`` the
    spectrum collapses to ``{0}`` and the result is ``f(0)*e0``.
    """
    xvec = np.asarray(xvec, dtype=float)
    r = float(np.linalg.norm(xvec))
    if r == 0.0:
        return CliffordElement.scalar(len(xvec), f(0.0))
    return chi_plus(xvec).scale(f(r)) + chi_minus(xvec).scale(f(-r))


def sphere_area(n: int) -> float:
    """Surface area of the unit n-sphere embedded in R^{n+1}."""
    return float(2.0 * np.pi ** ((n + 1) / 2.0) / _gamma((n + 1) / 2.0))


def cauchy_kernel(x: PairedVector) -> CliffordElement:
    """Fundamental solution of the generalised Cauchy-Riemann operator.

    ``E(x) = conj(x) / (sphere_area(n) * |x|^(n+1))`` for nonzero paravectors;
    the Dirac operator ``sum_j e_j d/dx_j`` over R^{n+1} annihilates it away
    from the origin, which :func:`dirac_residual` checks numerically.
    """
    r = x.norm()
    if r == 0.0:
        raise ValueError("kernel is singular at the origin")
    n = x.n
    return x.conj_element().scale(1.0 / (sphere_area(n) * r ** (n + 1)))


def dirac_residual(func, point, h: float, n: int):
    """Central-difference Dirac operator applied to a Clifford-valued map.

    ``func`` maps coordinate arrays of length n+1 to :class:`CliffordElement`
    or :class:`CliffordMatrix`; the residual is ``sum_j e_j * d_j func`` with
    second-order differences of step ``h``, returned in the same value type.
    """
    point = np.asarray(point, dtype=float)
    total = None
    for j in range(n + 1):
        step = np.zeros(n + 1)
        step[j] = h
        diff = (func(point + step) - func(point - step)).scale(1.0 / (2.0 * h))
        term = diff if j == 0 else CliffordElement.blade(n, 1 << (j - 1)) * diff
        total = term if total is None else total + term
    return total
