"""Built-in matrix tuples mirrored by the bundled JSON fixtures."""

from __future__ import annotations

import numpy as np

from .pencil import MatrixTuple

__all__ = [
    "PAULI_1",
    "PAULI_2",
    "PAULI_3",
    "cardioid_pair",
    "circle_point_pair",
    "diag_pair",
    "nilpotent_pair",
    "pauli_pair",
    "pauli_triple",
    "skew_single",
]

PAULI_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def pauli_triple() -> MatrixTuple:
    """The noncommuting 2x2 triple with <s, sigma>^2 = |s|^2 I."""
    return MatrixTuple((PAULI_1, PAULI_2, PAULI_3), name="pauli")


def pauli_pair() -> MatrixTuple:
    return MatrixTuple((PAULI_1, PAULI_2), name="pauli-pair")


def diag_pair() -> MatrixTuple:
    """Commuting projections; the calculus degenerates to two point masses."""
    return MatrixTuple((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), name="diagpair")


def nilpotent_pair() -> MatrixTuple:
    """Triangularisable non-hermitian pair with real pencil spectra."""
    a1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    a2 = np.array([[0.0, 1.0], [0.0, 1.0]])
    return MatrixTuple((a1, a2), name="nilpair")


def cardioid_pair() -> MatrixTuple:
    """Hermitian 3x3 pair whose boundary curve has an inner lobe and a
    vertical double tangent; drives the lacuna tests."""
    a1 = np.diag([1.0, -1.0, -1.0])
    a2 = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
    return MatrixTuple((a1, a2), name="example63")


def circle_point_pair(a=(2.0, 0.0)) -> MatrixTuple:
    """Block pair (a_1 (+) sigma_1, a_2 (+) sigma_2): circle plus isolated point."""
    a = np.asarray(a, dtype=float)
    if a.shape != (2,):
        raise ValueError("offset must be a 2-vector")
    m1 = np.zeros((3, 3), dtype=complex)
    m2 = np.zeros((3, 3), dtype=complex)
    m1[0, 0] = a[0]
    m2[0, 0] = a[1]
    m1[1:, 1:] = PAULI_1
    m2[1:, 1:] = PAULI_2
    return MatrixTuple((m1, m2), name="pauli2")


def skew_single() -> MatrixTuple:
    """Rotation generator with spectrum {i, -i}; not hyperbolic."""
    return MatrixTuple((np.array([[0.0, 1.0], [-1.0, 0.0]]),), name="skew")
