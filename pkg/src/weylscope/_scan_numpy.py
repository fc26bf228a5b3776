"""Pure-NumPy implementation of the scan rational kernel.

``rational_table`` evaluates, for a block of grid points, the scalar factor
of the boundary-jump integrand attached to each (node, eigenvalue) pair:

    t = g - (-1)^(n+1) * conj(g),      g = (beta + i*eps)^(-n),

where ``beta = <x, s> - lambda``.  The caller contracts the table against
precomputed outer-product blades with a single matrix product.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def rational_table(xs: np.ndarray, lam: np.ndarray, eps: float, npow: int) -> np.ndarray:
    """Jump factors for a point block.

    Parameters
    ----------
    xs : (P, K) float64
        Pencil abscissae <x_p, s_k>.
    lam : (K, N) float64
        Pencil eigenvalues per node.
    eps : float
        Positive offset from the boundary.
    npow : int
        Tuple length; the kernel power.

    Returns
    -------
    (P, K*N) complex128 table of jump factors.
    """
    p, k = xs.shape
    n_eig = lam.shape[1]
    beta = xs[:, :, None] - lam[None, :, :]
    g = (beta + 1j * eps) ** (-npow)
    if npow % 2 == 0:
        t = 2.0 * g.real + 0.0j
    else:
        t = 2j * g.imag
    return t.reshape(p, k * n_eig)


def kernel_table(xs: np.ndarray, lam: np.ndarray, x0: float, npow: int) -> np.ndarray:
    """One-sided factors (beta + i*x0)^(-n) for the plane-wave kernel."""
    p, k = xs.shape
    n_eig = lam.shape[1]
    beta = xs[:, :, None] - lam[None, :, :]
    return ((beta + 1j * x0) ** (-npow)).reshape(p, k * n_eig)
