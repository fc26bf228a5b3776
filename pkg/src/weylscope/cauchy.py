"""Plane-wave Cauchy kernel of a matrix tuple and its boundary jumps.

For a hyperbolic tuple the operator Cauchy kernel at ``x = x0*e0 + xvec``
(``x0 != 0``) is the sphere integral

    G_x(A) = pref * (n-1)!/2 * (i/(2*pi))^n *
             integral_{S^{n-1}} (e0 + i s) ((<xvec,s> - x0 s) I - <A,s>)^{-n} ds

with ``pref = 1`` for ``x0 > 0`` and ``(-1)^(n+1)`` for ``x0 < 0``.  Each
node's inverse power lives in the commutative algebra generated by the
matrix pencil and the single Clifford vector ``s``; for hermitian tuples an
eigendecomposition of ``<A, s>`` reduces it to the scalar factors
``(beta + i*x0)^{-n}``, which is what the scan kernels in
:mod:`weylscope._scan` evaluate in bulk.  Non-hermitian tuples go through
complex-shift solves ``(B -+ i|x0| I)^{-1}`` instead.

The two-sided limit ``G_{x+eps*e0} - G_{x-eps*e0}`` recovers the density of
the symmetrised calculus as ``eps -> 0``; scanning its behaviour over a grid
classifies points as vanishing (lacuna candidate), convergent (smooth
density) or divergent (singular support).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _scan
from .clifford import CliffordMatrix
from .pencil import MatrixTuple, hyperbolicity_check, pencil_eval
from .quadrature import SphericalQuadrature
from .weyl import GridFunction, NotHyperbolicError, weyl_apply

__all__ = [
    "EPS_SCHEDULE",
    "JumpScanResult",
    "SingularScanResult",
    "commuting_spectral_kernel",
    "jump_density",
    "jump_vs_weyl_crosscheck",
    "plane_wave_kernel",
    "singular_scan",
]

EPS_SCHEDULE = (0.2, 0.1, 0.05, 0.025, 0.0125)
VANISH_FACTOR = 10.0
DIVERGE_RATIO = 1.8
CAUCHY_RATIO = 0.75
VANISH_EXTRAP_REL = 0.15
RELIABLE_REL = 0.2
QUAD_TOL_FLOOR = 1e-14
_CHUNK = 2048

VANISHING, CONVERGENT, DIVERGENT = "vanishing", "convergent_density", "divergent"
_CODES = (VANISHING, CONVERGENT, DIVERGENT)


def _kernel_constant(n: int) -> complex:
    return math.factorial(n - 1) / 2.0 * (1j / (2.0 * np.pi)) ** n


def _prefactor(n: int, x0: float) -> float:
    return 1.0 if x0 > 0 else (-1.0) ** (n + 1)


# -- eigen data for the hermitian fast path ---------------------------------

_EIG_CACHE: dict = {}


def _eigen_data(A: MatrixTuple, quad: SphericalQuadrature):
    """Per-node eigendecomposition of <A, s> with blade-baked outer products.

    Returns ``(lam, baked)`` where ``lam[k, i]`` are the pencil eigenvalues
    and ``baked`` has shape (K*N, (n+1)*N*N): row (k, i) holds
    ``w_k * blade_c(s_k) * v_i v_i^*`` flattened over the blade and matrix
    axes (blade_0 = 1 for e0, blade_j = i * s_kj for e_j).
    """
    key = (A.cache_key(), quad.fingerprint)
    if key in _EIG_CACHE:
        return _EIG_CACHE[key]
    nodes, w = quad.nodes, quad.weights
    K, n = nodes.shape
    N = A.N
    pencils = np.einsum("kj,jab->kab", nodes, A.stack())
    lam, V = np.linalg.eigh(pencils)
    outers = np.einsum("kai,kbi->kiab", V, V.conj())  # (K, N, N, N)
    blades = np.concatenate(
        [np.ones((K, 1)), 1j * nodes], axis=1, dtype=complex
    )  # (K, n+1)
    baked = np.einsum("k,kc,kiab->kicab", w, blades, outers)
    baked = np.ascontiguousarray(baked.reshape(K * N, (n + 1) * N * N))
    _EIG_CACHE[key] = (np.ascontiguousarray(lam), baked)
    if len(_EIG_CACHE) > 16:
        _EIG_CACHE.pop(next(iter(_EIG_CACHE)))
    return _EIG_CACHE[key]


def _check_admissible(A: MatrixTuple) -> None:
    if A.hermitian:
        return
    verdict = hyperbolicity_check(A)
    if not verdict.admissible:
        raise NotHyperbolicError(
            f"tuple refuted as hyperbolic (max |Im| = {verdict.worst_imag:.3e})"
        )


def _coeffs_to_clifford(A: MatrixTuple, flat: np.ndarray) -> CliffordMatrix:
    """Reshape a ((n+1)*N*N,) row into a paravector-supported CliffordMatrix."""
    n, N = A.n, A.N
    parts = flat.reshape(n + 1, N, N)
    coeffs = np.zeros((1 << n, N, N), dtype=complex)
    coeffs[0] = parts[0]
    for j in range(n):
        coeffs[1 << j] = parts[j + 1]
    return CliffordMatrix(n, N, coeffs)


def _kernel_hermitian(A: MatrixTuple, x0: float, points: np.ndarray, quad) -> np.ndarray:
    """One-sided kernel values for a block of points; shape (P, (n+1)*N*N)."""
    lam, baked = _eigen_data(A, quad)
    xs = np.ascontiguousarray(points @ quad.nodes.T)
    table = _scan.kernel_table(xs, lam, x0, A.n)
    out = table @ baked
    return _prefactor(A.n, x0) * _kernel_constant(A.n) * out


def _jump_hermitian(A: MatrixTuple, points: np.ndarray, eps: float, quad) -> np.ndarray:
    lam, baked = _eigen_data(A, quad)
    xs = np.ascontiguousarray(points @ quad.nodes.T)
    table = _scan.rational_table(xs, lam, eps, A.n)
    return _kernel_constant(A.n) * (table @ baked)


def _kernel_solve(A: MatrixTuple, x0: float, xvec: np.ndarray, quad) -> np.ndarray:
    """Complex-shift-solve route, valid for any hyperbolic tuple.

    Computes (B e0 - x0 s)^{-n} = (B e0 + x0 s)^n (B^2 + x0^2 I)^{-n} per node
    with (B^2 + x0^2 I)^{-1} = (B + i|x0| I)^{-1} (B - i|x0| I)^{-1}.
    """
    n, N = A.n, A.N
    nodes, w = quad.nodes, quad.weights
    K = len(w)
    eye = np.eye(N, dtype=complex)
    B = np.einsum("k,ab->kab", nodes @ xvec, eye) - np.einsum("kj,jab->kab", nodes, A.stack())
    shift = 1j * abs(x0)
    inv = np.linalg.solve(B + shift * eye, np.broadcast_to(eye, (K, N, N)))
    inv = inv @ np.linalg.solve(B - shift * eye, np.broadcast_to(eye, (K, N, N)))
    denom = inv
    for _ in range(n - 1):
        denom = denom @ inv
    powers = [np.broadcast_to(eye, (K, N, N))]
    for _ in range(n):
        powers.append(powers[-1] @ B)
    p_part = np.zeros((K, N, N), dtype=complex)
    q_part = np.zeros((K, N, N), dtype=complex)
    for j in range(n + 1):
        coeff = math.comb(n, j) * x0**j
        if j % 2 == 0:
            p_part += coeff * (-1) ** (j // 2) * powers[n - j]
        else:
            q_part += coeff * (-1) ** ((j - 1) // 2) * powers[n - j]
    p_part = p_part @ denom
    q_part = q_part @ denom
    flat = np.empty((n + 1, N, N), dtype=complex)
    flat[0] = np.einsum("k,kab->ab", w, p_part - 1j * q_part)
    vec = q_part + 1j * p_part
    for j in range(n):
        flat[j + 1] = np.einsum("k,k,kab->ab", w, nodes[:, j], vec)
    return (_prefactor(n, x0) * _kernel_constant(n)) * flat.reshape(-1)


def plane_wave_kernel(
    A: MatrixTuple,
    x,
    quad: SphericalQuadrature | None = None,
) -> CliffordMatrix:
    """Operator Cauchy kernel at a point off the hyperplane x0 = 0.

    ``x`` is a :class:`weylscope.clifford.PairedVector` or an (n+1)-coordinate
    array.  Hermitian tuples use the eigendecomposition fast path; other
    tuples must survive :func:`weylscope.pencil.hyperbolicity_check` and go
    through complex-shift solves.
    """
    coords = np.asarray(x.coords() if hasattr(x, "coords") else x, dtype=float)
    x0, xvec = float(coords[0]), coords[1:]
    if len(xvec) != A.n:
        raise ValueError("point dimension does not match tuple length")
    if x0 == 0.0:
        raise ValueError("kernel is defined off the hyperplane x0 = 0")
    quad = quad or SphericalQuadrature.for_dimension(A.n)
    _check_admissible(A)
    if A.hermitian:
        flat = _kernel_hermitian(A, x0, xvec[None, :], quad)[0]
    else:
        flat = _kernel_solve(A, x0, xvec, quad)
    return _coeffs_to_clifford(A, flat)


# -- jump scans ---------------------------------------------------------------


@dataclass(frozen=True)
class JumpScanResult:
    """Two-sided kernel jumps at one point across an epsilon schedule."""

    point: np.ndarray
    epsilons: np.ndarray
    jump_values: tuple
    jump_norms: np.ndarray
    classification: str
    extrapolated_density: np.ndarray | None
    quad_tol: float

    @property
    def density_norm(self) -> float:
        if self.extrapolated_density is None:
            return float("nan")
        return float(np.linalg.norm(self.extrapolated_density))


@dataclass(frozen=True)
class SingularScanResult:
    """Vectorised jump classification over a grid of points.

    Norms are Frobenius-based module norms, consistent with the thresholds;
    ``extrapolated_e0`` holds the Richardson-extrapolated density matrix for
    convergent points and NaN elsewhere.
    """

    points: np.ndarray
    epsilons: np.ndarray
    classification: np.ndarray  # int8 codes into _CODES
    jump_norms: np.ndarray  # (P, E)
    quad_tol: np.ndarray  # (P,)
    extrapolated_e0: np.ndarray  # (P, N, N)
    meta: dict = field(default_factory=dict)

    def labels(self) -> np.ndarray:
        return np.array([_CODES[c] for c in self.classification])

    @property
    def jump_norm_at_eps_min(self) -> np.ndarray:
        return self.jump_norms[:, -1]

    def density_norms(self) -> np.ndarray:
        out = np.linalg.norm(self.extrapolated_e0, axis=(1, 2))
        out[self.classification == 0] = 0.0
        out[self.classification == 2] = np.nan
        return out


def _validate_schedule(eps_schedule) -> np.ndarray:
    eps = np.asarray(eps_schedule, dtype=float)
    if len(eps) < 3 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ValueError("epsilon schedule must be >= 3 strictly decreasing positive values")
    return eps


def _classify_values(vals: np.ndarray, vals_coarse: np.ndarray, N: int, eps):
    """Classification and extrapolation from refined/base jump tables.

    ``vals`` has shape (P, E, cols) over a decreasing epsilon schedule.  Per
    point the longest prefix of epsilons whose rule-refinement error stays
    below RELIABLE_REL of the jump norm is retained (at least three), since
    the sphere rules lose resolution once the integrand peak width drops
    below the node spacing.  On that prefix, in order: the two smallest
    reliable norms below VANISH_FACTOR times the quadrature tolerance vanish;
    growth by DIVERGE_RATIO per halving twice running diverges; differences
    contracting below CAUCHY_RATIO give a convergent density, Richardson
    extrapolated, which is downgraded to vanishing when the extrapolated
    limit is small against both the tolerance and the last jump norm.
    Everything else diverges too slowly to extrapolate and is reported
    divergent.

    Returns ``(norms, qtol, codes, extrap_e0, prefix_len)``.
    """
    P, E, cols = vals.shape
    norms = np.linalg.norm(vals, axis=2)
    err = np.linalg.norm(vals - vals_coarse, axis=2)
    floor = QUAD_TOL_FLOOR * (1.0 + norms)
    reliable = err <= np.maximum(RELIABLE_REL * norms, floor)
    true_prefix = np.where(reliable.all(axis=1), E, reliable.argmin(axis=1))
    # Fewer than three resolved epsilons means the point sits so close to the
    # singular set that the rule cannot see the limit; such points only ever
    # classify as divergent below.
    forced = true_prefix < 3
    prefix = np.clip(true_prefix, 3, E)
    last = prefix - 1

    def take(arr, idx):
        return np.take_along_axis(arr, idx[:, None], axis=1)[:, 0]

    n_last = take(norms, last)
    n_prev = take(norms, last - 1)
    n_prev2 = take(norms, last - 2)
    qtol = np.maximum.reduce([take(err, last), take(err, last - 1), take(floor, last)])

    diffs = np.diff(vals, axis=1)
    d_norm = np.linalg.norm(diffs, axis=2)
    d_last = take(d_norm, last - 1)
    d_prev = take(d_norm, last - 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        vanish_direct = (np.maximum(n_last, n_prev) < VANISH_FACTOR * qtol) & ~forced
        diverge = (n_last / n_prev >= DIVERGE_RATIO) & (n_prev / n_prev2 >= DIVERGE_RATIO)
        rho = d_last / d_prev
        cauchy = np.isfinite(rho) & (rho < CAUCHY_RATIO) & ~forced

    # Component-wise quadratic-in-eps extrapolation through the three
    # smallest reliable offsets (Lagrange weights evaluated at eps = 0).
    eps_arr = np.asarray(eps, dtype=float)
    e0v = eps_arr[last]
    e1v = eps_arr[last - 1]
    e2v = eps_arr[last - 2]
    w0 = (e1v * e2v) / ((e0v - e1v) * (e0v - e2v))
    w1 = (e0v * e2v) / ((e1v - e0v) * (e1v - e2v))
    w2 = (e0v * e1v) / ((e2v - e0v) * (e2v - e1v))
    v_last = np.take_along_axis(vals, last[:, None, None], axis=1)[:, 0]
    v_prev = np.take_along_axis(vals, (last - 1)[:, None, None], axis=1)[:, 0]
    v_prev2 = np.take_along_axis(vals, (last - 2)[:, None, None], axis=1)[:, 0]
    extrap_full = w0[:, None] * v_last + w1[:, None] * v_prev + w2[:, None] * v_prev2
    extrap_norm = np.linalg.norm(extrap_full, axis=1)
    vanish_extrap = cauchy & (
        extrap_norm < np.maximum(VANISH_FACTOR * qtol, VANISH_EXTRAP_REL * n_last)
    )

    codes = np.full(P, 2, dtype=np.int8)
    codes[cauchy] = 1
    codes[diverge] = 2
    codes[vanish_direct | vanish_extrap] = 0
    extrap_e0 = extrap_full[:, : N * N].reshape(P, N, N).copy()
    extrap_e0[codes != 1] = np.nan
    return norms, qtol, codes, extrap_e0, prefix


def _scan_chunk(A, pts, eps, quad, quad_ref):
    """Jump norms, quad tolerances and extrapolation for one point block."""
    n, N = A.n, A.N
    P, E = len(pts), len(eps)
    cols = (n + 1) * N * N
    vals = np.empty((P, E, cols), dtype=complex)
    vals_coarse = np.empty_like(vals)
    for e, ep in enumerate(eps):
        vals_coarse[:, e] = _jump_hermitian(A, pts, ep, quad)
        vals[:, e] = _jump_hermitian(A, pts, ep, quad_ref)
    norms, qtol, codes, extrap, _ = _classify_values(vals, vals_coarse, N, eps)
    return norms, qtol, codes, extrap


def singular_scan(
    A: MatrixTuple,
    points,
    eps_schedule=EPS_SCHEDULE,
    quad: SphericalQuadrature | None = None,
    threads: int | None = None,
) -> SingularScanResult:
    """Classify the jump behaviour at every point of a finite grid.

    Hermitian tuples run through the bulk kernels (chunked, thread-parallel
    with a deterministic chunk order); other admissible tuples fall back to
    per-point evaluation.  The refined-rule values are reported and the
    base-rule difference at the two smallest epsilons sets the per-point
    quadrature tolerance.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != A.n:
        raise ValueError("points must have one column per tuple entry")
    eps = _validate_schedule(eps_schedule)
    quad = quad or default_jump_quad(A.n, float(eps[-1]))
    quad_ref = quad.refined().rotated()
    _check_admissible(A)
    P, E, N = len(pts), len(eps), A.N
    norms = np.empty((P, E))
    qtol = np.empty(P)
    codes = np.empty(P, dtype=np.int8)
    extrap = np.empty((P, N, N), dtype=complex)

    if A.hermitian:
        chunks = [(lo, min(lo + _CHUNK, P)) for lo in range(0, P, _CHUNK)]

        def run(bounds):
            lo, hi = bounds
            return _scan_chunk(A, pts[lo:hi], eps, quad, quad_ref)

        if threads and threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, chunks))
        else:
            results = [run(c) for c in chunks]
        for (lo, hi), (cn, cq, cc, ce) in zip(chunks, results):
            norms[lo:hi], qtol[lo:hi], codes[lo:hi], extrap[lo:hi] = cn, cq, cc, ce
    else:
        for p, xvec in enumerate(pts):
            res = jump_density(A, xvec, eps, quad)
            norms[p] = res.jump_norms
            qtol[p] = res.quad_tol
            codes[p] = _CODES.index(res.classification)
            extrap[p] = res.extrapolated_density if res.extrapolated_density is not None else np.nan
    meta = {
        "eps_schedule": [float(e) for e in eps],
        "quad_nodes": len(quad.weights),
        "quad_nodes_refined": len(quad_ref.weights),
        "backend": _scan.BACKEND,
        "thresholds": {
            "vanish_factor": VANISH_FACTOR,
            "diverge_ratio": DIVERGE_RATIO,
            "cauchy_ratio": CAUCHY_RATIO,
        },
    }
    return SingularScanResult(pts, eps, codes, norms, qtol, extrap, meta)


def default_jump_quad(n: int, eps_min: float) -> SphericalQuadrature:
    """Rule dense enough to resolve integrand peaks of width ~eps_min.

    The kernel integrands develop ridges of angular width about
    eps / |grad beta| as the offset shrinks, so the node spacing tracks the
    smallest scheduled epsilon.  Points much closer to the singular variety
    than the resolved scale are classified divergent by construction.
    """
    if n == 1:
        return SphericalQuadrature.point_pair()
    if n == 2:
        count = int(min(8192, max(1024, 2 ** np.ceil(np.log2(24.0 / eps_min)))))
        return SphericalQuadrature.circle(count)
    polar = int(min(512, max(24, np.ceil(5.0 / eps_min))))
    return SphericalQuadrature.sphere(polar)


def jump_density(
    A: MatrixTuple,
    xvec,
    eps_schedule=EPS_SCHEDULE,
    quad: SphericalQuadrature | None = None,
) -> JumpScanResult:
    """Two-sided kernel jumps at one point, classified and extrapolated."""
    xvec = np.asarray(xvec, dtype=float)
    eps = _validate_schedule(eps_schedule)
    quad = quad or default_jump_quad(A.n, float(eps[-1]))
    quad_ref = quad.refined().rotated()
    _check_admissible(A)
    n, N = A.n, A.N
    if A.hermitian:
        pts = xvec[None, :]
        rows = np.stack([_jump_hermitian(A, pts, ep, quad_ref)[0] for ep in eps])
        rows_coarse = np.stack([_jump_hermitian(A, pts, ep, quad)[0] for ep in eps])
    else:
        def one(ep, q):
            plus = _kernel_solve(A, ep, xvec, q)
            minus = _kernel_solve(A, -ep, xvec, q)
            return plus - minus

        rows = np.stack([one(ep, quad_ref) for ep in eps])
        rows_coarse = np.stack([one(ep, quad) for ep in eps])
    norms, qtol, codes, extrap_e0, _ = _classify_values(
        rows[None, :, :], rows_coarse[None, :, :], N, eps
    )
    code = int(codes[0])
    extrapolated = extrap_e0[0] if code == 1 else None
    jumps = tuple(_coeffs_to_clifford(A, row) for row in rows)
    return JumpScanResult(xvec, eps, jumps, norms[0], _CODES[code], extrapolated, float(qtol[0]))


def jump_vs_weyl_crosscheck(
    A: MatrixTuple,
    f: GridFunction,
    eps_schedule=EPS_SCHEDULE,
    quad: SphericalQuadrature | None = None,
    f_floor: float = 1e-9,
    refuse_tol: float = 1e-3,
):
    """Pair the extrapolated jump density with f and compare to the calculus.

    The left side sums density(x) * f(x) * cell_volume over grid points whose
    samples are significant; vanishing points contribute zero.  Points whose
    jumps do not converge are only tolerated where their potential
    contribution ``|f| * ||jump|| * cell`` stays below ``refuse_tol``.
    Returns ``(lhs, rhs, discrepancy)``.
    """
    cell = float(np.prod(f.spacing))
    axes = [f.origin[j] + f.spacing[j] * np.arange(f.shape[j]) for j in range(f.n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.n)
    fv = f.values.reshape(-1)
    peak = float(np.max(np.abs(fv)))
    active = np.abs(fv) > f_floor * peak
    scan = singular_scan(A, mesh[active], eps_schedule, quad)
    bad = scan.classification == 2
    if np.any(bad):
        contribution = np.abs(fv[active][bad]) * scan.jump_norms[bad, -1] * cell
        if contribution.max() > refuse_tol:
            raise ValueError(
                "jump density does not converge where f is significant "
                f"(worst cell contribution {contribution.max():.3e})"
            )
    dens = scan.extrapolated_e0.copy()
    dens[scan.classification != 1] = 0.0
    lhs = np.einsum("p,pab->ab", fv[active], dens) * cell
    rhs = weyl_apply(A, f).value
    return lhs, rhs, float(np.linalg.norm(lhs - rhs, 2))


def commuting_spectral_kernel(A: MatrixTuple, x) -> CliffordMatrix:
    """Spectral-sum kernel for commuting hermitian tuples.

    Simultaneous diagonalisation gives joint eigenvalues lambda_i in R^n with
    projectors P_i; the kernel equals the sum of the scalar fundamental
    solution at ``x - lambda_i`` times P_i, the oracle against which the
    plane-wave route is checked.
    """
    from .clifford import PairedVector, cauchy_kernel

    if not A.hermitian:
        raise ValueError("spectral route requires hermitian matrices")
    stack = A.stack()
    for a in stack:
        for b in stack:
            if np.linalg.norm(a @ b - b @ a, 2) > 1e-10 * max(1.0, A.norm() ** 2):
                raise ValueError("spectral route requires a commuting tuple")
    coords = np.asarray(x.coords() if hasattr(x, "coords") else x, dtype=float)
    x0, xvec = float(coords[0]), coords[1:]
    weights = 1.0 / np.sqrt(np.arange(2, A.n + 2, dtype=float))
    _, U = np.linalg.eigh(np.einsum("j,jab->ab", weights, stack))
    joint = np.einsum("jab,ai,bi->ji", stack, U.conj(), U).real  # (n, N)
    out = CliffordMatrix.zero(A.n, A.N)
    for i in range(A.N):
        proj = np.outer(U[:, i], U[:, i].conj())
        scalar = cauchy_kernel(PairedVector(x0, xvec - joint[:, i]))
        out = out + CliffordMatrix(
            A.n, A.N, np.einsum("s,ab->sab", scalar.coeffs, proj)
        )
    return out
