"""Boundary-generating curves, numerical-range hulls and wave fronts.

For a pair of hermitian matrices the support lines of the numerical range
are ``<x, (cos t, sin t)> = lambda_k(t)`` over eigenvalue branches of the
rotated pencil ``A(t) = cos t A_1 + sin t A_2``.  The envelope of this line
family (all branches, not only the extreme one) is the boundary-generating
curve; its convex hull is the numerical range.  Each envelope point is
computed two ways and cross-checked: from the eigenvalue derivative
``lambda' = <A'(t) u, u>`` and as the pair of quadratic forms
``(<A_1 u, u>, <A_2 u, u>)`` of the unit eigenvector.

Directions where a branch collides with multiplicity two are exactly the
double tangents; the determinantal polynomial localised there factors into
two linear forms whose dual points bound the tangency segment.  The union of
those dual points and segments over the zero variety is the wave front.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, optimize

from .pencil import MatrixTuple, line_poly_coeffs, localisation, support_function

__all__ = [
    "CurveSample",
    "WaveFrontPiece",
    "boundary_curve",
    "curve_points",
    "hausdorff_distance",
    "hull_contains",
    "lacuna_detect",
    "numerical_range_hull",
    "wave_front",
]

CROSSING_GAP = 1e-6
OVERLAP_FALLBACK = 0.7


@dataclass(frozen=True)
class CurveSample:
    """One envelope point: angle, branch (1 = largest eigenvalue), the point
    in the plane and the tangent line coefficients [c, d, mu]."""

    theta: float
    branch: int
    point: np.ndarray
    tangent: np.ndarray
    flagged: bool = False


@dataclass(frozen=True)
class WaveFrontPiece:
    """Local propagation set attached to a zero of the determinantal form."""

    direction: np.ndarray  # (mu, c, d) with c = cos(theta), d = sin(theta)
    multiplicity: int
    kind: str  # "point" | "segment" | "unresolved"
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))


def _pencil_pair(A1, A2):
    A1 = np.asarray(A1, dtype=complex)
    A2 = np.asarray(A2, dtype=complex)
    for M in (A1, A2):
        if not np.allclose(M, M.conj().T, rtol=0.0, atol=1e-12):
            raise ValueError("boundary curves require hermitian matrices")
    return A1, A2


def boundary_curve(A1, A2, theta_count: int = 2048) -> list[CurveSample]:
    """Envelope samples of the support-line family over [0, pi).

    Branches are labelled in descending eigenvalue order.  Samples closer
    than the crossing gap to a neighbouring branch are flagged; there the
    eigenvector-derivative identity degenerates and the quadratic-form route
    (which is what this function returns) is the stable one.
    """
    A1, A2 = _pencil_pair(A1, A2)
    N = A1.shape[0]
    thetas = np.arange(theta_count) * (np.pi / theta_count)
    cos, sin = np.cos(thetas), np.sin(thetas)
    pencils = cos[:, None, None] * A1 + sin[:, None, None] * A2
    lam, vec = np.linalg.eigh(pencils)  # ascending
    lam = lam[:, ::-1]
    vec = vec[:, :, ::-1]
    samples = []
    for t in range(theta_count):
        gaps = np.abs(np.diff(lam[t]))
        for k in range(N):
            u = vec[t][:, k]
            x = np.array(
                [np.real(u.conj() @ A1 @ u), np.real(u.conj() @ A2 @ u)]
            )
            flagged = bool(
                (k > 0 and gaps[k - 1] < CROSSING_GAP) or (k < N - 1 and gaps[k] < CROSSING_GAP)
            )
            tangent = np.array([cos[t], sin[t], -lam[t, k]])
            samples.append(CurveSample(float(thetas[t]), k + 1, x, tangent, flagged))
    return samples


def envelope_from_derivative(A1, A2, theta: float, branch: int) -> np.ndarray:
    """Envelope point via the eigenvalue derivative identity.

    ``x = lambda (cos, sin) + lambda' (-sin, cos)`` with
    ``lambda' = <A'(theta) u, u>``; agrees with the quadratic-form route away
    from crossings and is used as its cross-check.
    """
    A1, A2 = _pencil_pair(A1, A2)
    c, s = np.cos(theta), np.sin(theta)
    lam, vec = np.linalg.eigh(c * A1 + s * A2)
    order = np.argsort(lam)[::-1]
    u = vec[:, order[branch - 1]]
    lam_b = lam[order[branch - 1]]
    dlam = np.real(u.conj() @ (-s * A1 + c * A2) @ u)
    return lam_b * np.array([c, s]) + dlam * np.array([-s, c])


def curve_points(samples: list[CurveSample]) -> np.ndarray:
    return np.array([s.point for s in samples])


def numerical_range_hull(A1, A2, direction_count: int = 1024):
    """Intersection of the sampled support half-planes.

    Returns ``(vertices, directions, support_values)``.  Candidate vertices
    from consecutive support lines are kept only when they satisfy every
    sampled constraint, which handles degenerate ranges (segments, points)
    without special cases.
    """
    A1, A2 = _pencil_pair(A1, A2)
    phis = np.arange(direction_count) * (2.0 * np.pi / direction_count)
    dirs = np.column_stack([np.cos(phis), np.sin(phis)])
    pencils = dirs[:, 0, None, None] * A1 + dirs[:, 1, None, None] * A2
    h = np.linalg.eigvalsh(pencils)[:, -1]
    verts = []
    for i in range(direction_count):
        j = (i + 1) % direction_count
        M = np.array([dirs[i], dirs[j]])
        det = np.linalg.det(M)
        if abs(det) < 1e-12:
            continue
        v = np.linalg.solve(M, np.array([h[i], h[j]]))
        if np.all(dirs @ v <= h + 1e-9 * (1.0 + np.abs(h))):
            verts.append(v)
    if not verts:
        raise ValueError("no feasible support-line intersections found")
    verts = np.array(verts)
    keep = [0]
    for i in range(1, len(verts)):
        if np.linalg.norm(verts[i] - verts[keep[-1]]) > 1e-10:
            keep.append(i)
    return verts[keep], dirs, h


def hull_contains(points, dirs, support_values, margin: float = 0.0) -> np.ndarray:
    """Mask of points lying in the sampled hull shrunk by ``margin``."""
    points = np.atleast_2d(points)
    return np.all(points @ dirs.T <= support_values[None, :] - margin, axis=1)


def hausdorff_distance(P, Q) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    P, Q = np.atleast_2d(P), np.atleast_2d(Q)
    d = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def polygon_boundary(vertices: np.ndarray, spacing: float) -> np.ndarray:
    """Dense sampling of a convex polygon boundary (vertices in hull order).

    Needed for honest Hausdorff comparisons: polygons with straight edges
    have sparse corner sets even when their boundaries coincide.
    """
    vertices = np.atleast_2d(vertices)
    if len(vertices) == 1:
        return vertices
    out = []
    for i in range(len(vertices)):
        a, b = vertices[i], vertices[(i + 1) % len(vertices)]
        steps = max(1, int(np.ceil(np.linalg.norm(b - a) / spacing)))
        t = np.arange(steps) / steps
        out.append(a[None, :] + t[:, None] * (b - a)[None, :])
    return np.concatenate(out)


def hull_vertices_of(points: np.ndarray) -> np.ndarray:
    """Convex hull corners in boundary order, robust to degenerate rank."""
    from scipy.spatial import ConvexHull, QhullError

    points = np.atleast_2d(points)
    spread = points.max(axis=0) - points.min(axis=0)
    if np.all(spread < 1e-12):
        return points[:1]
    try:
        hull = ConvexHull(points)
        return points[hull.vertices]
    except QhullError:
        # Collinear: return the extreme pair along the principal direction.
        center = points.mean(axis=0)
        _, _, vt = np.linalg.svd(points - center)
        proj = (points - center) @ vt[0]
        return points[[int(np.argmin(proj)), int(np.argmax(proj))]]


def _crossing_directions(A1, A2, theta_count: int):
    """Angles where adjacent eigenvalue branches collide.

    Scans the gap functions on a grid, refines each local minimum with
    bounded scalar minimisation and keeps near-zero minima.  Gaps of the
    rotated pencil at theta + pi mirror those at theta, so [0, pi) suffices.
    """
    N = A1.shape[0]

    def gaps(theta):
        lam = np.linalg.eigvalsh(np.cos(theta) * A1 + np.sin(theta) * A2)[::-1]
        return -np.diff(lam)

    thetas = np.linspace(0.0, np.pi, theta_count, endpoint=False)
    table = np.array([gaps(t) for t in thetas])
    found = []
    step = np.pi / theta_count
    for k in range(N - 1):
        g = table[:, k]
        for t in range(theta_count):
            prev_t, next_t = (t - 1) % theta_count, (t + 1) % theta_count
            if not (g[t] <= g[prev_t] and g[t] <= g[next_t]):
                continue
            if g[t] > 1e-2:
                continue
            res = optimize.minimize_scalar(
                lambda th: gaps(th)[k],
                bounds=(thetas[t] - step, thetas[t] + step),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if res.fun < 1e-6:
                # The squared gap is smooth through a generic crossing, so a
                # three-point parabola pins the vertex to near machine level.
                th0, d = float(res.x), 1e-6
                g2 = np.array([gaps(th0 + s * d)[k] ** 2 for s in (-1.0, 0.0, 1.0)])
                denom = g2[0] - 2.0 * g2[1] + g2[2]
                if denom > 0:
                    th0 -= 0.5 * d * (g2[2] - g2[0]) / denom
                if gaps(th0)[k] < 1e-8:
                    found.append(float(np.mod(th0, np.pi)))
    found.sort()
    merged = []
    for th in found:
        if not merged or min(abs(th - merged[-1]), np.pi - abs(th - merged[-1])) > 1e-6:
            merged.append(th)
    return merged


def _split_quadratic(A: MatrixTuple, xi: np.ndarray):
    """Factor a multiplicity-two localisation into two dual points.

    Builds the symmetric form of the localised quadratic from coefficient
    evaluations along coordinate lines, splits it as a rank-two indefinite
    form, and reads off the two tangency points from the linear factors.
    Returns None when the form does not split into distinct real lines.
    """

    def coeff2(zeta):
        return line_poly_coeffs(A, xi, np.asarray(zeta, dtype=float))[2].real

    e = np.eye(3)
    Q = np.zeros((3, 3))
    for i in range(3):
        Q[i, i] = coeff2(e[i])
    for i in range(3):
        for j in range(i + 1, 3):
            Q[i, j] = Q[j, i] = (coeff2(e[i] + e[j]) - Q[i, i] - Q[j, j]) / 2.0
    w, V = np.linalg.eigh(Q)
    scale = np.max(np.abs(w))
    if scale == 0.0:
        return None
    big = np.abs(w) > 1e-8 * scale
    if big.sum() != 2 or np.prod(w[big]) >= 0:
        return None  # not a product of two distinct real linear forms
    idx = np.where(big)[0]
    wp = w[idx[1]] if w[idx[1]] > 0 else w[idx[0]]
    wm = w[idx[0]] if w[idx[1]] > 0 else w[idx[1]]
    vp = V[:, idx[1]] if w[idx[1]] > 0 else V[:, idx[0]]
    vm = V[:, idx[0]] if w[idx[1]] > 0 else V[:, idx[1]]
    g1 = np.sqrt(wp) * vp + np.sqrt(-wm) * vm
    g2 = np.sqrt(wp) * vp - np.sqrt(-wm) * vm
    pts = []
    for g in (g1, g2):
        if abs(g[0]) < 1e-10 * np.linalg.norm(g):
            return None
        pts.append(np.array([g[1] / g[0], g[2] / g[0]]))
    return np.array(pts)


def wave_front(A: MatrixTuple, resolution: int = 2048) -> list[WaveFrontPiece]:
    """Local propagation pieces over the real zeros of the determinantal form.

    Simple zeros contribute their dual point (an envelope point of the
    curve); multiplicity-two zeros coming from branch collisions contribute
    the segment between the two tangency points when the localised quadratic
    splits, and are flagged unresolved otherwise.
    """
    if A.n != 2:
        raise ValueError("wave front construction implemented for pairs")
    if not A.hermitian:
        raise ValueError("wave front construction requires hermitian matrices")
    A1, A2 = A.matrices
    pieces: list[WaveFrontPiece] = []
    thetas = np.arange(resolution) * (np.pi / resolution)
    for theta in thetas:
        c, s = np.cos(theta), np.sin(theta)
        lam, vec = np.linalg.eigh(c * A1 + s * A2)
        lam = lam[::-1]
        vec = vec[:, ::-1]
        gaps = np.concatenate([[np.inf], -np.diff(lam), [np.inf]])
        for k in range(A.N):
            if gaps[k] < CROSSING_GAP or gaps[k + 1] < CROSSING_GAP:
                continue  # handled by the crossing sweep
            u = vec[:, k]
            x = np.array([np.real(u.conj() @ A1 @ u), np.real(u.conj() @ A2 @ u)])
            xi = np.array([-lam[k], c, s])
            pieces.append(WaveFrontPiece(xi, 1, "point", x[None, :]))
    for theta in _crossing_directions(A1, A2, resolution):
        c, s = np.cos(theta), np.sin(theta)
        lam = np.linalg.eigvalsh(c * A1 + s * A2)[::-1]
        k = int(np.argmin(-np.diff(lam))) if A.N > 1 else 0
        xi = np.array([-(lam[k] + lam[k + 1]) / 2.0, c, s])
        mu, _ = localisation(A, xi, np.array([1.0, 0.3183, 0.7416]))
        if mu == 1:
            continue  # grid artefact: the localisation is still simple
        if mu > 2:
            pieces.append(WaveFrontPiece(xi, mu, "unresolved"))
            continue
        pts = _split_quadratic(A, xi)
        if pts is None:
            pieces.append(WaveFrontPiece(xi, 2, "unresolved"))
        else:
            pieces.append(WaveFrontPiece(xi, 2, "segment", pts))
    return pieces


@dataclass(frozen=True)
class LacunaRegion:
    label: int
    point_count: int
    area: float
    representative: np.ndarray


def lacuna_detect(
    grid_points: np.ndarray,
    grid_shape: tuple,
    cell_area: float,
    vanishing_mask: np.ndarray,
    dirs: np.ndarray,
    support_values: np.ndarray,
    margin: float = 0.0,
) -> list[LacunaRegion]:
    """Connected components of vanishing scan points inside the range hull.

    ``grid_points`` lists the scan lattice row-major with ``grid_shape``;
    the hull is passed as sampled support data.  Components use
    4-connectivity; the area estimate counts cells.
    """
    inside = hull_contains(grid_points, dirs, support_values, margin=margin)
    mask = (vanishing_mask & inside).reshape(grid_shape)
    labels, count = ndimage.label(mask)
    regions = []
    flat = labels.reshape(-1)
    for lbl in range(1, count + 1):
        idx = np.where(flat == lbl)[0]
        regions.append(
            LacunaRegion(
                label=lbl,
                point_count=len(idx),
                area=float(len(idx) * cell_area),
                representative=grid_points[idx[len(idx) // 2]],
            )
        )
    regions.sort(key=lambda r: -r.area)
    return regions
