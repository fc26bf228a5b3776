"""Quadrature rules on unit spheres S^{n-1} for n = 1, 2, 3.

Weights integrate against the surface measure, so they add up to the sphere
area ``2, 2*pi, 4*pi`` respectively.  The three-dimensional rule is a product
of Gauss-Legendre in the polar cosine with a uniform azimuth grid; it
integrates spherical harmonics exactly up to the requested degree, which is
the accuracy class of the classical octahedral table rules at comparable node
counts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["SphericalQuadrature"]


@dataclass(frozen=True)
class SphericalQuadrature:
    """Nodes and positive weights on S^{n-1}."""

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    degree: int = 0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != self.n or len(weights) != len(nodes):
            raise ValueError("inconsistent node/weight arrays")
        nodes = nodes.copy()
        weights = weights.copy()
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def for_dimension(cls, n: int, level: int | None = None) -> "SphericalQuadrature":
        if n == 1:
            return cls.point_pair()
        if n == 2:
            return cls.circle(level or 512)
        if n == 3:
            return cls.sphere(level or 24)
        raise ValueError("sphere quadrature implemented for ambient dimension <= 3")

    @classmethod
    def point_pair(cls) -> "SphericalQuadrature":
        """S^0 = {+1, -1} with counting measure."""
        return cls(1, np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]), degree=10**6)

    @classmethod
    def circle(cls, count: int = 512) -> "SphericalQuadrature":
        """Uniform rule on the circle; trapezoid = spectral for periodic maps."""
        th = (np.arange(count) + 0.5) * (2.0 * np.pi / count)
        nodes = np.column_stack([np.cos(th), np.sin(th)])
        weights = np.full(count, 2.0 * np.pi / count)
        return cls(2, nodes, weights, degree=count - 1)

    @classmethod
    def sphere(cls, polar_count: int = 24) -> "SphericalQuadrature":
        """Gauss-Legendre (polar cosine) x uniform (azimuth) product rule."""
        z, wz = np.polynomial.legendre.leggauss(polar_count)
        m = 2 * polar_count
        phi = (np.arange(m) + 0.5) * (2.0 * np.pi / m)
        r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
        nodes = np.empty((polar_count * m, 3))
        weights = np.empty(polar_count * m)
        idx = 0
        for i in range(polar_count):
            nodes[idx : idx + m, 0] = r[i] * np.cos(phi)
            nodes[idx : idx + m, 1] = r[i] * np.sin(phi)
            nodes[idx : idx + m, 2] = z[i]
            weights[idx : idx + m] = wz[i] * (2.0 * np.pi / m)
            idx += m
        return cls(3, nodes, weights, degree=2 * polar_count - 1)

    def refined(self) -> "SphericalQuadrature":
        """Same family with roughly doubled node count (error estimation)."""
        if self.n == 1:
            return self
        if self.n == 2:
            return SphericalQuadrature.circle(2 * len(self.weights))
        polar = int(round(np.sqrt(len(self.weights) / 2)))
        return SphericalQuadrature.sphere(2 * polar)

    def rotated(self) -> "SphericalQuadrature":
        """Same rule in a fixed generic frame.

        Rotating decorrelates the discretisation error from the original
        rule, so base-vs-rotated-refined differences estimate the true error
        even where structured rules fail in the same way.
        """
        if self.n == 1:
            return self
        if self.n == 2:
            c, s = np.cos(0.5374), np.sin(0.5374)
            R = np.array([[c, -s], [s, c]])
        else:
            rng = np.random.default_rng(961748927)
            R, _ = np.linalg.qr(rng.standard_normal((3, 3)))
            if np.linalg.det(R) < 0:
                R[:, 0] *= -1
        return SphericalQuadrature(self.n, self.nodes @ R.T, self.weights, self.degree)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over nodes; ``values`` has the node axis first."""
        return np.tensordot(self.weights, values, axes=(0, 0))

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(self.nodes.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()
