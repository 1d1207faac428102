"""Velocity laws for the PDMP samplers, with the moments used by the bounds.

Moments follow the conventions m2 = E[v1^2], m4 = E[v1^4]/3 and
m22 = E[v1^2 v2^2].  For d = 1 the cross moment m22 has no two-coordinate
definition; we store m2^2 and flag it (``m22_is_convention``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RADEMACHER = "rademacher"
GAUSSIAN = "gaussian"
SPHERE = "sphere"


@dataclass(frozen=True)
class VelocityMeasure:
    kind: str
    dim: int
    m2: float
    m4: float
    m22: float
    radius: float = 0.0
    m22_is_convention: bool = False

    def sample(self, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
        """Draw n velocities (or a single one when n is None)."""
        size = (self.dim,) if n is None else (n, self.dim)
        if self.kind == RADEMACHER:
            return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0
        if self.kind == GAUSSIAN:
            return rng.standard_normal(size)
        if self.kind == SPHERE:
            v = rng.standard_normal(size)
            norm = np.linalg.norm(v, axis=-1, keepdims=True)
            return self.radius * v / norm
        raise ValueError(f"unknown velocity law {self.kind!r}")


def rademacher_product(d: int) -> VelocityMeasure:
    """Uniform on {-1,+1}^d: m2 = 1, m4 = 1/3, m22 = 1."""
    return VelocityMeasure(kind=RADEMACHER, dim=d, m2=1.0, m4=1.0 / 3.0,
                           m22=1.0, m22_is_convention=(d == 1))


def std_gaussian(d: int) -> VelocityMeasure:
    """Standard normal on R^d: m2 = 1, m4 = 1, m22 = 1."""
    return VelocityMeasure(kind=GAUSSIAN, dim=d, m2=1.0, m4=1.0,
                           m22=1.0, m22_is_convention=(d == 1))


def uniform_sphere(d: int, radius: float | None = None) -> VelocityMeasure:
    """Uniform on the sphere of given radius (default sqrt(d), so m2 = 1)."""
    if radius is None:
        radius = float(np.sqrt(d))
    r2 = radius * radius
    m2 = r2 / d
    # E[u1^4] = 3/(d(d+2)) and E[u1^2 u2^2] = 1/(d(d+2)) on the unit sphere.
    m4 = r2 * r2 / (d * (d + 2))
    m22 = r2 * r2 / (d * (d + 2)) if d > 1 else m2 * m2
    return VelocityMeasure(kind=SPHERE, dim=d, m2=m2, m4=m4, m22=m22,
                           radius=float(radius), m22_is_convention=(d == 1))
