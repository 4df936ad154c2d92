"""
3D points, spherical deployment regions and uniform sampling.

Batches of points are plain ``(n, 3)`` float arrays; ``Point3`` is used where a
single named position is clearer (ball centers, satellite position).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Point3:
    """Position in meters"""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"Point coordinates must be finite, got {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values) -> "Point3":
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)


ORIGIN = Point3()


@dataclass(frozen=True)
class Ball:
    """Closed ball; the deployment region of both UAV groups"""

    center: Point3 = ORIGIN
    radius: float = 0.0

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError(f"Ball radius must be nonnegative, got {self.radius}")

    def contains(self, points, atol: float = 1e-9) -> np.ndarray:
        """Boolean mask of the rows of ``points`` lying in the closed ball"""
        offsets = np.atleast_2d(points) - self.center.as_array()
        return np.linalg.norm(offsets, axis=1) <= self.radius * (1.0 + atol) + atol


def volume(ball: Ball) -> float:
    return 4.0 * math.pi * ball.radius ** 3 / 3.0


def sample_uniform_ball(rng: np.random.Generator, ball: Ball, size: Optional[int] = None):
    """
    Uniform points in ``ball`` by inverse-CDF radius and isotropic direction.

    Returns a ``Point3`` when ``size`` is None, otherwise a ``(size, 3)`` array.
    """
    n = 1 if size is None else int(size)
    direction = rng.standard_normal((n, 3))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    # a zero draw has probability zero; keep the sample at the center instead of NaN
    norms[norms == 0.0] = 1.0
    radius = ball.radius * np.cbrt(rng.random((n, 1)))
    points = ball.center.as_array() + direction / norms * radius

    if size is None:
        return Point3.from_array(points[0])
    return points


def distance(a: Point3, b: Point3) -> float:
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)
