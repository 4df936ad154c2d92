"""
Point processes used to deploy the two UAV groups.

Group A1 is a binomial point process (BPP). Group A2 is a Matérn hard-core
cluster process (MHCCP): Poisson candidates, Matérn type-II thinning to get the
cluster heads, then a Poisson number of members scattered uniformly in a ball
of radius ``d_min / 2`` around each head.
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import ORIGIN, Ball, sample_uniform_ball, volume

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MhccpConfig:
    lambda1: float
    d_min: float
    c_bar: float
    region: Ball

    def __post_init__(self):
        errors = []
        if not self.lambda1 >= 0:
            errors.append(f"lambda1 must be >= 0 (got {self.lambda1})")
        if not self.d_min > 0:
            errors.append(f"d_min must be > 0 (got {self.d_min})")
        if not self.c_bar >= 0:
            errors.append(f"c_bar must be >= 0 (got {self.c_bar})")
        if errors:
            raise ValueError('; '.join(errors))

    @property
    def exclusion_volume(self) -> float:
        return 4.0 * math.pi * self.d_min ** 3 / 3.0


@dataclass
class PointSet:
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))

    def __len__(self):
        return len(self.points)


@dataclass
class ClusteredPointSet:
    """Cluster members together with the heads they were scattered around"""

    parents: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    # index into ``parents`` per point, -1 for points without a parent
    parent_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))

    def __len__(self):
        return len(self.points)

    def cluster_sizes(self) -> np.ndarray:
        linked = self.parent_index[self.parent_index >= 0]
        return np.bincount(linked, minlength=len(self.parents))


def sample_bpp(rng: np.random.Generator, n: int, region: Ball) -> PointSet:
    if n < 0:
        raise ValueError(f"BPP size must be >= 0, got {n}")
    return PointSet(sample_uniform_ball(rng, region, size=n))


def sample_ppp(rng: np.random.Generator, lam: float, region: Ball) -> PointSet:
    if not lam >= 0:
        raise ValueError(f"PPP density must be >= 0, got {lam}")
    count = rng.poisson(lam * volume(region))
    return PointSet(sample_uniform_ball(rng, region, size=count))


def matern2_thin(rng: np.random.Generator, candidates: PointSet, d_min: float) -> PointSet:
    """
    Matérn type-II thinning.

    Every candidate gets an i.i.d. uniform mark; a candidate survives iff its
    mark is strictly the smallest among all candidates within ``d_min``. Equal
    marks are ordered by candidate index.
    """
    if not d_min > 0:
        raise ValueError(f"Hard-core distance must be > 0, got {d_min}")

    points = candidates.points
    marks = rng.random(len(points))
    if len(points) < 2:
        return PointSet(points.copy())

    pairs = cKDTree(points).query_pairs(r=d_min, output_type='ndarray')
    keep = np.ones(len(points), dtype=bool)
    if len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        i_wins = (marks[i] < marks[j]) | ((marks[i] == marks[j]) & (i < j))
        keep[np.where(i_wins, j, i)] = False

    return PointSet(points[keep])


def sample_mhccp(rng: np.random.Generator, cfg: MhccpConfig) -> ClusteredPointSet:
    candidates = sample_ppp(rng, cfg.lambda1, cfg.region)
    parents = matern2_thin(rng, candidates, cfg.d_min).points

    sizes = rng.poisson(cfg.c_bar, size=len(parents))
    parent_index = np.repeat(np.arange(len(parents)), sizes)
    offsets = sample_uniform_ball(rng, Ball(ORIGIN, cfg.d_min / 2.0), size=int(sizes.sum()))
    # members near the boundary of the region are kept even when outside it
    points = parents[parent_index] + offsets

    logger.debug(
        "MHCCP realization: %d candidates, %d heads, %d members",
        len(candidates), len(parents), len(points),
    )
    return ClusteredPointSet(parents=parents, points=points, parent_index=parent_index)


def density_lambda2(lambda1: float, d_min: float) -> float:
    """Density of the retained Matérn type-II points"""
    if not lambda1 >= 0 or not d_min > 0:
        raise ValueError("lambda1 must be >= 0 and d_min > 0")
    v_h = 4.0 * math.pi * d_min ** 3 / 3.0
    return -math.expm1(-v_h * lambda1) / v_h


def density_lambda3(lambda1: float, d_min: float, c_bar: float) -> float:
    return density_lambda2(lambda1, d_min) * c_bar


def lambda3_limit(d_min: float, c_bar: float) -> float:
    """Saturation density of the cluster members as lambda1 grows without bound"""
    if not d_min > 0:
        raise ValueError(f"d_min must be > 0, got {d_min}")
    return 3.0 * c_bar / (4.0 * math.pi * d_min ** 3)


def lambda3_derivative(lambda1: float, d_min: float, c_bar: float) -> float:
    """d(lambda3)/d(lambda1); nonnegative and vanishing as lambda1 grows"""
    v_h = 4.0 * math.pi * d_min ** 3 / 3.0
    return c_bar * math.exp(-v_h * lambda1)


DUMP_HEADER = ['process', 'parent_index', 'x', 'y', 'z']


def write_realization(stream, bpp: PointSet, mhccp: ClusteredPointSet) -> int:
    """
    Write one topology realization as a CSV table.

    Rows are tagged ``bpp``, ``mhcpp`` (cluster heads) or ``mhccp`` (members);
    parent index is -1 except for members. Returns the number of data rows.
    """
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(DUMP_HEADER)

    rows = 0
    for x, y, z in bpp.points:
        writer.writerow(['bpp', -1, repr(float(x)), repr(float(y)), repr(float(z))])
        rows += 1
    for x, y, z in mhccp.parents:
        writer.writerow(['mhcpp', -1, repr(float(x)), repr(float(y)), repr(float(z))])
        rows += 1
    for (x, y, z), parent in zip(mhccp.points, mhccp.parent_index):
        writer.writerow(['mhccp', int(parent), repr(float(x)), repr(float(y)), repr(float(z))])
        rows += 1

    return rows
