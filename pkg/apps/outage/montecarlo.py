"""
Snapshot Monte Carlo estimator of the uplink outage probability.

Each replication draws a fresh topology, assigns FDMA channels, picks the
target among its group's co-channel nodes and draws independent SR fades and
beam gains. Replication ``i`` always runs on its own stream derived from
``(seed, i)``, so any chunking of the replications gives the same samples.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings

from apps.channel.antenna import sample_interferer_gain, target_gain
from apps.channel.fading import sr_sample
from apps.common.exceptions import EmptyChannel, InvalidChannelCount, InvalidThreshold, ScenarioError
from apps.topology.pointprocess import ClusteredPointSet, PointSet, sample_bpp, sample_mhccp

from .scenario import ChannelPolicy, DistanceMode, Scenario, SnapshotOptions, TargetGroup

logger = logging.getLogger(__name__)

Chunk = Tuple[int, int]
# (scenario, options, seed, chunks, quantity) -> one sample array per chunk
Executor = Callable[[Scenario, SnapshotOptions, int, Sequence[Chunk], str], List[np.ndarray]]

SEED_LIMIT = 2 ** 63


@dataclass(frozen=True)
class OutageEstimate:
    p_hat: float
    half_width_95: float
    n_iterations: int
    seed: int

    @classmethod
    def from_count(cls, outages: int, n_iterations: int, seed: int) -> "OutageEstimate":
        p_hat = outages / n_iterations
        half_width = 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / n_iterations)
        return cls(p_hat=p_hat, half_width_95=half_width, n_iterations=n_iterations, seed=seed)


@dataclass
class CoChannelSet:
    """Positions of the nodes sharing the investigated channel"""

    a1: np.ndarray
    a2: np.ndarray


def replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def assign_channels(
    rng: np.random.Generator,
    bpp: PointSet,
    mhccp: ClusteredPointSet,
    k_channels: int,
    policy: ChannelPolicy = ChannelPolicy.ALL_ON_CHANNEL,
) -> CoChannelSet:
    """
    Nodes on one of the K channels.

    Exactly N1/K BPP nodes are picked uniformly. Under ``per-cluster-share``
    whole clusters are taken in random order until the member count is
    closest to N2/K; otherwise every MHCCP member is on the channel.
    """
    if k_channels < 1 or len(bpp) % k_channels:
        raise InvalidChannelCount(f"N1 = {len(bpp)} is not divisible by K = {k_channels}")

    chosen = rng.choice(len(bpp), size=len(bpp) // k_channels, replace=False)
    a1 = bpp.points[np.sort(chosen)]

    if ChannelPolicy(policy) == ChannelPolicy.ALL_ON_CHANNEL:
        return CoChannelSet(a1=a1, a2=mhccp.points)

    order = rng.permutation(len(mhccp.parents))
    counts = np.concatenate(([0], np.cumsum(mhccp.cluster_sizes()[order])))
    n_clusters = int(np.argmin(np.abs(counts - len(mhccp.points) / k_channels)))
    selected = np.isin(mhccp.parent_index, order[:n_clusters])
    return CoChannelSet(a1=a1, a2=mhccp.points[selected])


def _path_gains(scn: Scenario, opts: SnapshotOptions, positions: np.ndarray) -> np.ndarray:
    """d ** -alpha for every row of ``positions``"""
    if opts.distance_mode == DistanceMode.COMMON_D0:
        return np.full(len(positions), scn.d0 ** (-scn.alpha))
    offset = scn.d0 if opts.satellite_offset is None else opts.satellite_offset
    satellite = scn.region.center.as_array() + np.array([0.0, 0.0, offset])
    distances = np.linalg.norm(positions - satellite, axis=1)
    return distances ** (-scn.alpha)


def _draw(rng: np.random.Generator, scn: Scenario, opts: SnapshotOptions):
    """Signal power, aggregate interference and noise of one snapshot"""
    bpp = sample_bpp(rng, scn.n1_total, scn.region)
    mhccp = sample_mhccp(rng, scn.topology)
    co_channel = assign_channels(rng, bpp, mhccp, scn.k_channels, opts.a2_channel_policy)

    if scn.target_group == TargetGroup.A1:
        candidates, others, others_power = co_channel.a1, co_channel.a2, scn.p2
    else:
        candidates, others, others_power = co_channel.a2, co_channel.a1, scn.p1
    if not len(candidates):
        raise EmptyChannel(f"no {scn.target_group.value} node shares the channel")

    target = int(rng.integers(len(candidates)))
    peers = np.delete(candidates, target, axis=0)
    peers_power = scn.p1 if scn.target_group == TargetGroup.A1 else scn.p2

    interferers = np.concatenate((peers, others))
    powers = np.concatenate((np.full(len(peers), peers_power), np.full(len(others), others_power)))

    target_path = _path_gains(scn, opts, candidates[target:target + 1])[0]
    signal = scn.p_m * target_gain(scn.beam) * sr_sample(rng, scn.sr) * target_path

    gains = sample_interferer_gain(rng, scn.beam, size=len(interferers))
    fades = sr_sample(rng, scn.sr, size=len(interferers))
    interference = float(np.sum(powers * gains * fades * _path_gains(scn, opts, interferers)))

    return signal, interference, scn.noise_power


def simulate_snapshot(rng: np.random.Generator, scn: Scenario, opts: Optional[SnapshotOptions] = None) -> float:
    """Linear SINR of one snapshot"""
    signal, interference, noise = _draw(rng, scn, opts or SnapshotOptions())
    denominator = interference + noise
    if denominator == 0.0:
        return math.inf
    return signal / denominator


def simulate_range(
    scn: Scenario,
    opts: SnapshotOptions,
    seed: int,
    start: int,
    stop: int,
    quantity: str = 'sinr',
) -> np.ndarray:
    """SINR (or interference) samples of replications ``start`` .. ``stop - 1``"""
    samples = np.empty(stop - start)
    for offset, index in enumerate(range(start, stop)):
        rng = replication_rng(seed, index)
        if quantity == 'sinr':
            samples[offset] = simulate_snapshot(rng, scn, opts)
        else:
            samples[offset] = _draw(rng, scn, opts)[1]
    return samples


def local_executor(scn, opts, seed, chunks, quantity):
    return [simulate_range(scn, opts, seed, start, stop, quantity) for start, stop in chunks]


def make_chunks(n_iter: int, chunk_size: Optional[int] = None) -> List[Chunk]:
    size = chunk_size or settings.OUTAGE_MC_CHUNK_SIZE
    return [(start, min(start + size, n_iter)) for start in range(0, n_iter, size)]


def _check_run(n_iter: int, seed: int):
    if n_iter < 1:
        raise ScenarioError(f"n_iter must be >= 1, got {n_iter}")
    if not 0 <= seed < SEED_LIMIT:
        raise ScenarioError(f"seed must lie in [0, 2^63), got {seed}")


def _collect(scn, opts, seed, n_iter, quantity, executor, chunk_size) -> np.ndarray:
    _check_run(n_iter, seed)
    chunks = make_chunks(n_iter, chunk_size)
    logger.debug("Dispatching %d replications in %d chunks", n_iter, len(chunks))
    parts = (executor or local_executor)(scn, opts, seed, chunks, quantity)
    return np.concatenate([np.asarray(part, dtype=float) for part in parts])


def estimate_outage_curve(
    scn: Scenario,
    thresholds: Sequence[float],
    n_iter: int,
    seed: int,
    opts: Optional[SnapshotOptions] = None,
    executor: Optional[Executor] = None,
    chunk_size: Optional[int] = None,
) -> List[OutageEstimate]:
    """One estimate per threshold, all from the same batch of SINR samples"""
    for T in thresholds:
        if not T > 0:
            raise InvalidThreshold(f"SINR threshold must be > 0, got {T}")
    sinr = _collect(scn, opts or SnapshotOptions(), seed, n_iter, 'sinr', executor, chunk_size)
    return [
        OutageEstimate.from_count(int(np.count_nonzero(sinr <= T)), n_iter, seed)
        for T in thresholds
    ]


def estimate_outage(
    scn: Scenario,
    T: float,
    n_iter: int,
    seed: int,
    opts: Optional[SnapshotOptions] = None,
    executor: Optional[Executor] = None,
    chunk_size: Optional[int] = None,
) -> OutageEstimate:
    return estimate_outage_curve(scn, [T], n_iter, seed, opts, executor, chunk_size)[0]


def sample_interference(
    scn: Scenario,
    n_iter: int,
    seed: int,
    opts: Optional[SnapshotOptions] = None,
    executor: Optional[Executor] = None,
    chunk_size: Optional[int] = None,
) -> np.ndarray:
    """Aggregate interference seen by the target over ``n_iter`` snapshots"""
    return _collect(scn, opts or SnapshotOptions(), seed, n_iter, 'interference', executor, chunk_size)
