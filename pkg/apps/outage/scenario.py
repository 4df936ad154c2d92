"""
System configuration of the aerial-to-satellite uplink in SI units.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from apps.channel.antenna import BeamPattern
from apps.channel.fading import DEFAULT_K_MAX, DEFAULT_TOL, SRParams
from apps.common.exceptions import InvalidChannelCount, ScenarioError
from apps.topology.geometry import ORIGIN, Ball, volume
from apps.topology.pointprocess import MhccpConfig


class TargetGroup(str, Enum):
    A1 = 'A1'
    A2 = 'A2'


class DistanceMode(str, Enum):
    COMMON_D0 = 'common-d0'
    EXACT_GEOMETRY = 'exact-geometry'


class ChannelPolicy(str, Enum):
    ALL_ON_CHANNEL = 'all-on-channel'
    PER_CLUSTER_SHARE = 'per-cluster-share'


SWEEP_PARAMETERS = ('T', 'p_m', 'R1', 'K', 'lambda1')


@dataclass(frozen=True)
class Scenario:
    """
    Topology, beams, powers, path loss, noise and FDMA layout of one uplink.

    Powers are in watts, distances in meters, densities in points per m^3.
    """

    sr: SRParams
    beam: BeamPattern
    topology: MhccpConfig
    n1_total: int
    k_channels: int
    p_m: float
    p1: float
    p2: float
    alpha: float
    d0: float
    noise_power: float
    target_group: TargetGroup = TargetGroup.A1

    def __post_init__(self):
        object.__setattr__(self, 'target_group', TargetGroup(self.target_group))
        errors = []
        for name in ('p_m', 'p1', 'p2'):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be > 0")
        if not self.alpha >= 2:
            errors.append("alpha must be >= 2")
        if not self.d0 > 0:
            errors.append("d0 must be > 0")
        if not self.noise_power >= 0:
            errors.append("noise_power must be >= 0")
        if self.n1_total < 0:
            errors.append("n1_total must be >= 0")
        if self.k_channels < 1:
            errors.append("k_channels must be >= 1")
        if errors:
            raise ScenarioError('; '.join(errors))
        if self.n1_total % self.k_channels:
            raise InvalidChannelCount(
                f"N1 = {self.n1_total} is not divisible by K = {self.k_channels}"
            )
        if self.target_group == TargetGroup.A1 and self.n1_per_channel == 0:
            raise ScenarioError("an A1 target needs at least one A1 node per channel (N1 >= K)")

    @property
    def region(self) -> Ball:
        return self.topology.region

    @property
    def region_volume(self) -> float:
        return volume(self.topology.region)

    @property
    def n1_per_channel(self) -> int:
        return self.n1_total // self.k_channels

    @property
    def n1_interferers(self) -> int:
        """Co-channel A1 interferers seen by the target"""
        if self.target_group == TargetGroup.A1:
            return self.n1_per_channel - 1
        return self.n1_per_channel

    def to_dict(self) -> dict:
        return {
            'sr': {'c': self.sr.c, 'q': self.sr.q, 'omega': self.sr.omega},
            'beam': {
                'g_main_tx': self.beam.g_main_tx,
                'g_side_tx': self.beam.g_side_tx,
                'g_main_rx': self.beam.g_main_rx,
                'theta': self.beam.theta,
            },
            'topology': {
                'lambda1': self.topology.lambda1,
                'd_min': self.topology.d_min,
                'c_bar': self.topology.c_bar,
                'radius': self.topology.region.radius,
            },
            'n1_total': self.n1_total,
            'k_channels': self.k_channels,
            'p_m': self.p_m,
            'p1': self.p1,
            'p2': self.p2,
            'alpha': self.alpha,
            'd0': self.d0,
            'noise_power': self.noise_power,
            'target_group': self.target_group.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        data = dict(data)
        topology = dict(data.pop('topology'))
        region = Ball(ORIGIN, topology.pop('radius'))
        return cls(
            sr=SRParams(**data.pop('sr')),
            beam=BeamPattern(**data.pop('beam')),
            topology=MhccpConfig(region=region, **topology),
            **data,
        )


@dataclass(frozen=True)
class SeriesControl:
    k_max: int = DEFAULT_K_MAX
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.k_max < 0 or not self.tol > 0:
            raise ScenarioError("series control needs k_max >= 0 and tol > 0")


@dataclass(frozen=True)
class SnapshotOptions:
    distance_mode: DistanceMode = DistanceMode.COMMON_D0
    a2_channel_policy: ChannelPolicy = ChannelPolicy.ALL_ON_CHANNEL
    # satellite height above the region center; None means d0
    satellite_offset: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'distance_mode', DistanceMode(self.distance_mode))
        object.__setattr__(self, 'a2_channel_policy', ChannelPolicy(self.a2_channel_policy))
        if self.satellite_offset is not None and not self.satellite_offset > 0:
            raise ScenarioError("satellite_offset must be > 0")

    def to_dict(self) -> dict:
        return {
            'distance_mode': self.distance_mode.value,
            'a2_channel_policy': self.a2_channel_policy.value,
            'satellite_offset': self.satellite_offset,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SnapshotOptions":
        return cls(**data)


def with_parameter(scn: Scenario, name: str, value) -> Scenario:
    """Copy of ``scn`` with one sweepable quantity replaced (SI units)"""
    if name == 'p_m':
        return replace(scn, p_m=float(value))
    if name == 'K':
        return replace(scn, k_channels=int(value))
    if name == 'R1':
        region = Ball(scn.region.center, float(value))
        return replace(scn, topology=replace(scn.topology, region=region))
    if name == 'lambda1':
        return replace(scn, topology=replace(scn.topology, lambda1=float(value)))
    raise ScenarioError(f"'{name}' is not a scenario sweep parameter")
