"""
Run configuration: a flat ``key = value`` text file with ``#`` comments.

Quantities are written in human units (dB, dBW, dBm, dBi, km); they are
converted to SI exactly once, when the ``RunConfig`` is built.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from apps.channel.antenna import BeamPattern
from apps.channel.fading import SRParams
from apps.common.exceptions import ConfigParseError
from apps.common.units import db_to_linear, dbm_to_watts, dbw_to_watts, km_to_m
from apps.topology.geometry import ORIGIN, Ball
from apps.topology.pointprocess import MhccpConfig

from .scenario import Scenario, SeriesControl, SnapshotOptions
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)

# defaults that are configuration choices rather than published system values
ASSUMED_DEFAULT_KEYS = (
    'G_t_dBi', 'g_t_dBi', 'G_r_dBi', 'theta', 'N1', 'K', 'c_bar', 'p_m_dBW', 'target_group',
)

CONFIG_KEYS = tuple(RunConfigSerializer().fields)


def sweep_value_to_si(param: str, value: float):
    """Convert one sweep value from config units to the unit the scenario uses"""
    if param == 'T':
        return db_to_linear(value)
    if param == 'p_m':
        return dbw_to_watts(value)
    if param == 'R1':
        return km_to_m(value)
    if param == 'K':
        return int(value)
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    scenario: Scenario
    threshold: float
    n_iter: int
    seed: int
    series: SeriesControl
    snapshot: SnapshotOptions
    sweep_param: Optional[str] = None
    sweep_values: Tuple[float, ...] = ()
    # validated values in config units, every key present
    values: Dict = field(default_factory=dict)
    assumed_defaults: Dict = field(default_factory=dict)

    @property
    def runs_analytic(self) -> bool:
        return self.mode in ('analytic', 'both')

    @property
    def runs_montecarlo(self) -> bool:
        return self.mode in ('montecarlo', 'both')

    def sweep_points(self) -> List[Tuple[float, object]]:
        """(value in config units, value in scenario units) per sweep point"""
        return [(value, sweep_value_to_si(self.sweep_param, value)) for value in self.sweep_values]

    def metadata(self) -> dict:
        return {
            'assumed_defaults': dict(self.assumed_defaults),
            'noise_power_w': self.scenario.noise_power,
            'threshold_linear': self.threshold,
        }


def tokenize(text: str) -> Dict[str, str]:
    """Raw ``key -> value`` strings; rejects malformed, unknown and repeated keys"""
    raw = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            raise ConfigParseError("expected 'key = value'", line=number)
        key, value = (part.strip() for part in content.split('=', 1))
        if not key:
            raise ConfigParseError("missing key before '='", line=number)
        if key not in CONFIG_KEYS:
            raise ConfigParseError("unknown key", line=number, key=key)
        if key in raw:
            raise ConfigParseError("key given more than once", line=number, key=key)
        if not value:
            raise ConfigParseError("missing value", line=number, key=key)
        raw[key] = value
    return raw


def build_run_config(values: Mapping, explicit_keys) -> RunConfig:
    noise = dbm_to_watts(values['noise_dBm']) * values['bandwidth_hz']
    region = Ball(ORIGIN, km_to_m(values['R1_km']))
    scenario = Scenario(
        sr=SRParams(values['sr_c'], values['sr_q'], values['sr_omega']),
        beam=BeamPattern.from_dbi(values['G_t_dBi'], values['g_t_dBi'], values['G_r_dBi'], values['theta']),
        topology=MhccpConfig(
            lambda1=values['lambda1'],
            d_min=km_to_m(values['D_min_km']),
            c_bar=values['c_bar'],
            region=region,
        ),
        n1_total=values['N1'],
        k_channels=values['K'],
        p_m=dbw_to_watts(values['p_m_dBW']),
        p1=dbw_to_watts(values['p1_dBW']),
        p2=dbw_to_watts(values['p2_dBW']),
        alpha=values['alpha'],
        d0=km_to_m(values['d0_km']),
        noise_power=noise,
        target_group=values['target_group'],
    )
    offset = values['satellite_offset_km']
    return RunConfig(
        mode=values['mode'],
        scenario=scenario,
        threshold=db_to_linear(values['T_dB']),
        n_iter=values['n_iter'],
        seed=values['seed'],
        series=SeriesControl(values['k_max'], values['tol']),
        snapshot=SnapshotOptions(
            distance_mode=values['distance_mode'],
            a2_channel_policy=values['a2_channel_policy'],
            satellite_offset=None if offset is None else km_to_m(offset),
        ),
        sweep_param=values['sweep_param'],
        sweep_values=tuple(values['sweep_values'] or ()),
        values=dict(values),
        assumed_defaults={key: values[key] for key in ASSUMED_DEFAULT_KEYS if key not in explicit_keys},
    )


def parse_config(text: str, overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Parse and validate a configuration text.

    ``overrides`` replaces or adds keys after tokenizing (command-line flags).
    Raises ``ConfigParseError`` for malformed text and DRF ``ValidationError``
    listing every violated field.
    """
    raw = tokenize(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value

    serializer = RunConfigSerializer(data=raw)
    serializer.is_valid(raise_exception=True)
    config = build_run_config(serializer.validated_data, explicit_keys=raw.keys())
    logger.debug("Parsed configuration with %d explicit keys", len(raw))
    return config
