"""
Closed-form outage probability of the target uplink.

The SR fading CDF is expanded as a series of lower incomplete gamma
functions, each replaced by Alzer's closed-form approximation and binomially
expanded, so the outage probability becomes a weighted sum of interference
Laplace transforms evaluated at a handful of points ``s``.
"""

import logging
import math
from typing import Callable, Iterable, List, Optional, Tuple

from scipy import special

from apps.channel.antenna import mean_gain_mixture, target_gain
from apps.channel.fading import log_series_coeff, sr_mgf
from apps.common.exceptions import InvalidThreshold, TruncationNotConverged
from apps.topology.pointprocess import density_lambda3

from .scenario import ChannelPolicy, Scenario, SeriesControl, with_parameter

logger = logging.getLogger(__name__)


def zeta(k: int) -> float:
    """Gamma(k + 2) ** (-1 / (k + 1))"""
    if k < 0:
        raise ValueError(f"zeta needs k >= 0, got {k}")
    return math.exp(-float(special.gammaln(k + 2)) / (k + 1))


def alzer_bound(k: int, x: float) -> float:
    """
    Gamma(k + 1) (1 - exp(-zeta(k) x)) ** (k + 1), the closed form standing in
    for gamma(k + 1, x). Exact for k = 0 and a lower bound for k >= 1.
    """
    if x <= 0:
        return 0.0
    base = -math.expm1(-zeta(k) * x)
    return math.exp(float(special.gammaln(k + 1)) + (k + 1) * math.log(base))


def s_value(scn: Scenario, T: float, k: int, t: int) -> float:
    return (
        t * zeta(k) * scn.sr.beta_minus_delta * T * scn.d0 ** scn.alpha
        / (scn.p_m * target_gain(scn.beam))
    )


def m1(scn: Scenario, t_arg):
    return sr_mgf(scn.sr, t_arg)


def m2(scn: Scenario, group: int, s: float) -> float:
    """MGF of the SR gain averaged over the main/side lobe of a group-``group`` interferer"""
    if group not in (1, 2):
        raise ValueError(f"group must be 1 or 2, got {group}")
    power = scn.p1 if group == 1 else scn.p2
    scale = s * power * scn.d0 ** (-scn.alpha)
    return mean_gain_mixture(scn.beam, lambda gain: m1(scn, scale * gain))


def a2_share_for(scn: Scenario, policy: ChannelPolicy) -> float:
    """Fraction of the A2 population sharing the target's channel under ``policy``"""
    if ChannelPolicy(policy) == ChannelPolicy.PER_CLUSTER_SHARE:
        return 1.0 / scn.k_channels
    return 1.0


def laplace_interference(scn: Scenario, s: float, a2_share: float = 1.0) -> float:
    """
    E[exp(-s I)] for the aggregate interference I at common distance d0.

    The A1 interferers contribute a fixed product of mixtures; the A2
    population is treated as a Poisson field of mean ``a2_share * lambda3 * V1``.
    """
    if s < 0:
        raise ValueError(f"Laplace transform argument must be >= 0, got {s}")
    if s == 0:
        return 1.0

    topo = scn.topology
    a2_mean = a2_share * density_lambda3(topo.lambda1, topo.d_min, topo.c_bar) * scn.region_volume
    log_value = scn.n1_interferers * math.log(m2(scn, 1, s)) + a2_mean * (m2(scn, 2, s) - 1.0)
    return math.exp(log_value)


def _binomial_average(scn: Scenario, T: float, k: int, laplace: Callable[[float], float]) -> float:
    """sum_t C(k+1, t) (-1)^t exp(-s sigma^2) L(s), the mean of (1 - exp(-zeta y))^(k+1)"""
    terms = []
    for t in range(k + 2):
        s = s_value(scn, T, k, t)
        weight = float(special.comb(k + 1, t, exact=True))
        terms.append((-1) ** t * weight * math.exp(-s * scn.noise_power) * laplace(s))
    return min(max(math.fsum(terms), 0.0), 1.0)


def outage_probability(
    scn: Scenario,
    T: float,
    ctrl: Optional[SeriesControl] = None,
    a2_share: float = 1.0,
    laplace: Optional[Callable[[float], float]] = None,
) -> float:
    """
    P(SINR <= T) from the truncated series.

    ``laplace`` overrides the interference Laplace transform; by default
    ``laplace_interference`` with the given ``a2_share`` is used. For integer q
    the sum has exactly q terms.
    """
    if not T > 0:
        raise InvalidThreshold(f"SINR threshold must be > 0, got {T}")
    ctrl = ctrl or SeriesControl()
    if laplace is None:
        def laplace(s):
            return laplace_interference(scn, s, a2_share)

    sr = scn.sr
    log_bmd = math.log(sr.beta_minus_delta)
    terms = []
    previous = math.inf
    for k in range(sr.series_length(ctrl.k_max)):
        sign, log_psi = log_series_coeff(sr, k)
        term = 0.0
        if sign:
            log_prefactor = log_psi - (k + 1) * log_bmd + float(special.gammaln(k + 1))
            term = sign * math.exp(log_prefactor) * _binomial_average(scn, T, k, laplace)
        terms.append(term)
        if sr.has_integer_shape:
            continue
        partial = math.fsum(terms)
        if abs(term) <= ctrl.tol * max(abs(partial), ctrl.tol) and abs(term) <= abs(previous):
            logger.debug("Outage series converged after %d terms at T=%g", k + 1, T)
            break
        previous = term
    else:
        if not sr.has_integer_shape:
            raise TruncationNotConverged(
                f"outage series did not reach tol={ctrl.tol} within k_max={ctrl.k_max} at T={T}",
                k_max=ctrl.k_max,
                last_term=terms[-1],
            )

    return min(max(math.fsum(terms), 0.0), 1.0)


def outage_curve(
    scn: Scenario,
    parameter: str,
    values: Iterable[float],
    T: Optional[float] = None,
    ctrl: Optional[SeriesControl] = None,
    a2_policy: ChannelPolicy = ChannelPolicy.ALL_ON_CHANNEL,
) -> List[Tuple[float, float]]:
    """
    Outage probability along one swept quantity, everything else fixed.

    Values are in SI units (linear threshold for ``T``). ``T`` is the fixed
    threshold when another quantity is swept.
    """
    curve = []
    for value in values:
        if parameter == 'T':
            point_scn, threshold = scn, value
        else:
            if T is None:
                raise InvalidThreshold("a fixed threshold is required when sweeping " + parameter)
            point_scn, threshold = with_parameter(scn, parameter, value), T
        share = a2_share_for(point_scn, a2_policy)
        curve.append((value, outage_probability(point_scn, threshold, ctrl, share)))
    return curve
