"""
Shadowed-Rician (SR) fading statistics of the power gain |h|^2.

``SR(c, q, omega)``: ``2c`` is the mean multipath power, ``q`` the Nakagami
parameter of the line-of-sight amplitude and ``omega`` its mean power.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from apps.common.exceptions import TruncationNotConverged

from .special import hyp1f1, log_hyp1f1, log_lower_incomplete_gamma, log_pochhammer

logger = logging.getLogger(__name__)

DEFAULT_K_MAX = 200
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SRParams:
    c: float
    q: float
    omega: float

    def __post_init__(self):
        errors = []
        if not self.c > 0:
            errors.append(f"c must be > 0 (got {self.c})")
        if not self.q > 0:
            errors.append(f"q must be > 0 (got {self.q})")
        if not self.omega >= 0:
            errors.append(f"omega must be >= 0 (got {self.omega})")
        if not errors and not self.beta > self.delta:
            errors.append("beta must exceed delta, otherwise the CDF series diverges")
        if errors:
            raise ValueError('; '.join(errors))

    @property
    def kappa(self) -> float:
        return math.exp(self.log_kappa)

    @property
    def log_kappa(self) -> float:
        two_c = 2.0 * self.c
        return (
            self.q * math.log(two_c * self.q)
            - math.log(two_c)
            - self.q * math.log(two_c * self.q + self.omega)
        )

    @property
    def delta(self) -> float:
        two_c = 2.0 * self.c
        return self.omega / (two_c * (two_c * self.q + self.omega))

    @property
    def beta(self) -> float:
        return 1.0 / (2.0 * self.c)

    @property
    def beta_minus_delta(self) -> float:
        # equals q / (2cq + omega) without cancellation
        return self.q / (2.0 * self.c * self.q + self.omega)

    @property
    def has_integer_shape(self) -> bool:
        return float(self.q).is_integer()

    def series_length(self, k_max: int) -> int:
        """Number of series terms to visit; exactly q when q is a positive integer"""
        if self.has_integer_shape:
            return int(self.q)
        return k_max + 1


def sr_mean(params: SRParams) -> float:
    return 2.0 * params.c + params.omega


def log_series_coeff(params: SRParams, k: int):
    """Sign and log-magnitude of the coefficient Psi(k)"""
    if k > 0 and params.delta == 0.0:
        return 0, -math.inf
    poch_sign, log_poch = log_pochhammer(1.0 - params.q, k)
    if poch_sign == 0:
        return 0, -math.inf
    sign = poch_sign * (-1) ** k
    log_abs = params.log_kappa + log_poch - 2.0 * float(sp.gammaln(k + 1))
    if k > 0:
        log_abs += k * math.log(params.delta)
    return sign, log_abs


def sr_series_coeff(params: SRParams, k: int) -> float:
    """Psi(k) = (-1)^k kappa delta^k (1 - q)_k / (k!)^2"""
    if k < 0:
        raise ValueError(f"series index must be >= 0, got {k}")
    sign, log_abs = log_series_coeff(params, k)
    return 0.0 if sign == 0 else sign * math.exp(log_abs)


def sr_pdf(params: SRParams, x: float) -> float:
    if x < 0:
        raise ValueError(f"sr_pdf is defined for x >= 0, got {x}")
    bmd = params.beta_minus_delta
    dx = params.delta * x
    # beyond this point the density is far below the smallest double
    if bmd * x > 800.0 + abs(params.q - 1.0) * math.log1p(dx) + 50.0:
        return 0.0
    if dx < 500.0:
        return params.kappa * math.exp(-params.beta * x) * hyp1f1(params.q, 1.0, dx)
    return math.exp(params.log_kappa - params.beta * x + log_hyp1f1(params.q, 1.0, dx))


def _series_term(params: SRParams, k: int, y: float):
    """kth CDF term Psi(k) / (beta - delta)^(k+1) * gamma(k + 1, y)"""
    sign, log_abs = log_series_coeff(params, k)
    if sign == 0:
        return 0.0
    log_abs += log_lower_incomplete_gamma(k + 1, y) - (k + 1) * math.log(params.beta_minus_delta)
    return sign * math.exp(log_abs)


def sr_cdf(params: SRParams, x: float, k_max: int = DEFAULT_K_MAX, tol: float = DEFAULT_TOL) -> float:
    """
    CDF of |h|^2 from the Kummer-transformed series.

    Finite and exact for integer q; otherwise truncated once a term falls
    below ``tol`` relative to the partial sum while terms decrease.
    """
    if x < 0:
        raise ValueError(f"sr_cdf is defined for x >= 0, got {x}")
    if x == 0.0:
        return 0.0

    y = params.beta_minus_delta * x
    terms = []
    previous = math.inf
    for k in range(params.series_length(k_max)):
        term = _series_term(params, k, y)
        terms.append(term)
        if params.has_integer_shape:
            continue
        partial = math.fsum(terms)
        if abs(term) <= tol * max(abs(partial), tol) and abs(term) <= abs(previous):
            logger.debug("SR CDF series converged after %d terms at x=%g", k + 1, x)
            break
        previous = term
    else:
        if not params.has_integer_shape:
            raise TruncationNotConverged(
                f"SR CDF series did not reach tol={tol} within k_max={k_max} at x={x}",
                k_max=k_max,
                last_term=terms[-1],
            )

    return min(max(math.fsum(terms), 0.0), 1.0)


def sr_mgf(params: SRParams, x):
    """
    E[exp(-x |h|^2)] for x >= 0; accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("sr_mgf is defined for x >= 0")
    two_c = 2.0 * params.c
    two_cq = two_c * params.q
    one_plus = 1.0 + two_c * x
    # (2cq + omega)(1 + 2cx) - omega, rearranged to stay positive
    denominator = two_cq * one_plus + two_c * x * params.omega
    value = np.exp(
        params.q * math.log(two_cq)
        + (params.q - 1.0) * np.log(one_plus)
        - params.q * np.log(denominator)
    )
    return float(value) if value.ndim == 0 else value


def sr_sample(rng: np.random.Generator, params: SRParams, size=None):
    """
    Draw |h|^2 = |Z + xi|^2 with Z circular Gaussian of power 2c and xi a
    Nakagami(q, omega) amplitude.
    """
    sigma = math.sqrt(params.c)
    real = rng.normal(0.0, sigma, size)
    imag = rng.normal(0.0, sigma, size)
    los = np.sqrt(rng.gamma(params.q, params.omega / params.q, size))
    power = (real + los) ** 2 + imag ** 2
    return float(power) if size is None else power
