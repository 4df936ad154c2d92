"""
Special functions behind the shadowed-Rician statistics.
"""

import logging
import math

import numpy as np
from scipy import special

from apps.common.exceptions import NumericFailure

logger = logging.getLogger(__name__)

HYP1F1_MAX_TERMS = 20_000
HYP1F1_RTOL = 1e-15
# below this the Kummer transform is evaluated in log space
HYP1F1_LOG_SWITCH = -500.0
# regularized incomplete gamma values below this have lost precision
REGULARIZED_FLOOR = 1e-300


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def hyp1f1(a: float, b: float, x: float, max_terms: int = HYP1F1_MAX_TERMS) -> float:
    """
    Confluent hypergeometric function 1F1(a; b; x) by its Kummer series.

    Negative arguments go through Kummer's transformation
    1F1(a; b; x) = exp(x) 1F1(b - a; b; -x) unless the series terminates.
    """
    if _is_nonpositive_integer(b):
        raise NumericFailure(f"1F1 is undefined for b = {b}")
    if x == 0.0:
        return 1.0
    if x < 0.0 and not _is_nonpositive_integer(a):
        c = b - a
        if x < HYP1F1_LOG_SWITCH and not _is_nonpositive_integer(c):
            sign, log_abs = _signed_log_series(c, b, -x, max_terms)
            return sign * math.exp(x + log_abs)
        return math.exp(x) * hyp1f1(c, b, -x, max_terms)

    term = 1.0
    total = 1.0
    partials = [1.0]
    for n in range(max_terms):
        term *= (a + n) / (b + n) * x / (n + 1)
        if term == 0.0:
            # a is a nonpositive integer: the polynomial ended exactly
            return math.fsum(partials)
        partials.append(term)
        total += term
        if not math.isfinite(total):
            raise NumericFailure(f"1F1({a}; {b}; {x}) overflows double precision")
        if n + 1 > abs(x) and abs(term) <= HYP1F1_RTOL * abs(total):
            return math.fsum(partials)

    raise NumericFailure(f"1F1({a}; {b}; {x}) did not converge in {max_terms} terms")


def _signed_log_series(a: float, b: float, x: float, max_terms: int):
    """
    Sign and log-magnitude of 1F1(a; b; x) for x > 0, summed in log space.

    Neither a nor b may be a nonpositive integer.
    """
    log_x = math.log(x)
    log_rtol = math.log(HYP1F1_RTOL)
    log_terms = [0.0]
    signs = [1.0]
    log_term, sign = 0.0, 1.0
    peak = 0.0
    for n in range(max_terms):
        log_term += math.log(abs(a + n)) - math.log(abs(b + n)) + log_x - math.log(n + 1)
        sign *= math.copysign(1.0, a + n) * math.copysign(1.0, b + n)
        log_terms.append(log_term)
        signs.append(sign)
        peak = max(peak, log_term)
        # past n = x the terms shrink and, past -a and -b, keep one sign
        if n + 1 > max(x, -a, -b) and log_term < peak + log_rtol:
            log_abs, total_sign = special.logsumexp(log_terms, b=signs, return_sign=True)
            return float(total_sign), float(log_abs)

    raise NumericFailure(f"log 1F1({a}; {b}; {x}) did not converge in {max_terms} terms")


def log_hyp1f1(a: float, b: float, x: float, max_terms: int = HYP1F1_MAX_TERMS) -> float:
    """
    log 1F1(a; b; x) for a, b > 0 and x >= 0, stable where 1F1 itself overflows.
    """
    if not (a > 0 and b > 0 and x >= 0):
        raise NumericFailure("log_hyp1f1 needs a > 0, b > 0 and x >= 0")
    if x == 0.0:
        return 0.0
    return _signed_log_series(a, b, x, max_terms)[1]


def lower_incomplete_gamma(a: float, x: float) -> float:
    """gamma(a, x) = integral of t^(a-1) exp(-t) over [0, x]"""
    if not a > 0 or not x >= 0:
        raise ValueError(f"lower_incomplete_gamma needs a > 0 and x >= 0, got ({a}, {x})")
    log_value = log_lower_incomplete_gamma(a, x)
    if log_value > math.log(np.finfo(float).max):
        raise NumericFailure(f"gamma({a}, {x}) overflows double precision")
    return math.exp(log_value)


def log_lower_incomplete_gamma(a: float, x: float) -> float:
    """log gamma(a, x); -inf at x = 0"""
    if x == 0.0:
        return -math.inf
    regularized = special.gammainc(a, x)
    if regularized > REGULARIZED_FLOOR:
        return float(math.log(regularized) + special.gammaln(a))
    # gamma(a, x) = x^a exp(-x) / a * 1F1(1; a + 1; x) where the regularized form underflows
    return a * math.log(x) - x - math.log(a) + log_hyp1f1(1.0, a + 1.0, x)


def log_pochhammer(x: float, n: int):
    """
    Sign and log-magnitude of the rising factorial (x)_n = Gamma(x + n) / Gamma(x).

    Returns ``(0, -inf)`` when the product hits zero.
    """
    if n == 0:
        return 1, 0.0
    if _is_nonpositive_integer(x):
        if n > -x:
            return 0, -math.inf
        # (x)_n = (-1)^n (-x)! / (-x - n)!
        m = int(-x)
        log_abs = special.gammaln(m + 1) - special.gammaln(m - n + 1)
        return (-1) ** n, float(log_abs)
    sign = special.gammasgn(x + n) * special.gammasgn(x)
    log_abs = special.gammaln(x + n) - special.gammaln(x)
    return int(np.sign(sign)), float(log_abs)
