"""
Unit conversions used when configuration values enter the toolkit.

Conversions happen once, at parse time; everything downstream is linear SI.
"""

import math


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


def dbw_to_watts(value_dbw: float) -> float:
    return db_to_linear(value_dbw)


def watts_to_dbw(value_w: float) -> float:
    return linear_to_db(value_w)


def dbm_to_watts(value_dbm: float) -> float:
    return db_to_linear(value_dbm - 30.0)


def watts_to_dbm(value_w: float) -> float:
    return linear_to_db(value_w) + 30.0


def km_to_m(value_km: float) -> float:
    return value_km * 1000.0


def m_to_km(value_m: float) -> float:
    return value_m / 1000.0
