"""Closed-form rates for the three-vertex examples and exponents for small graphs.

Deliberately self-contained: nothing here calls the numerical solvers.
"""
from __future__ import annotations

import math


def _xlogy(x: float, y: float) -> float:
    return 0.0 if x == 0 else x * math.log(y)


def _check(delta: float, x: float) -> None:
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not 0.0 <= x <= 0.5:
        raise ValueError("x must lie in [0, 1/2]")


def simple_walk_rate(x: float) -> float:
    """x log 4x + (1/2 - x) log 2(1 - 2x): the three-vertex simple-walk cost."""
    return _xlogy(x, 4 * x) + _xlogy(0.5 - x, 2 * (1 - 2 * x))


def _upper(delta: float, x: float) -> float:
    return _xlogy(0.5 - x, (delta - 1) / delta) + x * math.log((delta + 1) / delta)


def _lower(delta: float, x: float) -> float:
    return _xlogy(x, (delta - 1) / delta) + (0.5 - x) * math.log((delta + 1) / delta)


def thresholds(delta: float) -> tuple[float, float]:
    return (delta - 1) / (4 * delta), (delta + 1) / (4 * delta)


def star3_rate(delta: float, x: float) -> float:
    """Rate of nu = (1/2, x, 1/2 - x) for the walk started at the centre."""
    _check(delta, x)
    if delta <= 1:
        return simple_walk_rate(x)
    lo, hi = thresholds(delta)
    if x <= lo:
        return _lower(delta, x)
    if x >= hi:
        return _upper(delta, x)
    return simple_walk_rate(x)


def path3_rate(delta: float, x: float) -> float:
    """Rate of nu = (x, 1/2, 1/2 - x) on the path 0-1-2 started at the end 0."""
    _check(delta, x)
    if delta <= 1:
        return simple_walk_rate(x)
    _, hi = thresholds(delta)
    if x <= hi:
        return simple_walk_rate(x)
    return _upper(delta, x)


def _kl(p, q) -> float:
    return sum(_xlogy(a, a / b) for a, b in zip(p, q) if a > 0)


def star3_rate_projection(delta: float, x: float) -> float:
    """Same rate written as R(nu || mu) - R(nu || T nu) with T clamping the leaves."""
    _check(delta, x)
    nu = (0.5, x, 0.5 - x)
    mu = (0.5, 0.25, 0.25)
    if delta <= 1:
        return _kl(nu, mu)
    lo, hi = thresholds(delta)
    t = (0.5, min(max(nu[1], lo), hi), min(max(nu[2], lo), hi))
    return _kl(nu, mu) - _kl(nu, t)


def path3_rate_projection(delta: float, x: float) -> float:
    _check(delta, x)
    nu = (x, 0.5, 0.5 - x)
    mu = (0.25, 0.5, 0.25)
    if delta <= 1:
        return _kl(nu, mu)
    lo, hi = thresholds(delta)
    t = (min(nu[0], hi), 0.5, max(nu[2], lo))
    return _kl(nu, mu) - _kl(nu, t)


def alpha_closed(tag: str, delta: float) -> float:
    if not delta > 0:
        raise ValueError("delta must be positive")
    if tag in ("star3", "path3", "triangle"):
        return 0.5 * math.log((1 + delta) / delta)
    if tag == "path4":
        return 0.5 * math.log((2 + 2 * delta) / (1 + 2 * delta))
    raise ValueError(f"unknown graph tag {tag!r}")
