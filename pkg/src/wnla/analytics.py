"""Closed-form gain, heralded weight and success probability of the amplifier.

Notation: ``eta`` is the surviving single-photon weight of the shared W state,
``t`` the ancilla beam-splitter transmission and ``n`` the number of parties.

Boundary values that only exist as limits (``t = 0`` or ``eta = 0``) are
returned as :class:`Limit`, a ``float`` subclass carrying ``is_limit = True``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

AGREEMENT_RTOL = 1e-12


class Limit(float):
    """A value defined by continuity at a boundary point."""

    is_limit = True

    def __repr__(self) -> str:
        return f"Limit({float(self)!r})"


def is_limit(value: float) -> bool:
    return getattr(value, "is_limit", False)


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ValueError(f"number of parties must be an integer >= 2, got {n}")


def _mix(eta: float, t: float) -> float:
    # eta (1-t) + (1-eta) t: two non-negative terms, and exactly 0.5 at t = 0.5
    return eta * (1.0 - t) + (1.0 - eta) * t


def analytic_gain(eta: float, t: float) -> float:
    """Amplification factor G = (1-t) / (eta (1-t) + (1-eta) t).

    Both denominator terms are non-negative, so there is no cancellation
    near ``eta = t = 1``; at ``t = 0.5`` the result is exactly 1.
    """
    _check_unit("eta", eta)
    _check_unit("t", t)
    if t == 0.0:
        return Limit(math.inf) if eta == 0.0 else Limit(1.0 / eta)
    den = _mix(eta, t)
    if den == 0.0:
        # only at eta = 1, t = 1, where G = 1 for every t < 1
        return Limit(1.0)
    g = (1.0 - t) / den
    return Limit(g) if eta == 0.0 else g


def analytic_eta_prime(eta: float, t: float, n: int) -> float:
    """Single-photon weight after a successful run.

    The n-party expression eta (1-t) t^(n-1) / (eta (1-t) t^(n-1) + (1-eta) t^n)
    is checked against its n-free reduction, which is what gets returned.
    """
    _check_unit("eta", eta)
    _check_unit("t", t)
    _check_n(n)
    if t == 0.0:
        if eta == 0.0:
            raise ValueError("heralded weight is undefined at eta = 0, t = 0")
        return Limit(1.0)
    signal = eta * (1.0 - t)
    if signal + (1.0 - eta) * t == 0.0:
        return Limit(1.0)
    reduced = signal / (signal + (1.0 - eta) * t)
    num = signal * t ** (n - 1)
    den = num + (1.0 - eta) * t**n
    if den > 0.0:
        full = num / den
        if not math.isclose(full, reduced, rel_tol=AGREEMENT_RTOL, abs_tol=1e-300):
            raise ArithmeticError(f"n-form {full!r} disagrees with reduced form {reduced!r}")
    return reduced


def analytic_success_prob(eta: float, t: float, n: int) -> float:
    """P = eta (1-t) t^(n-1) + (1-eta) t^n, evaluated as t^(n-1) (eta (1-t) + (1-eta) t)."""
    _check_unit("eta", eta)
    _check_unit("t", t)
    _check_n(n)
    return t ** (n - 1) * _mix(eta, t)


def gain_threshold_check(eta: float, t: float) -> bool:
    """Whether G > 1, decided in exact rational arithmetic on the float inputs."""
    _check_unit("eta", eta)
    _check_unit("t", t)
    e, tt = Fraction(eta), Fraction(t)
    if tt == 0:
        return e < 1
    return (1 - tt) > tt + e * (1 - 2 * tt)


@dataclass(frozen=True)
class GainCurvePoint:
    t: float
    value: float
    kind: str
    n: int
    eta: float
    limit: bool = False

    def __post_init__(self):
        if self.kind not in ("gain", "success_prob"):
            raise ValueError(f"unknown curve kind {self.kind!r}")


def curve_point(kind: str, t: float, n: int, eta: float) -> GainCurvePoint:
    if kind == "gain":
        value = analytic_gain(eta, t)
    elif kind == "success_prob":
        value = analytic_success_prob(eta, t, n)
    else:
        raise ValueError(f"unknown curve kind {kind!r}")
    return GainCurvePoint(t, float(value), kind, n, eta, is_limit(value))
