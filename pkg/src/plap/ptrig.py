"""Generalized (p-) trigonometric functions and the interval spectrum.

For 1 < p < infinity the half-period is pi_p = 2*pi / (p*sin(pi/p)) and sin_p
is, on [0, pi_p/2], the inverse of

    F_p(y) = integral_0^y (1 - t^p)^(-1/p) dt,

extended to the real line by sin_p(pi_p - x) = sin_p(x), oddness, and
2*pi_p-periodicity.  For p = 2 these reduce to pi and the classical sine.
The Dirichlet spectrum of -(|u'|^(p-2) u')' on an interval of length L is
lambda_{n,p} = (n*pi_p/L)^p * (p-1) with eigenfunctions built from sin_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import PLapError


@dataclass(frozen=True)
class PValue:
    """A validated exponent p in (1, infinity)."""

    p: float

    def __post_init__(self):
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 1.0):
            raise PLapError(f"p must be a finite real > 1, got {self.p!r}")

    @property
    def conjugate(self) -> float:
        """The Hoelder conjugate p' = p/(p-1)."""
        return self.p / (self.p - 1.0)

    @property
    def ratio(self) -> float:
        """p/p' simplified algebraically to p - 1 (no floating conjugate)."""
        return self.p - 1.0

    def __float__(self) -> float:
        return float(self.p)


def _as_p(p) -> float:
    return PValue(float(p)).p


@lru_cache(maxsize=None)
def pi_p(p) -> float:
    """Generalized half-period 2*pi / (p*sin(pi/p)); equals pi at p=2, -> 2 as p -> inf."""
    p = _as_p(p)
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


def arcsin_p(p, y: float) -> float:
    """F_p(y) = integral_0^y (1 - t^p)^(-1/p) dt for y in [0, 1]."""
    p = _as_p(p)
    if not 0.0 <= y <= 1.0:
        raise PLapError(f"arcsin_p needs y in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return pi_p(p) / 2.0
    val, _ = quad(lambda t: (1.0 - t**p) ** (-1.0 / p), 0.0, y, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def sin_p(p, x: float) -> float:
    """The p-sine at x; |sin_p| <= 1, odd, 2*pi_p-periodic."""
    p = _as_p(p)
    half = pi_p(p) / 2.0
    # reduce to the first quarter period [0, pi_p/2]
    x = math.fmod(x, 4.0 * half)
    if x < 0.0:
        x += 4.0 * half
    sign = 1.0
    if x > 2.0 * half:          # sin_p(x + pi_p) = -sin_p(x)
        x -= 2.0 * half
        sign = -1.0
    if x > half:                # sin_p(pi_p - x) = sin_p(x)
        x = 2.0 * half - x
    if x <= 0.0:
        return 0.0 * sign
    if x >= half:
        return sign
    # invert F_p by safeguarded root bracketing; F_p is strictly increasing
    y = brentq(lambda t: arcsin_p(p, t) - x, 0.0, 1.0, xtol=1e-13, rtol=8.9e-16)
    return sign * y


def interval_eigenvalue(p, n: int, length: float) -> float:
    """n-th Dirichlet eigenvalue (n*pi_p/L)^p * (p-1) on an interval of length L."""
    p = _as_p(p)
    if not (isinstance(n, int) and n >= 1):
        raise PLapError(f"mode index must be a positive integer, got {n!r}")
    if not length > 0:
        raise PLapError(f"interval length must be positive, got {length!r}")
    return (n * pi_p(p) / length) ** p * (p - 1.0)


def interval_eigenfunction(p, n: int, length: float, x: float) -> float:
    """Value at x of the n-th Dirichlet eigenfunction with unit amplitude factor.

    u_n(x) = (L / (n*pi_p)) * sin_p(n*pi_p*x / L); vanishes at x = 0 and x = L.
    """
    p = _as_p(p)
    if not (isinstance(n, int) and n >= 1):
        raise PLapError(f"mode index must be a positive integer, got {n!r}")
    if not length > 0:
        raise PLapError(f"interval length must be positive, got {length!r}")
    k = n * pi_p(p) / length
    return sin_p(p, k * x) / k
