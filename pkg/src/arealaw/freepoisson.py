"""The free Poisson law: combinatorial moments, density, mean entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy import integrate

MOMENT_CAP = 12


@dataclass(frozen=True)
class FreePoissonLaw:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("rate c must be positive")

    @property
    def support(self) -> tuple[float, float]:
        r = math.sqrt(self.c)
        return (1 - r) ** 2, (1 + r) ** 2

    @property
    def atom(self) -> float:
        return max(1.0 - self.c, 0.0)

    def density(self, t: float) -> float:
        lo, hi = self.support
        if t <= lo or t >= hi:
            return 0.0
        return math.sqrt(4 * self.c - (t - 1 - self.c) ** 2) / (2 * math.pi * t)

    def bulk_integral(self, f) -> float:
        """Integral of ``f`` against the absolutely continuous part.

        With ``t = 1 + c - 2 sqrt(c) cos(theta)`` the edge square roots cancel
        and the integrand becomes ``(2c/pi) sin(theta)^2 f(t) / t``.
        """
        c = self.c
        rc = math.sqrt(c)

        def g(theta):
            t = 1 + c - 2 * rc * math.cos(theta)
            if t <= 0:
                return 0.0
            return 2 * c / math.pi * math.sin(theta) ** 2 * f(t) / t

        val, _ = integrate.quad(g, 0.0, math.pi, limit=200, epsabs=1e-13, epsrel=1e-12)
        return val

    def mass(self) -> float:
        return self.atom + self.bulk_integral(lambda t: 1.0)


def _poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_add(p, q):
    out = [0] * max(len(p), len(q))
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] += b
    return out


@lru_cache(maxsize=None)
def _nc_block_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients ``a_j`` = number of non-crossing partitions of [n] with j blocks.

    All free cumulants equal the formal variable ``x``, so the moment series
    satisfies ``M - 1 = x z M + z M (M - 1)``, i.e.
    ``P_n = x P_{n-1} + sum_{j=1}^{n-1} P_{n-1-j} P_j``.
    """
    polys = [[1]]
    for size in range(1, n + 1):
        acc = [0] + polys[size - 1]
        for j in range(1, size):
            acc = _poly_add(acc, _poly_mul(polys[size - 1 - j], polys[j]))
        polys.append(acc)
    return tuple(polys[n])


def nc_partition_counts(n: int) -> tuple[int, ...]:
    return _nc_block_polynomial(n)


def fp_moment(c, n: int):
    """``sum_{pi in NC(n)} c^{#blocks}``; exact when ``c`` is an int or Fraction."""
    if n < 0 or n > MOMENT_CAP:
        raise ValueError(f"order {n} outside 0..{MOMENT_CAP}")
    if not c > 0:
        raise ValueError("rate c must be positive")
    return sum(a * c ** j for j, a in enumerate(_nc_block_polynomial(n)))


def narayana(n: int, k: int) -> int:
    return math.comb(n, k) * math.comb(n, k - 1) // n


def fp_moment_quad(c: float, n: int) -> float:
    law = FreePoissonLaw(c)
    return law.bulk_integral(lambda t: t ** n) + (law.atom if n == 0 else 0.0)


def fp_entropy(c: float) -> float:
    """``-int t log t d pi_c``."""
    if not c > 0:
        raise ValueError("rate c must be positive")
    if c >= 1:
        return -0.5 - c * math.log(c)
    return -c * c / 2


def fp_entropy_quad(c: float) -> float:
    # the atom at 0 contributes nothing
    return -FreePoissonLaw(c).bulk_integral(lambda t: t * math.log(t))
