"""Independent reference values, computed without the package's tables or cubature."""

from __future__ import annotations

import bisect
import math

import numpy as np
from scipy import integrate

GAMMA = 0.57721566490153286061
E_GAMMA = math.exp(GAMMA)


def f_closed(s: float) -> float:
    """f on [2, 4]."""
    return 2.0 * E_GAMMA * math.log(s - 1.0) / s


def F_closed(s: float) -> float:
    """F on (0, 3]."""
    return 2.0 * E_GAMMA / s


def F_on_3_5(s: float) -> float:
    """s F(s) = 2 e^gamma + int_3^s f(t - 1) dt for s in [3, 5]."""
    val, _ = integrate.quad(lambda t: f_closed(t - 1.0), 3.0, s, epsabs=1e-13, epsrel=1e-13)
    return (2.0 * E_GAMMA + val) / s


def omega_on_2_3(u: float) -> float:
    return (1.0 + math.log(u - 1.0)) / u


def omega_on_3_4(u: float) -> float:
    """u w(u) = 3 w(3) + int_3^u w(t - 1) dt."""
    val, _ = integrate.quad(lambda t: omega_on_2_3(t - 1.0), 3.0, u, epsabs=1e-13, epsrel=1e-13)
    return (1.0 + math.log(2.0) + val) / u


def c2(t: float) -> float:
    return math.log(t - 1.0) if t >= 2.0 else 0.0


def C3_at_4() -> float:
    """C_3(4) = 4 w(4) - c_1(4) - c_2(4) = int_1^2 log(x)/(1 + x) dx."""
    val, _ = integrate.quad(lambda x: math.log(x) / (1.0 + x), 1.0, 2.0, epsabs=1e-14, epsrel=1e-14)
    return val


def primes_upto(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def count_rough_with_three_factors(x: int, z: int) -> int:
    """#{n <= x : every prime factor of n is >= z and Omega(n) >= 3}.

    Valid when the fourth power of the least prime >= z exceeds x, so such
    n are exactly the products p1 <= p2 <= p3.
    """
    top = x // (z * z)
    primes = [int(p) for p in primes_upto(top) if p >= z]
    assert primes[0] ** 4 > x
    total = 0
    for i, p1 in enumerate(primes):
        if p1**3 > x:
            break
        for j in range(i, len(primes)):
            p2 = primes[j]
            limit = x // (p1 * p2)
            if limit < p2:
                break
            total += bisect.bisect_right(primes, limit) - j
    return total
