"""Small arithmetic tables shared by the sieve, the scanner and the lab."""

from __future__ import annotations

import math

import numpy as np


def primes_upto(limit: int) -> np.ndarray:
    """Primes p <= limit (sieve of Eratosthenes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def smallest_prime_factor(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_upto(math.isqrt(limit)):
        block = spf[p * p::p]
        block[block == 0] = p
    idx = np.arange(limit + 1)
    unset = spf == 0
    spf[unset] = idx[unset]
    return spf


def mobius_table(limit: int) -> np.ndarray:
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_upto(limit):
        mu[p::p] *= -1
        mu[p * p::p * p] = 0
    return mu


def mangoldt_table(limit: int) -> np.ndarray:
    lam = np.zeros(limit + 1, dtype=float)
    for p in primes_upto(limit):
        logp = math.log(p)
        pk = p
        while pk <= limit:
            lam[pk] = logp
            pk *= p
    return lam


def divisor_count_table(limit: int) -> np.ndarray:
    tau = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    return tau


def mangoldt(n: int) -> float:
    if n < 2:
        return 0.0
    for p in range(2, math.isqrt(n) + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return math.log(p) if n == 1 else 0.0
    return math.log(n)


def icbrt(n: int) -> int:
    """floor(n ** (1/3)) for n >= 0, exactly."""
    x = int(round(n ** (1.0 / 3.0)))
    while x ** 3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x
