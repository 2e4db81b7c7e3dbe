"""Rosser-Iwaniec linear sieve weights of level D over the odd primes below z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .arith import primes_upto

EULER_GAMMA = 0.57721566490153286060651209008240243
TWO_E_GAMMA = 2.0 * math.exp(EULER_GAMMA)
MAX_TABLE_ENTRIES = 10**8


class MemoryGuardError(RuntimeError):
    """A table would exceed its configured size."""


@dataclass
class SieveContext:
    D: int
    z: int
    primes: list[int] = field(init=False)

    def __post_init__(self):
        if self.D < 5:
            raise ValueError("level D must be >= 5")
        if self.z < 3:
            raise ValueError("cutoff z must be >= 3")
        self.primes = [int(p) for p in primes_upto(self.z - 1) if p > 2]

    @property
    def s0(self) -> float:
        return math.log(self.D) / math.log(self.z)

    @property
    def in_linear_range(self) -> bool:
        return self.z ** 2 <= self.D <= self.z ** 3

    @property
    def lower_sandwich_valid(self) -> bool:
        """All sieving primes are <= D, so the d <= D cut never removes a lambda^- weight."""
        return not self.primes or self.primes[-1] <= self.D


class Weights(NamedTuple):
    plus: int
    minus: int


class WeightTable(dict):
    """Map d -> Weights(lambda_plus, lambda_minus); d missing means both are 0."""

    def plus(self, d: int) -> int:
        return self.get(d, Weights(0, 0)).plus

    def minus(self, d: int) -> int:
        return self.get(d, Weights(0, 0)).minus


def _rosser_support(primes_desc: list[int], D: int, checked_parity: int, max_entries: int) -> dict[int, int]:
    """Squarefree d = p1*...*pr (p1 > ... > pr) passing every prefix test
    p1*...*p_{m-1} * p_m**3 < D at positions m of the given parity (1 = odd)."""
    out = {1: 1}
    # stack items: (d, mu(d), position of next prime, index of next candidate)
    stack = [(1, 1, 1, 0)]
    while stack:
        d, mu, pos, start = stack.pop()
        for i in range(start, len(primes_desc)):
            p = primes_desc[i]
            nd = d * p
            if nd > D:
                continue
            if pos % 2 == checked_parity % 2 and d * p ** 3 >= D:
                continue
            out[nd] = -mu
            if len(out) > max_entries:
                raise MemoryGuardError(f"Rosser table exceeds {max_entries} entries")
            stack.append((nd, -mu, pos + 1, i + 1))
    return out


def rosser_weights(ctx: SieveContext, max_entries: int = MAX_TABLE_ENTRIES) -> WeightTable:
    """lambda^+ and lambda^- on the squarefree d | P(z) with d <= D.

    The prefix conditions already force d < D except for lambda^-(p) with a
    single prime p; so the lower sandwich holds only when every sieving
    prime is <= D (``ctx.lower_sandwich_valid``).
    """
    primes_desc = sorted(ctx.primes, reverse=True)
    plus = _rosser_support(primes_desc, ctx.D, 1, max_entries)
    minus = _rosser_support(primes_desc, ctx.D, 0, max_entries)
    table = WeightTable()
    for d in sorted(set(plus) | set(minus)):
        table[d] = Weights(plus.get(d, 0), minus.get(d, 0))
    return table


def _sieve_prime_divisors(n: int, primes: list[int]) -> list[int]:
    return [p for p in primes if n % p == 0]


def sandwich_check(n: int, table: WeightTable, ctx: SieveContext) -> tuple[int, int, int]:
    """(sum lambda^-, sum mu, sum lambda^+) over d | (n, P(z))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ps = _sieve_prime_divisors(n, ctx.primes)
    return _divisor_sums(ps, table)


def _divisor_sums(ps, table):
    lo = mid = hi = 0
    for k in range(len(ps) + 1):
        sign = -1 if k % 2 else 1
        for combo in combinations(ps, k):
            d = math.prod(combo)
            w = table.get(d)
            if w is not None:
                lo += w.minus
                hi += w.plus
            mid += sign
    return lo, mid, hi


def sandwich_violations(limit: int, table: WeightTable, ctx: SieveContext) -> list[tuple[int, tuple[int, int, int]]]:
    """All n <= limit whose divisor sums break lo <= mid <= hi."""
    bad = []
    cache: dict[tuple[int, ...], tuple[int, int, int]] = {}
    pset = np.array(ctx.primes, dtype=np.int64)
    n_arr = np.arange(1, limit + 1, dtype=np.int64)
    divides = (n_arr[:, None] % pset[None, :]) == 0 if len(pset) else np.zeros((limit, 0), bool)
    for i in range(limit):
        key = tuple(pset[divides[i]].tolist())
        sums = cache.get(key)
        if sums is None:
            sums = cache[key] = _divisor_sums(list(key), table)
        lo, mid, hi = sums
        if not lo <= mid <= hi:
            bad.append((i + 1, sums))
    return bad


def linear_sieve_F(s: float) -> float:
    if not 2 <= s <= 3:
        raise ValueError("closed form of F valid only for 2 <= s <= 3")
    return TWO_E_GAMMA / s


def linear_sieve_f(s: float) -> float:
    if not 2 <= s <= 3:
        raise ValueError("closed form of f valid only for 2 <= s <= 3")
    return TWO_E_GAMMA / s * math.log(s - 1)


@dataclass
class SieveSums:
    D: int
    z: int
    s0: float
    B: Fraction
    N_plus: Fraction
    N_minus: Fraction
    ratio_plus: float | None
    ratio_minus: float | None

    def as_dict(self) -> dict:
        return {
            "D": self.D, "z": self.z, "s0": self.s0,
            "B": float(self.B), "N_plus": float(self.N_plus), "N_minus": float(self.N_minus),
            "ratio_plus": self.ratio_plus, "ratio_minus": self.ratio_minus,
            "diagnostic_only": True,
        }


def sieve_sums(ctx: SieveContext, table: WeightTable | None = None) -> SieveSums:
    """Mertens product B and N^{+/-} = sum lambda^{+/-}(d)/d over d | P(z), exactly.

    The ratios against F(s0), f(s0) are reported only when 2 <= s0 <= 3.
    """
    table = rosser_weights(ctx) if table is None else table
    B = Fraction(1)
    for p in ctx.primes:
        B *= Fraction(p - 1, p)
    n_plus = sum((Fraction(w.plus, d) for d, w in table.items() if w.plus), Fraction(0))
    n_minus = sum((Fraction(w.minus, d) for d, w in table.items() if w.minus), Fraction(0))
    s0 = ctx.s0
    rp = rm = None
    if 2 <= s0 <= 3:
        rp = float(n_plus) / (float(B) * linear_sieve_F(s0))
        fs = linear_sieve_f(s0)
        rm = float(n_minus) / (float(B) * fs) if fs > 0 else None
    return SieveSums(ctx.D, ctx.z, s0, B, n_plus, n_minus, rp, rm)


def lower_bound_factor(delta, s: float = 2.1) -> float:
    """f(s) for the sieve exponent s = log D / log z, slightly above 2."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not 2 < s <= 3:
        raise ValueError("s must lie in (2, 3]")
    return linear_sieve_f(s)


def weight_rows(table: WeightTable):
    """(d, lambda_plus, lambda_minus) rows for CSV export."""
    return [(d, w.plus, w.minus) for d, w in sorted(table.items())]
