"""Direct evaluation of the exponential sums and identities behind the sieve error terms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from .arith import icbrt, mangoldt_table, mobius_table, primes_upto
from .exponent_pairs import ExponentPair, as_fraction, vdc_bound
from .harmonic import psi
from .ps_verify import floor_pow, preimage_interval, _exponent
from .sieve import SieveContext, rosser_weights

TWO_PI = 2.0 * math.pi
BLOCK = 4096


def block_sum(values: np.ndarray, block: int = BLOCK):
    """Sum by fixed-size blocks, then pairwise over the block totals.

    The result depends only on ``block``, not on how blocks are scheduled.
    """
    values = np.asarray(values)
    if values.size == 0:
        return values.dtype.type(0)
    parts = [values[i:i + block].sum() for i in range(0, values.size, block)]
    while len(parts) > 1:
        parts = [parts[i] + parts[i + 1] if i + 1 < len(parts) else parts[i] for i in range(0, len(parts), 2)]
    return parts[0]


def e_frac(phase) -> np.ndarray:
    """e(phase) with the phase reduced mod 1 before scaling by 2*pi."""
    phase = np.asarray(phase, dtype=float)
    return np.exp(1j * TWO_PI * (phase - np.floor(phase)))


@dataclass
class ExpSumContext:
    N: int
    c: Fraction
    P: int
    j: int = 0
    d: int = 1
    h: int = 1
    r: int = 0
    T: float | None = None

    def __post_init__(self):
        self.c = _exponent(self.c)
        if self.j not in (0, 1):
            raise ValueError("j must be 0 or 1")
        if self.d < 1 or self.P < 1:
            raise ValueError("d and P must be positive")
        if self.T is None:
            self.T = float(self.N + self.j)
        if not self.N <= self.T <= self.N + 2:
            raise ValueError("T must lie in [N, N+2]")

    @property
    def gamma(self) -> float:
        return 1.0 / float(self.c)

    @property
    def v(self) -> Fraction:
        return Fraction(self.h, self.d)

    def primes(self) -> np.ndarray:
        ps = primes_upto(2 * self.P)
        return ps[ps > self.P]


def _gamma_ld(c: Fraction) -> np.longdouble:
    return np.longdouble(c.denominator) / c.numerator


def _floors(ps, c) -> np.ndarray:
    return np.array([floor_pow(int(p), c) for p in ps], dtype=np.int64)


def eval_W(ctx: ExpSumContext, v=None) -> complex:
    """sum_{P<p<=2P} log p * e(v (N + j - [p^c])^gamma)."""
    v = ctx.v if v is None else as_fraction(v)
    ps = ctx.primes()
    x = ctx.N + ctx.j - _floors(ps, ctx.c)
    if np.any(x <= 0):
        raise ValueError("N + j - [p^c] must stay positive")
    base = x.astype(np.longdouble) ** _gamma_ld(ctx.c)
    # reduce v * base mod 1 in extended precision, then drop to double
    phase = (base * v.numerator / v.denominator) % 1
    return complex(block_sum(np.log(ps) * e_frac(phase.astype(float))))


def eval_U(ctx: ExpSumContext, T: float | None = None, v=None) -> complex:
    """sum_{P<p<=2P} log p * e(r p^c + v (T - p^c)^gamma)."""
    T = ctx.T if T is None else T
    v = ctx.v if v is None else as_fraction(v)
    ps = ctx.primes()
    c_ld = np.longdouble(ctx.c.numerator) / ctx.c.denominator
    pc = ps.astype(np.longdouble) ** c_ld
    if np.any(T - pc <= 0):
        raise ValueError("T - p^c must stay positive")
    vv = np.longdouble(v.numerator) / v.denominator
    phase = (ctx.r * pc) % 1 + (vv * (np.longdouble(T) - pc) ** _gamma_ld(ctx.c)) % 1
    return complex(block_sum(np.log(ps) * e_frac(phase.astype(float))))


def sup_U(ctx: ExpSumContext, grid: int = 64) -> tuple[float, float]:
    """(max |U|, argmax T) over a grid on [N, N+2]; a probe, not a certified sup."""
    best = (-1.0, float(ctx.N))
    for T in np.linspace(ctx.N, ctx.N + 2, grid):
        val = abs(eval_U(ctx, T=float(T)))
        if val > best[0]:
            best = (val, float(T))
    return best


def eval_W_mp(ctx: ExpSumContext, v=None, dps: int = 50) -> complex:
    """High-precision oracle for eval_W (exact floors, mpmath powers)."""
    v = ctx.v if v is None else as_fraction(v)
    with mpmath.workdps(dps):
        c = mpmath.mpf(ctx.c.numerator) / ctx.c.denominator
        gamma = 1 / c
        vv = mpmath.mpf(v.numerator) / v.denominator
        total = mpmath.mpc(0)
        for p in ctx.primes():
            p = int(p)
            k = int(mpmath.floor(mpmath.power(p, c)))
            total += mpmath.log(p) * mpmath.expjpi(2 * vv * mpmath.power(ctx.N + ctx.j - k, gamma))
        return complex(total)


def eval_U_mp(ctx: ExpSumContext, T=None, v=None, dps: int = 50) -> complex:
    T = ctx.T if T is None else T
    v = ctx.v if v is None else as_fraction(v)
    with mpmath.workdps(dps):
        c = mpmath.mpf(ctx.c.numerator) / ctx.c.denominator
        gamma = 1 / c
        vv = mpmath.mpf(v.numerator) / v.denominator
        TT = mpmath.mpf(T)
        total = mpmath.mpc(0)
        for p in ctx.primes():
            p = int(p)
            pc = mpmath.power(p, c)
            total += mpmath.log(p) * mpmath.expjpi(2 * (ctx.r * pc + vv * mpmath.power(TT - pc, gamma)))
        return complex(total)


@dataclass
class VaughanPieces:
    P: int
    u: int
    S1: complex
    S2: complex
    S3: complex
    a: np.ndarray  # a[k] = sum_{d | k, d <= u} mu(d)
    c: np.ndarray  # c[k] = sum_{mn = k, m, n <= u} mu(m) Lambda(n)

    @property
    def total(self) -> complex:
        return self.S1 - self.S2 - self.S3


def vaughan_coefficients(u: int, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Tables a[0..limit], c[0..limit] for the cutoff u."""
    mu = mobius_table(max(u, 1))
    lam = mangoldt_table(max(u, 1))
    a = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, min(u, limit) + 1):
        if mu[d]:
            a[d::d] += mu[d]
    c = np.zeros(limit + 1, dtype=float)
    ms = np.flatnonzero(mu[1:u + 1]) + 1
    ns = np.flatnonzero(lam[1:u + 1]) + 1
    if len(ms) and len(ns):
        prod = np.outer(ms, ns)
        vals = np.outer(mu[ms], lam[ns])
        keep = prod <= limit
        np.add.at(c, prod[keep], vals[keep])
    return a, c


def vaughan_decompose(P: int, f: Callable[[np.ndarray], np.ndarray]) -> VaughanPieces:
    """S1, S2, S3 with S1 - S2 - S3 = sum_{P<n<=2P} Lambda(n) f(n), u = [P^(1/3)].

    ``f`` is vectorized: it receives an integer array of n in (P, 2P].
    S3 runs over k > u and l > u with kl in (P, 2P], which puts k below
    2P/u; that is the range where the identity is exact.
    """
    if P < 8:
        raise ValueError("P must be >= 8")
    u = icbrt(P)
    n = np.arange(P + 1, 2 * P + 1, dtype=np.int64)
    fv = np.asarray(f(n), dtype=complex)

    def F(idx):
        return fv[idx - (P + 1)]

    mu = mobius_table(2 * P)
    lam = mangoldt_table(2 * P)
    a, c = vaughan_coefficients(u, 2 * P)
    S1 = 0j
    for k in range(1, u + 1):
        if mu[k]:
            ell = np.arange(P // k + 1, 2 * P // k + 1)
            S1 += mu[k] * block_sum(np.log(ell) * F(k * ell))
    S2 = 0j
    for k in range(1, u * u + 1):
        if c[k]:
            ell = np.arange(P // k + 1, 2 * P // k + 1)
            S2 += c[k] * block_sum(F(k * ell))
    S3 = 0j
    for k in range(u + 1, 2 * P // (u + 1) + 1):
        if a[k]:
            ell = np.arange(max(P // k + 1, u + 1), 2 * P // k + 1)
            if len(ell):
                S3 += a[k] * block_sum(lam[ell] * F(k * ell))
    return VaughanPieces(P, u, complex(S1), complex(S2), complex(S3), a[: 2 * P + 1], c[: u * u + 1])


def direct_lambda_sum(P: int, f) -> complex:
    n = np.arange(P + 1, 2 * P + 1, dtype=np.int64)
    return complex(block_sum(mangoldt_table(2 * P)[n] * np.asarray(f(n), dtype=complex)))


def _p_range(N: int, c: Fraction, P: int | None):
    """Primes for Gamma-type sums: (P, 2P] if P is given, else every p with [p^c] < N."""
    if P is not None:
        ps = primes_upto(2 * P)
        return [int(p) for p in ps if p > P]
    out = []
    for p in primes_upto(math.ceil(N ** (1.0 / float(c))) + 2):
        if floor_pow(int(p), c) < N:
            out.append(int(p))
    return out


def _sieve_primes(z: int) -> list[int]:
    return [int(p) for p in primes_upto(z - 1) if p > 2]


def eval_Gamma(N: int, c, z: int, P: int | None = None) -> float:
    """sum of log p over solutions of [p^c] + [m^c] = N with m free of primes in (2, z)."""
    c = _exponent(c)
    sp = _sieve_primes(z)
    terms = []
    for p in _p_range(N, c, P):
        v = N - floor_pow(p, c)
        if v < 1:
            continue
        lo, hi = preimage_interval(v, c)
        for m in range(lo, hi + 1):
            if all(m % q for q in sp):
                terms.append(math.log(p))
    return math.fsum(terms)


def eval_Sigma(N: int, c, D: int, j: int, z: int | None = None, P: int | None = None) -> float:
    """sum_{d | P(z)} lambda^-(d) sum_p log p * psi(-(N + j - [p^c])^gamma / d)."""
    c = _exponent(c)
    z = math.isqrt(D) if z is None else z
    table = rosser_weights(SieveContext(D, z))
    gamma = 1.0 / float(c)
    ps = _p_range(N, c, P)
    x = np.array([N + j - floor_pow(p, c) for p in ps], dtype=float)
    logs = np.log(np.array(ps, dtype=float))
    base = x ** gamma
    total = []
    for d, w in sorted(table.items()):
        if w.minus:
            total.append(w.minus * math.fsum(logs * psi(-base / d)))
    return math.fsum(total)


def gamma_lower_bound(N: int, c, D: int, z: int | None = None, P: int | None = None) -> dict:
    """Both sides of Gamma >= Gamma_0 + Sigma_0 - Sigma_1 (lower Rosser weights).

    ``sieved`` is sum_d lambda^-(d) sum_p log p * #{m = 0 mod d}, counted
    directly; ``main + sigma0 - sigma1`` must reproduce it exactly.
    """
    c = _exponent(c)
    z = math.isqrt(D) if z is None else z
    table = rosser_weights(SieveContext(D, z))
    gamma = 1.0 / float(c)
    ps = _p_range(N, c, P)
    intervals = [preimage_interval(N - floor_pow(p, c), c) for p in ps]
    logs = np.log(np.array(ps, dtype=float))
    x0 = np.array([N - floor_pow(p, c) for p in ps], dtype=float)
    A = math.fsum(logs * ((x0 + 1) ** gamma - x0 ** gamma))
    main, sieved = [], []
    for d, w in sorted(table.items()):
        if not w.minus:
            continue
        main.append(w.minus * A / d)
        cnt = [hi // d - (lo - 1) // d if hi >= lo else 0 for lo, hi in intervals]
        sieved.append(w.minus * math.fsum(logs * np.array(cnt, dtype=float)))
    return {
        "Gamma": eval_Gamma(N, c, z, P),
        "sieved": math.fsum(sieved),
        "Gamma0": math.fsum(main),
        "Sigma0": eval_Sigma(N, c, D, 0, z, P),
        "Sigma1": eval_Sigma(N, c, D, 1, z, P),
    }


def weyl_vdc_check(z, Q: int) -> tuple[float, float]:
    """(|sum z_n|^2, van der Corput right side) for z_n on an interval of length len(z)."""
    if Q < 1:
        raise ValueError("Q must be a positive integer")
    z = np.asarray(z, dtype=complex)
    L = z.size
    lhs = abs(z.sum()) ** 2
    acc = 0.0
    for q in range(0, min(Q, L)):
        corr = np.vdot(z[: L - q], z[q:]).real  # sum_n z_{n+q} conj(z_n)
        acc += (1.0 if q == 0 else 2.0) * (1 - q / Q) * corr
    rhs = (1 + L / Q) * acc
    return float(lhs), float(rhs)


DEFAULT_SIGMAS = (-0.5, 0.5, 1.5, 2.5)


def exponent_pair_probe(pair: ExponentPair, lambda1: float, a: int, sigmas=DEFAULT_SIGMAS) -> dict:
    """max over the phase family f(x) = lambda1 * a * (x/a)**sigma / sigma of |sum e(f(n))| / bound.

    The 1/sigma keeps |f'| ~ lambda1 on (a, 2a]. Diagnostic only.
    """
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    n = np.arange(a + 1, 2 * a + 1, dtype=float)
    bound = vdc_bound(pair, lambda1, a)
    rows = []
    for s in sigmas:
        phase = lambda1 * a * (n / a) ** s / s
        val = abs(block_sum(e_frac(phase)))
        rows.append({"sigma": s, "abs_sum": float(val), "ratio": float(val) / bound})
    return {
        "kappa": str(pair.kappa), "lambda": str(pair.lam), "lambda1": lambda1, "a": a,
        "bound": bound, "max_ratio": max(r["ratio"] for r in rows), "rows": rows,
        "asserting": False,
    }
