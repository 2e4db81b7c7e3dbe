"""Desk-scale verification of N = [p^c] + [m^c] with m almost prime.

``[n^c]`` is certified: a double-precision estimate is accepted only when it
sits clearly away from an integer, otherwise mpmath interval arithmetic is
retried with growing precision, and as a last resort the rational exponent
``c = a/b`` is checked exactly through ``k^b <= n^a < (k+1)^b``.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import mpmath
from mpmath import libmp
import numpy as np

from .admissibility import C_THRESHOLD_BAABAA, prime_factor_bound
from .arith import primes_upto
from .exponent_pairs import as_fraction
from .harmonic import psi
from .sieve import MemoryGuardError, SieveContext, rosser_weights, sieve_sums

PRECISION_CAP_ENV = "PSHAPIRO_PRECISION_CAP"
DEFAULT_BASE_DIGITS = 30
DEFAULT_PRECISION_CAP = 480
EXACT_BIT_BUDGET = 4_000_000
MAX_TABLE = 2 * 10**8
DESK_SCALE_LIMIT = 10**8
_EPS = 2.0 ** -52


class PrecisionCapError(ArithmeticError):
    """[n^c] could not be certified within the precision cap."""


def precision_cap() -> int:
    return int(os.environ.get(PRECISION_CAP_ENV, DEFAULT_PRECISION_CAP))


def _exponent(c) -> Fraction:
    c = as_fraction(c)
    if not 1 < c <= Fraction(3, 2):
        raise ValueError(f"c={c} outside (1, 3/2]")
    return c


def _float_margin(n, x, c: Fraction, cf: float):
    """Bound on |fl(n**cf) - n**c| covering libm error and the rounding of c."""
    return x * (np.log(np.maximum(n, 1)) * abs(float(c - Fraction(cf))) + 64 * _EPS) + 1e-300


def exact_floor_pow(n: int, c) -> int:
    """[n^c] from integer arithmetic only: k^b <= n^a < (k+1)^b with c = a/b."""
    c = as_fraction(c)
    a, b = c.numerator, c.denominator
    if n.bit_length() * a > EXACT_BIT_BUDGET:
        raise PrecisionCapError(f"exact check for n={n}, c={c} exceeds the bit budget")
    return _iroot(n ** a, b)


def _iroot(x: int, b: int) -> int:
    """Largest k with k^b <= x (integer Newton iteration from above)."""
    if x < 2:
        return x
    k = 1 << -(-x.bit_length() // b)
    while True:
        nxt = ((b - 1) * k + x // k ** (b - 1)) // b
        if nxt >= k:
            return k
        k = nxt


def _interval_floor(n: int, c: Fraction, digits: int):
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = int(digits * 3.33) + 8
    try:
        x = iv.exp(iv.log(iv.mpf(n)) * (iv.mpf(c.numerator) / c.denominator))
        # floor the raw endpoints; mpmath.floor would round at the global precision
        lo, hi = (libmp.to_int(e, "f") for e in x._mpi_)
    finally:
        iv.prec = saved
    return lo if lo == hi else None


def floor_pow(n: int, c, base_digits: int = DEFAULT_BASE_DIGITS, cap: int | None = None) -> int:
    """Certified ``[n^c]`` for n >= 1 and 1 < c <= 3/2."""
    c = _exponent(c)
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1
    cf = float(c)
    logn = math.log(n)
    if cf * logn > 700:
        return _escalate(n, c, base_digits, cap)
    x = math.exp(cf * logn)
    k = math.floor(x)
    margin = x * (logn * abs(float(c - Fraction(cf))) + 64 * _EPS) + 1e-300
    if x - k > margin and k + 1 - x > margin:
        return k
    return _escalate(n, c, base_digits, cap)


def _escalate(n: int, c: Fraction, base_digits: int, cap: int | None) -> int:
    cap = precision_cap() if cap is None else cap
    digits = base_digits
    while digits <= cap:
        k = _interval_floor(n, c, digits)
        if k is not None:
            return k
        digits *= 2
    # n^c may be an integer; only exact arithmetic settles that
    return exact_floor_pow(n, c)


def floor_pow_table(M: int, c, base_digits: int = DEFAULT_BASE_DIGITS, cap: int | None = None) -> np.ndarray:
    """``[m^c]`` for m = 1..M (index m - 1), certified element by element."""
    c = _exponent(c)
    if M > MAX_TABLE:
        raise MemoryGuardError(f"table of {M} powers exceeds {MAX_TABLE}")
    m = np.arange(1, M + 1, dtype=np.float64)
    cf = float(c)
    x = np.power(m, cf)
    k = np.floor(x)
    margin = _float_margin(m, x, c, cf)
    out = k.astype(np.int64)
    risky = np.flatnonzero(~((x - k > margin) & (k + 1 - x > margin)))
    for i in risky:
        out[i] = 1 if i == 0 else _escalate(int(i) + 1, c, base_digits, cap)
    return out


def preimage_interval(v: int, c, table: np.ndarray | None = None) -> tuple[int, int]:
    """(m_lo, m_hi) with [m^c] = v exactly for m_lo <= m <= m_hi; empty when m_hi < m_lo."""
    c = _exponent(c)
    if v < 1:
        raise ValueError("v must be >= 1")

    def fp(m):
        if table is not None and m <= len(table):
            return int(table[m - 1])
        return floor_pow(m, c)

    m = max(1, math.ceil(v ** (1.0 / float(c))))
    while m > 1 and fp(m - 1) >= v:
        m -= 1
    while fp(m) < v:
        m += 1
    hi = m - 1
    while fp(hi + 1) <= v:
        hi += 1
    return m, hi


class ProgressionCount(NamedTuple):
    direct: int
    psi_form: float
    boundary: bool


def count_in_progression(v: int, d: int, c) -> ProgressionCount:
    """#{m = 0 mod d : [m^c] = v}, directly and through the psi identity."""
    if d < 1:
        raise ValueError("d must be >= 1")
    c = _exponent(c)
    lo, hi = preimage_interval(v, c)
    direct = hi // d - (lo - 1) // d if hi >= lo else 0
    gamma = 1.0 / float(c)
    a = v ** gamma / d
    b = (v + 1) ** gamma / d
    form = (b - a) - psi(-b) + psi(-a)
    boundary = min(abs(a - round(a)), abs(b - round(b))) < 1e-12
    return ProgressionCount(direct, float(form), boundary)


def omega_sieve(limit: int, max_size: int = MAX_TABLE) -> np.ndarray:
    """Omega(m) (prime factors with multiplicity) for m = 0..limit; Omega(0) = Omega(1) = 0."""
    if limit > max_size:
        raise MemoryGuardError(f"Omega table of size {limit} exceeds {max_size}")
    omega = np.zeros(limit + 1, dtype=np.int8)
    for p in primes_upto(limit):
        pk = int(p)
        while pk <= limit:
            omega[pk::pk] += 1
            pk *= int(p)
    return omega


@dataclass
class PSConfig:
    c: Fraction
    n_lo: int
    n_hi: int
    segment: int = 2**16
    base_digits: int = DEFAULT_BASE_DIGITS
    precision_cap: int | None = None
    witnesses: str = "best"  # "best", "all" or "none"
    workers: int = 1

    def __post_init__(self):
        self.c = _exponent(self.c)
        if not 1 <= self.n_lo <= self.n_hi:
            raise ValueError("need 1 <= n_lo <= n_hi")
        if self.n_hi > DESK_SCALE_LIMIT:
            raise MemoryGuardError(f"n_hi={self.n_hi} beyond desk scale {DESK_SCALE_LIMIT}")
        if self.witnesses not in ("best", "all", "none"):
            raise ValueError("witnesses must be 'best', 'all' or 'none'")
        if self.segment < 1:
            raise ValueError("segment must be positive")

    @property
    def gamma(self) -> Fraction:
        return 1 / self.c

    @property
    def bound(self) -> int | None:
        return prime_factor_bound(self.c) if self.c < C_THRESHOLD_BAABAA else None


@dataclass
class RepresentationRecord:
    N: int
    count: int
    witnesses: list[tuple[int, int]] = field(default_factory=list)
    min_omega: int | None = None
    bound: int | None = None

    @property
    def satisfied(self) -> bool:
        if self.min_omega is None:
            return False
        return self.bound is None or self.min_omega <= self.bound

    def csv_row(self) -> str:
        mo = "" if self.min_omega is None else str(self.min_omega)
        bd = "" if self.bound is None else str(self.bound)
        return f"{self.N},{self.count},{mo},{bd},{int(self.satisfied)}"


CSV_HEADER = "N,count,min_omega,bound,satisfied"


class _Tables(NamedTuple):
    fm: np.ndarray      # [m^c] for m = 1..M
    omega: np.ndarray   # Omega(m) for m = 0..M
    primes: np.ndarray
    fp: np.ndarray      # [p^c] for the primes above


_TABLES: dict[tuple, _Tables] = {}


def build_tables(cfg: PSConfig) -> _Tables:
    key = (cfg.c, cfg.n_hi)
    if key in _TABLES:
        return _TABLES[key]
    # largest m with [m^c] <= n_hi - 1 (the prime part is at least [2^c] >= 2, m part >= 1)
    M = max(1, math.floor((cfg.n_hi + 1) ** (1.0 / float(cfg.c))) + 2)
    fm = floor_pow_table(M, cfg.c, cfg.base_digits, cfg.precision_cap)
    M = int(np.searchsorted(fm, cfg.n_hi - 1, side="right"))
    fm = fm[:M]
    omega = omega_sieve(M)
    primes = primes_upto(M)
    fp = fm[primes - 1] if len(primes) else np.array([], dtype=np.int64)
    tables = _Tables(fm, omega, primes, fp)
    _TABLES.clear()
    _TABLES[key] = tables
    return tables


def _scan_segment(args) -> list[RepresentationRecord]:
    cfg, s, t = args
    tab = build_tables(cfg)
    fm, omega, primes, fp = tab
    width = t - s + 1
    count = np.zeros(width, dtype=np.int64)
    best_om = np.full(width, 127, dtype=np.int8)
    best_p = np.zeros(width, dtype=np.int64)
    best_m = np.zeros(width, dtype=np.int64)
    chunks = []
    i0 = np.searchsorted(fm, s - fp, side="left")
    i1 = np.searchsorted(fm, t - fp, side="right")
    for j in np.flatnonzero(i1 > i0):
        a, b = int(i0[j]), int(i1[j])
        p = int(primes[j])
        idx = fm[a:b] + fp[j] - s
        ms = np.arange(a + 1, b + 1, dtype=np.int64)
        om = omega[a + 1:b + 1]
        count[idx] += 1
        better = om < best_om[idx]
        if better.any():
            sel = idx[better]
            best_om[sel] = om[better]
            best_p[sel] = p
            best_m[sel] = ms[better]
        if cfg.witnesses == "all":
            chunks.append((idx, np.full(len(idx), p, dtype=np.int64), ms))
    bound = cfg.bound
    grouped: dict[int, list[tuple[int, int]]] = {}
    if chunks:
        idx = np.concatenate([ch[0] for ch in chunks])
        ps = np.concatenate([ch[1] for ch in chunks])
        ms = np.concatenate([ch[2] for ch in chunks])
        order = np.lexsort((ps, idx))
        idx, ps, ms = idx[order], ps[order], ms[order]
        cuts = np.flatnonzero(np.diff(idx)) + 1
        for seg_i, seg_p, seg_m in zip(np.split(idx, cuts), np.split(ps, cuts), np.split(ms, cuts)):
            grouped[int(seg_i[0])] = list(zip(seg_p.tolist(), seg_m.tolist()))
    out = []
    for k in range(width):
        n = s + k
        if count[k] == 0:
            out.append(RepresentationRecord(n, 0, [], None, bound))
            continue
        if cfg.witnesses == "all":
            wit = grouped[k]
        elif cfg.witnesses == "best":
            wit = [(int(best_p[k]), int(best_m[k]))]
        else:
            wit = []
        out.append(RepresentationRecord(n, int(count[k]), wit, int(best_om[k]), bound))
    return out


def _segments(cfg: PSConfig):
    s = cfg.n_lo
    while s <= cfg.n_hi:
        t = min(cfg.n_hi, s + cfg.segment - 1)
        yield cfg, s, t
        s = t + 1


def scan(cfg: PSConfig) -> Iterator[RepresentationRecord]:
    """Records for every N in [n_lo, n_hi], in ascending order of N.

    Segments run in worker processes when ``cfg.workers > 1``; tables are
    built once in the parent and inherited.
    """
    build_tables(cfg)
    segs = list(_segments(cfg))
    if cfg.workers > 1 and len(segs) > 1:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=cfg.workers, mp_context=ctx) as ex:
            for recs in ex.map(_scan_segment, segs):
                yield from recs
    else:
        for seg in segs:
            yield from _scan_segment(seg)


def scan_csv(cfg: PSConfig) -> str:
    lines = [CSV_HEADER]
    lines.extend(r.csv_row() for r in scan(cfg))
    return "\n".join(lines) + "\n"


def verify_theorem(cfg: PSConfig, max_listed: int = 20) -> dict:
    """Exception counts over the range; exceptions are reported, not raised."""
    bound = cfg.bound
    no_rep, over, worst = [], [], []
    total = 0
    for rec in scan(cfg):
        total += 1
        if rec.count == 0:
            no_rep.append(rec.N)
        elif bound is not None and rec.min_omega > bound:
            over.append((rec.N, rec.min_omega))
        if rec.min_omega is not None:
            worst.append((rec.min_omega, rec.N, rec.witnesses[:1]))
    worst.sort(key=lambda w: (-w[0], w[1]))
    return {
        "c": str(cfg.c),
        "range": [cfg.n_lo, cfg.n_hi],
        "bound": bound,
        "n_total": total,
        "n_no_representation": len(no_rep),
        "n_exceeding_bound": len(over),
        "n_exceptions": len(no_rep) + len(over),
        "no_representation": no_rep[:max_listed],
        "exceeding_bound": over[:max_listed],
        "worst_cases": [{"N": n, "min_omega": om, "witness": list(w[0]) if w else None}
                        for om, n, w in worst[:5]],
        "p_range": "all primes with [p^c] < N (normalizing constant of P dropped)",
    }


def default_P(N: int, c) -> int:
    """10^-9 N^gamma rounded up, but at least 10."""
    gamma = 1.0 / float(as_fraction(c))
    return max(10, math.ceil(1e-9 * N ** gamma))


def gamma0_diagnostic(N: int, c, z: int, D: int, P: int | None = None) -> dict:
    """A(N), the lower sieve factor sum lambda^-(d)/d and their product (main term)."""
    c = _exponent(c)
    P = default_P(N, c) if P is None else P
    gamma = 1.0 / float(c)
    ps = [int(p) for p in primes_upto(2 * P) if p > P]
    A = 0.0
    terms = []
    for p in ps:
        k = floor_pow(p, c)
        if k >= N:
            raise ValueError(f"[p^c] >= N for p={p}; choose a smaller P")
        terms.append(math.log(p) * ((N + 1 - k) ** gamma - (N - k) ** gamma))
    A = math.fsum(terms)
    ctx = SieveContext(D, z)
    sums = sieve_sums(ctx, rosser_weights(ctx))
    factor = float(sums.N_minus)
    return {
        "N": N, "c": str(c), "z": z, "D": D, "P": P,
        "A_N": A,
        "sieve_factor": factor,
        "product": A * factor,
        "ratio_A_over_N_2gamma_minus_1": A / N ** (2 * gamma - 1),
        "ratio_A_over_P_N_gamma_minus_1": A / (P * N ** (gamma - 1)),
    }
