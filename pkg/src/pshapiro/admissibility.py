"""Linear constraint system in (gamma, delta, q) and its exact two-variable LP.

Every bound on the Type II sums is of the form ``N**e`` with ``e`` linear in
gamma (= 1/c), delta (sieve level ``D = N**delta``) and q (``Q = N**q``).  The
bound is admissible when each exponent is strictly below ``2*gamma - 1``.
For a fixed gamma the feasible set is a polygon in (delta, q); the largest
delta is read off its vertices with exact rational arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .exponent_pairs import ExponentPair, apply_word, as_fraction, enumerate_pairs

F = Fraction
ZERO = F(0)
C_THRESHOLD_BAABAA = F(247, 238)


@dataclass(frozen=True)
class LinearForm:
    """``g*gamma + d*delta + q*q + const`` with exact coefficients."""

    g: Fraction = ZERO
    d: Fraction = ZERO
    q: Fraction = ZERO
    const: Fraction = ZERO

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.g + other.g, self.d + other.d, self.q + other.q, self.const + other.const)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.g - other.g, self.d - other.d, self.q - other.q, self.const - other.const)

    def __mul__(self, k) -> "LinearForm":
        k = F(k)
        return LinearForm(self.g * k, self.d * k, self.q * k, self.const * k)

    __rmul__ = __mul__

    def __call__(self, gamma, delta, q) -> Fraction:
        return self.g * gamma + self.d * delta + self.q * q + self.const

    def at_gamma(self, gamma) -> tuple[Fraction, Fraction, Fraction]:
        """Coefficients (a_delta, a_q, b) with the form equal to a_delta*delta + a_q*q + b."""
        return self.d, self.q, self.g * gamma + self.const

    def __str__(self):
        terms = [f"{coef}{name}" for coef, name in
                 ((self.const, ""), (self.g, "*gamma"), (self.d, "*delta"), (self.q, "*q")) if coef]
        return " + ".join(terms).replace("+ -", "- ") or "0"


GAMMA = LinearForm(g=F(1))
DELTA = LinearForm(d=F(1))
Q = LinearForm(q=F(1))
ONE = LinearForm(const=F(1))
TARGET = 2 * GAMMA - ONE


@dataclass(frozen=True)
class Constraint:
    tag: str
    lhs: LinearForm
    sense: str  # "<" or "<="
    rhs: LinearForm

    @property
    def slack_form(self) -> LinearForm:
        """rhs - lhs; the constraint reads slack > 0 (or >= 0)."""
        return self.rhs - self.lhs

    def holds(self, gamma, delta, q, strict: bool | None = None) -> bool:
        s = self.slack_form(gamma, delta, q)
        strict = self.sense == "<" if strict is None else strict
        return s > 0 if strict else s >= 0


@dataclass
class ConstraintSystem:
    pair: ExponentPair
    constraints: list[Constraint]
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def by_tag(self, tag: str) -> Constraint:
        for con in self.constraints:
            if con.tag == tag:
                return con
        raise KeyError(tag)


class Infeasible:
    """Marker: no (delta > 0, q) satisfies the system."""

    def __init__(self, supremum: Fraction | None = None):
        self.supremum = supremum

    def __repr__(self):
        return f"Infeasible(supremum={self.supremum})"

    def __bool__(self):
        return False


INFEASIBLE = Infeasible()


def t2_lhs(p: ExponentPair) -> LinearForm:
    """Exponent of the exponent-pair term after summing over d, h, r.

    Inner sum: (|r| q N**(1-gamma))**kappa (P/k)**lambda, worst case K = P**(1/2);
    square root of the resulting ``|W_{K,L}|**2`` bound, then sum over
    |r| <= d N**(1-gamma) and d <= D.
    """
    k, lam = p.kappa, p.lam
    one_minus_gamma = ONE - GAMMA
    e = ((k * one_minus_gamma) + lam * GAMMA) * F(1, 2) + GAMMA * ((1 - lam) / 4) + GAMMA * F(1, 2)
    return (k / 2) * Q + (2 + k / 2) * DELTA + (1 + k / 2) * one_minus_gamma + e


def build_constraints(p: ExponentPair) -> ConstraintSystem:
    if not isinstance(p, ExponentPair):
        p = ExponentPair(*p)
    half = F(1, 2)
    cons = [
        Constraint("T1", ONE + 2 * DELTA - half * Q, "<", TARGET),
        Constraint("T2", t2_lhs(p), "<", TARGET),
        # reciprocal term of the exponent-pair bound; implied by T1 when gamma < 1
        Constraint("T1r", half * ONE + F(1, 4) * GAMMA + 2 * DELTA - half * Q, "<", TARGET),
        Constraint("O33a", GAMMA + DELTA - half * Q, "<", TARGET),
        Constraint("O33b", F(1, 4) * ONE + F(5, 8) * GAMMA + DELTA + F(1, 4) * Q, "<", TARGET),
        Constraint("O33c", F(7, 8) * GAMMA + F(5, 4) * DELTA - F(1, 4) * Q, "<", TARGET),
        Constraint("O33d", F(1, 12) * ONE + F(5, 6) * GAMMA + DELTA + F(1, 12) * Q, "<", TARGET),
        Constraint("O33e", F(23, 24) * GAMMA + F(13, 12) * DELTA - F(1, 12) * Q, "<", TARGET),
        Constraint("q_lo", LinearForm(), "<=", Q),
        Constraint("q_hi", Q, "<=", F(1, 3) * GAMMA),
    ]
    notes = ["O33* constraints are imported Type II bounds, independent of the pair; "
             "thresholds for other pairs are conditional on them"]
    return ConstraintSystem(p, cons, notes)


@dataclass(frozen=True)
class LPResult:
    delta: Fraction
    q: Fraction
    binding: tuple[str, ...]


def _half_planes(system, gamma):
    """Each constraint as a_d*delta + a_q*q <= b at fixed gamma (closure)."""
    rows = []
    for con in system:
        a_d, a_q, b0 = (con.lhs - con.rhs).at_gamma(gamma)
        rows.append((con.tag, a_d, a_q, -b0))
    return rows


def solve_lp(system: ConstraintSystem, gamma) -> LPResult | None:
    """Maximize delta over the closure of the feasible polygon at fixed gamma.

    Vertex enumeration over all pairwise intersections of boundary lines; the
    region is pointed (q is boxed, every delta coefficient is nonzero) so the
    maximum, when bounded, sits at a vertex.  Returns None if the closed
    region is empty.  Ties go to the largest q, then the first tags.
    """
    gamma = as_fraction(gamma)
    rows = _half_planes(system, gamma)
    best = None
    for (t1, a1, b1, c1), (t2, a2, b2, c2) in combinations(rows, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        d = (c1 * b2 - c2 * b1) / det
        q = (a1 * c2 - a2 * c1) / det
        if any(a * d + b * q > c for _, a, b, c in rows):
            continue
        if best is None or (d, q) > (best[0], best[1]):
            best = (d, q)
    if best is None:
        return None
    d, q = best
    binding = tuple(sorted(t for t, a, b, c in rows if a * d + b * q == c))
    return LPResult(d, q, binding)


def max_delta(p: ExponentPair, gamma, system: ConstraintSystem | None = None):
    """Supremum of delta (epsilon -> 0) or an ``Infeasible`` marker."""
    gamma = as_fraction(gamma)
    if not F(1, 2) < gamma <= 1:
        raise ValueError("gamma must lie in (1/2, 1]")
    system = system or build_constraints(p)
    res = solve_lp(system, gamma)
    if res is None:
        return Infeasible(None)
    if res.delta <= 0:
        return Infeasible(res.delta)
    return res.delta


def _delta_sup(system, gamma) -> Fraction | None:
    res = solve_lp(system, gamma)
    return None if res is None else res.delta


def _root_candidates(system, gamma_hi):
    """Gamma values where the vertex defined by each tight pair at gamma_hi reaches delta = 0."""
    res = solve_lp(system, gamma_hi)
    if res is None:
        return []
    forms = {con.tag: con.lhs - con.rhs for con in system}
    out = []
    for t1, t2 in combinations(res.binding, 2):
        f1, f2 = forms[t1], forms[t2]
        # f1 = f2 = 0 with delta = 0: two equations in (gamma, q)
        det = f1.g * f2.q - f2.g * f1.q
        if det == 0:
            continue
        g = (-f1.const * f2.q + f2.const * f1.q) / det
        out.append(g)
    return sorted(set(out))


def gamma_threshold(p: ExponentPair, max_iter: int = 200) -> Fraction:
    """Infimum of gamma in (1/2, 1) with max_delta > 0, exactly; 1 if none.

    The optimum is concave piecewise linear and nondecreasing in gamma, so
    bisection brackets the crossing and the tight constraint pair at the
    upper end pins the exact root once the bracket sits in one linear piece.
    """
    system = build_constraints(p)
    lo, hi = F(1, 2), F(1)
    d_hi = _delta_sup(system, hi)
    if d_hi is None or d_hi <= 0:
        return F(1)
    d_lo = _delta_sup(system, lo)
    if d_lo is not None and d_lo > 0:
        return lo
    for _ in range(max_iter):
        for g in _root_candidates(system, hi):
            if lo <= g < hi and _delta_sup(system, g) == 0:
                return g
        mid = (lo + hi) / 2
        d_mid = _delta_sup(system, mid)
        if d_mid is not None and d_mid > 0:
            hi = mid
        else:
            lo = mid
    raise RuntimeError("gamma_threshold did not converge")


def optimal_q(p: ExponentPair, gamma, delta):
    """The q at which T1 and T2 have equal exponents; INFEASIBLE if none in range."""
    gamma, delta = as_fraction(gamma), as_fraction(delta)
    system = build_constraints(p)
    diff = system.by_tag("T1").lhs - system.by_tag("T2").lhs
    if diff.q == 0:
        return INFEASIBLE
    q = -(diff.g * gamma + diff.d * delta + diff.const) / diff.q
    if not 0 <= q <= gamma / 3:
        return INFEASIBLE
    return q


def prime_factor_bound(c) -> int:
    """``floor(450 / (247 - 238 c)) + 1`` computed exactly.

    c = 1 is accepted as the limiting case.
    """
    c = as_fraction(c)
    if not 1 <= c < C_THRESHOLD_BAABAA:
        raise ValueError(f"c={c} outside [1, 247/238)")
    return math.floor(F(450) / (247 - 238 * c)) + 1


def prime_factor_count_from_delta(gamma, delta) -> Fraction:
    """The count 2*gamma/delta bounding the number of prime factors of m."""
    return 2 * as_fraction(gamma) / as_fraction(delta)


def _threshold_job(item):
    word, pair = item
    return word, pair, gamma_threshold(pair)


def search_best_pair(max_word_len: int, workers: int = 1):
    """(word, pair, gamma threshold) minimizing the threshold; ties to the earlier word."""
    if max_word_len > 12:
        raise ValueError("max_word_len > 12 is not tractable")
    items = enumerate_pairs(max_word_len)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_threshold_job, items, chunksize=4))
    else:
        results = [_threshold_job(it) for it in items]
    # items are already in (length, lex) order, so min() keeps the earliest on ties
    return min(results, key=lambda r: r[2])


def pair_report(word: str | None = None, pair: ExponentPair | None = None, samples: int = 5) -> dict:
    """JSON-ready summary for one exponent pair."""
    if pair is None:
        pair = apply_word(word or "")
    system = build_constraints(pair)
    g0 = gamma_threshold(pair)
    report = {
        "word": word,
        "kappa": str(pair.kappa),
        "lambda": str(pair.lam),
        "gamma_threshold": str(g0),
        "c_threshold": str(1 / g0),
        "delta_formula_samples": [],
        "binding_constraints": [],
        "conditional_on_imported_bounds": True,
        "notes": system.notes,
    }
    if g0 < 1:
        for i in range(1, samples + 1):
            g = g0 + (1 - g0) * F(i, samples + 1)
            res = solve_lp(system, g)
            report["delta_formula_samples"].append(
                {"gamma": str(g), "delta_max": str(res.delta), "q": str(res.q)})
        mid = solve_lp(system, (g0 + 1) / 2)
        report["binding_constraints"] = list(mid.binding)
    return report
