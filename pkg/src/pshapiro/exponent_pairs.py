"""Exact-rational calculus of van der Corput exponent pairs.

Words over {A, B} act on a seed pair with the rightmost letter applied
first, so ``"BAABAA"`` means ``B(A(A(B(A(A(seed))))))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

HALF = Fraction(1, 2)


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions, ``"p/q"`` strings and decimal literals exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # route through repr so 1.02 becomes 51/50, not the binary expansion
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True, order=True)
class ExponentPair:
    kappa: Fraction
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "kappa", as_fraction(self.kappa))
        object.__setattr__(self, "lam", as_fraction(self.lam))
        if not is_valid(self.kappa, self.lam):
            raise ValueError(f"invalid exponent pair ({self.kappa}, {self.lam})")

    def __iter__(self):
        yield self.kappa
        yield self.lam

    def __str__(self):
        return f"({self.kappa}, {self.lam})"


def is_valid(kappa: Fraction, lam: Fraction) -> bool:
    return 0 <= kappa <= HALF <= lam <= 1 and kappa + lam <= 1


TRIVIAL_PAIR = ExponentPair(HALF, HALF)


def a_process(p: ExponentPair) -> ExponentPair:
    k, l = p.kappa, p.lam
    return ExponentPair(k / (2 * k + 2), (k + l + 1) / (2 * k + 2))


def b_process(p: ExponentPair) -> ExponentPair:
    return ExponentPair(p.lam - HALF, p.kappa + HALF)


_PROCESSES = {"A": a_process, "B": b_process}


def normalize_word(word: str) -> str:
    word = word.strip().upper()
    if word in ("", "E", "EPS", "ε"):
        return ""
    bad = set(word) - set("AB")
    if bad:
        raise ValueError(f"word {word!r} has letters outside {{A, B}}")
    return word


def reduce_word(word: str) -> str:
    """Cancel adjacent ``BB`` pairs (B is an involution)."""
    out: list[str] = []
    for ch in normalize_word(word):
        if ch == "B" and out and out[-1] == "B":
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def apply_word(word: str, seed: ExponentPair = TRIVIAL_PAIR) -> ExponentPair:
    p = seed
    for ch in reversed(normalize_word(word)):
        p = _PROCESSES[ch](p)
    return p


def reduced_words(max_len: int):
    """Yield reduced words by length, then lexicographically."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    for n in range(max_len + 1):
        for letters in product("AB", repeat=n):
            w = "".join(letters)
            if "BB" not in w:
                yield w


def enumerate_pairs(max_len: int, seed: ExponentPair = TRIVIAL_PAIR) -> list[tuple[str, ExponentPair]]:
    """All distinct pairs reachable from ``seed`` by reduced words of length <= max_len.

    Each pair is listed once, under the first word that produced it in
    (length, lexicographic) order.
    """
    seen: dict[ExponentPair, str] = {}
    for w in reduced_words(max_len):
        p = apply_word(w, seed)
        if p not in seen:
            seen[p] = w
    return [(w, p) for p, w in seen.items()]


def vdc_bound(p: ExponentPair, lambda1: float, a: float) -> float:
    """``lambda1**kappa * a**lambda + 1/lambda1`` in floating point."""
    if lambda1 <= 0:
        raise ValueError("lambda1 must be positive")
    if a < 1:
        raise ValueError("a must be >= 1")
    return lambda1 ** float(p.kappa) * a ** float(p.lam) + 1.0 / lambda1
