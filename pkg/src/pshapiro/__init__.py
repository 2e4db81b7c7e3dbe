"""Numerical toolkit around the equation [p^c] + [m^c] = N with p prime and m almost prime."""

from .exponent_pairs import ExponentPair, apply_word, enumerate_pairs
from .admissibility import gamma_threshold, max_delta, optimal_q, prime_factor_bound
from .ps_verify import PSConfig, floor_pow, scan, verify_theorem

__version__ = "0.1.0"

__all__ = [
    "ExponentPair", "apply_word", "enumerate_pairs",
    "gamma_threshold", "max_delta", "optimal_q", "prime_factor_bound",
    "PSConfig", "floor_pow", "scan", "verify_theorem",
]
