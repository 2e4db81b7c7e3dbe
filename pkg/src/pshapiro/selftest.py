"""Quick per-module property checks run by ``--selftest``."""

from __future__ import annotations

from fractions import Fraction as F

import numpy as np

from . import admissibility as adm
from . import exponent_pairs as ep
from . import expsum_lab as lab
from . import harmonic as hm
from . import ps_verify as ps
from . import sieve as sv


def _pairs():
    yield "BAABAA chain", ep.apply_word("BAABAA") == ep.ExponentPair(F(13, 40), F(22, 40))
    yield "enumerate_pairs(8) valid", all(ep.is_valid(*p) for _, p in ep.enumerate_pairs(8))
    yield "B involution", all(ep.b_process(ep.b_process(p)) == p for _, p in ep.enumerate_pairs(8))


def _admissible():
    p = ep.apply_word("BAABAA")
    yield "threshold 238/247", adm.gamma_threshold(p) == F(238, 247)
    g = F(97, 100)
    yield "delta formula", adm.max_delta(p, g) == (247 * g - 238) / 225
    yield "P_51 at c=1", adm.prime_factor_bound(1) == 51


def _vaaler():
    x = np.arange(10_000) / 10_000
    ok = True
    for H in (5, 10):
        va = hm.vaaler(H)
        ok &= bool(np.all(va.majorant(x) - np.abs(hm.psi(x) - va.approx(x)) >= -1e-10))
    yield "majorant", ok


def _theta():
    fam = hm.theta_family(16, 8)
    x = np.linspace(-0.5, 0.5, 2001)
    yield "partition of unity", float(np.max(np.abs(fam.total(x) - 1))) <= 1e-9
    th = hm.smooth_theta(-1 / 64, 1 / 64, 1 / 32, 3)
    m = np.arange(1, 1001)
    yield "Fourier bound", bool(np.all(np.abs(th.g(m)) <= th.g_bound(m) * (1 + 1e-12)))


def _sieve():
    ctx = sv.SieveContext(1000, 31)
    table = sv.rosser_weights(ctx)
    yield "sandwich n <= 10^4", not sv.sandwich_violations(10_000, table, ctx)
    s = sv.sieve_sums(ctx, table)
    yield "N- <= B <= N+", s.N_minus <= s.B <= s.N_plus


def _vaughan():
    rng = np.random.default_rng(0)
    vals = rng.normal(size=401) + 1j * rng.normal(size=401)
    f = lambda n: vals[n]  # noqa: E731
    vp = lab.vaughan_decompose(200, f)
    direct = lab.direct_lambda_sum(200, f)
    yield "Vaughan identity", abs(vp.total - direct) <= 1e-9 * (1 + abs(direct))


def _expsum():
    ctx = lab.ExpSumContext(10**5, F(51, 50), 50, d=3, h=1)
    w, wm = lab.eval_W(ctx), lab.eval_W_mp(ctx)
    yield "W vs 50-digit oracle", abs(w - wm) <= 1e-9 * abs(wm)
    rng = np.random.default_rng(1)
    ok = True
    for _ in range(100):
        L = int(rng.integers(1, 100))
        z = rng.normal(size=L) + 1j * rng.normal(size=L)
        lhs, rhs = lab.weyl_vdc_check(z, int(rng.integers(1, 30)))
        ok &= lhs <= rhs + 1e-9 * max(1.0, rhs)
    yield "Weyl-van der Corput", ok


def _scan():
    cfg = ps.PSConfig(F(51, 50), 1000, 3000, witnesses="all")
    fm = ps.floor_pow_table(3000, cfg.c)
    ok = True
    for rec in ps.scan(cfg):
        ok &= all(int(fm[p - 1]) + int(fm[m - 1]) == rec.N for p, m in rec.witnesses)
    yield "witnesses exact", ok
    yield "floor_pow(10, 3/2)", ps.floor_pow(10, F(3, 2)) == 31


def _gamma0():
    out = ps.gamma0_diagnostic(10**6, F(51, 50), 3, 100)
    yield "sieve factor 1 when P(z) empty", out["sieve_factor"] == 1.0
    yield "A(N) > 0", out["A_N"] > 0


SUITES = {
    "pairs": _pairs, "admissible": _admissible, "bound": _admissible,
    "vaaler": _vaaler, "theta": _theta, "sieve": _sieve, "vaughan": _vaughan,
    "expsum": _expsum, "scan": _scan, "verify": _scan, "gamma0": _gamma0,
}


def run(name: str) -> list[tuple[str, bool]]:
    return [(label, bool(ok)) for label, ok in SUITES[name]()]
