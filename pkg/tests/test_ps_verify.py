import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pshapiro import ps_verify as ps
from pshapiro.arith import primes_upto, smallest_prime_factor
from pshapiro.sieve import MemoryGuardError

C = F(51, 50)
C_VALUES = [F(1001, 1000), F(101, 100), F(51, 50), F(103, 100)]


# ---- certified floor powers ----

@pytest.mark.parametrize("n, c, expected", [
    (1, F(51, 50), 1), (1, F(3, 2), 1), (10, F(3, 2), 31), (2, F(101, 100), 2),
    (4, F(3, 2), 8), (9, F(3, 2), 27), (100, F(3, 2), 1000),
])
def test_floor_pow_examples(n, c, expected):
    assert ps.floor_pow(n, c) == expected
    assert ps.exact_floor_pow(n, c) == expected


def test_floor_pow_accepts_decimal_literals():
    assert ps.floor_pow(2, "1.01") == 2
    assert ps.floor_pow(2, 1.01) == 2


@pytest.mark.parametrize("c", [1, F(99, 100), F(8, 5)])
def test_floor_pow_rejects_exponent(c):
    with pytest.raises(ValueError):
        ps.floor_pow(5, c)


def test_floor_pow_rejects_n():
    with pytest.raises(ValueError):
        ps.floor_pow(0, C)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**12), st.sampled_from(C_VALUES + [F(3, 2), F(7, 5), F(1237, 1000)]))
def test_floor_pow_matches_exact_integer_check(n, c):
    assert ps.floor_pow(n, c) == ps.exact_floor_pow(n, c)


def test_escalation_on_exact_integer_powers():
    # n^c integral: every interval straddles k, so only the exact fallback settles it
    for k in range(2, 200):
        assert ps.floor_pow(k * k, F(3, 2)) == k ** 3
        assert ps.floor_pow(k * k, F(3, 2), base_digits=30, cap=60) == k ** 3


def test_huge_n_escalates_past_float_range():
    n = 10**400
    assert ps.floor_pow(n, F(3, 2)) == 10**600
    assert ps.floor_pow(n + 1, F(101, 100)) == ps.exact_floor_pow(n + 1, F(101, 100))


def test_precision_cap_error_when_exact_path_is_too_big():
    with pytest.raises(ps.PrecisionCapError):
        ps.floor_pow(2**100, F(1000001, 1000000), cap=10)


def test_precision_cap_env_override(monkeypatch):
    monkeypatch.setenv(ps.PRECISION_CAP_ENV, "10")
    assert ps.precision_cap() == 10
    with pytest.raises(ps.PrecisionCapError):
        ps.floor_pow(2**100, F(1000001, 1000000))
    monkeypatch.delenv(ps.PRECISION_CAP_ENV)
    with mpmath.workdps(80):
        ref = int(mpmath.floor(mpmath.mpf(2) ** (100 * mpmath.mpf(1000001) / 1000000)))
    assert ps.floor_pow(2**100, F(1000001, 1000000)) == ref


@pytest.mark.parametrize("n", [69_308_534_177, 10**15 + 7, 2**62 + 1])
def test_interval_path_beyond_float_resolution(n):
    # n^(3/2) > 2^53: the float path has no fractional bits, the interval path decides
    assert ps.floor_pow(n, F(3, 2)) == ps.exact_floor_pow(n, F(3, 2))


@pytest.mark.parametrize("c", C_VALUES)
def test_certified_table_reverified_to_1e6(c):
    M = 10**6
    table = ps.floor_pow_table(M, c)
    n = np.arange(1, M + 1, dtype=np.longdouble)
    x = np.power(n, np.longdouble(c.numerator) / np.longdouble(c.denominator))
    k = table.astype(np.longdouble)
    # extended precision has about 3 more digits than the float fast path
    tol = x * np.longdouble(1e-17)
    ok = (k <= x - tol) & (x + tol < k + 1)
    for i in np.flatnonzero(~ok):
        m = int(i) + 1
        assert int(table[i]) == ps.exact_floor_pow(m, c), m
    assert np.all(np.diff(table) > 0)
    assert (~ok).sum() < 100


def test_table_memory_guard():
    with pytest.raises(MemoryGuardError):
        ps.floor_pow_table(ps.MAX_TABLE + 1, C)


# ---- preimages ----

def test_preimage_examples():
    assert ps.preimage_interval(2, C) == (2, 2)
    for c in C_VALUES + [F(3, 2)]:
        assert ps.preimage_interval(1, c) == (1, 1)
    lo, hi = ps.preimage_interval(31, F(3, 2))
    assert (lo, hi) == (10, 10)
    lo, hi = ps.preimage_interval(30, F(3, 2))
    assert hi < lo  # 30 is skipped by [n^(3/2)]


def test_preimage_partition_1e5():
    V = 10**5
    M = math.ceil((V + 1) ** (1 / float(C))) + 2
    table = ps.floor_pow_table(M, C)
    nxt = 1
    for v in range(1, V + 1):
        lo, hi = ps.preimage_interval(v, C, table)
        assert lo == nxt, v
        if hi >= lo:
            assert all(int(table[m - 1]) == v for m in range(lo, hi + 1))
        nxt = hi + 1
    assert int(table[nxt - 2]) == V and int(table[nxt - 1]) > V


def test_preimage_rejects():
    with pytest.raises(ValueError):
        ps.preimage_interval(0, C)


# ---- progression counts ----

def test_progression_examples():
    pc = ps.count_in_progression(2, 1, C)
    assert pc.direct == 1 and pc.psi_form == pytest.approx(1, abs=1e-12)
    lo, hi = ps.preimage_interval(500, C)
    pc = ps.count_in_progression(500, hi + 1, C)
    assert pc.direct == 0 and pc.psi_form == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        ps.count_in_progression(2, 0, C)


def test_progression_dual_path_random():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(10_000):
        v = int(rng.integers(1, 10**6))
        d = int(rng.integers(1, 50))
        pc = ps.count_in_progression(v, d, C)
        if pc.boundary:
            continue
        checked += 1
        assert abs(pc.direct - pc.psi_form) <= 1e-9, (v, d)
    assert checked > 9_900


# ---- Omega ----

def test_omega_examples():
    om = ps.omega_sieve(10_000)
    assert om[1] == 0 and om[12] == 3 and om[97] == 1 and om[1024] == 10
    assert int((om[1:] == 1).sum()) == 1229


def test_omega_against_factorization():
    limit = 50_000
    om = ps.omega_sieve(limit)
    spf = smallest_prime_factor(limit)
    for m in range(2, limit + 1):
        k, cnt = m, 0
        while k > 1:
            k //= spf[k]
            cnt += 1
        assert om[m] == cnt


def test_omega_guard():
    with pytest.raises(MemoryGuardError):
        ps.omega_sieve(10, max_size=5)


# ---- config and records ----

def test_config_validation():
    with pytest.raises(ValueError):
        ps.PSConfig(C, 10, 5)
    with pytest.raises(ValueError):
        ps.PSConfig(C, 1, 5, witnesses="some")
    with pytest.raises(ValueError):
        ps.PSConfig(F(2), 1, 5)
    with pytest.raises(MemoryGuardError):
        ps.PSConfig(C, 1, ps.DESK_SCALE_LIMIT + 1)
    cfg = ps.PSConfig("1.02", 1, 5)
    assert cfg.c == C and cfg.gamma == F(50, 51) and cfg.bound == 107
    assert ps.PSConfig(F(3, 2), 1, 5).bound is None


def test_record_csv_row():
    rec = ps.RepresentationRecord(5, 1, [(2, 3)], 1, 107)
    assert rec.satisfied and rec.csv_row() == "5,1,1,107,1"
    empty = ps.RepresentationRecord(2, 0, [], None, 107)
    assert not empty.satisfied and empty.csv_row() == "2,0,,107,0"


# ---- scanner ----

def naive_witnesses(n_lo, n_hi, c):
    """Double loop over (p, m) with integer-only floors."""
    m_max = 1
    while ps.exact_floor_pow(m_max + 1, c) < n_hi:
        m_max += 1
    fm = [0] + [ps.exact_floor_pow(m, c) for m in range(1, m_max + 1)]
    out = {n: [] for n in range(n_lo, n_hi + 1)}
    for p in primes_upto(m_max):
        p = int(p)
        for m in range(1, m_max + 1):
            n = fm[p] + fm[m]
            if n > n_hi:
                break
            if n >= n_lo:
                out[n].append((p, m))
    return out


def test_scan_small_examples():
    recs = {r.N: r for r in ps.scan(ps.PSConfig(C, 1, 10, witnesses="all"))}
    assert recs[5].witnesses == [(2, 3), (3, 2)]
    assert recs[5].min_omega == 1
    assert recs[2].count == 0 and recs[2].min_omega is None and not recs[2].satisfied
    assert recs[1].count == 0


def test_scan_matches_naive_oracle():
    lo, hi = 1001, 10_000
    oracle = naive_witnesses(lo, hi, C)
    om = ps.omega_sieve(hi)
    recs = list(ps.scan(ps.PSConfig(C, lo, hi, witnesses="all", segment=1500)))
    assert [r.N for r in recs] == list(range(lo, hi + 1))
    for r in recs:
        assert r.witnesses == sorted(oracle[r.N])
        assert r.count == len(oracle[r.N])
        if r.count:
            assert r.min_omega == min(int(om[m]) for _, m in oracle[r.N])


@pytest.mark.parametrize("c", [F(3, 2), F(6, 5)])
def test_scan_matches_oracle_other_exponents(c):
    oracle = naive_witnesses(2, 3000, c)
    for r in ps.scan(ps.PSConfig(c, 2, 3000, witnesses="all", segment=700)):
        assert r.witnesses == sorted(oracle[r.N])


def test_witness_modes_agree():
    base = dict(c=C, n_lo=2000, n_hi=6000, segment=999)
    allw = list(ps.scan(ps.PSConfig(witnesses="all", **base)))
    best = list(ps.scan(ps.PSConfig(witnesses="best", **base)))
    none = list(ps.scan(ps.PSConfig(witnesses="none", **base)))
    om = ps.omega_sieve(6000)
    for a, b, n in zip(allw, best, none):
        assert a.count == b.count == n.count == len(a.witnesses)
        assert a.min_omega == b.min_omega == n.min_omega
        if b.count:
            p, m = b.witnesses[0]
            assert (p, m) in a.witnesses and om[m] == b.min_omega


def test_segment_size_does_not_change_output():
    cfgs = [ps.PSConfig(C, 1000, 4000, segment=s) for s in (7, 97, 4096, 2**16)]
    csvs = {ps.scan_csv(cfg) for cfg in cfgs}
    assert len(csvs) == 1


def test_workers_do_not_change_output():
    a = ps.scan_csv(ps.PSConfig(C, 1000, 20_000, segment=2500, workers=1))
    b = ps.scan_csv(ps.PSConfig(C, 1000, 20_000, segment=2500, workers=4))
    assert a == b


def test_degenerate_range():
    recs = list(ps.scan(ps.PSConfig(C, 777, 777)))
    assert len(recs) == 1 and recs[0].N == 777
    summary = ps.verify_theorem(ps.PSConfig(C, 777, 777))
    assert summary["n_total"] == 1


def test_verify_summary():
    s = ps.verify_theorem(ps.PSConfig(F(101, 100), 1000, 5000))
    assert s["bound"] == 68
    assert s["range"] == [1000, 5000] and s["n_total"] == 4001
    assert s["n_exceptions"] == s["n_no_representation"] + s["n_exceeding_bound"] == 0
    assert s["worst_cases"][0]["min_omega"] >= s["worst_cases"][-1]["min_omega"]


def test_verify_reports_missing_representations():
    s = ps.verify_theorem(ps.PSConfig(C, 1, 20))
    assert s["n_no_representation"] > 0
    assert 2 in s["no_representation"]


# ---- main term diagnostic ----

def test_gamma0_empty_sieve():
    out = ps.gamma0_diagnostic(10**6, C, 3, 100)
    assert out["sieve_factor"] == 1.0
    assert out["product"] == out["A_N"]


def test_gamma0_positive_and_regression():
    out = ps.gamma0_diagnostic(10**6, C, 3, 100)
    assert out["P"] == 10
    assert out["A_N"] > 0
    assert out["ratio_A_over_N_2gamma_minus_1"] == pytest.approx(1.3806111970640875e-05, rel=1e-9)
    # normalised by P N^(gamma-1), the ratio is O(1) as expected from Chebyshev
    assert out["ratio_A_over_P_N_gamma_minus_1"] == pytest.approx(1.0529902076817219, rel=1e-9)


def test_gamma0_with_sieve():
    out = ps.gamma0_diagnostic(10**6, C, 10, 100, P=100)
    assert 0 < out["sieve_factor"] < 1
    assert out["product"] == pytest.approx(out["A_N"] * out["sieve_factor"])


def test_gamma0_rejects_large_P():
    with pytest.raises(ValueError):
        ps.gamma0_diagnostic(1000, C, 3, 100, P=1000)
