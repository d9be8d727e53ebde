import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergolab.arith import (
    ArithmeticTable,
    BFreeSpec,
    MertensPrefix,
    admissibility_report,
    bfree_indicator,
    brute_arith,
    is_admissible,
    mertens_prefix,
    sieve_liouville,
    sieve_liouville_range,
    sieve_mobius,
    sieve_mobius_range,
)
from ergolab.errors import ParameterError, ResourceLimitError

import helpers


MU_FIRST_TEN = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
LAMBDA_FIRST_TEN = [1, -1, -1, 1, -1, 1, -1, -1, 1, 1]


@pytest.fixture(scope="module")
def mu_100k():
    return sieve_mobius(100_000)


@pytest.fixture(scope="module")
def lam_100k():
    return sieve_liouville(100_000)


def test_mobius_first_ten(mu_100k):
    assert list(mu_100k.values[:10]) == MU_FIRST_TEN


def test_liouville_first_ten(lam_100k):
    assert list(lam_100k.values[:10]) == LAMBDA_FIRST_TEN


def test_sieve_matches_reference_on_sample(mu_100k, lam_100k):
    rng = np.random.default_rng(7)
    sample = set(range(1, 300))
    sample.update(int(n) for n in rng.integers(1, 100_001, size=150))
    sample.update([99_991, 2**16, 3**10, 99_991 - 1, 65_537])
    for n in sorted(sample):
        assert mu_100k.value_at(n) == helpers.ref_mobius(n), n
        assert lam_100k.value_at(n) == helpers.ref_liouville(n), n


def test_brute_matches_sieve(mu_100k, lam_100k):
    for n in [1, 2, 4, 360, 1024, 99_991, 100_000, 65_536, 30_030]:
        mu, lam = brute_arith(n)
        assert mu == mu_100k.value_at(n)
        assert lam == lam_100k.value_at(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**6))
def test_brute_matches_reference(n):
    mu, lam = brute_arith(n)
    assert mu == helpers.ref_mobius(n)
    assert lam == helpers.ref_liouville(n)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=3000), st.integers(min_value=1, max_value=3000))
def test_multiplicative_on_coprime_pairs(m, n):
    if math.gcd(m, n) != 1:
        return
    mu_m, lam_m = brute_arith(m)
    mu_n, lam_n = brute_arith(n)
    mu_mn, lam_mn = brute_arith(m * n)
    assert mu_mn == mu_m * mu_n
    assert lam_mn == lam_m * lam_n


def test_mobius_divisor_sum_identity(mu_100k):
    # sum_{d | n} mu(d) == 1 iff n == 1, else 0
    limit = 20_000
    mu = mu_100k.values[:limit].astype(np.int64)
    acc = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        acc[d::d] += mu[d - 1]
    assert acc[1] == 1
    assert not acc[2:].any()


def test_mobius_is_liouville_times_mu_squared(mu_100k, lam_100k):
    mu = mu_100k.values.astype(np.int64)
    lam = lam_100k.values.astype(np.int64)
    assert np.array_equal(mu, lam * mu * mu)


def test_liouville_never_zero(lam_100k):
    assert set(np.unique(lam_100k.values)) == {-1, 1}


def test_segment_window_matches_full_run():
    lo, hi = 1_000_000, 1_010_000
    full_mu = sieve_mobius(hi)
    window_mu = sieve_mobius_range(lo, hi)
    assert window_mu.lo == lo and window_mu.hi == hi
    assert np.array_equal(window_mu.values, full_mu.values[lo - 1 :])
    full_lam = sieve_liouville(hi)
    window_lam = sieve_liouville_range(lo, hi)
    assert np.array_equal(window_lam.values, full_lam.values[lo - 1 :])


def test_sieve_rejects_bad_limits():
    with pytest.raises(ParameterError):
        sieve_mobius(0)
    with pytest.raises(ParameterError):
        sieve_mobius_range(5, 4)
    with pytest.raises(ParameterError):
        sieve_mobius_range(0, 10)
    with pytest.raises(ResourceLimitError):
        sieve_mobius(2**31)


# ---------------------------------------------------------------------------
# Mertens prefix sums


def test_mertens_small_values(mu_100k):
    pref = mertens_prefix(mu_100k)
    assert pref.m(1) == 1
    assert pref.m(2) == 0
    assert pref.m(10) == -1
    for x in [1, 10, 100, 999, 12_345]:
        assert pref.m(x) == helpers.ref_mertens(x)


def test_mertens_prefix_matches_direct_summation(mu_100k):
    pref = mertens_prefix(mu_100k)
    values = mu_100k.values.astype(np.int64)
    for x in [1, 7, 100, 4096, 99_999, 100_000]:
        assert pref.m(x) == int(values[:x].sum())
    assert pref.prefix[0] == 0
    assert pref.prefix.dtype == np.int64


def test_mertens_accepts_limit_argument():
    pref = mertens_prefix(1000)
    assert pref.limit == 1000
    assert pref.m(10) == -1


def test_mertens_range_sum(mu_100k):
    pref = mertens_prefix(mu_100k)
    values = mu_100k.values.astype(np.int64)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x, y = sorted(int(v) for v in rng.integers(0, 100_001, size=2))
        assert pref.range_sum(x, y) == int(values[x:y].sum())


def test_mertens_rejects_non_mobius_table(lam_100k):
    with pytest.raises(ParameterError):
        mertens_prefix(lam_100k)


def test_mertens_rejects_window_table():
    with pytest.raises(ParameterError):
        mertens_prefix(sieve_mobius_range(10, 20))


# ---------------------------------------------------------------------------
# B-free sieves


def test_bfree_single_even_modulus():
    free, mult = bfree_indicator(BFreeSpec((2,)), 10)
    assert list(free.values) == [1, 0, 1, 0, 1, 0, 1, 0, 1, 0]
    assert list(mult.values) == [0, 1, 0, 1, 0, 1, 0, 1, 0, 1]


def test_bfree_two_three():
    free, mult = bfree_indicator(BFreeSpec((2, 3)), 12)
    assert list(free.values) == [1, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0]
    assert np.array_equal(mult.values, 1 - free.values)


def test_bfree_matches_reference():
    spec = BFreeSpec((4, 7, 9, 25))
    free, _ = bfree_indicator(spec, 2000)
    for n in range(1, 2001):
        assert free.value_at(n) == int(helpers.ref_is_bfree(n, spec.members)), n


def test_bfree_prime_squares_equals_squarefree_indicator(mu_100k):
    spec = BFreeSpec.prime_squares(10_000)
    free, _ = bfree_indicator(spec, 10_000)
    musq = (mu_100k.values[:10_000] != 0).astype(np.int8)
    assert np.array_equal(free.values, musq)


def test_bfree_periodic_with_lcm_period():
    spec = BFreeSpec((4, 5, 9))
    period = math.lcm(*spec.members)
    free, _ = bfree_indicator(spec, 3 * period)
    vals = free.values
    assert np.array_equal(vals[:period], vals[period : 2 * period])
    assert np.array_equal(vals[:period], vals[2 * period : 3 * period])


def test_bfree_spec_validation_names_offending_pair():
    with pytest.raises(ParameterError, match=r"6.*10|10.*6"):
        BFreeSpec((6, 10))
    with pytest.raises(ParameterError):
        BFreeSpec((1, 3))
    with pytest.raises(ParameterError):
        BFreeSpec((9, 4))  # not sorted


def test_bfree_spec_truncate():
    spec = BFreeSpec((4, 9, 25, 49))
    assert spec.truncate(2).members == (4, 9)
    assert spec.truncate(0).members == ()
    with pytest.raises(ParameterError):
        spec.truncate(5)


def test_bfree_empty_spec_is_all_free():
    free, mult = bfree_indicator(BFreeSpec(()), 5)
    assert list(free.values) == [1] * 5
    assert list(mult.values) == [0] * 5


# ---------------------------------------------------------------------------
# Admissibility


def test_admissible_all_zero_block():
    assert is_admissible([0], BFreeSpec((2, 3, 5)))
    assert is_admissible([0, 0, 0], BFreeSpec((2, 3, 5)))


def test_admissible_empty_block():
    assert is_admissible([], BFreeSpec((2, 3)))


def test_not_admissible_when_residues_cover():
    # mod 2 both classes appear
    assert not is_admissible([0, 1], BFreeSpec((2,)))
    assert not is_admissible([0, 2, 4, 1], BFreeSpec((2,)))


def test_admissible_even_block():
    assert is_admissible([0, 2, 4, 6], BFreeSpec((2,)))
    # mod 3 covered by {0, 2, 4}: residues {0, 2, 1}
    assert not is_admissible([0, 2, 4], BFreeSpec((2, 3)))
    assert is_admissible([0, 6], BFreeSpec((2, 3)))


def test_admissible_skips_large_moduli():
    # 5 > block length 2, so only the modulus 2 matters
    assert is_admissible([0, 2], BFreeSpec((2, 5)))
    assert not is_admissible([0, 1], BFreeSpec((2, 5)))


def test_admissibility_report_details():
    rows = admissibility_report([0, 2], BFreeSpec((2, 5)))
    by_mod = {r.modulus: r for r in rows}
    assert by_mod[2].checked and by_mod[2].omitted_residue == 1
    assert not by_mod[5].checked


def test_admissible_respects_K_truncation():
    spec = BFreeSpec((2, 3))
    # block covers all residues mod 3 but K=1 only checks the modulus 2
    block = [0, 2, 4]
    assert not is_admissible(block, spec)
    assert is_admissible(block, spec.truncate(1))


# ---------------------------------------------------------------------------
# Serialization


def test_table_roundtrip_bytes():
    table = sieve_mobius(1000)
    blob = table.to_bytes()
    back = ArithmeticTable.from_bytes(blob)
    assert back.kind == table.kind
    assert back.lo == table.lo and back.hi == table.hi
    assert np.array_equal(back.values, table.values)


def test_window_table_roundtrip_bytes():
    table = sieve_liouville_range(500, 600)
    back = ArithmeticTable.from_bytes(table.to_bytes())
    assert back.kind == "liouville"
    assert back.lo == 500 and back.hi == 600
    assert np.array_equal(back.values, table.values)


def test_from_bytes_rejects_garbage():
    with pytest.raises(ParameterError):
        ArithmeticTable.from_bytes(b"nope")
    table = sieve_mobius(10)
    blob = bytearray(table.to_bytes())
    blob[0] ^= 0xFF
    with pytest.raises(ParameterError):
        ArithmeticTable.from_bytes(bytes(blob))
    with pytest.raises(ParameterError):
        ArithmeticTable.from_bytes(table.to_bytes()[:-1])


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=500), st.integers(min_value=0, max_value=80))
def test_roundtrip_arbitrary_windows(lo, width):
    table = sieve_mobius_range(lo, lo + width)
    back = ArithmeticTable.from_bytes(table.to_bytes())
    assert np.array_equal(back.values, table.values)
    assert (back.lo, back.hi) == (lo, lo + width)


def test_table_csv_export(tmp_path):
    table = sieve_mobius(5)
    path = tmp_path / "mu.csv"
    table.write_csv(path)
    text = path.read_bytes().decode()
    assert text == "n,value\n1,1\n2,-1\n3,-1\n4,0\n5,-1\n"


def test_value_at_bounds():
    table = sieve_mobius_range(100, 110)
    assert table.value_at(100) == helpers.ref_mobius(100)
    with pytest.raises(ParameterError):
        table.value_at(99)
    with pytest.raises(ParameterError):
        table.value_at(111)
