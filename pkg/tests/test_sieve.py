import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horolab.errors import CapacityError, DomainError, PreconditionError
from horolab.golden import golden_lookup
from horolab.sieve import (
    SieveWeightParams,
    build_sieve_table,
    divisor_count,
    euler_phi,
    factorize,
    first_error_sum,
    goldston_lemma1,
    goldston_lemma2,
    is_prime,
    lambda_r,
    lambda_r_array,
    mobius,
    nu_array,
    nu_progression_average,
    nu_weight,
    prime_weight,
    prime_weight_array,
    second_error_sum,
    siegel_walfisz_check,
    singular_series,
    singular_series_array,
    twin_constant,
)

from . import oracles


def test_tiny_tables():
    t = build_sieve_table(1)
    assert t.mobius[1] == 1 and t.phi[1] == 1
    t = build_sieve_table(10)
    assert t.mobius[6] == 1 and t.mobius[4] == 0


def test_tables_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.mobius[3] = 0


def test_capacity():
    with pytest.raises(CapacityError):
        build_sieve_table(10**6, memory_budget=1000)


def test_tables_against_trial_division(small_table):
    for n in range(1, 3000):
        assert mobius(n, small_table) == oracles.mobius(n)
        assert euler_phi(n, small_table) == oracles.phi(n)
        assert factorize(n, small_table) == oracles.trial_factor(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 200_000))
def test_table_entries_random(small_table, n):
    assert mobius(n, small_table) == oracles.mobius(n)
    assert euler_phi(n, small_table) == oracles.phi(n)
    spf = int(small_table.spf[n])
    assert n % spf == 0 and oracles.trial_factor(spf) == [(spf, 1)]


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.integers(1, 400))
def test_phi_multiplicative(small_table, m, n):
    if math.gcd(m, n) == 1:
        assert euler_phi(m * n, small_table) == euler_phi(m, small_table) * euler_phi(n, small_table)


def test_examples(small_table):
    t = small_table
    assert (mobius(1, t), mobius(4, t), mobius(30, t)) == (1, 0, -1)
    assert (euler_phi(1, t), euler_phi(12, t), euler_phi(101, t)) == (1, 4, 100)
    assert (divisor_count(1, t), divisor_count(12, t), divisor_count(49, t)) == (1, 6, 3)
    assert prime_weight(7, t) == math.log(7) and prime_weight(8, t) == 0.0
    assert is_prime(2, t) and not is_prime(1, t)
    with pytest.raises(DomainError):
        mobius(0, t)
    with pytest.raises(DomainError):
        mobius(t.limit + 1, t)


def test_squarefree_density():
    t = build_sieve_table(10**6)
    dens = np.count_nonzero(t.mobius[1:]) / 10**6
    assert abs(dens - 6 / math.pi**2) < 1e-3


def test_mobius_sum_identity(small_table):
    for n in range(1, 2000):
        s = sum(mobius(d, small_table) for d in range(1, n + 1) if n % d == 0)
        assert s == (1 if n == 1 else 0)


def test_lambda_r_examples(small_table):
    p = SieveWeightParams(10.0)
    assert lambda_r(1, p, small_table) == pytest.approx(math.log(10), abs=1e-15)
    assert lambda_r(13, p, small_table) == pytest.approx(math.log(10), abs=1e-15)
    assert abs(lambda_r(12, p, small_table)) < 1e-12
    assert nu_weight(13, p, small_table) == pytest.approx(math.log(10))
    assert abs(nu_weight(12, p, small_table)) < 1e-12


def test_lambda_r_strict_inequality(small_table):
    # k = R = 6 must not contribute: Lambda_6(6) = log 6 - log 3 - log 2 + 0 (k=6 excluded)
    p = SieveWeightParams(6.0)
    direct = math.log(6) - math.log(3) - math.log(2)
    assert lambda_r(6, p, small_table) == pytest.approx(direct, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000), st.floats(1.5, 200.0))
def test_lambda_r_against_oracle(small_table, n, R):
    p = SieveWeightParams(R)
    assert lambda_r(n, p, small_table) == pytest.approx(oracles.lambda_r(n, R), abs=1e-9)


def test_lambda_r_array_matches_scalar(small_table):
    p = SieveWeightParams(37.5)
    arr = lambda_r_array(5000, p, small_table)
    for n in range(1, 5001, 7):
        assert arr[n] == pytest.approx(lambda_r(n, p, small_table), abs=1e-12)
    assert np.all(nu_array(5000, p, small_table) >= 0)


def test_lambda_r_is_von_mangoldt_below_R(small_table):
    R = 1000.0
    arr = lambda_r_array(999, SieveWeightParams(R), small_table)
    for n in range(2, 1000):
        assert abs(arr[n] - oracles.von_mangoldt(n)) < 1e-9


def test_prime_weight_array(small_table):
    w = prime_weight_array(1000, small_table)
    assert all(w[n] == prime_weight(n, small_table) for n in range(1, 1001))


def test_twin_constant():
    assert twin_constant(3) == pytest.approx(0.75, abs=1e-15)
    assert twin_constant(5) == pytest.approx(0.703125, abs=1e-15)
    c = twin_constant(10**6)
    assert c == pytest.approx(0.6601618, abs=2e-7)
    assert twin_constant(10**4) > twin_constant(10**5) > c


def test_singular_series(small_table):
    c2 = twin_constant()
    assert singular_series(3) == 0.0
    assert singular_series(2) == pytest.approx(2 * c2, rel=1e-15)
    assert singular_series(12) == pytest.approx(4 * c2, rel=1e-15)
    for k in (2, 4, 30, 210, 1000, 9998):
        assert singular_series(k) == pytest.approx(oracles.singular_series(k), rel=1e-12)
    arr = singular_series_array(3000, small_table)
    for k in range(1, 3001):
        assert arr[k] == pytest.approx(singular_series(k), rel=1e-13)


def test_singular_series_divisor_bound(small_table):
    arr = singular_series_array(10**4, small_table)
    ratio = max(arr[k] / divisor_count(k, small_table) for k in range(1, 10**4 + 1))
    assert ratio < 2.0  # measured ~1.32 (k = 2)


def test_lemma1_small_R_by_hand(small_table):
    R, k = 10.0, 1
    d = [1, 2, 3, 5, 6, 7, 10]
    direct = math.fsum(oracles.mobius(x) / x * math.log(R / x) for x in d)
    assert goldston_lemma1(R, k, "unit", small_table).lhs == pytest.approx(direct, abs=1e-15)


def test_lemma1_residual_shrinks(small_table):
    res = [abs(goldston_lemma1(R, 1, "unit", small_table).residual) for R in (1e2, 1e3, 1e4, 1e5)]
    assert res == sorted(res, reverse=True)


def test_lemma1_errors(small_table):
    with pytest.raises(DomainError):
        goldston_lemma1(100.0, 1, "bogus", small_table)
    with pytest.raises(CapacityError):
        goldston_lemma1(1e7, 1, "unit", small_table)


def test_lemma2_small_R_by_hand(small_table):
    # only even squarefree d contribute at k = 1
    direct = math.fsum(singular_series(d) / oracles.phi(d) for d in (2, 6, 10))
    assert goldston_lemma2(10.0, 1, small_table).lhs == pytest.approx(direct, rel=1e-14)


def test_golden_sieve_values(small_table):
    for k in (1, 2, 3, 4, 6):
        row = golden_lookup("lemma1-unit", 1e4, k)
        assert goldston_lemma1(1e4, k, "unit", small_table).lhs == pytest.approx(float(row["lhs"]), rel=1e-12)
    for k in (1, 2):
        row = golden_lookup("lemma2", 1e5, k)
        assert goldston_lemma2(1e5, k, small_table).lhs == pytest.approx(float(row["lhs"]), rel=1e-12)


def test_progression_average(small_table):
    p = SieveWeightParams(20.5)
    r = nu_progression_average(1, 20000, 3, 2, p, small_table)
    direct = math.fsum(oracles.lambda_r(3 * n + 2, 20.5) ** 2 for n in range(1, 2001)) / 2000
    r2 = nu_progression_average(1, 2000, 3, 2, p, small_table)
    assert r2.lhs == pytest.approx(direct, rel=1e-12)
    assert r.main_term == pytest.approx(1.5 * math.log(20.5))
    assert not r.low_confidence and not r2.low_confidence
    assert nu_progression_average(1, 300, 3, 2, p, small_table).low_confidence
    with pytest.raises(DomainError):
        nu_progression_average(1, 100, 4, 2, p, small_table)


def test_siegel_walfisz(table_1e7):
    p = SieveWeightParams(20.0)
    f = [0.0, 1.0, 0.0]
    rep = siegel_walfisz_check(1, 10**7 - 1, 3, f, p, table_1e7)
    assert abs(rep.residual) <= 0.15
    ones = siegel_walfisz_check(1, 9000, 1, [1.0], SieveWeightParams(20.0), table_1e7)
    assert ones.coprime_side == pytest.approx(1.0)
    with pytest.raises(PreconditionError) as exc:
        siegel_walfisz_check(1, 100, 3, f, p, table_1e7)
    assert exc.value.required == 24000


def test_siegel_walfisz_alternating(small_table):
    p = SieveWeightParams(5.0)
    rep = siegel_walfisz_check(1, 1000, 2, [1.0, -1.0], p, small_table)
    # coprime side sees only odd n, where f = -1
    assert rep.coprime_side == pytest.approx(-2 * 500 / 1000)


def test_error_sums(small_table):
    vals = [first_error_sum(R, 0.5) / math.log(math.log(R)) for R in (1e3, 1e4, 1e5)]
    assert max(vals) < 1.5
    vals = [second_error_sum(R, small_table, 0.5) / math.log(math.log(R)) for R in (1e3, 1e4, 1e5)]
    assert max(vals) < 1.5


def test_params_validation():
    with pytest.raises(DomainError):
        SieveWeightParams(1.0)
    assert SieveWeightParams(math.e).logR == pytest.approx(1.0, abs=1e-16)
