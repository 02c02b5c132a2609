from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opstruct.errors import FavardViolation, InsufficientCoefficients, InvalidParameter, NotABasis, NotRegular
from opstruct.exact import Poly
from opstruct.functionals import MomentFunctional, apply
from opstruct.mops import (
    RecurrenceCoeffs,
    build_mops,
    classical_family,
    family_moments,
    favard_oracle,
    generate,
    moments_from_recurrence,
    mops_from_recurrence,
    recurrence_from_moments,
)

import oracles

# moments 0..6 by symbolic integration of the weight (tests/oracles.py: integral_moment),
# frozen because the trigonometric integrals take over a minute in sympy
INTEGRAL_MOMENTS = {
    ("legendre", ()): ["1", "0", "1/3", "0", "1/5", "0", "1/7"],
    ("chebyshev_T", ()): ["1", "0", "1/2", "0", "3/8", "0", "5/16"],
    ("chebyshev_U", ()): ["1", "0", "1/4", "0", "1/8", "0", "5/64"],
    ("hermite", ()): ["1", "0", "1/2", "0", "3/4", "0", "15/8"],
    ("laguerre", (0,)): ["1", "1", "2", "6", "24", "120", "720"],
    ("laguerre", (F(1, 2),)): ["1", "3/2", "15/4", "105/8", "945/16", "10395/32", "135135/64"],
    ("jacobi", (1, 2)): ["1", "1/5", "1/5", "3/35", "3/35", "1/21", "1/21"],
    ("jacobi", (F(1, 2), F(-1, 2))): ["1", "-1/2", "1/2", "-3/8", "3/8", "-5/16", "5/16"],
}


@pytest.mark.parametrize("key", sorted(INTEGRAL_MOMENTS, key=str))
def test_family_moments_match_integration(key):
    name, params = key
    got = family_moments(name, 6, *params).moments
    assert [str(m) for m in got] == INTEGRAL_MOMENTS[key]


@pytest.mark.parametrize("a,b", [(1, 2), (0, 3), (2, 0)])
def test_polynomial_weight_jacobi_moments_live(a, b):
    # polynomial weights integrate quickly, so these run live
    got = family_moments("jacobi", 8, a, b).moments
    assert list(got) == [oracles.integral_moment("jacobi", k, a, b) for k in range(9)]


def test_classical_family_examples():
    u, _ = classical_family("legendre", 4)
    assert u.moments == (1, 0, F(1, 3), 0, F(1, 5))
    u, _ = classical_family("laguerre", 3, alpha=0)
    assert u.moments == (1, 1, 2, 6)
    u, _ = classical_family("chebyshev_U", 4)
    assert u.moments == (1, 0, F(1, 4), 0, F(1, 8))


@pytest.mark.parametrize("name,alpha,beta", [("jacobi", None, None), ("jacobi", -1, 0), ("laguerre", -2, None),
                                             ("gegenbauer", None, None)])
def test_classical_family_rejects(name, alpha, beta):
    with pytest.raises(InvalidParameter):
        classical_family(name, 6, alpha, beta)


def test_generate_examples():
    U = generate(RecurrenceCoeffs([0, 0], [F(1, 4)]), 2)
    assert U[2] == Poly([F(-1, 4), 0, 1])
    L = generate(RecurrenceCoeffs([0, 0], [F(1, 3)]), 2)
    assert L[2] == Poly([F(-1, 3), 0, 1])
    assert generate(RecurrenceCoeffs([], []), 0) == [Poly.const(1)]
    with pytest.raises(InsufficientCoefficients):
        generate(RecurrenceCoeffs([0], []), 3)


def test_recurrence_from_moments_examples():
    rc = recurrence_from_moments(MomentFunctional([1, 0, F(1, 3), 0, F(1, 5), 0, F(1, 7)]), 3)
    assert rc.betas == (0, 0, 0) and rc.gammas == (F(1, 3), F(4, 15))
    rc = recurrence_from_moments(MomentFunctional([1, 0, F(1, 2), 0, F(3, 8), 0, F(5, 16)]), 3)
    assert rc.gammas == (F(1, 2), F(1, 4))
    rc = recurrence_from_moments(family_moments("hermite", 6), 3)
    assert rc.betas == (0, 0, 0) and rc.gammas == (F(1, 2), 1)


def test_recurrence_from_moments_not_regular():
    with pytest.raises(NotRegular):
        recurrence_from_moments(MomentFunctional([1, 1, 1, 1, 1]), 2)


def test_zero_gamma_is_rejected():
    with pytest.raises(FavardViolation, match="gamma_3"):
        RecurrenceCoeffs([0, 0, 0, 0], [1, 1, 0])


@pytest.mark.parametrize("a,b", [(1, 2), (F(1, 2), F(-1, 2)), (F(-1, 2), F(-1, 2)), (0, 0), (3, F(1, 3))])
def test_jacobi_recurrence_closed_form(a, b):
    _, rc = classical_family("jacobi", 20, a, b)
    betas, gammas = oracles.monic_jacobi_recurrence(a, b, 10)
    assert list(rc.betas) == betas and list(rc.gammas) == gammas


def test_laguerre_and_hermite_closed_forms():
    _, rc = classical_family("laguerre", 20, alpha=F(3, 2))
    assert list(rc.betas) == [2 * n + 1 + F(3, 2) for n in range(10)]
    assert list(rc.gammas) == [n * (n + F(3, 2)) for n in range(1, 10)]
    _, rc = classical_family("hermite", 20)
    assert list(rc.gammas) == [F(n, 2) for n in range(1, 10)]


@pytest.mark.parametrize("name", ["legendre", "chebyshev_T", "chebyshev_U", "hermite", "laguerre"])
def test_gammas_match_hankel_ratios(name):
    u, rc = classical_family(name, 16)
    assert list(rc.gammas) == oracles.gammas_from_hankel(u.moments, 8)


@pytest.mark.parametrize("name", ["legendre", "hermite", "laguerre"])
def test_mops_match_gram_schmidt(name):
    u = family_moments(name, 12)
    mops = build_mops(u, 6)
    for ours, ref in zip(mops.polys, oracles.gram_schmidt(u.moments, 6)):
        assert oracles.sympoly(ours.coeffs) == ref


def test_favard_examples():
    legendre = build_mops(family_moments("legendre", 8), 3).polys
    verdict = favard_oracle(legendre)
    assert verdict.ok and verdict.recurrence.gammas == (F(1, 3), F(4, 15))
    x = Poly.x()
    short = favard_oracle([Poly.const(1), x])
    assert short.ok and short.recurrence.gammas == ()
    collapse = favard_oracle([Poly.const(1), x, x * x, x * x * x])
    assert not collapse.ok and collapse.failed_at == 1 and collapse.witness == (0, 0)
    bad = favard_oracle([Poly.const(1), x, Poly([F(-1, 3), 0, 1]), Poly([1, 0, 0, 1])])
    assert not bad.ok and bad.failed_at == 2 and bad.witness[0] == 0


def test_favard_needs_monic_basis():
    with pytest.raises(NotABasis):
        favard_oracle([Poly.const(1), Poly([0, 2])])
    with pytest.raises(NotABasis):
        favard_oracle([Poly.const(1), Poly([0, 0, 1])])


gamma_st = st.fractions(min_value=F(1, 8), max_value=6, max_denominator=8)
beta_st = st.fractions(min_value=-3, max_value=3, max_denominator=8)


@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.lists(beta_st, min_size=n, max_size=n),
                                                     st.lists(gamma_st, min_size=n - 1, max_size=n - 1))))
def test_moments_recurrence_round_trip(coeffs):
    betas, gammas = coeffs
    rc = RecurrenceCoeffs(betas, gammas)
    n = rc.n_max
    u = moments_from_recurrence(rc, 2 * n - 1)
    back = recurrence_from_moments(u, n - 1)
    assert back.betas == rc.betas[:n - 1] and back.gammas == rc.gammas[:n - 2]
    mops = mops_from_recurrence(rc, n - 1)
    assert favard_oracle(mops.polys).recurrence.gammas == rc.gammas[:n - 2]
    with pytest.raises(InsufficientCoefficients):
        mops_from_recurrence(rc, n)


@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=5).filter(lambda g: g != 0),
                min_size=3, max_size=6))
def test_favard_accepts_signed_gammas(gammas):
    # quasi-definite functionals: any nonzero gammas give a MOPS
    rc = RecurrenceCoeffs([0] * (len(gammas) + 1), gammas)
    mops = mops_from_recurrence(rc, rc.n_max - 1)
    for n in range(len(mops.polys)):
        for m in range(n):
            if n + m <= mops.functional.K:
                assert apply(mops.functional, mops.polys[n] * mops.polys[m]) == 0
