from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from opstruct.errors import TruncationExceeded, ZeroNorm
from opstruct.exact import Poly
from opstruct.functionals import MomentFunctional, apply, hankel_regular, normalized, poly_mod
from opstruct.mops import family_moments

import oracles

LEGENDRE = family_moments("legendre", 12)
CHEB_T = family_moments("chebyshev_T", 12)
CHEB_U = family_moments("chebyshev_U", 12)


def test_apply_examples():
    assert apply(LEGENDRE, Poly.const(1)) == 1
    assert apply(LEGENDRE, Poly.monomial(2)) == oracles.integral_moment("legendre", 2) == F(1, 3)
    assert apply(CHEB_T, Poly.monomial(4)) == oracles.wallis_even(2) == F(3, 8)


def test_apply_beyond_truncation():
    with pytest.raises(TruncationExceeded):
        apply(MomentFunctional([1, 0, F(1, 3)]), Poly.monomial(3))


def test_poly_mod_identity():
    assert poly_mod(Poly.const(1), LEGENDRE) == LEGENDRE


def test_poly_mod_one_minus_x2_on_chebyshev_t_is_half_u():
    mod = poly_mod(Poly([1, 0, -1]), CHEB_T)
    assert mod.moments[:4] == (F(1, 2), 0, F(1, 8), 0)
    assert list(mod.moments) == [m / 2 for m in CHEB_U.moments[:mod.K + 1]]


def test_poly_mod_linear_on_legendre():
    mod = poly_mod(Poly([-2, 1]), LEGENDRE)
    assert mod.moments[:4] == (-2, F(1, 3), F(-2, 3), F(1, 5))
    # moment-by-moment recursion <u, x^{k+1}> - 2 <u, x^k>
    assert list(mod.moments) == [LEGENDRE.moments[k + 1] - 2 * LEGENDRE.moments[k] for k in range(mod.K + 1)]
    assert not mod.is_normalized()


def test_poly_mod_truncation():
    assert poly_mod(Poly([0, 0, 1]), LEGENDRE).K == LEGENDRE.K - 2
    with pytest.raises(TruncationExceeded):
        poly_mod(Poly.monomial(13), LEGENDRE)


def test_normalized_examples():
    assert normalized(Poly.const(1), LEGENDRE) == Poly.const(1)
    assert normalized(Poly.x(), LEGENDRE) == Poly([0, 3])
    assert normalized(Poly.x(), CHEB_U) == Poly([0, 4])


def test_normalized_zero_norm():
    # <u, x^2> = 0 for the moment sequence (1, 0, 0)
    with pytest.raises(ZeroNorm):
        normalized(Poly.x(), MomentFunctional([1, 0, 0]))


def test_hankel_examples():
    cert = hankel_regular(LEGENDRE, 2)
    assert cert.hankel_dets == (1, F(1, 3), F(4, 135))
    assert cert.regular
    ones = hankel_regular(MomentFunctional([1] * 5), 1)
    assert ones.hankel_dets[1] == 0 and not ones.regular and ones.first_singular == 1
    assert hankel_regular(CHEB_U, 1).hankel_dets[1] == F(1, 4)


def test_hankel_truncation():
    with pytest.raises(TruncationExceeded):
        hankel_regular(LEGENDRE, 7)


@given(st.integers(0, 5))
def test_hankel_dets_match_sympy(m):
    assert hankel_regular(LEGENDRE, m).hankel_dets[m] == oracles.hankel_det(LEGENDRE.moments, m)


@given(st.lists(st.fractions(-5, 5, max_denominator=6), min_size=1, max_size=4),
       st.lists(st.fractions(-5, 5, max_denominator=6), min_size=1, max_size=4))
def test_poly_mod_composes(a, b):
    # (ab) u = a (b u)
    pa, pb = Poly(a), Poly(b)
    if pa.is_zero() or pb.is_zero():
        return
    assert poly_mod(pa * pb, LEGENDRE) == poly_mod(pa, poly_mod(pb, LEGENDRE))
