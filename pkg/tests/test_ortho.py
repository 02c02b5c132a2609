from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opstruct import corpus
from opstruct.errors import HypothesisFail
from opstruct.exact import Poly
from opstruct.mops import build_mops, family_moments, favard_oracle
from opstruct.ortho import (
    CONVERSE_NOTE,
    FORWARD_NOTE,
    ConditionGrid,
    check_Q_orthogonal,
    check_R_orthogonal,
    condition_values_A,
    condition_values_B,
    star_coeffs,
    theorem_main_check,
    tilde_coeffs,
)
from opstruct.relation import StructureRelation, build_R, make_instance

import oracles
from conftest import SEED

NMAX = 8
BASES = {name: build_mops(family_moments(name, 30, *params), NMAX)
         for name, params in [("legendre", ()), ("hermite", ()), ("laguerre", (1,)), ("jacobi", (1, 2))]}
STRUCTURED = dict(corpus.structured_instances(10))
coeff_st = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def relations(draw, n_max=NMAX, max_depth=3):
    N, M = draw(st.integers(0, max_depth)), draw(st.integers(0, max_depth))
    r = [[F(0)] * i + draw(st.lists(coeff_st, min_size=n_max + 1 - i, max_size=n_max + 1 - i))
         for i in range(1, N + 1)]
    s = [[F(0)] * i + draw(st.lists(coeff_st, min_size=n_max + 1 - i, max_size=n_max + 1 - i))
         for i in range(1, M + 1)]
    return StructureRelation(N, M, r, s, n_max)


def _grids(inst, n_max=None):
    n_max = inst.n_max - 1 if n_max is None else n_max
    rc, rel = inst.P.recurrence, inst.relation
    star = star_coeffs(rc, rel, n_max)
    tilde = tilde_coeffs(star, rel, n_max)
    return star, tilde, condition_values_A(rc, rel, star, n_max), condition_values_B(star, tilde, rel, n_max)


def test_star_and_tilde_for_chebyshev_tu():
    inst = corpus.chebyshev_tu(10)
    star, tilde, A, B = _grids(inst, 10)
    # R = T, Q = U
    assert star.gamma_star == (F(1, 2),) + (F(1, 4),) * 8
    assert tilde.gamma_tilde == (F(1, 4),) * 9
    assert set(star.beta_star) == set(tilde.beta_tilde) == {0}
    assert A.values == {} and B.all_zero


def test_zero_relation_keeps_recurrence():
    P = BASES["laguerre"]
    rel = StructureRelation(2, 1, [[0] * 9, [0] * 9], [[0] * 9], 8)
    star = star_coeffs(P.recurrence, rel, 7)
    tilde = tilde_coeffs(star, rel, 7)
    assert star.beta_star == tilde.beta_tilde == P.recurrence.betas[:7]
    assert star.gamma_star == tilde.gamma_tilde == P.recurrence.gammas[:6]


@given(st.sampled_from(sorted(BASES)), relations())
@settings(max_examples=15)
def test_condition_values_match_first_principles(base, rel):
    P = BASES[base]
    inst = make_instance(P, rel)
    star, tilde, A, B = _grids(inst)
    Ps = [oracles.sympoly(p.coeffs) for p in P.polys]
    Rs = [oracles.sympoly(p.coeffs) for p in build_R(P.polys, rel)]
    betas, gammas, A_ref = oracles.star_and_A(Ps, Rs, rel.N, NMAX - 1)
    assert (betas, gammas) == (list(star.beta_star), list(star.gamma_star))
    assert A.values == A_ref
    bt, gt, B_ref = oracles.tilde_and_B(star.beta_star, star.gamma_star, rel.s, rel.M, NMAX - 1)
    assert (bt, gt) == (list(tilde.beta_tilde), list(tilde.gamma_tilde))
    assert B.values == B_ref


def test_perturbing_r_localizes_in_A():
    two = corpus.composed(family_moments("hermite", 40), Poly([1, 0, 1]), Poly([-2, 0, 1]), 10)
    assert two.N == 2
    _, _, A0, _ = _grids(two)
    assert A0.all_zero
    bumped = corpus.perturbed(two, "r", 2, 5, F(1, 2))
    _, _, A1, _ = _grids(bumped)
    assert {n for _, n, _ in A1.violations} <= {4, 5, 6}
    assert not A1.all_zero


def test_perturbing_s_localizes_in_B():
    inst = corpus.chebyshev_tu(10)
    bumped = corpus.perturbed(inst, "s", 2, 6, F(1, 3))
    _, _, A, B = _grids(bumped)
    assert A.all_zero
    assert {n for _, n, _ in B.violations} <= set(range(5, 10))
    assert not B.all_zero


@given(st.data())
@settings(max_examples=25)
def test_locality(data):
    # A_{i,n} reads r only at n-1..n+1; B_{i,n} also reads beta~_{n-i} and gamma~_{n+1-i},
    # so an s or r entry at n0 reaches B up to n0 + M + 1
    inst = data.draw(st.sampled_from(LOCALITY_CASES))
    rel = inst.relation
    side = data.draw(st.sampled_from([s for s, d in (("r", rel.N), ("s", rel.M)) if d]))
    depth = rel.N if side == "r" else rel.M
    i = data.draw(st.integers(1, depth))
    n0 = data.draw(st.integers(i, rel.n_max))
    delta = data.draw(coeff_st.filter(lambda d: d != 0))
    _, _, A0, B0 = _grids(inst)
    _, _, A1, B1 = _grids(corpus.perturbed(inst, side, i, n0, delta))
    changed_A = {n for key, n in A0.values if A0.values[(key, n)] != A1.values[(key, n)]}
    changed_B = {n for key, n in B0.values if B0.values[(key, n)] != B1.values[(key, n)]}
    assert changed_A <= set(range(n0 - 1, n0 + i + 1))
    assert changed_B <= set(range(n0 - 1, n0 + rel.M + 2))


LOCALITY_CASES = [inst for _, inst in corpus.structured_instances(9) if inst.N + inst.M > 0]


def test_s_perturbation_reaches_past_the_naive_window():
    # s_{1,n0} moves beta~_{n0}, hence gamma~_{n0+1}, hence B_{2,n0+2}
    inst = corpus.christoffel(2, 10)
    _, _, _, B0 = _grids(inst)
    _, _, _, B1 = _grids(corpus.perturbed(inst, "s", 1, 4, F(1, 2)))
    assert B0.values[(2, 6)] == 0 and B1.values[(2, 6)] != 0


def test_remark_gamma_star_nonvanishing():
    # forcing gamma*_k = 0 for some k > N must show up in the A grid
    inst = corpus.christoffel_mirrored(2, 10)
    rc, rel = inst.P.recurrence, inst.relation
    for k in range(2, 9):
        r_k = rel.r_at(1, k)
        target = r_k + rc.beta(k) - rc.beta(k - 1) - rc.gamma(k) / r_k
        bad = rel.with_r(1, k + 1, target)
        star = star_coeffs(rc, bad, 9)
        assert star.gamma(k) == 0
        if target != 0:
            assert not condition_values_A(rc, bad, star, 9).all_zero


@pytest.mark.parametrize("label", sorted(STRUCTURED))
def test_remark_on_valid_instances(label):
    inst = STRUCTURED[label]
    star, _, A, _ = _grids(inst)
    assert A.all_zero
    assert all(g != 0 for g in star.gamma_star)


@given(relations())
@settings(max_examples=20)
def test_coupled_identities(rel):
    P = BASES["hermite"]
    rc = P.recurrence
    star = star_coeffs(rc, rel, NMAX - 1)
    tilde = tilde_coeffs(star, rel, NMAX - 1)
    r, s = rel.r_at, rel.s_at
    for n in range(NMAX - 1):
        assert tilde.beta(n) + s(1, n) - s(1, n + 1) == rc.beta(n) + r(1, n) - r(1, n + 1)


@pytest.mark.parametrize("label", sorted(STRUCTURED))
def test_propositions_on_valid_instances(label):
    inst = STRUCTURED[label]
    rc, rel = inst.P.recurrence, inst.relation
    r_rep = check_R_orthogonal(rc, rel, 9)
    assert r_rep.passed and r_rep.details["oracle_agrees"]
    q_rep = check_Q_orthogonal(star_coeffs(rc, rel, 9), rel, 9)
    assert q_rep.passed and q_rep.details["oracle_agrees"]


def test_prop31_detects_non_orthogonal_R():
    inst = STRUCTURED["hermite two-sided"]
    rel = inst.relation.with_r(1, 5, inst.relation.r_at(1, 5) + 1)
    rep = check_R_orthogonal(inst.P.recurrence, rel, 9)
    assert not rep.passed and not rep.details["oracle"] and rep.details["oracle_agrees"]
    assert rep.witnesses[0].identifier == "A_2"


def test_prop32_requires_orthogonal_R():
    inst = corpus.christoffel_mirrored(2, 10)
    rc, rel = inst.P.recurrence, inst.relation
    r3 = rel.r_at(1, 3)
    bad = rel.with_r(1, 4, r3 + rc.beta(3) - rc.beta(2) - rc.gamma(3) / r3)
    star = star_coeffs(rc, bad, 9)
    assert star.gamma(3) == 0
    with pytest.raises(HypothesisFail, match="R is not a MOPS"):
        check_Q_orthogonal(star, bad, 9)


def _boundary_instance():
    # T/U with s_{2,10} chosen so that gamma~_9 = 0: no B condition reaches it at n_max = 10
    base = corpus.chebyshev_tu(10)
    rel = base.relation
    tilde = tilde_coeffs(star_coeffs(base.P.recurrence, rel, 10), rel, 10)
    return make_instance(base.P, rel.with_s(2, 10, rel.s_at(2, 10) - tilde.gamma(9)))


def test_boundary_gamma_tilde():
    inst = _boundary_instance()
    assert inst.relation.s_lead(10) == F(-1, 2)
    truth = favard_oracle(inst.Q)
    assert not truth.ok and truth.failed_at == 9
    rep = theorem_main_check(inst)
    assert rep.details["B"].all_zero and rep.details["A"].all_zero
    assert [w.to_json() for w in rep.witnesses] == [{"id": "gamma_tilde", "n": 9, "value": "0"}]
    assert rep.details["oracle_agrees"]
    star = star_coeffs(inst.P.recurrence, inst.relation, 10)
    assert not check_Q_orthogonal(star, inst.relation, 10).passed


@pytest.mark.parametrize("label", sorted(STRUCTURED))
def test_theorem_on_valid_instances(label):
    rep = theorem_main_check(STRUCTURED[label])
    assert rep.passed and rep.details["oracle"] and rep.details["oracle_agrees"]
    assert rep.annotations == [FORWARD_NOTE, CONVERSE_NOTE]


def test_theorem_detects_perturbation():
    inst = corpus.perturbed(corpus.chebyshev_tu(10), "s", 2, 6, F(1, 3))
    rep = theorem_main_check(inst)
    assert not rep.passed and not rep.details["oracle"] and rep.details["oracle_agrees"]
    assert rep.details["oracle_witness"]["n"] == 6


def test_theorem_degenerate_hypothesis():
    with pytest.raises(HypothesisFail, match="det A = 0"):
        theorem_main_check(corpus.degenerate(10))


def test_theorem_zero_lead_hypothesis():
    base = corpus.christoffel(2, 10)
    inst = corpus.perturbed(base, "s", 1, 7, -base.relation.s_at(1, 7))
    with pytest.raises(HypothesisFail, match=r"r_\{N,7\} s_\{M,7\} = 0"):
        theorem_main_check(inst)


def test_sweep_equivalence_small():
    cases = corpus.sweep_corpus(seed=SEED, bases=6, perturbations=3, n_max=8, structured=False)
    assert any(c.constructed_valid for c in cases) and any(not c.constructed_valid for c in cases)
    for case in cases:
        rep = theorem_main_check(case.instance)
        assert rep.passed == favard_oracle(case.instance.Q).ok, case.label


def test_condition_grid_json():
    grid = ConditionGrid("A", {(3, 7): F(1, 20), (2, 7): F(0)}, ((2, 2, 9), (3, 3, 9)))
    assert grid.to_json() == {
        "family": "A",
        "violations": [{"i": 3, "n": 7, "value": "1/20"}],
        "checked_ranges": [{"i": 2, "n_from": 2, "n_to": 9}, {"i": 3, "n_from": 3, "n_to": 9}],
    }
