"""Worked instances and a seeded corpus of valid and perturbed relations.

Valid instances come from one construction: pick a regular functional w and
polynomials Phi (degree M) and Psi (degree N), set

    u = Psi w / <w, Psi>,   v = Phi w / <w, Phi>,   R_n = n-th monic orthogonal polynomial of w.

Then Phi u and Psi v are proportional, R_n lies in the span of P_{n-N}..P_n and of
Q_{n-M}..Q_n, and the relation tables are read off by the fit oracle.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisFail, NotRegular, OpstructError, ZeroNorm
from .exact import Poly, det
from .functionals import MomentFunctional, poly_mod
from .mops import Mops, RecurrenceCoeffs, build_mops, family_moments, moments_from_recurrence
from .relation import RelationInstance, StructureRelation, dual_matrix_A, fit_relation, make_instance

DEFAULT_NMAX = 12


def _depth(n_max: int, extra: int = 8) -> int:
    return 2 * n_max + extra


def instance_from_sequences(P: Mops, Q_mops: Mops, R, N: int, M: int, with_v: bool = True) -> RelationInstance:
    rel = fit_relation(P.polys, Q_mops.polys, R, N, M)
    return make_instance(P, rel, Q_mops.functional if with_v else None)


def chebyshev_tu(n_max: int = DEFAULT_NMAX) -> RelationInstance:
    """P = monic Chebyshev T (u), Q = monic Chebyshev U (v), R = P; N = 0, M = 2."""
    K = _depth(n_max)
    P = build_mops(family_moments("chebyshev_T", K), n_max)
    Q = build_mops(family_moments("chebyshev_U", K), n_max)
    return instance_from_sequences(P, Q, P.polys, 0, 2)


def chebyshev_ut(n_max: int = DEFAULT_NMAX) -> RelationInstance:
    """Roles swapped: P = monic U, Q = monic T, R = Q; N = 2, M = 0."""
    K = _depth(n_max)
    P = build_mops(family_moments("chebyshev_U", K), n_max)
    Q = build_mops(family_moments("chebyshev_T", K), n_max)
    return instance_from_sequences(P, Q, Q.polys, 2, 0)


def christoffel_functional(u: MomentFunctional, c: Fraction) -> MomentFunctional:
    """Normalized (1 - x/c) u."""
    return poly_mod(Poly([1, Fraction(-1) / c]), u).normalize()


def christoffel(c: Fraction | int = 2, n_max: int = DEFAULT_NMAX) -> RelationInstance:
    """P = monic Legendre (u), v = (1 - x/c) u, R = P; N = 0, M = 1."""
    c = Fraction(c)
    u = family_moments("legendre", _depth(n_max))
    P = build_mops(u, n_max)
    Q = build_mops(christoffel_functional(u, c), n_max)
    return instance_from_sequences(P, Q, P.polys, 0, 1)


def christoffel_mirrored(c: Fraction | int = 2, n_max: int = DEFAULT_NMAX) -> RelationInstance:
    """P = kernel polynomials for (1 - x/c) u, Q = monic Legendre, R = Q; N = 1, M = 0."""
    c = Fraction(c)
    w = family_moments("legendre", _depth(n_max))
    P = build_mops(christoffel_functional(w, c), n_max)
    Q = build_mops(w, n_max)
    return instance_from_sequences(P, Q, Q.polys, 1, 0)


def degenerate(n_max: int = DEFAULT_NMAX) -> RelationInstance:
    """P = Q = monic Legendre with r_{1,n} = s_{1,n} = 1: the relation holds but carries no information."""
    u = family_moments("legendre", _depth(n_max))
    P = build_mops(u, n_max)
    ones = [[Fraction(0)] + [Fraction(1)] * n_max]
    rel = StructureRelation(1, 1, ones, ones, n_max)
    return make_instance(P, rel, u)


NAMED = {
    "chebyshev_tu": chebyshev_tu,
    "chebyshev_ut": chebyshev_ut,
    "christoffel": christoffel,
    "christoffel_mirrored": christoffel_mirrored,
    "degenerate": degenerate,
}


def composed(w: MomentFunctional, phi: Poly, psi: Poly, n_max: int) -> RelationInstance:
    """Instance with u = psi w, v = phi w (both normalized) and R = MOPS of w."""
    N, M = psi.degree, phi.degree
    u = poly_mod(psi, w).normalize()
    v = poly_mod(phi, w).normalize()
    P = build_mops(u, n_max)
    Q = build_mops(v, n_max)
    W = build_mops(w, n_max)
    return instance_from_sequences(P, Q, W.polys, N, M)


def perturbed(inst: RelationInstance, side: str, i: int, n: int, delta: Fraction) -> RelationInstance:
    """Same P, one relation entry shifted by ``delta``; Q is re-solved and v dropped."""
    rel = inst.relation
    if side == "r":
        rel = rel.with_r(i, n, rel.r_at(i, n) + delta)
    else:
        rel = rel.with_s(i, n, rel.s_at(i, n) + delta)
    return make_instance(inst.P, rel, None)


# ---------------------------------------------------------------------------
# Seeded sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusCase:
    label: str
    instance: RelationInstance
    constructed_valid: bool


def _small_rational(rng: random.Random, lo: int = -9, hi: int = 9, dens=(1, 2, 3, 4)) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def _random_base(rng: random.Random, K: int) -> tuple[str, MomentFunctional]:
    kind = rng.choice(["legendre", "chebyshev_T", "chebyshev_U", "hermite", "laguerre", "jacobi",
                       "recurrence", "recurrence"])
    if kind == "laguerre":
        a = rng.choice([0, 1, 2, Fraction(1, 2)])
        return f"laguerre({a})", family_moments("laguerre", K, alpha=a)
    if kind == "jacobi":
        a, b = rng.choice([Fraction(1, 2), 1, 2, 0]), rng.choice([Fraction(-1, 2), 1, 3, 0])
        return f"jacobi({a},{b})", family_moments("jacobi", K, alpha=a, beta=b)
    if kind == "recurrence":
        n = K // 2 + 1
        betas = [_small_rational(rng, -3, 3) for _ in range(n)]
        gammas = [Fraction(rng.randint(1, 6), rng.choice((1, 2, 4))) for _ in range(n - 1)]
        return "recurrence", moments_from_recurrence(RecurrenceCoeffs(betas, gammas), K)
    return kind, family_moments(kind, K)


def _random_poly(rng: random.Random, degree: int, avoid: set[Fraction]) -> Poly:
    """Monic-up-to-sign product of linear factors with distinct rational roots."""
    p = Poly.const(1)
    for _ in range(degree):
        while True:
            root = _small_rational(rng, -12, 12)
            if root not in avoid:
                break
        avoid.add(root)
        p = p * Poly([-root, 1])
    return p


def _hypotheses_hold(inst: RelationInstance) -> bool:
    rel = inst.relation
    if det(dual_matrix_A(inst)) == 0:
        return False
    return all(rel.r_lead(n) * rel.s_lead(n) != 0 for n in range(rel.N + rel.M, rel.n_max + 1))


def _random_valid(rng: random.Random, n_max: int, max_depth: int) -> tuple[str, RelationInstance]:
    K = 2 * n_max + 2 * max_depth + 4
    while True:
        name, w = _random_base(rng, K)
        N, M = rng.randint(0, max_depth), rng.randint(0, max_depth)
        avoid: set[Fraction] = set()
        psi, phi = _random_poly(rng, N, avoid), _random_poly(rng, M, avoid)
        try:
            inst = composed(w, phi, psi, n_max)
        except (NotRegular, ZeroNorm, HypothesisFail):
            continue
        if _hypotheses_hold(inst):
            return f"{name} N={N} M={M} phi=[{phi}] psi=[{psi}]", inst


def _random_perturbation(rng: random.Random, inst: RelationInstance, tries: int = 50):
    rel = inst.relation
    sides = [s for s, depth in (("r", rel.N), ("s", rel.M)) if depth]
    if not sides:
        return None
    for _ in range(tries):
        side = rng.choice(sides)
        depth = rel.N if side == "r" else rel.M
        n = rng.randint(1, rel.n_max)
        i = rng.randint(1, min(depth, n))
        delta = _small_rational(rng, -5, 5)
        if delta == 0:
            continue
        try:
            out = perturbed(inst, side, i, n, delta)
        except OpstructError:
            continue
        if _hypotheses_hold(out):
            return f"{side}[{i},{n}] += {delta}", out
    return None


def structured_instances(n_max: int = 10) -> list[tuple[str, RelationInstance]]:
    """Hand-built valid constructions: identity, Christoffel chains and Chebyshev T/U."""
    K = _depth(n_max)
    legendre = family_moments("legendre", K)
    x = Poly.x()
    return [
        ("identity legendre", composed(legendre, Poly.const(1), Poly.const(1), n_max)),
        ("christoffel legendre c=2", christoffel(2, n_max)),
        ("christoffel mirrored legendre c=2", christoffel_mirrored(2, n_max)),
        ("christoffel chain legendre c=2,3", composed(legendre, (x - 2) * (x - 3), Poly.const(1), n_max)),
        ("christoffel chain legendre c=2,-3,5/2",
         composed(legendre, (x - 2) * (x + 3) * (x - Fraction(5, 2)), Poly.const(1), n_max)),
        ("chebyshev T/U", chebyshev_tu(n_max)),
        ("chebyshev U/T", chebyshev_ut(n_max)),
        ("hermite two-sided", composed(family_moments("hermite", K), x - 1, x + 2, n_max)),
    ]


def sweep_corpus(seed: int = 0, bases: int = 40, perturbations: int = 5, n_max: int = 10,
                 max_depth: int = 3, structured: bool = True) -> list[CorpusCase]:
    """Valid instances, each followed by up to ``perturbations`` one-entry perturbations.

    The valid instances are the structured constructions (when ``structured``)
    followed by ``bases`` random composed ones.  Instances where the hypotheses
    det A != 0 and r_{N,n} s_{M,n} != 0 fail are resampled rather than kept,
    since the verdict is only defined under them.
    """
    rng = random.Random(seed)
    valid = list(structured_instances(n_max)) if structured else []
    valid += [_random_valid(rng, n_max, max_depth) for _ in range(bases)]
    cases: list[CorpusCase] = []
    for b, (label, inst) in enumerate(valid):
        cases.append(CorpusCase(f"#{b} {label}", inst, True))
        for _ in range(perturbations):
            pert = _random_perturbation(rng, inst)
            if pert is None:
                break
            plabel, pinst = pert
            cases.append(CorpusCase(f"#{b} {label} {plabel}", pinst, False))
    return cases

