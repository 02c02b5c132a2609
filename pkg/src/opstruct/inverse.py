"""The inverse problem: from a structure relation to a rational link Phi u = Psi v.

Given the relation between P (orthogonal for u) and Q (orthogonal for v), the
polynomials

    Psi_N = r_{N,N+M} Q̄_N + sum_{i<N} lambda_i Q̄_i
    Phi_M = s_{M,N+M} P̄_M + sum_{i<M} mu_i P̄_i

are found by Cramer's rule on the windows <Psi_N v, P_k> = 0 and
<Phi_M u, Q_k> = 0.  Every claim is checked exactly up to an explicit
moment horizon K.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (
    IndexOutOfRange,
    InitialConditionsFail,
    SingularSystem,
    TruncationExceeded,
)
from .exact import Poly, det, rank
from .functionals import MomentFunctional, apply
from .relation import (
    RelationInstance,
    matrix_A,
    matrix_B,
    matrix_B_i,
    matrix_Btilde,
    matrix_Btilde_i,
)
from .report import NOT_APPLICABLE, CheckReport


@dataclass(frozen=True)
class FunctionalRelation:
    phi: Poly
    psi: Poly
    lam: tuple[Fraction, ...]
    mu: tuple[Fraction, ...]
    route: str = "cramer"
    verified_to: int | None = None

    @property
    def trivial(self) -> bool:
        return self.route == "trivial"

    def to_json(self) -> dict:
        from .report import to_jsonable
        return {
            "phi": to_jsonable(self.phi),
            "psi": to_jsonable(self.psi),
            "lambda": to_jsonable(self.lam),
            "mu": to_jsonable(self.mu),
            "route": self.route,
            "verified_to": self.verified_to,
        }


@dataclass(frozen=True)
class InitialConditions:
    detA: Fraction
    rN: Fraction
    sM: Fraction

    @property
    def passed(self) -> bool:
        return self.detA != 0 and self.rN != 0 and self.sM != 0


def check_initial_conditions(inst: RelationInstance) -> InitialConditions:
    """det A, r_{N,N+M}, s_{M,N+M}; A is assembled from pairings with u and v."""
    rel = inst.relation
    n0 = rel.N + rel.M
    return InitialConditions(det(matrix_A(inst)), rel.r_lead(n0), rel.s_lead(n0))


def _window(inst: RelationInstance, n: int, depth: int, name: str) -> None:
    low = inst.N + inst.M
    if depth < 1:
        raise IndexOutOfRange(f"{name} needs a nonempty unknown vector")
    if n < low or n > inst.n_max:
        raise IndexOutOfRange(f"{name} window n must lie in [{low}, {inst.n_max}], got {n}")


def solve_lambda(inst: RelationInstance, n: int) -> list[Fraction]:
    """(lambda_{i,n})_{i<N} with lambda_{i,n} = -r_{N,N+M} det B_n^i / det B_n."""
    N = inst.N
    _window(inst, n, N, "solve_lambda")
    d = det(matrix_B(inst, n))
    if d == 0:
        raise SingularSystem(f"det B_{n} = 0")
    lead = inst.relation.r_lead(N + inst.M)
    return [-lead * det(matrix_B_i(inst, n, i)) / d for i in range(N)]


def solve_mu(inst: RelationInstance, n: int) -> list[Fraction]:
    """(mu_{i,n})_{i<M} with mu_{i,n} = -s_{M,N+M} det B̃_n^i / det B̃_n."""
    M = inst.M
    _window(inst, n, M, "solve_mu")
    d = det(matrix_Btilde(inst, n))
    if d == 0:
        raise SingularSystem(f"det B~_{n} = 0")
    lead = inst.relation.s_lead(inst.N + M)
    return [-lead * det(matrix_Btilde_i(inst, n, i)) / d for i in range(M)]


def assemble_psi(inst: RelationInstance, lam) -> Poly:
    N = inst.N
    if inst.v is None and N == 0:
        return Poly.const(1)
    psi = inst.Qbar(N) * inst.relation.r_lead(N + inst.M)
    for i, c in enumerate(lam):
        psi = psi + inst.Qbar(i) * c
    return psi


def assemble_phi(inst: RelationInstance, mu) -> Poly:
    M = inst.M
    phi = inst.Pbar(M) * inst.relation.s_lead(inst.N + M)
    for i, c in enumerate(mu):
        phi = phi + inst.Pbar(i) * c
    return phi


def lambda_residuals(inst: RelationInstance, n: int, lam) -> list[Fraction]:
    """<Psi v, P_{n-j}> for j < N with Psi assembled from ``lam``; all zero for a Cramer solution."""
    psi = assemble_psi(inst, lam)
    return [inst.pair_v(psi, inst.P.polys[n - j]) for j in range(inst.N)]


def mu_residuals(inst: RelationInstance, n: int, mu) -> list[Fraction]:
    phi = assemble_phi(inst, mu)
    return [inst.pair_u(phi, inst.Q[n - j]) for j in range(inst.M)]


def build_functional_relation(inst: RelationInstance) -> FunctionalRelation:
    """Phi_M and Psi_N from the Cramer solutions at n = N+M."""
    N, M = inst.N, inst.M
    if N == 0 and M == 0:
        return FunctionalRelation(Poly.const(1), Poly.const(1), (), (), route="trivial")
    ic = check_initial_conditions(inst)
    if not ic.passed:
        raise InitialConditionsFail(
            f"det A = {ic.detA}, r_{{N,N+M}} = {ic.rN}, s_{{M,N+M}} = {ic.sM}")
    lam = solve_lambda(inst, N + M) if N else []
    mu = solve_mu(inst, N + M) if M else []
    return FunctionalRelation(assemble_phi(inst, mu), assemble_psi(inst, lam), tuple(lam), tuple(mu))


def identity_horizon(fr: FunctionalRelation, u: MomentFunctional, v: MomentFunctional) -> int:
    """Largest K for which <Phi u, x^k> and <Psi v, x^k> are computable for all k <= K."""
    return min(u.K - (fr.phi.degree or 0), v.K - (fr.psi.degree or 0))


def first_identity_violation(fr: FunctionalRelation, u: MomentFunctional, v: MomentFunctional,
                             K: int) -> tuple[int, Fraction] | None:
    if K > identity_horizon(fr, u, v):
        raise TruncationExceeded(
            f"horizon {K} needs moments beyond u (depth {u.K}) or v (depth {v.K})")
    for k in range(K + 1):
        diff = apply(u, fr.phi.shift(k)) - apply(v, fr.psi.shift(k))
        if diff:
            return k, diff
    return None


def verify_functional_identity(fr: FunctionalRelation, u: MomentFunctional, v: MomentFunctional,
                               K: int) -> bool:
    """<Phi u, x^k> = <Psi v, x^k> for k = 0..K, exactly."""
    return first_identity_violation(fr, u, v, K) is None


def verified(fr: FunctionalRelation, u: MomentFunctional, v: MomentFunctional, K: int) -> FunctionalRelation:
    if not verify_functional_identity(fr, u, v, K):
        return fr
    return replace(fr, verified_to=K)


def check_constancy(inst: RelationInstance, n_from: int, n_to: int) -> CheckReport:
    """lambda_{i,n} and mu_{i,n} must not depend on n over [n_from, n_to]."""
    N, M = inst.N, inst.M
    rep = CheckReport("constancy")
    if N == 0 and M == 0:
        rep.status = NOT_APPLICABLE
        rep.reason = "N = M = 0"
        return rep
    lo = N + M
    if n_from < lo or n_to > inst.n_max or n_from > n_to:
        raise IndexOutOfRange(f"constancy range must lie in [{lo}, {inst.n_max}], got [{n_from}, {n_to}]")
    for label, depth, solver in (("lambda", N, solve_lambda), ("mu", M, solve_mu)):
        if not depth:
            continue
        table = {}
        first = None
        for n in range(n_from, n_to + 1):
            vals = solver(inst, n)
            table[n] = vals
            if first is None:
                first = vals
                continue
            for i, (a, b) in enumerate(zip(first, vals)):
                if a != b:
                    rep.fail(f"{label}_{i}", n, b - a)
        rep.details[label] = table
    return rep


def check_nonvanishing(inst: RelationInstance, n_to: int) -> CheckReport:
    """r_{N,n} != 0 and s_{M,n} != 0 for N+M <= n <= n_to, and the cross-identity

        s_{M,N+M} r_{N,n} h^u_{n-N} / h^u_M = r_{N,N+M} s_{M,n} h^v_{n-M} / h^v_N

    as an exact residual (both sides come from pairing Phi u = Psi v with
    R_n times a monic polynomial of degree n-N-M).
    """
    rel = inst.relation
    N, M = rel.N, rel.M
    rep = CheckReport("nonvanishing")
    lo = N + M
    n_to = min(n_to, inst.n_max)
    r0, s0 = rel.r_lead(lo), rel.s_lead(lo)
    hu = inst.P.norms
    residuals = {}
    checked_to = None
    truncated = inst.v is None
    for n in range(lo, n_to + 1):
        if N and rel.r_lead(n) == 0:
            rep.fail(f"r_{N}", n, Fraction(0))
        if M and rel.s_lead(n) == 0:
            rep.fail(f"s_{M}", n, Fraction(0))
        if truncated:
            continue
        try:
            hv_n, hv_N = inst.q_norm(n - M), inst.q_norm(N)
        except TruncationExceeded:
            truncated = True
            continue
        res = s0 * rel.r_lead(n) * hu[n - N] / hu[M] - r0 * rel.s_lead(n) * hv_n / hv_N
        residuals[n] = res
        checked_to = n
        if res:
            rep.fail("cross_identity", n, res)
    if inst.v is None:
        rep.annotations.append("cross-identity not evaluated: v unavailable")
    elif checked_to is not None and checked_to < n_to:
        rep.annotations.append(f"cross-identity evaluated only through n = {checked_to} "
                               f"(moment depth of v)")
    rep.details["cross_identity"] = residuals
    if N == 0 or M == 0:
        rep.annotations.append("only the surviving coefficient family is checked")
    return rep


def uniqueness_dimension(u: MomentFunctional, v: MomentFunctional, N: int, M: int, K: int) -> int:
    """Dimension of {(Phi, Psi): deg Phi <= M, deg Psi <= N, <Phi u - Psi v, x^k> = 0, k <= K}."""
    if K + M > u.K or K + N > v.K:
        raise TruncationExceeded(f"horizon {K} needs u through {K + M} and v through {K + N}")
    rows = [[u.moments[j + k] for j in range(M + 1)] + [-v.moments[j + k] for j in range(N + 1)]
            for k in range(K + 1)]
    return M + N + 2 - rank(rows)


def solve_m_zero(inst: RelationInstance) -> FunctionalRelation:
    """Direct route when one side of the relation is trivial.

    M = 0: u = Psi_N v with Psi_N = sum_{n<=N} <u, Q_n> Q̄_n, needing r_{N,N} != 0.
    N = 0: Phi_M u = v with Phi_M = sum_{n<=M} <v, P_n> P̄_n, needing s_{M,M} != 0.
    """
    N, M = inst.N, inst.M
    if N == 0 and M == 0:
        return FunctionalRelation(Poly.const(1), Poly.const(1), (), (), route="trivial")
    if M == 0:
        lead = inst.relation.r_lead(N)
        if lead == 0:
            raise InitialConditionsFail(f"r_{{{N},{N}}} = 0")
        coeffs = [apply(inst.u, inst.Q[n]) for n in range(N + 1)]
        psi = Poly()
        for n, c in enumerate(coeffs):
            psi = psi + inst.Qbar(n) * c
        return FunctionalRelation(Poly.const(1), psi, tuple(coeffs[:N]), (),
                                  route="m_zero")
    if N == 0:
        lead = inst.relation.s_lead(M)
        if lead == 0:
            raise InitialConditionsFail(f"s_{{{M},{M}}} = 0")
        v = inst.require_v()
        coeffs = [apply(v, inst.P.polys[n]) for n in range(M + 1)]
        phi = Poly()
        for n, c in enumerate(coeffs):
            phi = phi + inst.Pbar(n) * c
        return FunctionalRelation(phi, Poly.const(1), (), tuple(coeffs[:M]),
                                  route="n_zero")
    raise IndexOutOfRange("the direct route needs N = 0 or M = 0")
