"""The finite structure relation between two monic sequences and its matrices.

    R_n := P_n + sum_{i=1}^N r_{i,n} P_{n-i} = Q_n + sum_{i=1}^M s_{i,n} Q_{n-i}

Coefficient tables are dense: ``r[i-1][n]`` for n = 0..n_max, with the entries
i > n required to be zero.  The accessors ``r_at``/``s_at`` extend the tables
by r_{0,n} = s_{0,n} = 1 and by zero outside the stored index box.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    HypothesisFail,
    IndexOutOfRange,
    InsufficientCoefficients,
    InvalidRelation,
    MissingFunctional,
)
from .exact import Matrix, Poly, Scalar, det, expand_in_basis, rat
from .functionals import MomentFunctional, apply, normalized
from .mops import Mops
from .report import FAIL, NOT_APPLICABLE, CheckReport

Table = tuple[tuple[Fraction, ...], ...]


def _table(rows: Sequence[Sequence[Scalar | str]] | Mapping[int, Sequence[Scalar | str]],
           depth: int, n_max: int, label: str) -> Table:
    if isinstance(rows, Mapping):
        missing = [i for i in range(1, depth + 1) if i not in rows]
        if missing:
            raise InvalidRelation(f"{label} table lacks rows {missing}")
        rows = [rows[i] for i in range(1, depth + 1)]
    if len(rows) != depth:
        raise InvalidRelation(f"{label} table has {len(rows)} rows, expected {depth}")
    out = []
    for i, row in enumerate(rows, start=1):
        if len(row) < n_max + 1:
            raise InsufficientCoefficients(
                f"{label}_{i} has {len(row)} entries, n = 0..{n_max} needs {n_max + 1}")
        vals = tuple(rat(e) for e in row[:n_max + 1])
        for n in range(min(i, n_max + 1)):
            if vals[n] != 0:
                raise InvalidRelation(f"{label}_{{{i},{n}}} = {vals[n]} but entries with i > n must be 0")
        out.append(vals)
    return tuple(out)


@dataclass(frozen=True)
class StructureRelation:
    N: int
    M: int
    n_max: int
    r: Table
    s: Table

    def __init__(self, N: int, M: int, r=(), s=(), n_max: int | None = None):
        if N < 0 or M < 0:
            raise InvalidRelation("N and M must be nonnegative")
        if n_max is None:
            lengths = [len(row) for row in (list(r.values()) if isinstance(r, Mapping) else list(r))]
            lengths += [len(row) for row in (list(s.values()) if isinstance(s, Mapping) else list(s))]
            if not lengths:
                raise InvalidRelation("n_max is required when N = M = 0")
            n_max = min(lengths) - 1
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "n_max", n_max)
        object.__setattr__(self, "r", _table(r, N, n_max, "r"))
        object.__setattr__(self, "s", _table(s, M, n_max, "s"))

    @staticmethod
    def _at(table: Table, depth: int, n_max: int, i: int, n: int) -> Fraction:
        if i == 0:
            return Fraction(1) if n >= 0 else Fraction(0)
        if i < 0 or i > depth or n < 0 or i > n:
            return Fraction(0)
        if n > n_max:
            raise InsufficientCoefficients(f"coefficient index n={n} beyond table depth {n_max}")
        return table[i - 1][n]

    def r_at(self, i: int, n: int) -> Fraction:
        return self._at(self.r, self.N, self.n_max, i, n)

    def s_at(self, i: int, n: int) -> Fraction:
        return self._at(self.s, self.M, self.n_max, i, n)

    def r_lead(self, n: int) -> Fraction:
        """r_{N,n}, with r_{0,n} = 1 when N = 0."""
        return self.r_at(self.N, n)

    def s_lead(self, n: int) -> Fraction:
        return self.s_at(self.M, n)

    def with_r(self, i: int, n: int, value: Scalar) -> "StructureRelation":
        r = [list(row) for row in self.r]
        r[i - 1][n] = rat(value)
        return StructureRelation(self.N, self.M, r, self.s, self.n_max)

    def with_s(self, i: int, n: int, value: Scalar) -> "StructureRelation":
        s = [list(row) for row in self.s]
        s[i - 1][n] = rat(value)
        return StructureRelation(self.N, self.M, self.r, s, self.n_max)

    def mirrored(self) -> "StructureRelation":
        """The same relation read right-to-left: (N, r) and (M, s) swap roles."""
        return StructureRelation(self.M, self.N, self.s, self.r, self.n_max)

    def truncated(self, n_max: int) -> "StructureRelation":
        if n_max > self.n_max:
            raise InsufficientCoefficients(f"relation stops at n={self.n_max}")
        return StructureRelation(self.N, self.M, [row[:n_max + 1] for row in self.r],
                                 [row[:n_max + 1] for row in self.s], n_max)


def build_R(P: Sequence[Poly], rel: StructureRelation) -> list[Poly]:
    """R_n = P_n + sum r_{i,n} P_{n-i} for n = 0..len(P)-1."""
    if len(P) - 1 > rel.n_max:
        raise InsufficientCoefficients(f"relation covers n <= {rel.n_max}, got {len(P) - 1}")
    out = []
    for n in range(len(P)):
        Rn = P[n]
        for i in range(1, min(rel.N, n) + 1):
            c = rel.r_at(i, n)
            if c:
                Rn = Rn + P[n - i] * c
        out.append(Rn)
    return out


def solve_Q(R: Sequence[Poly], rel: StructureRelation) -> list[Poly]:
    """Unique monic Q with R_n = Q_n + sum s_{i,n} Q_{n-i} (unitriangular solve)."""
    if len(R) - 1 > rel.n_max:
        raise InsufficientCoefficients(f"relation covers n <= {rel.n_max}, got {len(R) - 1}")
    Q: list[Poly] = []
    for n in range(len(R)):
        Qn = R[n]
        for i in range(1, min(rel.M, n) + 1):
            c = rel.s_at(i, n)
            if c:
                Qn = Qn - Q[n - i] * c
        Q.append(Qn)
    return Q


@dataclass(frozen=True, eq=False)
class RelationInstance:
    relation: StructureRelation
    P: Mops
    Q: tuple[Poly, ...]
    R: tuple[Poly, ...]
    v: MomentFunctional | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def u(self) -> MomentFunctional:
        return self.P.functional

    @property
    def N(self) -> int:
        return self.relation.N

    @property
    def M(self) -> int:
        return self.relation.M

    @property
    def n_max(self) -> int:
        return self.relation.n_max

    def with_v(self, v: MomentFunctional | None) -> "RelationInstance":
        return RelationInstance(self.relation, self.P, self.Q, self.R, v)

    def require_v(self) -> MomentFunctional:
        if self.v is None:
            raise MissingFunctional("the functional v of the Q-side is not available")
        return self.v

    def Pbar(self, j: int) -> Poly:
        """P_j / <u, P_j^2>."""
        return self.P.polys[j] / self.P.norms[j]

    def Qbar(self, j: int) -> Poly:
        key = ("Qbar", j)
        if key not in self._cache:
            self._cache[key] = normalized(self.Q[j], self.require_v())
        return self._cache[key]

    def q_norm(self, j: int) -> Fraction:
        key = ("qnorm", j)
        if key not in self._cache:
            self._cache[key] = apply(self.require_v(), self.Q[j] * self.Q[j])
        return self._cache[key]

    def pair_v(self, f: Poly, g: Poly) -> Fraction:
        return apply(self.require_v(), f * g)

    def pair_u(self, f: Poly, g: Poly) -> Fraction:
        return apply(self.u, f * g)


def make_instance(P: Mops, rel: StructureRelation, v: MomentFunctional | None = None) -> RelationInstance:
    if P.n_max < rel.n_max:
        raise InsufficientCoefficients(f"P known through degree {P.n_max}, relation needs {rel.n_max}")
    polys = P.polys[:rel.n_max + 1]
    P = Mops(tuple(polys), P.functional, P.recurrence.truncated(min(rel.n_max, P.recurrence.n_max)),
             P.norms[:rel.n_max + 1])
    R = build_R(polys, rel)
    Q = solve_Q(R, rel)
    return RelationInstance(rel, P, tuple(Q), tuple(R), v)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def pairing_tail(inst: RelationInstance, k_max: int | None = None) -> list[tuple[str, int, Fraction]]:
    """Nonzero pairings <f_row, R_k> for k >= M+N, which must all vanish.

    Rows are P̄_j u (j < M) and Q̄_j v (j < N).  Returns the offending
    (row label, k, value) triples; an empty list means matrix A is square.
    """
    N, M = inst.N, inst.M
    k_max = inst.n_max if k_max is None else k_max
    bad = []
    for j in range(M):
        for k in range(M + N, k_max + 1):
            val = inst.pair_u(inst.Pbar(j), inst.R[k])
            if val:
                bad.append((f"Pbar_{j}u", k, val))
    for j in range(N):
        for k in range(M + N, k_max + 1):
            val = inst.pair_v(inst.Qbar(j), inst.R[k])
            if val:
                bad.append((f"Qbar_{j}v", k, val))
    return bad


def matrix_A(inst: RelationInstance, verify: bool = True) -> Matrix:
    """A[row][k] = <f_row, R_k>, rows P̄_0u..P̄_{M-1}u, Q̄_0v..Q̄_{N-1}v, k < M+N."""
    N, M = inst.N, inst.M
    if N + M == 0:
        return Matrix(0, 0, [])
    if N > 0:
        inst.require_v()
    if verify:
        bad = pairing_tail(inst, min(inst.n_max, 2 * (N + M)))
        if bad:
            label, k, val = bad[0]
            raise HypothesisFail(f"<{label}, R_{k}> = {val} != 0; the Q-side is not orthogonal "
                                 f"with respect to v", "orthogonality")
    rows = []
    for j in range(M):
        rows.append([inst.pair_u(inst.Pbar(j), inst.R[k]) for k in range(M + N)])
    for j in range(N):
        rows.append([inst.pair_v(inst.Qbar(j), inst.R[k]) for k in range(M + N)])
    return Matrix.from_rows(rows)


def dual_matrix_A(inst: RelationInstance) -> Matrix:
    """Matrix A from the abstract dual bases of P and Q, without any functional.

    The dual functional a_j of a monic basis P is 'coefficient of P_j', so the
    entry <a_j, R_k> is read off from the expansion of R_k in the P basis (and
    likewise for the Q rows).  Agrees with :func:`matrix_A` whenever P and Q
    are orthogonal with respect to u and v.
    """
    N, M = inst.N, inst.M
    size = N + M
    if size == 0:
        return Matrix(0, 0, [])
    if size > inst.n_max + 1:
        raise InsufficientCoefficients("relation table too short for matrix A")
    in_P = [expand_in_basis(inst.R[k], inst.P.polys) for k in range(size)]
    in_Q = [expand_in_basis(inst.R[k], inst.Q) for k in range(size)]
    rows = []
    for j in range(M):
        rows.append([in_P[k][j] if j < len(in_P[k]) else Fraction(0) for k in range(size)])
    for j in range(N):
        rows.append([in_Q[k][j] if j < len(in_Q[k]) else Fraction(0) for k in range(size)])
    return Matrix.from_rows(rows)


def _check_index(n: int, low: int, inst: RelationInstance, name: str) -> None:
    if n < low or n > inst.n_max:
        raise IndexOutOfRange(f"{name} defined for {low} <= n <= {inst.n_max}, got n={n}")


def matrix_B(inst: RelationInstance, n: int) -> Matrix:
    """N x N matrix B[j][l] = <Q̄_{N-1-l} v, P_{n-j}>.

    Columns run Q̄_{N-1} .. Q̄_0 left to right, rows P_n .. P_{n-N+1}.
    """
    N = inst.N
    if N < 1:
        raise IndexOutOfRange("matrix B needs N >= 1")
    _check_index(n, N - 1, inst, "B_n")
    P = inst.P.polys
    return Matrix.from_rows([[inst.pair_v(inst.Qbar(N - 1 - l), P[n - j]) for l in range(N)]
                             for j in range(N)])


def matrix_B_i(inst: RelationInstance, n: int, i: int) -> Matrix:
    """B_n with the column of Q̄_i (position N-1-i) replaced by (<Q̄_N v, P_{n-j}>)_j.

    With this indexing Cramer's rule reads lambda_i = -r det B_n^i / det B_n.
    """
    N = inst.N
    if not 0 <= i < N:
        raise IndexOutOfRange(f"column index {i} outside 0..{N - 1}")
    B = matrix_B(inst, n)
    P = inst.P.polys
    col = [inst.pair_v(inst.Qbar(N), P[n - j]) for j in range(N)]
    return B.replace_column(N - 1 - i, col)


def matrix_Btilde(inst: RelationInstance, n: int) -> Matrix:
    """M x M matrix B̃[j][l] = <P̄_{M-1-l} u, Q_{n-j}>."""
    M = inst.M
    if M < 1:
        raise IndexOutOfRange("matrix B-tilde needs M >= 1")
    _check_index(n, M - 1, inst, "B~_n")
    return Matrix.from_rows([[inst.pair_u(inst.Pbar(M - 1 - l), inst.Q[n - j]) for l in range(M)]
                             for j in range(M)])


def matrix_Btilde_i(inst: RelationInstance, n: int, i: int) -> Matrix:
    """B̃_n with the column of P̄_i replaced by (<P̄_M u, Q_{n-j}>)_j."""
    M = inst.M
    if not 0 <= i < M:
        raise IndexOutOfRange(f"column index {i} outside 0..{M - 1}")
    B = matrix_Btilde(inst, n)
    col = [inst.pair_u(inst.Pbar(M), inst.Q[n - j]) for j in range(M)]
    return B.replace_column(M - 1 - i, col)


def q_orthogonal_to_v(inst: RelationInstance) -> tuple[int, int, Fraction] | None:
    """First (n, m, <v, Q_n Q_m>) with n != m and a nonzero pairing, else None."""
    v = inst.require_v()
    for n in range(len(inst.Q)):
        for m in range(n):
            if (inst.Q[n].degree or 0) + m > v.K:
                break
            val = apply(v, inst.Q[n] * inst.Q[m])
            if val:
                return n, m, val
    return None


def check_lemma_dets(inst: RelationInstance, n_from: int, n_to: int) -> CheckReport:
    """Exact residuals of the determinant recurrences

        det B_n  - (-1)^N r_{N,n} det B_{n-1}
        det B̃_n - (-1)^M s_{M,n} det B̃_{n-1}

    for n in [max(n_from, N+M), n_to].  Part a needs v; part b only u.
    """
    N, M = inst.N, inst.M
    rep = CheckReport("lemma_dets")
    lo = max(n_from, N + M)
    parts: dict[str, object] = {}

    if N >= 1:
        # entries of B_n pair v with polynomials of degree up to n + N - 1
        a_to = min(n_to, inst.require_v().K - N + 1)
        if a_to < n_to:
            rep.annotations.append(f"part a evaluated only through n = {a_to} (moment depth of v)")
        residuals = {}
        prev = det(matrix_B(inst, lo - 1))
        for n in range(lo, a_to + 1):
            cur = det(matrix_B(inst, n))
            res = cur - (-1) ** N * inst.relation.r_lead(n) * prev
            residuals[n] = res
            if res and rep.status != FAIL:
                rep.fail("lemma_a_residual", n, res)
            prev = cur
        parts["a"] = {"residuals": residuals}
        bad = q_orthogonal_to_v(inst)
        if bad is not None:
            rep.annotations.append(
                f"part a hypothesis fails: <v, Q_{bad[0]} Q_{bad[1]}> = {bad[2]}")
    else:
        parts["a"] = "not_applicable"

    if M >= 1:
        residuals = {}
        prev = det(matrix_Btilde(inst, lo - 1))
        first_b = True
        for n in range(lo, n_to + 1):
            cur = det(matrix_Btilde(inst, n))
            res = cur - (-1) ** M * inst.relation.s_lead(n) * prev
            residuals[n] = res
            if res and first_b:
                first_b = False
                rep.fail("lemma_b_residual", n, res)
            prev = cur
        parts["b"] = {"residuals": residuals}
    else:
        parts["b"] = "not_applicable"

    if N == 0 and M == 0:
        rep.status = NOT_APPLICABLE
        rep.reason = "N = M = 0"
    rep.details = parts
    return rep


def functional_from_sequence(Q: Sequence[Poly]) -> tuple[MomentFunctional, bool]:
    """A normalized functional for which the monic sequence Q is as orthogonal as possible.

    If Q satisfies a three-term recurrence with nonzero gammas, the moments come
    from that recurrence (depth 2*len(Q) - 3) and the flag is True.  Otherwise
    the moments mu_0..mu_{n} are fixed by <v, 1> = 1 and <v, Q_k> = 0 for k >= 1,
    and the flag is False.
    """
    from .mops import favard_oracle, max_moment_depth, moments_from_recurrence

    verdict = favard_oracle(Q)
    if verdict.ok and len(Q) >= 2:
        rc = verdict.recurrence
        return moments_from_recurrence(rc, max_moment_depth(rc)), True
    mus = [Fraction(1)]
    for n in range(1, len(Q)):
        c = Q[n].coeffs
        mus.append(-sum((c[k] * mus[k] for k in range(n)), Fraction(0)))
    return MomentFunctional(mus), False


def fit_coefficients(R: Sequence[Poly], basis: Sequence[Poly], depth: int, label: str = "r") -> list[list[Fraction]]:
    """Table c[i-1][n] with R_n = basis_n + sum_{i<=depth} c_{i,n} basis_{n-i}.

    Raises InvalidRelation when some R_n is not monic over basis_n or needs
    basis elements below index n - depth.
    """
    table = [[Fraction(0)] * len(R) for _ in range(depth)]
    for n, Rn in enumerate(R):
        coeffs = expand_in_basis(Rn, basis[:n + 1])
        if len(coeffs) != n + 1 or coeffs[n] != 1:
            raise InvalidRelation(f"{label}-side expansion of R_{n} is not monic in degree {n}")
        for k in range(n):
            i = n - k
            if i > depth:
                if coeffs[k]:
                    raise InvalidRelation(
                        f"R_{n} has a component on index {k}, deeper than {label}-depth {depth}")
            else:
                table[i - 1][n] = coeffs[k]
    return table


def fit_relation(P: Sequence[Poly], Q: Sequence[Poly], R: Sequence[Poly], N: int, M: int) -> StructureRelation:
    """The structure relation read off from explicit P, Q and R (the fit oracle)."""
    n_max = len(R) - 1
    return StructureRelation(N, M, fit_coefficients(R, P, N, "r"), fit_coefficients(R, Q, M, "s"), n_max)
