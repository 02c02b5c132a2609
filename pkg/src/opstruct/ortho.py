"""Deciding orthogonality of R and Q from the relation coefficients alone.

With P_{n+1} = (x - beta_n) P_n - gamma_n P_{n-1}, the candidate recurrence of
R_n = P_n + sum r_{i,n} P_{n-i} is (beta*, gamma*), obtained by matching the two
highest subleading coefficients; the candidate recurrence of Q is (beta~, gamma~),
obtained from (beta*, gamma*) and s in the same way.  R (resp. Q) is orthogonal
exactly when the leftover coefficients A_{i,n} (resp. B_{i,n}) vanish.

A_{i,n} is the coefficient of P_{n-i} in R_{n+1} - (x - beta*_n) R_n + gamma*_n R_{n-1}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import HypothesisFail, InsufficientCoefficients
from .exact import det
from .mops import RecurrenceCoeffs, favard_oracle, generate
from .relation import RelationInstance, StructureRelation, build_R, dual_matrix_A, solve_Q
from .report import CheckReport

ZERO = Fraction(0)


@dataclass(frozen=True)
class StarCoeffs:
    beta_star: tuple[Fraction, ...]    # beta*_0 .. beta*_{n_max-1}
    gamma_star: tuple[Fraction, ...]   # gamma*_1 .. gamma*_{n_max-1}

    def beta(self, n: int) -> Fraction:
        return self.beta_star[n]

    def gamma(self, n: int) -> Fraction:
        return self.gamma_star[n - 1] if n >= 1 else ZERO

    @property
    def n_max(self) -> int:
        return len(self.beta_star)

    def as_recurrence(self) -> RecurrenceCoeffs:
        """Raises FavardViolation if some gamma* vanishes."""
        return RecurrenceCoeffs(self.beta_star, self.gamma_star)


@dataclass(frozen=True)
class TildeCoeffs:
    beta_tilde: tuple[Fraction, ...]
    gamma_tilde: tuple[Fraction, ...]

    def beta(self, n: int) -> Fraction:
        return self.beta_tilde[n]

    def gamma(self, n: int) -> Fraction:
        return self.gamma_tilde[n - 1] if n >= 1 else ZERO


@dataclass(frozen=True)
class ConditionGrid:
    family: str
    values: dict[tuple[int, int], Fraction] = field(default_factory=dict)
    ranges: tuple[tuple[int, int, int], ...] = ()   # (i, n_first, n_last)

    @property
    def violations(self) -> list[tuple[int, int, Fraction]]:
        return [(i, n, v) for (i, n), v in sorted(self.values.items(), key=lambda kv: (kv[0][1], kv[0][0]))
                if v != 0]

    @property
    def all_zero(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        from .exact import fmt_rational
        return {
            "family": self.family,
            "violations": [{"i": i, "n": n, "value": fmt_rational(v)} for i, n, v in self.violations],
            "checked_ranges": [{"i": i, "n_from": a, "n_to": b} for i, a, b in self.ranges],
        }


def _rc_beta(rc: RecurrenceCoeffs, n: int) -> Fraction:
    return rc.beta(n)


def _rc_gamma(rc: RecurrenceCoeffs, n: int) -> Fraction:
    return rc.gamma(n) if n >= 1 else ZERO


def star_coeffs(rc: RecurrenceCoeffs, rel: StructureRelation, n_max: int) -> StarCoeffs:
    """beta*_n = beta_n + r_{1,n} - r_{1,n+1};
    gamma*_n = gamma_n + r_{1,n}(beta_{n-1} - beta*_n) + r_{2,n} - r_{2,n+1}."""
    if rc.n_max < n_max or rel.n_max < n_max:
        raise InsufficientCoefficients(f"need recurrence and relation through n_max={n_max}")
    r = rel.r_at
    bs = [rc.beta(n) + r(1, n) - r(1, n + 1) for n in range(n_max)]
    gs = [rc.gamma(n) + r(1, n) * (rc.beta(n - 1) - bs[n]) + r(2, n) - r(2, n + 1)
          for n in range(1, n_max)]
    return StarCoeffs(tuple(bs), tuple(gs))


def tilde_coeffs(star: StarCoeffs, rel: StructureRelation, n_max: int) -> TildeCoeffs:
    """beta~_n = beta*_n + s_{1,n+1} - s_{1,n};
    gamma~_n = gamma*_n + s_{1,n}(beta*_n - beta~_{n-1}) + s_{2,n+1} - s_{2,n}."""
    if star.n_max < n_max or rel.n_max < n_max:
        raise InsufficientCoefficients(f"need coefficients through n_max={n_max}")
    s = rel.s_at
    bt = [star.beta(n) + s(1, n + 1) - s(1, n) for n in range(n_max)]
    gt = [star.gamma(n) + s(1, n) * (star.beta(n) - bt[n - 1]) + s(2, n + 1) - s(2, n)
          for n in range(1, n_max)]
    return TildeCoeffs(tuple(bt), tuple(gt))


def a_value(rc: RecurrenceCoeffs, rel: StructureRelation, star: StarCoeffs, i: int, n: int) -> Fraction:
    """A_{i,n} = r_{i+1,n+1} - r_{i+1,n} + r_{i,n}(beta*_n - beta_{n-i})
               + r_{i-1,n-1} gamma*_n - r_{i-1,n} gamma_{n+1-i}."""
    r = rel.r_at
    val = r(i + 1, n + 1) - r(i + 1, n)
    if r(i, n):
        val += r(i, n) * (star.beta(n) - _rc_beta(rc, n - i))
    if r(i - 1, n - 1):
        val += r(i - 1, n - 1) * star.gamma(n)
    if r(i - 1, n):
        val -= r(i - 1, n) * _rc_gamma(rc, n + 1 - i)
    return val


def b_value(star: StarCoeffs, tilde: TildeCoeffs, rel: StructureRelation, i: int, n: int) -> Fraction:
    """B_{i,n} = s_{i+1,n} - s_{i+1,n+1} + s_{i,n}(beta~_{n-i} - beta*_n)
               + s_{i-1,n} gamma~_{n+1-i} - s_{i-1,n-1} gamma*_n."""
    s = rel.s_at
    val = s(i + 1, n) - s(i + 1, n + 1)
    if s(i, n):
        val += s(i, n) * (tilde.beta(n - i) - star.beta(n))
    if s(i - 1, n):
        val += s(i - 1, n) * tilde.gamma(n + 1 - i)
    if s(i - 1, n - 1):
        val -= s(i - 1, n - 1) * star.gamma(n)
    return val


def _grid(family: str, depth: int, n_max: int, n_from: int, value) -> ConditionGrid:
    # i runs over 2..depth+1 (the i < depth, i = depth and i = depth+1 conditions),
    # each for i <= n <= n_max - 1
    values = {}
    ranges = []
    for i in range(2, depth + 2):
        lo = max(i, n_from)
        if lo > n_max - 1:
            continue
        ranges.append((i, lo, n_max - 1))
        for n in range(lo, n_max):
            values[(i, n)] = value(i, n)
    return ConditionGrid(family, values, tuple(ranges))


def condition_values_A(rc: RecurrenceCoeffs, rel: StructureRelation, star: StarCoeffs, n_max: int,
                       n_from: int = 0) -> ConditionGrid:
    return _grid("A", rel.N, n_max, n_from, lambda i, n: a_value(rc, rel, star, i, n))


def condition_values_B(star: StarCoeffs, tilde: TildeCoeffs, rel: StructureRelation, n_max: int,
                       n_from: int = 0) -> ConditionGrid:
    return _grid("B", rel.M, n_max, n_from, lambda i, n: b_value(star, tilde, rel, i, n))


def _require_nonzero(values, label: str, lo: int, hi: int) -> None:
    for n in range(lo, hi + 1):
        if values(n) == 0:
            raise HypothesisFail(f"{label}_{n} = 0 for n = {n} in [{lo}, {hi}]", f"{label} nonvanishing")


def _grid_failures(rep: CheckReport, grid: ConditionGrid) -> None:
    for i, n, v in grid.violations:
        rep.fail(f"{grid.family}_{i}", n, v)


def check_R_orthogonal(rc: RecurrenceCoeffs, rel: StructureRelation, n_max: int) -> CheckReport:
    """R_0..R_{n_max} is a MOPS iff gamma*_i != 0 for i <= N and every A_{i,n} vanishes."""
    N = rel.N
    rep = CheckReport("prop31")
    R = build_R(generate(rc, n_max), rel.truncated(n_max))
    if N == 0:
        rep.annotations.append("N = 0: R coincides with P")
    else:
        _require_nonzero(rel.r_lead, f"r_{N}", N, n_max)
    star = star_coeffs(rc, rel, n_max)
    for i in range(1, min(N, n_max - 1) + 1):
        if star.gamma(i) == 0:
            rep.fail("gamma_star", i, ZERO)
    grid = condition_values_A(rc, rel, star, n_max)
    _grid_failures(rep, grid)
    oracle = favard_oracle(R)
    agrees = oracle.ok == rep.passed
    if oracle.ok and rep.passed:
        agrees = (oracle.recurrence.betas == star.beta_star[:n_max]
                  and oracle.recurrence.gammas == star.gamma_star)
    rep.details.update({"A": grid, "beta_star": star.beta_star, "gamma_star": star.gamma_star,
                        "oracle": oracle.ok, "oracle_agrees": agrees})
    return rep


def _tilde_boundary(tilde: TildeCoeffs, lo: int, n_max: int) -> list[int]:
    """Indices k in [lo, n_max - 1] with gamma~_k = 0.

    The B_{M+1,n} conditions certify gamma~_{n-M} only up to n_max-1-M, so the
    top M indices have to be checked directly at a finite truncation.
    """
    return [k for k in range(max(lo, 1), n_max) if tilde.gamma(k) == 0]


def check_Q_orthogonal(star: StarCoeffs, rel: StructureRelation, n_max: int) -> CheckReport:
    """Given that R is a MOPS with recurrence ``star``, Q is one iff every B_{i,n} vanishes."""
    M = rel.M
    rep = CheckReport("prop32")
    try:
        rc_star = star.as_recurrence().truncated(n_max)
    except Exception as exc:  # a vanishing gamma* means R is not a MOPS
        raise HypothesisFail(f"R is not a MOPS: {exc}", "R orthogonal") from exc
    R = generate(rc_star, n_max)
    Q = solve_Q(R, rel.truncated(n_max))
    tilde = tilde_coeffs(star, rel, n_max)
    if M == 0:
        rep.annotations.append("M = 0: Q coincides with R")
    else:
        _require_nonzero(rel.s_lead, f"s_{M}", M, n_max)
    grid = condition_values_B(star, tilde, rel, n_max)
    _grid_failures(rep, grid)
    for k in _tilde_boundary(tilde, n_max - M, n_max) if M else []:
        rep.fail("gamma_tilde", k, ZERO)
    oracle = favard_oracle(Q)
    rep.details.update({"B": grid, "beta_tilde": tilde.beta_tilde, "gamma_tilde": tilde.gamma_tilde,
                        "oracle": oracle.ok, "oracle_agrees": oracle.ok == rep.passed})
    return rep


FORWARD_NOTE = ("forward direction (Q orthogonal implies the conditions) needs only "
                "det A != 0, r_{N,N+M} != 0 and s_{M,N+M} != 0")
CONVERSE_NOTE = ("converse direction uses r_{N,n} s_{M,n} != 0 for every n >= N+M; "
                 "three-term recurrence of Q pre-verified for n <= N+M")


def theorem_main_check(inst: RelationInstance, n_max: int | None = None) -> CheckReport:
    """Orthogonality of Q decided from the relation, the recurrence of P and a short prefix.

    Verdict is the conjunction of
      (i)   Q_0..Q_{N+M+1} satisfy a three-term recurrence whose coefficients are
            (beta~, gamma~), with gamma~_k != 0 for k <= N (this also covers k <= N+M);
      (ii)  A_{i,n} = 0 for n >= N+M+1;
      (iii) B_{i,n} = 0 for n >= N+M+1;
      (iv)  the coupled coefficient identities between (beta~, gamma~) and (beta, gamma);
      (v)   gamma~_k != 0 for the top M indices, which (iii) cannot reach at this truncation.
    The full Favard run on Q_0..Q_{n_max} is reported alongside as ground truth.
    """
    rel = inst.relation
    N, M = rel.N, rel.M
    n_max = inst.n_max if n_max is None else n_max
    rep = CheckReport("thm33", annotations=[FORWARD_NOTE, CONVERSE_NOTE])
    rc = inst.P.recurrence
    n0 = N + M

    dA = det(dual_matrix_A(inst))
    if dA == 0:
        raise HypothesisFail("det A = 0", "det A != 0")
    for n in range(n0, n_max + 1):
        if rel.r_lead(n) * rel.s_lead(n) == 0:
            raise HypothesisFail(f"r_{{N,{n}}} s_{{M,{n}}} = 0", "r_{N,n} s_{M,n} != 0")

    star = star_coeffs(rc, rel, n_max)
    tilde = tilde_coeffs(star, rel, n_max)
    Q = inst.Q[:n_max + 1]

    # (i) prefix
    top = min(n0 + 1, n_max)
    prefix = favard_oracle(Q[:top + 1])
    if not prefix.ok:
        rep.fail("prefix_recurrence", prefix.failed_at, prefix.witness[1])
    else:
        for n in range(top):
            if prefix.recurrence.betas[n] != tilde.beta(n):
                rep.fail("prefix_beta", n, prefix.recurrence.betas[n] - tilde.beta(n))
            if n >= 1 and prefix.recurrence.gammas[n - 1] != tilde.gamma(n):
                rep.fail("prefix_gamma", n, prefix.recurrence.gammas[n - 1] - tilde.gamma(n))
    for k in range(1, min(N, n_max - 1) + 1):
        if tilde.gamma(k) == 0:
            rep.fail("gamma_tilde", k, ZERO)

    # (ii), (iii)
    grid_a = condition_values_A(rc, rel, star, n_max, n_from=n0 + 1)
    grid_b = condition_values_B(star, tilde, rel, n_max, n_from=n0 + 1)
    _grid_failures(rep, grid_a)
    _grid_failures(rep, grid_b)

    # (iv)
    r, s = rel.r_at, rel.s_at
    for n in range(n_max):
        lhs = tilde.beta(n) + s(1, n) - s(1, n + 1)
        rhs = rc.beta(n) + r(1, n) - r(1, n + 1)
        if lhs != rhs:
            rep.fail("coupled_beta", n, lhs - rhs)
        if n >= 1:
            lhs = tilde.gamma(n) - s(1, n) * (star.beta(n) - tilde.beta(n - 1)) - s(2, n + 1) + s(2, n)
            rhs = rc.gamma(n) + r(1, n) * (rc.beta(n - 1) - star.beta(n)) + r(2, n) - r(2, n + 1)
            if lhs != rhs:
                rep.fail("coupled_gamma", n, lhs - rhs)

    # (v)
    if M:
        for k in _tilde_boundary(tilde, max(N + 1, n_max - M), n_max):
            rep.fail("gamma_tilde", k, ZERO)

    truth = favard_oracle(Q)
    rep.details.update({
        "A": grid_a, "B": grid_b, "detA": dA,
        "beta_tilde": tilde.beta_tilde, "gamma_tilde": tilde.gamma_tilde,
        "oracle": truth.ok, "oracle_agrees": truth.ok == rep.passed,
    })
    if not truth.ok:
        rep.details["oracle_witness"] = {"n": truth.failed_at, "index": truth.witness[0],
                                         "value": truth.witness[1]}
    return rep
