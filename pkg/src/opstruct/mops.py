"""Monic orthogonal polynomial sequences and their three-term recurrences.

Convention used throughout:

    P_{n+1}(x) = (x - beta_n) P_n(x) - gamma_n P_{n-1}(x),  P_0 = 1, P_{-1} = 0.

``RecurrenceCoeffs`` stores beta_0..beta_{n_max-1} and gamma_1..gamma_{n_max-1};
that is exactly what is needed to build P_0..P_{n_max}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import (
    FavardViolation,
    InsufficientCoefficients,
    InvalidParameter,
    NotABasis,
    NotRegular,
)
from .exact import Poly, Scalar, expand_in_basis, rat
from .functionals import MomentFunctional, apply, hankel_regular


@dataclass(frozen=True)
class RecurrenceCoeffs:
    betas: tuple[Fraction, ...]
    gammas: tuple[Fraction, ...]  # gammas[n-1] is gamma_n

    def __init__(self, betas: Iterable[Scalar | str], gammas: Iterable[Scalar | str]):
        bs = tuple(rat(b) for b in betas)
        gs = tuple(rat(g) for g in gammas)
        for n, g in enumerate(gs, start=1):
            if g == 0:
                raise FavardViolation(f"gamma_{n} = 0 violates the Favard condition gamma_n != 0")
        object.__setattr__(self, "betas", bs)
        object.__setattr__(self, "gammas", gs)

    @property
    def n_max(self) -> int:
        return min(len(self.betas), len(self.gammas) + 1)

    def beta(self, n: int) -> Fraction:
        if not 0 <= n < len(self.betas):
            raise InsufficientCoefficients(f"beta_{n} not available ({len(self.betas)} betas)")
        return self.betas[n]

    def gamma(self, n: int) -> Fraction:
        if not 1 <= n <= len(self.gammas):
            raise InsufficientCoefficients(f"gamma_{n} not available ({len(self.gammas)} gammas)")
        return self.gammas[n - 1]

    def truncated(self, n_max: int) -> "RecurrenceCoeffs":
        if n_max > self.n_max:
            raise InsufficientCoefficients(f"need n_max={n_max}, have {self.n_max}")
        return RecurrenceCoeffs(self.betas[:n_max], self.gammas[:max(n_max - 1, 0)])


@dataclass(frozen=True)
class Mops:
    polys: tuple[Poly, ...]
    functional: MomentFunctional
    recurrence: RecurrenceCoeffs
    norms: tuple[Fraction, ...]

    @property
    def n_max(self) -> int:
        return len(self.polys) - 1


@dataclass(frozen=True)
class FavardVerdict:
    """Outcome of :func:`favard_oracle`.

    On failure ``failed_at`` is the n for which x*seq[n] is not a three-term
    combination and ``witness`` is (basis index, offending coefficient);
    ``recurrence`` then holds the coefficients extracted before the failure.
    """
    ok: bool
    recurrence: RecurrenceCoeffs
    failed_at: int | None = None
    witness: tuple[int, Fraction] | None = None


def generate(rc: RecurrenceCoeffs, n_max: int) -> list[Poly]:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > 0 and rc.n_max < n_max:
        raise InsufficientCoefficients(f"generating P_0..P_{n_max} needs n_max={n_max}, have {rc.n_max}")
    x = Poly.x()
    polys = [Poly.const(1)]
    prev = Poly()
    for n in range(n_max):
        nxt = (x - rc.beta(n)) * polys[n]
        if n >= 1:
            nxt = nxt - prev * rc.gamma(n)
        prev = polys[n]
        polys.append(nxt)
    return polys


def max_moment_depth(rc: RecurrenceCoeffs) -> int:
    """Largest K for which :func:`moments_from_recurrence` has enough coefficients."""
    return max(2 * rc.n_max - 1, 0)


def moments_from_recurrence(rc: RecurrenceCoeffs, K: int, mu0: Scalar = 1) -> MomentFunctional:
    """Moments mu_0..mu_K of the functional whose MOPS has recurrence ``rc``.

    Runs multiplication by x on coordinate vectors in the P-basis; mu_k is the
    P_0 coordinate of x^k.  Coordinates that cannot return to index 0 within
    the remaining steps are dropped, so only beta_i, gamma_i with i <= K/2 are
    touched.
    """
    if K > max_moment_depth(rc):
        raise InsufficientCoefficients(
            f"moments through {K} need n_max >= {(K + 2) // 2}, recurrence has {rc.n_max}")
    mu0 = rat(mu0)
    vec = {0: Fraction(1)}
    moments = [mu0]
    for step in range(1, K + 1):
        horizon = K - step
        new: dict[int, Fraction] = {}
        for i, c in vec.items():
            if i + 1 <= horizon:
                new[i + 1] = new.get(i + 1, Fraction(0)) + c
            if i <= horizon:
                new[i] = new.get(i, Fraction(0)) + rc.beta(i) * c
            if i >= 1 and i - 1 <= horizon:
                new[i - 1] = new.get(i - 1, Fraction(0)) + rc.gamma(i) * c
        vec = {i: c for i, c in new.items() if c != 0}
        moments.append(mu0 * vec.get(0, Fraction(0)))
    return MomentFunctional(moments)


def recurrence_from_moments(u: MomentFunctional, n_max: int) -> RecurrenceCoeffs:
    """beta_n = <u, x P_n^2>/h_n, gamma_n = h_n/h_{n-1} by exact Stieltjes orthogonalization."""
    return _orthogonalize(u, n_max)[1]


def build_mops(u: MomentFunctional, n_max: int) -> Mops:
    """MOPS of ``u`` through degree n_max, with recurrence and norms h_n = <u, P_n^2>."""
    polys, rc, norms = _orthogonalize(u, n_max)
    return Mops(tuple(polys), u, rc, tuple(norms))


def mops_from_recurrence(rc: RecurrenceCoeffs, n_max: int, K: int | None = None) -> Mops:
    """MOPS built from the recurrence; the functional is recovered through depth K.

    The norm h_{n_max} = gamma_1 ... gamma_{n_max} needs one gamma beyond what
    generating P_{n_max} uses, so ``rc`` must supply gamma_1..gamma_{n_max}.
    """
    if K is None:
        K = max_moment_depth(rc)
    if len(rc.gammas) < n_max:
        raise InsufficientCoefficients(
            f"norms through degree {n_max} need gamma_1..gamma_{n_max}, have {len(rc.gammas)} gammas")
    polys = generate(rc, n_max)
    u = moments_from_recurrence(rc, K)
    norms = [Fraction(1)]
    for n in range(1, n_max + 1):
        norms.append(norms[-1] * rc.gamma(n))
    return Mops(tuple(polys), u, rc.truncated(n_max), tuple(norms))


def _orthogonalize(u: MomentFunctional, n_max: int):
    if 2 * n_max > u.K:
        raise InsufficientCoefficients(f"n_max={n_max} needs moments through {2 * n_max}, depth is {u.K}")
    x = Poly.x()
    polys = [Poly.const(1)]
    h0 = u.moments[0]
    if h0 == 0:
        raise NotRegular("mu_0 = 0: Hankel determinant Delta_0 vanishes")
    norms = [h0]
    betas: list[Fraction] = []
    gammas: list[Fraction] = []
    prev = Poly()
    for n in range(n_max):
        p = polys[n]
        beta = apply(u, x * p * p) / norms[n]
        betas.append(beta)
        nxt = (x - beta) * p
        if n >= 1:
            g = norms[n] / norms[n - 1]
            gammas.append(g)
            nxt = nxt - prev * g
        prev = p
        polys.append(nxt)
        h = apply(u, nxt * nxt)
        if h == 0:
            raise NotRegular(f"<u, P_{n + 1}^2> = 0: functional is not regular at degree {n + 1}")
        norms.append(h)
    return polys, RecurrenceCoeffs(betas, gammas), norms


def favard_oracle(seq: Sequence[Poly]) -> FavardVerdict:
    """Decide whether a monic sequence satisfies a three-term recurrence with gamma_n != 0.

    x*seq[n] is expanded in {seq[k]} by back-substitution; the expansion must
    stop at index n-1 and its coefficient there must be nonzero.
    """
    for n, p in enumerate(seq):
        if p.degree != n or not p.is_monic():
            raise NotABasis(f"seq[{n}] is not monic of degree {n}: {p}")
    x = Poly.x()
    betas: list[Fraction] = []
    gammas: list[Fraction] = []
    for n in range(len(seq) - 1):
        c = expand_in_basis(x * seq[n], seq[:n + 2])
        for k in range(n - 1):
            if c[k] != 0:
                return FavardVerdict(False, RecurrenceCoeffs(betas, gammas), n, (k, c[k]))
        if n >= 1 and c[n - 1] == 0:
            return FavardVerdict(False, RecurrenceCoeffs(betas, gammas), n, (n - 1, c[n - 1]))
        betas.append(c[n])
        if n >= 1:
            gammas.append(c[n - 1])
    return FavardVerdict(True, RecurrenceCoeffs(betas, gammas))


# ---------------------------------------------------------------------------
# Classical families from closed-form moments
# ---------------------------------------------------------------------------

FAMILIES = ("legendre", "chebyshev_T", "chebyshev_U", "jacobi", "laguerre", "hermite")


def _pochhammer(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= a + j
    return out


def _even_only(K: int, even_moment) -> list[Fraction]:
    return [even_moment(k // 2) if k % 2 == 0 else Fraction(0) for k in range(K + 1)]


def family_moments(name: str, K: int, alpha: Scalar | str | None = None,
                   beta: Scalar | str | None = None) -> MomentFunctional:
    """Normalized moments (mu_0 = 1) of a classical weight, exact through K."""
    if K < 0:
        raise InvalidParameter("K must be nonnegative")
    if name == "legendre":
        ms = _even_only(K, lambda k: Fraction(1, 2 * k + 1))
    elif name == "chebyshev_T":
        ms = _even_only(K, lambda k: Fraction(comb(2 * k, k), 4 ** k))
    elif name == "chebyshev_U":
        ms = _even_only(K, lambda k: Fraction(comb(2 * k, k), (k + 1) * 4 ** k))
    elif name == "hermite":
        # weight exp(-x^2): mu_{2k} = (2k-1)!!/2^k
        ms = _even_only(K, lambda k: _pochhammer(Fraction(1, 2), k))
    elif name == "laguerre":
        a = rat(alpha if alpha is not None else 0)
        if a <= -1:
            raise InvalidParameter(f"laguerre alpha must exceed -1, got {a}")
        ms = [_pochhammer(a + 1, k) for k in range(K + 1)]
    elif name == "jacobi":
        if alpha is None or beta is None:
            raise InvalidParameter("jacobi needs alpha and beta")
        a, b = rat(alpha), rat(beta)
        if a <= -1 or b <= -1:
            raise InvalidParameter(f"jacobi parameters must exceed -1, got ({a}, {b})")
        # t = (1+x)/2 is Beta(b+1, a+1) distributed for the weight (1-x)^a (1+x)^b
        t_moments = [_pochhammer(b + 1, j) / _pochhammer(a + b + 2, j) for j in range(K + 1)]
        ms = [sum((comb(k, j) * 2 ** j * (-1) ** (k - j) * t_moments[j] for j in range(k + 1)), Fraction(0))
              for k in range(K + 1)]
    else:
        raise InvalidParameter(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    return MomentFunctional(ms)


def classical_family(name: str, K: int, alpha: Scalar | str | None = None,
                     beta: Scalar | str | None = None) -> tuple[MomentFunctional, RecurrenceCoeffs]:
    """Exact moments through K and the recurrence derived from them (n_max = K // 2)."""
    u = family_moments(name, K, alpha, beta)
    return u, recurrence_from_moments(u, K // 2)


def is_regular(u: MomentFunctional, n: int) -> bool:
    return hankel_regular(u, n).regular
