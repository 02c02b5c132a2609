"""Truncated moment functionals and the operations on them.

A functional u is stored through its moments mu_k = <u, x^k>, k = 0..K.
Every operation checks the truncation depth K before reading a moment.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import TruncationExceeded, ZeroNorm
from .exact import Matrix, Poly, Scalar, det, rat


@dataclass(frozen=True)
class MomentFunctional:
    moments: tuple[Fraction, ...]

    def __init__(self, moments: Iterable[Scalar | str]):
        ms = tuple(rat(m) for m in moments)
        if not ms:
            raise ValueError("a functional needs at least mu_0")
        object.__setattr__(self, "moments", ms)

    @property
    def K(self) -> int:
        return len(self.moments) - 1

    def moment(self, k: int) -> Fraction:
        if k > self.K:
            raise TruncationExceeded(f"moment {k} requested, truncation depth is {self.K}")
        return self.moments[k]

    def is_normalized(self) -> bool:
        return self.moments[0] == 1

    def normalize(self) -> "MomentFunctional":
        m0 = self.moments[0]
        if m0 == 0:
            raise ZeroNorm("cannot normalize a functional with mu_0 = 0")
        return MomentFunctional(m / m0 for m in self.moments)

    def truncate(self, K: int) -> "MomentFunctional":
        if K > self.K:
            raise TruncationExceeded(f"cannot extend depth {self.K} to {K}")
        return MomentFunctional(self.moments[:K + 1])


@dataclass(frozen=True)
class RegularityCertificate:
    n_checked: int
    hankel_dets: tuple[Fraction, ...]

    @property
    def regular(self) -> bool:
        return all(d != 0 for d in self.hankel_dets)

    @property
    def first_singular(self) -> int | None:
        return next((m for m, d in enumerate(self.hankel_dets) if d == 0), None)


def apply(u: MomentFunctional, p: Poly) -> Fraction:
    """<u, p>."""
    if p.degree is not None and p.degree > u.K:
        raise TruncationExceeded(f"degree {p.degree} exceeds truncation depth {u.K}")
    return sum((c * m for c, m in zip(p.coeffs, u.moments)), Fraction(0))


def poly_mod(phi: Poly, u: MomentFunctional) -> MomentFunctional:
    """The functional phi*u, defined by <phi u, x^k> = <u, phi x^k>.

    The result keeps the raw scale: it is not renormalized.
    """
    d = phi.degree
    if d is None:
        raise ValueError("modification by the zero polynomial")
    if d > u.K:
        raise TruncationExceeded(f"degree {d} exceeds truncation depth {u.K}")
    return MomentFunctional(
        sum((c * u.moments[k + j] for j, c in enumerate(phi.coeffs)), Fraction(0))
        for k in range(u.K - d + 1)
    )


def normalized(p: Poly, u: MomentFunctional) -> Poly:
    """p / <u, p^2>."""
    norm = apply(u, p * p)
    if norm == 0:
        raise ZeroNorm(f"<u, p^2> = 0 for p = {p}")
    return p / norm


def hankel_matrix(u: MomentFunctional, m: int) -> Matrix:
    """(m+1)x(m+1) Hankel matrix [mu_{i+j}]."""
    if 2 * m > u.K:
        raise TruncationExceeded(f"Hankel order {m} needs moments up to {2 * m}, depth is {u.K}")
    return Matrix(m + 1, m + 1, [u.moments[i + j] for i in range(m + 1) for j in range(m + 1)])


def hankel_regular(u: MomentFunctional, n: int) -> RegularityCertificate:
    if 2 * n > u.K:
        raise TruncationExceeded(f"regularity through degree {n} needs moments up to {2 * n}, depth is {u.K}")
    return RegularityCertificate(n, tuple(det(hankel_matrix(u, m)) for m in range(n + 1)))
