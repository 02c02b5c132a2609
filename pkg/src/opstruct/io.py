"""Instance documents: JSON in, exact objects out, and back.

Document layout::

    {
      "u": <source>,                      # required
      "v": <source>,                      # optional; derived from Q when absent
      "relation": {"N": 0, "M": 2, "r": {}, "s": {"1": ["0", ...], "2": ["0", "0", "-1/4", ...]}},
      "config": {"n_max": 12, "horizon": 30, "checks": ["initial", ...]}
    }

A source is one of
    {"type": "family", "name": "jacobi", "alpha": "1/2", "beta": "0"}
    {"type": "moments", "moments": ["1", "0", "1/3", ...]}
    {"type": "recurrence", "beta": [...], "gamma": [...]}     # gamma lists gamma_1, gamma_2, ...
Rationals are strings "p/q" or integers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import (
    FavardViolation,
    InsufficientCoefficients,
    InvalidRational,
    SchemaError,
)
from .exact import fmt_rational, parse_rational
from .functionals import MomentFunctional
from .mops import (
    FAMILIES,
    Mops,
    RecurrenceCoeffs,
    build_mops,
    family_moments,
    max_moment_depth,
    moments_from_recurrence,
    mops_from_recurrence,
)
from .relation import RelationInstance, StructureRelation, functional_from_sequence, make_instance

ALL_CHECKS = ("regularity", "initial", "lemma_dets", "inverse", "constancy", "nonvanishing",
              "uniqueness", "prop31", "prop32", "thm33")
INVERSE_CHECKS = ALL_CHECKS[:7]
ORTHO_CHECKS = ALL_CHECKS[7:]
DEFAULT_NMAX = 12


@dataclass(frozen=True)
class PipelineConfig:
    n_max: int = DEFAULT_NMAX
    K: int | None = None
    checks: tuple[str, ...] = ALL_CHECKS
    v_source: str = "given"

    def horizon(self, N: int, M: int) -> int:
        return self.K if self.K is not None else 2 * self.n_max + N + M + 2

    def validate(self, N: int, M: int) -> None:
        if self.n_max < N + M + 2:
            raise SchemaError(f"n_max = {self.n_max} must be at least N+M+2 = {N + M + 2}", "$.config.n_max")
        if self.horizon(N, M) < 2 * self.n_max:
            raise SchemaError(f"horizon {self.horizon(N, M)} must be at least 2*n_max = {2 * self.n_max}",
                              "$.config.horizon")
        unknown = [c for c in self.checks if c not in ALL_CHECKS]
        if unknown:
            raise SchemaError(f"unknown checks {unknown}; expected a subset of {list(ALL_CHECKS)}",
                              "$.config.checks")


def _rational(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a rational, got a boolean", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return parse_rational(value)
        except InvalidRational as exc:
            raise InvalidRational(f"{path}: {exc}") from exc
    raise SchemaError(f"expected a rational string \"p/q\" or an integer, got {type(value).__name__}", path)


def _rational_list(value: Any, path: str) -> list[Fraction]:
    if not isinstance(value, list):
        raise SchemaError("expected a list", path)
    return [_rational(x, f"{path}[{k}]") for k, x in enumerate(value)]


def _int(value: Any, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError("expected an integer", path)
    if value < minimum:
        raise SchemaError(f"expected an integer >= {minimum}", path)
    return value


def _object(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError("expected an object", path)
    return value


@dataclass(frozen=True)
class Source:
    """A functional as described in a document; materialized lazily to the depth needed."""
    kind: str
    family: str | None = None
    alpha: Fraction | None = None
    beta: Fraction | None = None
    moments: tuple[Fraction, ...] = ()
    recurrence: RecurrenceCoeffs | None = None

    def functional(self, depth: int) -> MomentFunctional:
        if self.kind == "family":
            return family_moments(self.family, depth, self.alpha, self.beta)
        if self.kind == "moments":
            return MomentFunctional(self.moments)
        rc = self.recurrence
        return moments_from_recurrence(rc, max_moment_depth(rc))

    def mops(self, n_max: int, depth: int) -> Mops:
        if self.kind == "recurrence":
            rc = self.recurrence
            if len(rc.betas) < n_max or len(rc.gammas) < n_max:
                raise InsufficientCoefficients(
                    f"n_max = {n_max} needs beta_0..beta_{n_max - 1} and gamma_1..gamma_{n_max}, "
                    f"got {len(rc.betas)} betas and {len(rc.gammas)} gammas")
            return mops_from_recurrence(self.recurrence, n_max)
        return build_mops(self.functional(depth), n_max)

    def to_json(self) -> dict:
        if self.kind == "family":
            out: dict[str, Any] = {"type": "family", "name": self.family}
            if self.alpha is not None:
                out["alpha"] = fmt_rational(self.alpha)
            if self.beta is not None:
                out["beta"] = fmt_rational(self.beta)
            return out
        if self.kind == "moments":
            return {"type": "moments", "moments": [fmt_rational(m) for m in self.moments]}
        return {"type": "recurrence", "beta": [fmt_rational(b) for b in self.recurrence.betas],
                "gamma": [fmt_rational(g) for g in self.recurrence.gammas]}


def parse_source(doc: Any, path: str) -> Source:
    doc = _object(doc, path)
    kind = doc.get("type")
    if kind == "family":
        name = doc.get("name")
        if name not in FAMILIES:
            raise SchemaError(f"unknown family {name!r}; expected one of {list(FAMILIES)}", f"{path}.name")
        alpha = _rational(doc["alpha"], f"{path}.alpha") if "alpha" in doc else None
        beta = _rational(doc["beta"], f"{path}.beta") if "beta" in doc else None
        return Source("family", family=name, alpha=alpha, beta=beta)
    if kind == "moments":
        if "moments" not in doc:
            raise SchemaError("missing 'moments'", path)
        ms = _rational_list(doc["moments"], f"{path}.moments")
        if not ms:
            raise SchemaError("empty moment list", f"{path}.moments")
        return Source("moments", moments=tuple(ms))
    if kind == "recurrence":
        for key in ("beta", "gamma"):
            if key not in doc:
                raise SchemaError(f"missing '{key}'", path)
        betas = _rational_list(doc["beta"], f"{path}.beta")
        gammas = _rational_list(doc["gamma"], f"{path}.gamma")
        for n, g in enumerate(gammas, start=1):
            if g == 0:
                raise FavardViolation(f"{path}.gamma: gamma_{n} = 0 violates the Favard condition gamma_n != 0")
        return Source("recurrence", recurrence=RecurrenceCoeffs(betas, gammas))
    raise SchemaError(f"unknown source type {kind!r}; expected family, moments or recurrence", f"{path}.type")


def _table(doc: Any, depth: int, path: str) -> list[list[Fraction]]:
    doc = _object(doc if doc is not None else {}, path)
    extra = sorted(set(doc) - {str(i) for i in range(1, depth + 1)})
    if extra:
        raise SchemaError(f"unexpected rows {extra}; rows must be \"1\"..\"{depth}\"", path)
    rows = []
    for i in range(1, depth + 1):
        if str(i) not in doc:
            raise SchemaError(f"missing row \"{i}\"", path)
        rows.append(_rational_list(doc[str(i)], f"{path}.{i}"))
    return rows


def parse_relation(doc: Any, n_max: int, path: str = "$.relation") -> StructureRelation:
    doc = _object(doc, path)
    for key in ("N", "M"):
        if key not in doc:
            raise SchemaError(f"missing '{key}'", path)
    N = _int(doc["N"], f"{path}.N")
    M = _int(doc["M"], f"{path}.M")
    r = _table(doc.get("r"), N, f"{path}.r")
    s = _table(doc.get("s"), M, f"{path}.s")
    return StructureRelation(N, M, r, s, n_max)


def parse_config(doc: Any, overrides: dict | None = None) -> PipelineConfig:
    doc = _object(doc if doc is not None else {}, "$.config")
    overrides = overrides or {}
    n_max = overrides.get("n_max")
    if n_max is None:
        n_max = _int(doc["n_max"], "$.config.n_max", 1) if "n_max" in doc else DEFAULT_NMAX
    K = overrides.get("horizon")
    if K is None and "horizon" in doc:
        K = _int(doc["horizon"], "$.config.horizon")
    checks = overrides.get("checks")
    if checks is None:
        raw = doc.get("checks", list(ALL_CHECKS))
        if not isinstance(raw, list) or not all(isinstance(c, str) for c in raw):
            raise SchemaError("expected a list of check names", "$.config.checks")
        checks = raw
    return PipelineConfig(n_max=n_max, K=K, checks=tuple(checks))


def parse_instance(document: str | dict, overrides: dict | None = None) -> tuple[RelationInstance, PipelineConfig]:
    """Build the instance and configuration described by a JSON document."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    doc = _object(document, "$")
    unknown = sorted(set(doc) - {"u", "v", "relation", "config"})
    if unknown:
        raise SchemaError(f"unexpected keys {unknown}")
    if "u" not in doc:
        raise SchemaError("missing 'u'")
    if "relation" not in doc:
        raise SchemaError("missing 'relation'")
    cfg = parse_config(doc.get("config"), overrides)
    rel = parse_relation(doc["relation"], cfg.n_max)
    cfg.validate(rel.N, rel.M)
    K = cfg.horizon(rel.N, rel.M)
    depth = K + rel.N + rel.M + 2

    u_src = parse_source(doc["u"], "$.u")
    P = u_src.mops(cfg.n_max, depth)
    inst = make_instance(P, rel)
    if "v" in doc:
        v = parse_source(doc["v"], "$.v").functional(depth)
        v_source = "given"
    else:
        v, orthogonal = functional_from_sequence(inst.Q)
        v_source = "derived" if orthogonal else "derived_non_orthogonal"
    inst = inst.with_v(v)
    return inst, PipelineConfig(cfg.n_max, cfg.K, cfg.checks, v_source)


def relation_to_json(rel: StructureRelation) -> dict:
    return {
        "N": rel.N,
        "M": rel.M,
        "r": {str(i + 1): [fmt_rational(c) for c in row] for i, row in enumerate(rel.r)},
        "s": {str(i + 1): [fmt_rational(c) for c in row] for i, row in enumerate(rel.s)},
    }


def instance_to_json(inst: RelationInstance, cfg: PipelineConfig | None = None,
                     include_v: bool = True) -> dict:
    """Document for ``inst`` with u and v written as explicit moment lists."""
    out: dict[str, Any] = {
        "u": Source("moments", moments=inst.u.moments).to_json(),
        "relation": relation_to_json(inst.relation),
    }
    if include_v and inst.v is not None:
        out["v"] = Source("moments", moments=inst.v.moments).to_json()
    config: dict[str, Any] = {"n_max": inst.n_max}
    if cfg is not None:
        if cfg.K is not None:
            config["horizon"] = cfg.K
        if tuple(cfg.checks) != ALL_CHECKS:
            config["checks"] = list(cfg.checks)
    out["config"] = config
    return out


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, ASCII only, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
