"""Exact decision procedures for every characterized embedding pair.

Each ``embed_*`` function returns a :class:`Verdict` stating whether the
embedding holds, which condition of the governing characterization fired,
the critical smoothness threshold (an exact rational), and whether the
s-comparison in that condition is strict. All comparisons are exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .exponents import (
    Exponent,
    INF,
    TauPiece,
    as_fraction,
    dual,
    sigma,
    sigma_region,
    tau,
    tau_region,
)


class DomainError(ValueError):
    """A query lies outside the hypothesis range of the governing theorem."""


class UncharacterizedPairError(ValueError):
    """The requested embedding pair has no known characterization."""


class Family(enum.Enum):
    MODULATION = "M"
    BESOV = "B"
    TRIEBEL = "F"
    SOBOLEV_W = "W"
    FOURIER_L = "FL"


# Index fields each family carries; s is implicit for all but FourierL.
_FAMILY_FIELDS = {
    Family.MODULATION: ("p", "q"),
    Family.BESOV: ("p", "q"),
    Family.TRIEBEL: ("p", "q"),
    Family.SOBOLEV_W: ("r",),
    Family.FOURIER_L: ("r",),
}


@dataclass(frozen=True)
class SpaceSpec:
    """A tagged function-space description."""

    family: Family
    p: Exponent | None = None
    q: Exponent | None = None
    r: Exponent | None = None
    s: Fraction | None = None
    d: int = 1

    def __post_init__(self):
        required = _FAMILY_FIELDS[self.family]
        for name in ("p", "q", "r"):
            value = getattr(self, name)
            if name in required:
                if value is None:
                    raise ValueError(f"{self.family.value} space requires index {name}")
                object.__setattr__(self, name, Exponent.of(value))
            elif value is not None:
                raise ValueError(f"{self.family.value} space does not take index {name}")
        if self.family is Family.FOURIER_L:
            if self.s is not None:
                raise ValueError("FL space does not carry a smoothness index")
        else:
            object.__setattr__(self, "s", as_fraction(self.s if self.s is not None else 0))
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")

    @classmethod
    def modulation(cls, p, q, s=0, d: int = 1) -> "SpaceSpec":
        return cls(Family.MODULATION, p=Exponent.of(p), q=Exponent.of(q), s=s, d=d)

    @classmethod
    def besov(cls, p, q, s=0, d: int = 1) -> "SpaceSpec":
        return cls(Family.BESOV, p=Exponent.of(p), q=Exponent.of(q), s=s, d=d)

    @classmethod
    def triebel(cls, p, q, s=0, d: int = 1) -> "SpaceSpec":
        return cls(Family.TRIEBEL, p=Exponent.of(p), q=Exponent.of(q), s=s, d=d)

    @classmethod
    def sobolev(cls, r, s=0, d: int = 1) -> "SpaceSpec":
        return cls(Family.SOBOLEV_W, r=Exponent.of(r), s=s, d=d)

    @classmethod
    def fourier_l(cls, r, d: int = 1) -> "SpaceSpec":
        return cls(Family.FOURIER_L, r=Exponent.of(r), d=d)


@dataclass(frozen=True)
class Verdict:
    """Outcome of an embedding query."""

    holds: bool
    clause: str
    critical_s: Fraction
    strict: bool
    explanation: str
    piece: TauPiece | None = field(default=None)

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "clause": self.clause,
            "critical_s": str(self.critical_s),
            "strict": self.strict,
            "explanation": self.explanation,
            "piece": self.piece.value if self.piece is not None else None,
        }


def _s_ok(s: Fraction, threshold: Fraction, strict: bool, lower: bool) -> bool:
    """lower=True tests s against a lower bound (source->M direction)."""
    if lower:
        return s > threshold if strict else s >= threshold
    return s < threshold if strict else s <= threshold


def _verdict_lower(label, s, crit, strict, piece, detail) -> Verdict:
    """Assemble a verdict for a source->M style condition s >=/(>) crit."""
    ok = _s_ok(s, crit, strict, lower=True)
    rel = ">" if strict else ">="
    expl = f"{detail}; requires s {rel} {crit}, s = {s}"
    return Verdict(ok, label, crit, strict, expl, piece)


def _verdict_upper(label, s, crit, strict, piece, detail) -> Verdict:
    """Assemble a verdict for an M->target style condition s <=/(<) crit."""
    ok = _s_ok(s, crit, strict, lower=False)
    rel = "<" if strict else "<="
    expl = f"{detail}; requires s {rel} {crit}, s = {s}"
    return Verdict(ok, label, crit, strict, expl, piece)


def embed_besov_to_mod(p0, q0, p, q, s, d: int = 1) -> Verdict:
    """B^s_{p0,q0} -> M_{p,q}: holds iff p0 <= p and (q0 <= q, s >= tau(p0,q))
    or (q0 > q, s > tau(p0,q))."""
    p0, q0, p, q = map(Exponent.of, (p0, q0, p, q))
    s = as_fraction(s)
    crit = tau(p0, q, d)
    piece = tau_region(p0, q)
    if not p0 <= p:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis p0 <= p violated: p0 = {p0} > p = {p}", piece)
    if q0 <= q:
        return _verdict_lower("B->M (1)", s, crit, False, piece,
                              f"p0 = {p0} <= p = {p}, q0 = {q0} <= q = {q}")
    return _verdict_lower("B->M (2)", s, crit, True, piece,
                          f"p0 = {p0} <= p = {p}, q0 = {q0} > q = {q}")


def embed_mod_to_besov(p, q, p1, q1, s, d: int = 1) -> Verdict:
    """M_{p,q} -> B^s_{p1,q1}: holds iff p1 >= p and (q1 >= q, s <= sigma(p1,q))
    or (q1 < q, s < sigma(p1,q))."""
    p, q, p1, q1 = map(Exponent.of, (p, q, p1, q1))
    s = as_fraction(s)
    crit = sigma(p1, q, d)
    piece = sigma_region(p1, q)
    if not p1 >= p:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis p1 >= p violated: p1 = {p1} < p = {p}", piece)
    if q1 >= q:
        return _verdict_upper("M->B (1)", s, crit, False, piece,
                              f"p1 = {p1} >= p = {p}, q1 = {q1} >= q = {q}")
    return _verdict_upper("M->B (2)", s, crit, True, piece,
                          f"p1 = {p1} >= p = {p}, q1 = {q1} < q = {q}")


def embed_hs_to_mod(p, q, s, d: int = 1) -> Verdict:
    """H^s -> M_{p,q} where H^s = B^s_{2,2}: delegates to the Besov oracle."""
    return embed_besov_to_mod(2, 2, p, q, s, d)


def embed_mod_to_hs(p, q, s, d: int = 1) -> Verdict:
    """M_{p,q} -> H^s: delegates to the Besov oracle with p1 = q1 = 2."""
    return embed_mod_to_besov(p, q, 2, 2, s, d)


def _check_wr_hypotheses(values: dict) -> None:
    for name, e in values.items():
        if e < 1:
            raise DomainError(
                f"hypothesis 1 <= {name} <= inf violated: {name} = {e}; "
                "the Sobolev characterizations assume Banach-range Lebesgue indices"
            )


def embed_sobolev_to_mod(r, p, q, s, d: int = 1) -> Verdict:
    """W^{s,r} -> M_{p,q} for 1 <= r, p <= inf and 0 < q <= inf."""
    r, p, q = map(Exponent.of, (r, p, q))
    s = as_fraction(s)
    _check_wr_hypotheses({"r": r, "p": p})
    crit = tau(r, q, d)
    piece = tau_region(r, q)
    if not r <= p:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis r <= p violated: r = {r} > p = {p}", piece)
    base = f"r = {r} <= p = {p}"
    if r == 1:
        if q.is_infinite:
            return _verdict_lower("W->M (3)", s, crit, False, piece,
                                  base + ", r = 1, q = inf")
        return _verdict_lower("W->M (4)", s, crit, True, piece,
                              base + f", r = 1, q = {q} finite")
    if r > q:
        return _verdict_lower("W->M (1)", s, crit, True, piece,
                              base + f", r = {r} > q = {q}")
    return _verdict_lower("W->M (2)", s, crit, False, piece,
                          base + f", 1 < r = {r} <= q = {q}")


def embed_mod_to_sobolev(p, q, r, s, d: int = 1) -> Verdict:
    """M_{p,q} -> W^{s,r} for 1 <= p, r <= inf and 0 < q <= inf.

    For 0 < q < 1 the characterization reduces to the non-strict condition
    s <= sigma(r,q) = 0 (the small-q extension of conditions (2)/(3)).
    """
    p, q, r = map(Exponent.of, (p, q, r))
    s = as_fraction(s)
    _check_wr_hypotheses({"r": r, "p": p})
    crit = sigma(r, q, d)
    piece = sigma_region(r, q)
    if not p <= r:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis p <= r violated: p = {p} > r = {r}", piece)
    base = f"p = {p} <= r = {r}"
    if q < 1:
        label = "M->W (3) small-q extension" if r.is_infinite else "M->W (2) small-q extension"
        return _verdict_upper(label, s, crit, False, piece,
                              base + f", 0 < q = {q} < 1 (sigma(r,q) = 0)")
    if r.is_infinite:
        if q == 1:
            return _verdict_upper("M->W (3)", s, crit, False, piece,
                                  base + ", r = inf, q = 1")
        return _verdict_upper("M->W (4)", s, crit, True, piece,
                              base + f", r = inf, q = {q} > 1")
    if r < q:
        return _verdict_upper("M->W (1)", s, crit, True, piece,
                              base + f", r = {r} < q = {q}")
    return _verdict_upper("M->W (2)", s, crit, False, piece,
                          base + f", q = {q} <= r = {r} < inf")


def embed_triebel2_to_mod(p, q, s, d: int = 1) -> Verdict:
    """F^s_{p,2} -> M_{p,q}: holds iff (q >= p, s >= tau(p,q)) or (q < p, s > tau(p,q))."""
    p, q = Exponent.of(p), Exponent.of(q)
    s = as_fraction(s)
    crit = tau(p, q, d)
    piece = tau_region(p, q)
    if q >= p:
        return _verdict_lower("F2->M (1)", s, crit, False, piece,
                              f"q = {q} >= p = {p}")
    return _verdict_lower("F2->M (2)", s, crit, True, piece,
                          f"q = {q} < p = {p}")


def embed_mod_to_triebel2(p, q, s, d: int = 1) -> Verdict:
    """M_{p,q} -> F^s_{p,2}: holds iff (q <= p, s <= sigma(p,q)) or (q > p, s < sigma(p,q))."""
    p, q = Exponent.of(p), Exponent.of(q)
    s = as_fraction(s)
    crit = sigma(p, q, d)
    piece = sigma_region(p, q)
    if q <= p:
        return _verdict_upper("M->F2 (1)", s, crit, False, piece,
                              f"q = {q} <= p = {p}")
    return _verdict_upper("M->F2 (2)", s, crit, True, piece,
                          f"q = {q} > p = {p}")


def embed_triebel_to_mod(p0, p, q, s, d: int = 1) -> Verdict:
    """F^s_{p0,q} -> M_{p,q} (shared q): holds iff p0 <= p and
    (p0 <= q, s >= tau(p0,q)) or (p0 > q, s > tau(p0,q))."""
    p0, p, q = map(Exponent.of, (p0, p, q))
    s = as_fraction(s)
    crit = tau(p0, q, d)
    piece = tau_region(p0, q)
    if not p0 <= p:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis p0 <= p violated: p0 = {p0} > p = {p}", piece)
    if p0 <= q:
        return _verdict_lower("F->M (1)", s, crit, False, piece,
                              f"p0 = {p0} <= p = {p}, p0 <= q = {q}")
    return _verdict_lower("F->M (2)", s, crit, True, piece,
                          f"p0 = {p0} <= p = {p}, p0 > q = {q}")


def embed_mod_to_triebel(p, p1, q, s, d: int = 1) -> Verdict:
    """M_{p,q} -> F^s_{p1,q} (shared q): holds iff p1 >= p and
    (p1 >= q, s <= sigma(p1,q)) or (p1 < q, s < sigma(p1,q))."""
    p, p1, q = map(Exponent.of, (p, p1, q))
    s = as_fraction(s)
    crit = sigma(p1, q, d)
    piece = sigma_region(p1, q)
    if not p1 >= p:
        return Verdict(False, "none", crit, False,
                       f"index hypothesis p1 >= p violated: p1 = {p1} < p = {p}", piece)
    if p1 >= q:
        return _verdict_upper("M->F (1)", s, crit, False, piece,
                              f"p1 = {p1} >= p = {p}, p1 >= q = {q}")
    return _verdict_upper("M->F (2)", s, crit, True, piece,
                          f"p1 = {p1} >= p = {p}, p1 < q = {q}")


def embed_mod_to_fourierlp(p, q, r, s, d: int = 1) -> Verdict:
    """M^s_{p,q} -> FL^r: holds iff p <= 2, r <= p' and
    (q <= r, s >= 0) or (r < q, s > d(1/r - 1/q))."""
    p, q, r = map(Exponent.of, (p, q, r))
    s = as_fraction(s)
    if q <= r:
        crit, strict, label = Fraction(0), False, "M->FL (1)"
        detail = f"q = {q} <= r = {r}"
    else:
        crit = d * (r.reciprocal() - q.reciprocal())
        strict, label = True, "M->FL (2)"
        detail = f"r = {r} < q = {q}"
    pd = p.dual()
    if not p <= 2:
        return Verdict(False, "none", crit, strict,
                       f"index hypothesis p <= 2 violated: p = {p}", None)
    if not r <= pd:
        return Verdict(False, "none", crit, strict,
                       f"index hypothesis r <= p' violated: r = {r} > p' = {pd}", None)
    return _verdict_lower(label, s, crit, strict, None,
                          f"p = {p} <= 2, r = {r} <= p' = {pd}, " + detail)


def embed_fourierlp_to_mod(r, p, q, s, d: int = 1) -> Verdict:
    """FL^r -> M^s_{p,q}: holds iff p >= 2, p' <= r and
    (r <= q, s <= 0) or (r > q, s < d(1/r - 1/q))."""
    r, p, q = map(Exponent.of, (r, p, q))
    s = as_fraction(s)
    if r <= q:
        crit, strict, label = Fraction(0), False, "FL->M (1)"
        detail = f"r = {r} <= q = {q}"
    else:
        crit = d * (r.reciprocal() - q.reciprocal())
        strict, label = True, "FL->M (2)"
        detail = f"r = {r} > q = {q}"
    pd = p.dual()
    if not p >= 2:
        return Verdict(False, "none", crit, strict,
                       f"index hypothesis p >= 2 violated: p = {p}", None)
    if not pd <= r:
        return Verdict(False, "none", crit, strict,
                       f"index hypothesis p' <= r violated: p' = {pd} > r = {r}", None)
    return _verdict_upper(label, s, crit, strict, None,
                          f"p = {p} >= 2, p' = {pd} <= r = {r}, " + detail)


def _require_zero_mod_smoothness(spec: SpaceSpec, other: SpaceSpec) -> None:
    if spec.s != 0:
        raise UncharacterizedPairError(
            f"modulation smoothness s = {spec.s} is only characterized against FL "
            f"spaces, not {other.family.value}"
        )


def decide(source: SpaceSpec, target: SpaceSpec) -> Verdict:
    """Route an embedding query source -> target to the matching oracle.

    Raises UncharacterizedPairError for pairs with no known characterization
    (e.g. the general F_{p0,q0} -> M_{p,q} case with q0 not matching) and
    DomainError for queries outside a theorem's hypothesis range.
    """
    if source.d != target.d:
        raise ValueError(f"dimension mismatch: {source.d} != {target.d}")
    d = source.d
    pair = (source.family, target.family)

    if pair == (Family.BESOV, Family.MODULATION):
        _require_zero_mod_smoothness(target, source)
        return embed_besov_to_mod(source.p, source.q, target.p, target.q, source.s, d)
    if pair == (Family.MODULATION, Family.BESOV):
        _require_zero_mod_smoothness(source, target)
        return embed_mod_to_besov(source.p, source.q, target.p, target.q, target.s, d)
    if pair == (Family.SOBOLEV_W, Family.MODULATION):
        _require_zero_mod_smoothness(target, source)
        return embed_sobolev_to_mod(source.r, target.p, target.q, source.s, d)
    if pair == (Family.MODULATION, Family.SOBOLEV_W):
        _require_zero_mod_smoothness(source, target)
        return embed_mod_to_sobolev(source.p, source.q, target.r, target.s, d)
    if pair == (Family.TRIEBEL, Family.MODULATION):
        _require_zero_mod_smoothness(target, source)
        if source.q == target.q:
            return embed_triebel_to_mod(source.p, target.p, target.q, source.s, d)
        if source.q == 2:
            if source.p == target.p:
                return embed_triebel2_to_mod(target.p, target.q, source.s, d)
            if Exponent.of(1) < source.p < INF:
                return embed_sobolev_to_mod(source.p, target.p, target.q, source.s, d)
        raise UncharacterizedPairError(
            "F_{p0,q0} -> M_{p,q} with q0 != q is characterized only for q0 = 2 "
            "with matching Lebesgue structure; the general case is an open problem"
        )
    if pair == (Family.MODULATION, Family.TRIEBEL):
        _require_zero_mod_smoothness(source, target)
        if source.q == target.q:
            return embed_mod_to_triebel(source.p, target.p, target.q, target.s, d)
        if target.q == 2:
            if source.p == target.p:
                return embed_mod_to_triebel2(source.p, source.q, target.s, d)
            if Exponent.of(1) < target.p < INF:
                return embed_mod_to_sobolev(source.p, source.q, target.p, target.s, d)
        raise UncharacterizedPairError(
            "M_{p,q} -> F_{p1,q1} with q1 != q is characterized only for q1 = 2 "
            "with matching Lebesgue structure; the general case is an open problem"
        )
    if pair == (Family.MODULATION, Family.FOURIER_L):
        return embed_mod_to_fourierlp(source.p, source.q, target.r, source.s, d)
    if pair == (Family.FOURIER_L, Family.MODULATION):
        return embed_fourierlp_to_mod(source.r, target.p, target.q, target.s, d)

    raise UncharacterizedPairError(
        f"no characterization available for {source.family.value} -> {target.family.value}"
    )


@dataclass(frozen=True)
class RegionCell:
    """One grid point of a region-classification sweep."""

    inv_p: Fraction
    inv_q: Fraction
    holds: bool
    clause: str
    piece: TauPiece | None


# Sweep conventions per pair: the x coordinate is the reciprocal of the
# non-modulation Lebesgue index, y is 1/q; the free modulation index p is set
# on the diagonal so the p-comparison hypothesis always holds.
_REGION_PAIRS = {
    (Family.BESOV, Family.MODULATION),
    (Family.MODULATION, Family.BESOV),
    (Family.SOBOLEV_W, Family.MODULATION),
    (Family.MODULATION, Family.SOBOLEV_W),
    (Family.TRIEBEL, Family.MODULATION),
    (Family.MODULATION, Family.TRIEBEL),
}


def _exponent_from_reciprocal(u: Fraction) -> Exponent:
    u = as_fraction(u)
    if u < 0:
        raise ValueError(f"reciprocal coordinate must be >= 0, got {u}")
    return INF if u == 0 else Exponent(1 / u)


def classify_region(source_family: Family, target_family: Family, points, s,
                    d: int = 1) -> list[RegionCell]:
    """Classify grid points (1/p-like, 1/q) for a characterized pair.

    Returns one RegionCell per point with the verdict, clause label, and the
    tau/sigma piece, suitable for rendering region diagrams.
    """
    pair = (source_family, target_family)
    if pair not in _REGION_PAIRS:
        raise UncharacterizedPairError(
            f"region sweep not supported for {source_family.value} -> {target_family.value}"
        )
    s = as_fraction(s)
    to_mod = target_family is Family.MODULATION
    cells = []
    for u, v in points:
        u, v = as_fraction(u), as_fraction(v)
        x = _exponent_from_reciprocal(u)
        qe = _exponent_from_reciprocal(v)
        if to_mod:
            if source_family is Family.BESOV:
                verdict = embed_besov_to_mod(x, qe, x, qe, s, d)
            elif source_family is Family.SOBOLEV_W:
                verdict = embed_sobolev_to_mod(x, x, qe, s, d)
            else:
                verdict = embed_triebel_to_mod(x, x, qe, s, d)
        else:
            if target_family is Family.BESOV:
                verdict = embed_mod_to_besov(x, qe, x, qe, s, d)
            elif target_family is Family.SOBOLEV_W:
                verdict = embed_mod_to_sobolev(x, qe, x, s, d)
            else:
                verdict = embed_mod_to_triebel(x, x, qe, s, d)
        cells.append(RegionCell(u, v, verdict.holds, verdict.clause, verdict.piece))
    return cells
