"""Exact arithmetic on extended exponents and the piecewise-linear index functions.

Everything in this module is exact: exponents are rationals or infinity,
and the index functions tau/sigma are evaluated with Fraction arithmetic so
that boundary comparisons (s >= tau versus s > tau) are unambiguous. Floats
are rejected on input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


def as_fraction(value) -> Fraction:
    """Coerce an exact rational-like value (int, Fraction, str) to Fraction."""
    if isinstance(value, float):
        raise TypeError(
            f"floating-point value {value!r} not allowed in exact index arithmetic; "
            "pass an int, Fraction or 'a/b' string"
        )
    return Fraction(value)


@total_ordering
@dataclass(frozen=True)
class Exponent:
    """An extended exponent p in (0, infinity]; exact rational when finite.

    ``value`` is a positive Fraction, or None for infinity.
    """

    value: Fraction | None

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", as_fraction(self.value))
            if self.value <= 0:
                raise ValueError(f"exponent must be positive, got {self.value}")

    @classmethod
    def of(cls, value) -> "Exponent":
        """Coerce an Exponent, positive rational, or the string 'inf'."""
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
            return INF
        if value is None:
            return INF
        return cls(as_fraction(value))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def reciprocal(self) -> Fraction:
        """1/p as an exact rational; 0 when p is infinite."""
        return Fraction(0) if self.value is None else 1 / self.value

    def dual(self) -> "Exponent":
        """Dual exponent: 1/p + 1/p' = 1 for p >= 1; p' = infinity for 0 < p < 1."""
        if self.value is None:
            return Exponent(Fraction(1))
        if self.value < 1:
            return INF
        if self.value == 1:
            return INF
        return Exponent(self.value / (self.value - 1))

    def __eq__(self, other) -> bool:
        other = Exponent.of(other)
        return self.value == other.value

    def __lt__(self, other) -> bool:
        other = Exponent.of(other)
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __hash__(self):
        return hash(self.value)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return f"Exponent({self})"

    def __float__(self) -> float:
        return float("inf") if self.value is None else float(self.value)


INF = Exponent(None)


@dataclass(frozen=True)
class Smoothness:
    """A smoothness index s together with the ambient dimension d >= 1."""

    s: Fraction
    d: int = 1

    def __post_init__(self):
        object.__setattr__(self, "s", as_fraction(self.s))
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")


class TauPiece(enum.Enum):
    """Which affine piece attains the extremum in tau (or sigma)."""

    ZERO = "0"
    Q_MINUS_P = "1/q - 1/p"
    P_PLUS_Q_MINUS_1 = "1/q + 1/p - 1"


def reciprocal(p) -> Fraction:
    return Exponent.of(p).reciprocal()


def dual(p) -> Exponent:
    return Exponent.of(p).dual()


def _pieces(p, q) -> tuple[Fraction, Fraction, Fraction]:
    ip, iq = reciprocal(p), reciprocal(q)
    return Fraction(0), iq - ip, iq + ip - 1


def tau(p, q, d: int = 1) -> Fraction:
    """d * max(0, 1/q - 1/p, 1/q + 1/p - 1), exact."""
    Smoothness(0, d)
    return d * max(_pieces(p, q))


def sigma(p, q, d: int = 1) -> Fraction:
    """d * min(0, 1/q - 1/p, 1/q + 1/p - 1), exact."""
    Smoothness(0, d)
    return d * min(_pieces(p, q))


# Tie-break priority at region boundaries: the first attaining piece wins.
_PIECE_ORDER = (TauPiece.ZERO, TauPiece.Q_MINUS_P, TauPiece.P_PLUS_Q_MINUS_1)


def tau_region(p0, q) -> TauPiece:
    """The affine piece attaining the max in tau(p0, q); ties broken by the
    fixed priority ZERO > Q_MINUS_P > P_PLUS_Q_MINUS_1."""
    vals = dict(zip(_PIECE_ORDER, _pieces(p0, q)))
    best = max(vals.values())
    for piece in _PIECE_ORDER:
        if vals[piece] == best:
            return piece
    raise AssertionError("unreachable")


def sigma_region(p1, q) -> TauPiece:
    """The affine piece attaining the min in sigma(p1, q); same tie priority."""
    vals = dict(zip(_PIECE_ORDER, _pieces(p1, q)))
    best = min(vals.values())
    for piece in _PIECE_ORDER:
        if vals[piece] == best:
            return piece
    raise AssertionError("unreachable")
