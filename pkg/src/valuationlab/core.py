"""Shared exception hierarchy and the empty-set sentinel."""

from __future__ import annotations

import math
from fractions import Fraction

TAU = 2.0 * math.pi


class ValuationLabError(Exception):
    """Base class for every error raised by this package."""


class MalformedInterval(ValuationLabError, ValueError):
    pass


class DimensionMismatch(ValuationLabError, ValueError):
    pass


class NotABox(ValuationLabError, ValueError):
    pass


class NegativeScale(ValuationLabError, ValueError):
    pass


class ComponentUndefinedAt(ValuationLabError, KeyError):
    pass


class InsufficientSamples(ValuationLabError, ValueError):
    pass


class CoordinateOutOfRange(ValuationLabError, ValueError):
    pass


class NotConvex(ValuationLabError, ValueError):
    pass


class DuplicatePoint(ValuationLabError, ValueError):
    pass


class NonpositiveRadius(ValuationLabError, ValueError):
    pass


class DegeneratePoint(ValuationLabError, ValueError):
    pass


class EmptyBody(ValuationLabError, ValueError):
    pass


class UnsupportedBody(ValuationLabError, TypeError):
    pass


class ZeroBaseValue(ValuationLabError, ZeroDivisionError):
    pass


class BodyExceedsM(ValuationLabError, ValueError):
    pass


class EpsilonTooLarge(ValuationLabError, ValueError):
    pass


class NotVanishingOnBoxes(ValuationLabError, ValueError):
    pass


class SequenceNotConverging(ValuationLabError, ValueError):
    pass


class MalformedDocument(ValuationLabError, ValueError):
    pass


class UnknownCommand(ValuationLabError, ValueError):
    pass


class _Empty:
    """The empty set. Never a Box or an ArcGon; every valuation maps it to 0."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


def is_empty(obj) -> bool:
    return obj is EMPTY


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, "p/q" strings and floats to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, float, str)):
        return Fraction(value)
    try:
        return Fraction(value)
    except TypeError as exc:
        raise TypeError(f"cannot interpret {value!r} as a rational") from exc


def rat_str(q) -> str:
    """Serialize a rational as ``"p"`` or ``"p/q"``."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
