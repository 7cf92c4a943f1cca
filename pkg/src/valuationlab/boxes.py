"""Axis-parallel boxes with exact rational endpoints.

A box is the product of closed intervals ``[lo_i, hi_i]`` along the standard
basis. Degenerate sides (``lo_i == hi_i``) are allowed, so points and flat
boxes are boxes too. The empty set is the :data:`~valuationlab.core.EMPTY`
sentinel and is never a :class:`Box`.

Axis labels in the public API are 1-based (axis 1 is the first coordinate).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    EMPTY,
    DimensionMismatch,
    MalformedDocument,
    MalformedInterval,
    NegativeScale,
    NotABox,
    as_fraction,
    rat_str,
)


@dataclass(frozen=True)
class Box:
    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if len(self.intervals) == 0:
            raise MalformedInterval("a box needs at least one axis")
        for lo, hi in self.intervals:
            if lo > hi:
                raise MalformedInterval(f"interval ({lo}, {hi}) has lo > hi")

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def lo(self) -> tuple[Fraction, ...]:
        return tuple(lo for lo, _ in self.intervals)

    @property
    def hi(self) -> tuple[Fraction, ...]:
        return tuple(hi for _, hi in self.intervals)

    @property
    def sides(self) -> tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)

    @property
    def dimension(self) -> int:
        """Number of strict sides."""
        return sum(1 for s in self.sides if s > 0)

    def volume(self) -> Fraction:
        return math.prod(self.sides, start=Fraction(1))

    def corners(self) -> Iterable[tuple[Fraction, ...]]:
        return itertools.product(*[sorted({lo, hi}) for lo, hi in self.intervals])

    def contains_point(self, p: Sequence) -> bool:
        return all(lo <= x <= hi for (lo, hi), x in zip(self.intervals, p))

    def contains_box(self, other: "Box") -> bool:
        _same_dim(self, other)
        return all(
            a_lo <= b_lo and b_hi <= a_hi
            for (a_lo, a_hi), (b_lo, b_hi) in zip(self.intervals, other.intervals)
        )

    def __repr__(self) -> str:
        body = " x ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)
        return f"Box({body})"


def make_box(intervals: Iterable[Sequence]) -> Box:
    pairs = []
    for pair in intervals:
        if len(pair) != 2:
            raise MalformedInterval(f"expected (lo, hi), got {pair!r}")
        lo, hi = as_fraction(pair[0]), as_fraction(pair[1])
        if lo > hi:
            raise MalformedInterval(f"interval ({lo}, {hi}) has lo > hi")
        pairs.append((lo, hi))
    return Box(tuple(pairs))


def origin_box(sides: Sequence) -> Box:
    """The box ``[0, a_1] x ... x [0, a_n]``."""
    return make_box([(0, a) for a in sides])


def _same_dim(K: Box, L: Box) -> None:
    if K.n != L.n:
        raise DimensionMismatch(f"boxes of dimension {K.n} and {L.n}")


@dataclass(frozen=True)
class CompatibilityVerdict:
    kind: str  # "nested" | "one_axis" | "incompatible"
    axis: int | None = None

    @property
    def compatible(self) -> bool:
        return self.kind != "incompatible"


NESTED = CompatibilityVerdict("nested")
INCOMPATIBLE = CompatibilityVerdict("incompatible")


def union_compatible(K: Box, L: Box) -> CompatibilityVerdict:
    """Classify a pair of boxes by whether their union is again a box.

    Either one contains the other, or they agree on every axis but one (the
    returned 1-based ``axis``) where the intervals overlap without nesting.
    Everything else has a non-convex union.
    """
    _same_dim(K, L)
    if K.contains_box(L) or L.contains_box(K):
        return NESTED
    differing = [i for i, (a, b) in enumerate(zip(K.intervals, L.intervals)) if a != b]
    if len(differing) != 1:
        return INCOMPATIBLE
    k = differing[0]
    (a1, b1), (a2, b2) = K.intervals[k], L.intervals[k]
    if max(a1, a2) > min(b1, b2):
        return INCOMPATIBLE
    return CompatibilityVerdict("one_axis", k + 1)


def box_union(K: Box, L: Box) -> Box:
    if not union_compatible(K, L).compatible:
        raise NotABox(f"{K!r} and {L!r} have a non-convex union")
    return Box(tuple(
        (min(a1, a2), max(b1, b2))
        for (a1, b1), (a2, b2) in zip(K.intervals, L.intervals)
    ))


def box_intersection(K: Box, L: Box):
    """Coordinatewise intersection; ``EMPTY`` if any axis empties."""
    _same_dim(K, L)
    pairs = []
    for (a1, b1), (a2, b2) in zip(K.intervals, L.intervals):
        lo, hi = max(a1, a2), min(b1, b2)
        if lo > hi:
            return EMPTY
        pairs.append((lo, hi))
    return Box(tuple(pairs))


def bounding_box(K: Box, L: Box) -> Box:
    _same_dim(K, L)
    return Box(tuple(
        (min(a1, a2), max(b1, b2))
        for (a1, b1), (a2, b2) in zip(K.intervals, L.intervals)
    ))


def scale_translate(K: Box, lam, x: Sequence | None = None) -> Box:
    lam = as_fraction(lam)
    if lam < 0:
        raise NegativeScale(f"scale factor {lam} is negative")
    shift = [Fraction(0)] * K.n if x is None else [as_fraction(v) for v in x]
    if len(shift) != K.n:
        raise DimensionMismatch(f"translation of length {len(shift)} for a {K.n}-box")
    return Box(tuple(
        (lam * lo + s, lam * hi + s) for (lo, hi), s in zip(K.intervals, shift)
    ))


def _distance_to_box(p: Sequence[Fraction], box: Box) -> Fraction:
    """Squared Euclidean distance from p to the box."""
    total = Fraction(0)
    for x, (lo, hi) in zip(p, box.intervals):
        if x < lo:
            total += (lo - x) ** 2
        elif x > hi:
            total += (x - hi) ** 2
    return total


def hausdorff_box_squared(K: Box, L: Box) -> Fraction:
    """Exact squared Hausdorff distance.

    The distance to a convex set is convex, so each directed distance is
    attained at a corner.
    """
    _same_dim(K, L)
    d_kl = max(_distance_to_box(c, L) for c in K.corners())
    d_lk = max(_distance_to_box(c, K) for c in L.corners())
    return max(d_kl, d_lk)


def hausdorff_box(K: Box, L: Box) -> float:
    return math.sqrt(hausdorff_box_squared(K, L))


def box_to_doc(K: Box) -> dict:
    return {"box": [[rat_str(lo), rat_str(hi)] for lo, hi in K.intervals]}


def box_from_doc(doc) -> Box:
    if not isinstance(doc, dict) or "box" not in doc:
        raise MalformedDocument(f"not a box document: {doc!r}")
    try:
        return make_box(doc["box"])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, MalformedInterval):
            raise
        raise MalformedDocument(f"bad box literal {doc['box']!r}: {exc}") from exc

