"""Random planar convex bodies inside the unit disk."""

from __future__ import annotations

import math
import random
from functools import lru_cache

from . import arcgon as ag
from .core import EMPTY, TAU

KINDS = ("polygon", "disk", "clipped_disk", "rounded", "clipped_polygon")


def random_convex_polygon(rng: random.Random, k: int | None = None,
                          min_gap: float = 1e-3) -> ag.ArcGon:
    """Affine image of ``k`` points on the unit circle (strictly convex, CCW)."""
    k = k or rng.randint(3, 9)
    while True:
        angles = sorted(rng.uniform(0, TAU) for _ in range(k))
        gaps = [b - a for a, b in zip(angles, angles[1:])] + [angles[0] + TAU - angles[-1]]
        if min(gaps) >= min_gap:
            break
    a, b = rng.uniform(0.4, 1.0), rng.uniform(-0.3, 0.3)
    c, d = rng.uniform(-0.3, 0.3), rng.uniform(0.4, 1.0)
    if a * d - b * c <= 0.05:
        b = c = 0.0
    pts = [(a * math.cos(t) + b * math.sin(t), c * math.cos(t) + d * math.sin(t)) for t in angles]
    return ag.from_polygon(pts)


def _random_halfplane(rng: random.Random, K: ag.ArcGon):
    th = rng.uniform(0, TAU)
    u = (math.cos(th), math.sin(th))
    hi, lo = K.support(th), -K.support(th + math.pi)
    return u, lo + rng.uniform(0.3, 0.95) * (hi - lo)


def random_body(rng: random.Random, kind: str | None = None) -> ag.ArcGon:
    """A full-dimensional body contained in the unit disk."""
    kind = kind or rng.choice(KINDS)
    if kind == "polygon":
        K = random_convex_polygon(rng)
    elif kind == "disk":
        K = ag.disk((rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)), rng.uniform(0.1, 0.7))
    elif kind == "clipped_disk":
        K = ag.disk((0.0, 0.0), 1.0)
        for _ in range(rng.randint(1, 3)):
            u, t = _random_halfplane(rng, K)
            K = ag.clip_halfplane(K, u, t)
    elif kind == "rounded":
        K = ag.minkowski_sum(ag.scale(random_convex_polygon(rng), rng.uniform(0.2, 0.7)),
                             ag.disk((0.0, 0.0), rng.uniform(0.05, 0.4)))
    elif kind == "clipped_polygon":
        K = ag.minkowski_sum(random_convex_polygon(rng), ag.disk((0.0, 0.0), 0.3))
        u, t = _random_halfplane(rng, K)
        K = ag.clip_halfplane(K, u, t)
    else:
        raise ValueError(f"unknown body kind {kind!r}")
    assert K is not EMPTY
    shift = rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)
    K = ag.translate(K, shift)
    return ag.scale(K, rng.uniform(0.3, 0.999) / ag.max_norm(K))


@lru_cache(maxsize=16)
def random_bodies(count: int, seed: int = 0) -> tuple[ag.ArcGon, ...]:
    rng = random.Random(seed)
    return tuple(random_body(rng) for _ in range(count))


def standard_bodies() -> dict[str, ag.ArcGon]:
    """A small fixed corpus covering polygons, arcs and mixed boundaries."""
    return {
        "disk": ag.disk((0.0, 0.0), 1.0),
        "square": ag.from_polygon([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]),
        "triangle": ag.from_polygon([(-0.7, -0.4), (0.8, -0.3), (0.1, 0.6)]),
        "rounded_square": ag.minkowski_sum(
            ag.from_polygon([(-0.4, -0.4), (0.4, -0.4), (0.4, 0.4), (-0.4, 0.4)]),
            ag.disk((0.0, 0.0), 0.3)),
        "half_disk": ag.clip_halfplane(ag.disk((0.1, 0.0), 0.8), (0.6, 0.8), 0.2),
    }
