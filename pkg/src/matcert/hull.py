"""Planar convex hulls of complex point sets and boundary sampling.

The bound engine only ever maximizes over the hull boundary (the
integrand is the modulus of an analytic function of mu, so the maximum
modulus principle pushes the maximum to the boundary); this module
supplies the hull, a degeneracy classification, and evenly spaced
boundary samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

POINT = "point"
SEGMENT = "segment"
POLYGON = "polygon"


@dataclass(frozen=True)
class HullPolygon:
    """Convex hull: CCW vertex list plus a degeneracy tag."""

    vertices: tuple[complex, ...]
    degeneracy: str


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def _diameter(points: Iterable[complex]) -> float:
    pts = list(points)
    re = [p.real for p in pts]
    im = [p.imag for p in pts]
    return abs(complex(max(re) - min(re), max(im) - min(im)))


def convex_hull(points: Iterable[complex]) -> HullPolygon:
    """Andrew monotone-chain hull with collinear points dropped.

    Exact duplicates are removed first. All points equal gives a point
    hull; all collinear gives a segment spanning the extremes. Vertices
    are a subset of the input, ordered counter-clockwise.
    """
    pts = [complex(p) for p in points]
    if not pts:
        raise ValueError("convex hull of an empty point set")
    uniq = sorted(set(pts), key=lambda z: (z.real, z.imag))
    if len(uniq) == 1:
        return HullPolygon((uniq[0],), POINT)
    diam = _diameter(uniq)
    tol = 1e-12 * diam * diam

    def chain(seq):
        out = []
        for p in seq:
            while len(out) > 1 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(uniq)
    upper = chain(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2:
        return HullPolygon((hull[0], hull[1]), SEGMENT)
    return HullPolygon(tuple(hull), POLYGON)


def boundary_samples(h: HullPolygon, per_edge: int) -> list[complex]:
    """Vertices plus per_edge - 1 equally spaced interior points per edge.

    A point hull yields just the point; a segment yields per_edge + 1
    points including both endpoints. For a polygon the samples follow the
    CCW edge order, each edge contributing its start vertex and interior
    points.
    """
    if per_edge < 1:
        raise ValueError(f"per_edge must be >= 1, got {per_edge}")
    if h.degeneracy == POINT:
        return [h.vertices[0]]
    if h.degeneracy == SEGMENT:
        a, b = h.vertices
        return [a + (b - a) * (j / per_edge) for j in range(per_edge + 1)]
    out = []
    verts = h.vertices
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        out.extend(a + (b - a) * (j / per_edge) for j in range(per_edge))
    return out


def _point_segment_distance(z: complex, a: complex, b: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(z - a)
    t = ((z - a).real * ab.real + (z - a).imag * ab.imag) / denom
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * ab))


def contains(h: HullPolygon, z: complex) -> bool:
    """Closed-hull membership with tolerance 1e-12 times the hull diameter."""
    z = complex(z)
    if h.degeneracy == POINT:
        return z == h.vertices[0]
    diam = _diameter(h.vertices)
    tol = 1e-12 * diam
    if h.degeneracy == SEGMENT:
        return _point_segment_distance(z, h.vertices[0], h.vertices[1]) <= tol
    verts = h.vertices
    for i, a in enumerate(verts):
        b = verts[(i + 1) % len(verts)]
        if _cross(a, b, z) < -tol * abs(b - a):
            return False
    return True
