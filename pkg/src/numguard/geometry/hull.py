"""Minimal incremental convex hull and an exact-arithmetic validity checker.

The hull is built by incremental insertion: start from a non-degenerate
simplex, then for each remaining point delete the facets it can see and
stitch a fan of new facets around the horizon. The visibility test is the
orientation predicate, selectable among the floating-point single-base
evaluation, the majority vote, and the exact predicate.

With the exact predicate the construction always yields a valid closed
polyhedron boundary. With a floating predicate, wrong visibility decisions
can tear the mesh; such runs return a structured :class:`HullFailure`
instead of raising, or produce a mesh that :func:`validate_hull` (which uses
exact arithmetic only) then rejects — losing closure is precisely the
catastrophic outcome this module exists to exhibit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .predicates import (
    OrientationSign,
    Point3,
    orient_base,
    orient_exact_scaled,
    orient_majority,
    scaled_int_coords,
)

__all__ = [
    "PREDICATE_CHOICES",
    "DegenerateInputError",
    "HullFacets",
    "HullFailure",
    "CheckResult",
    "ValidityReport",
    "incremental_hull",
    "validate_hull",
]

PREDICATE_CHOICES = ("float_single", "majority", "exact")

# Witnesses stored per failed check; counts are always exact.
WITNESS_CAP = 20


class DegenerateInputError(ValueError):
    """Exact-predicate hull construction requires four non-coplanar points."""


@dataclass(frozen=True)
class HullFacets:
    """A triangulated hull candidate: vertex array, facet index triples
    (counterclockwise seen from outside when the mesh is valid), and the
    undirected-edge-to-facets adjacency map."""

    vertices: tuple[Point3, ...]
    facets: tuple[tuple[int, int, int], ...]
    adjacency: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.vertices)
        for t, (i, j, k) in enumerate(self.facets):
            if len({i, j, k}) != 3:
                raise ValueError(f"facet {t} is degenerate: {(i, j, k)}")
            if not all(0 <= v < n for v in (i, j, k)):
                raise ValueError(f"facet {t} references out-of-range vertex: {(i, j, k)}")
        adjacency: dict[tuple[int, int], list[int]] = {}
        for t, (i, j, k) in enumerate(self.facets):
            for u, v in ((i, j), (j, k), (k, i)):
                adjacency.setdefault((min(u, v), max(u, v)), []).append(t)
        object.__setattr__(self, "adjacency", adjacency)

    @property
    def referenced_vertices(self) -> set[int]:
        return {v for f in self.facets for v in f}


@dataclass(frozen=True)
class HullFailure:
    """Structured report for a construction that could not keep the mesh
    consistent (expected outcome under floating predicates on adversarial
    input)."""

    reason: str
    point_index: Optional[int]
    detail: str
    facets_built: int

    def to_dict(self) -> dict:
        return {
            "reason": self.reason,
            "point_index": self.point_index,
            "detail": self.detail,
            "facets_built": self.facets_built,
        }


def _exact_sign_fn(points: Sequence[Point3]) -> Callable[[int, int, int, int], OrientationSign]:
    scaled = scaled_int_coords(points)

    def sign(i: int, j: int, k: int, m: int) -> OrientationSign:
        return orient_exact_scaled(scaled[i], scaled[j], scaled[k], scaled[m])

    return sign


def _predicate_sign_fn(points: Sequence[Point3], predicate: str):
    if predicate == "exact":
        return _exact_sign_fn(points)
    if predicate == "float_single":
        return lambda i, j, k, m: orient_base(points[i], points[j], points[k], points[m], base=1)
    if predicate == "majority":
        return lambda i, j, k, m: orient_majority(points[i], points[j], points[k], points[m])
    raise ValueError(f"predicate must be one of {PREDICATE_CHOICES}, got {predicate!r}")


def _cross_is_zero(p0: Point3, p1: Point3, p2: Point3) -> bool:
    # Exact collinearity of the scaffold triple; cheap integer cross product.
    (ax, ay, az), (bx, by, bz), (cx, cy, cz) = scaled_int_coords((p0, p1, p2))
    ux, uy, uz = bx - ax, by - ay, bz - az
    vx, vy, vz = cx - ax, cy - ay, cz - az
    return (uy * vz - uz * vy) == 0 and (uz * vx - ux * vz) == 0 and (ux * vy - uy * vx) == 0


def _initial_simplex(points: Sequence[Point3], sign, predicate: str):
    """First four usable points in input order: a distinct pair, a point
    exactly off their line, and a point the chosen predicate calls
    non-coplanar with the triangle."""
    i0 = 0
    i1 = next(
        (j for j in range(len(points)) if points[j].as_tuple() != points[i0].as_tuple()),
        None,
    )
    if i1 is None:
        return None, "all points identical"
    i2 = next(
        (
            k
            for k in range(len(points))
            if k not in (i0, i1) and not _cross_is_zero(points[i0], points[i1], points[k])
        ),
        None,
    )
    if i2 is None:
        return None, "all points collinear"
    i3 = next(
        (
            m
            for m in range(len(points))
            if m not in (i0, i1, i2) and sign(i0, i1, i2, m) != OrientationSign.COPLANAR
        ),
        None,
    )
    if i3 is None:
        kind = "coplanar per the exact predicate" if predicate == "exact" else (
            f"coplanar per the {predicate} predicate"
        )
        return None, f"all points {kind}"
    return (i0, i1, i2, i3), None


def _directed_edge_map(facets: list[tuple[int, int, int]]):
    edges: dict[tuple[int, int], int] = {}
    for t, (i, j, k) in enumerate(facets):
        for u, v in ((i, j), (j, k), (k, i)):
            if (u, v) in edges:
                return None, (u, v)
            edges[(u, v)] = t
    return edges, None


def incremental_hull(
    points: Sequence[Point3], predicate: str = "exact"
) -> Union[HullFacets, HullFailure]:
    """Build the hull of ``points`` with the chosen visibility predicate.

    Points are inserted in input order; a point strictly above a facet sees
    it. Inconsistent intermediate meshes (possible under floating
    predicates) are reported as :class:`HullFailure` with the offending
    point index rather than raised. Exact-predicate construction raises
    :class:`DegenerateInputError` when no non-coplanar start exists.
    """
    points = [p if isinstance(p, Point3) else Point3(*p) for p in points]
    if len(points) < 4:
        raise ValueError(f"need at least 4 points, got {len(points)}")
    sign = _predicate_sign_fn(points, predicate)

    simplex, why = _initial_simplex(points, sign, predicate)
    if simplex is None:
        if predicate == "exact":
            raise DegenerateInputError(why)
        return HullFailure("no-initial-simplex", None, why, 0)

    i0, i1, i2, i3 = simplex
    facets: list[tuple[int, int, int]] = []
    for (x, y, z), w in (
        ((i0, i1, i2), i3),
        ((i0, i1, i3), i2),
        ((i0, i2, i3), i1),
        ((i1, i2, i3), i0),
    ):
        s = sign(x, y, z, w)
        if s == OrientationSign.COPLANAR:
            # Impossible exactly (the simplex was chosen non-coplanar);
            # a floating predicate can contradict itself across rotations.
            return HullFailure(
                "degenerate-initial-simplex",
                w,
                f"facet {(x, y, z)} judged coplanar with opposite vertex {w}",
                0,
            )
        facets.append((x, z, y) if s == OrientationSign.ABOVE else (x, y, z))

    inserted = set(simplex)
    for m in range(len(points)):
        if m in inserted:
            continue
        visible = {
            t for t, (i, j, k) in enumerate(facets) if sign(i, j, k, m) == OrientationSign.ABOVE
        }
        if not visible:
            continue

        edge_map, dup = _directed_edge_map(facets)
        if edge_map is None:
            return HullFailure(
                "inconsistent-mesh",
                m,
                f"directed edge {dup} appears twice before inserting point {m}",
                len(facets),
            )
        horizon = []
        for t in sorted(visible):
            i, j, k = facets[t]
            for u, v in ((i, j), (j, k), (k, i)):
                neighbor = edge_map.get((v, u))
                if neighbor is None:
                    return HullFailure(
                        "open-edge",
                        m,
                        f"edge {(u, v)} of facet {t} has no neighbour",
                        len(facets),
                    )
                if neighbor not in visible:
                    horizon.append((u, v))
        if not horizon:
            return HullFailure(
                "no-horizon",
                m,
                f"point {m} sees every facet; nothing to stitch to",
                len(facets),
            )
        facets = [f for t, f in enumerate(facets) if t not in visible]
        facets.extend((u, v, m) for u, v in horizon)

    return HullFacets(tuple(points), tuple(facets))


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    witnesses: tuple = ()
    failure_count: int = 0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failure_count": self.failure_count,
            "witnesses": [list(w) if isinstance(w, tuple) else w for w in self.witnesses],
        }


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the four exact-arithmetic hull checks: edge closure,
    Euler characteristic, orientation consistency, exact containment."""

    closure: CheckResult
    euler: CheckResult
    orientation: CheckResult
    containment: CheckResult

    @property
    def valid(self) -> bool:
        return all(
            c.passed for c in (self.closure, self.euler, self.orientation, self.containment)
        )

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "checks": {
                "closure": self.closure.to_dict(),
                "euler": self.euler.to_dict(),
                "orientation": self.orientation.to_dict(),
                "containment": self.containment.to_dict(),
            },
        }


def _capped(witnesses: list) -> CheckResult:
    if not witnesses:
        return CheckResult(True)
    return CheckResult(False, tuple(witnesses[:WITNESS_CAP]), len(witnesses))


def validate_hull(points: Sequence[Point3], hull: HullFacets) -> ValidityReport:
    """Judge a hull candidate with exact arithmetic only.

    Closure: every undirected edge lies in exactly two facets. Euler:
    V - E + F = 2 over referenced vertices. Orientation: the two facets at
    an edge traverse it in opposite directions. Containment: no input point
    is strictly above any facet plane. Containment is checked against
    ``points``, which may be a superset of the hull's vertices.
    """
    points = [p if isinstance(p, Point3) else Point3(*p) for p in points]

    closure_witnesses = [
        (edge, tuple(facets))
        for edge, facets in sorted(hull.adjacency.items())
        if len(facets) != 2
    ]

    v = len(hull.referenced_vertices)
    e = len(hull.adjacency)
    f = len(hull.facets)
    euler_ok = v - e + f == 2
    euler = CheckResult(euler_ok) if euler_ok else CheckResult(
        False, ((v, e, f),), 1
    )

    orientation_witnesses = []
    for (u, w), facet_ids in sorted(hull.adjacency.items()):
        if len(facet_ids) != 2:
            continue
        directions = []
        for t in facet_ids:
            i, j, k = hull.facets[t]
            for a, b in ((i, j), (j, k), (k, i)):
                if {a, b} == {u, w}:
                    directions.append((a, b))
        if len(directions) != 2 or directions[0] != (directions[1][1], directions[1][0]):
            orientation_witnesses.append(((u, w), tuple(facet_ids)))

    # One shared power-of-two grid for hull vertices and query points:
    # mixing separately scaled coordinates would corrupt the determinants.
    scaled_all = scaled_int_coords(tuple(hull.vertices) + tuple(points))
    scaled_hull = scaled_all[: len(hull.vertices)]
    scaled_pts = scaled_all[len(hull.vertices) :]
    containment_witnesses = []
    for t, (i, j, k) in enumerate(hull.facets):
        for m in range(len(points)):
            s = orient_exact_scaled(scaled_hull[i], scaled_hull[j], scaled_hull[k], scaled_pts[m])
            if s == OrientationSign.ABOVE:
                containment_witnesses.append((t, m))

    return ValidityReport(
        closure=_capped(closure_witnesses),
        euler=euler,
        orientation=_capped(orientation_witnesses),
        containment=_capped(containment_witnesses),
    )
