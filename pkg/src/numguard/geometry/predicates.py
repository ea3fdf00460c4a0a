"""The 3D plane-orientation predicate in three strengths.

Given a plane spanned by points a, b, c and a query point d, the predicate
classifies d as above, below, or on the plane — the sign of
det[b-a, c-a, d-a]. Above means d sees (a, b, c) in counterclockwise order,
i.e. the determinant is positive.

* :func:`orient_base` — one floating-point evaluation, with the plane's base
  point selectable among the three spanning points (cyclic rotation). The
  evaluation order is pinned: cofactor expansion along the first row of the
  difference matrix, minors multiplied left to right, terms summed left to
  right. Rounding can flip the sign near the plane; that behaviour is the
  object of study, so it is reproducible bit for bit.
* :func:`orient_majority` — the historical workaround: evaluate all three
  base choices and return the sign computed by at least two of them. When
  the three evaluations disagree pairwise the extended result flags a tie
  and reports Coplanar.
* :func:`orient_exact` — ground truth: every binary64 coordinate is the
  exact dyadic rational it denotes; the determinant sign is computed over
  arbitrary-precision integers after aligning the power-of-two denominators.

Float width is binary64 throughout, with an opt-in binary32 mode (inputs are
first rounded to binary32, then every operation rounds to binary32) used by
the disagreement search.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "OrientationSign",
    "Point3",
    "MajorityResult",
    "BASE_CHOICES",
    "orient_base",
    "orient_majority",
    "orient_majority_detail",
    "orient_exact",
    "orientation_determinant",
    "majority_from_signs",
    "scaled_int_coords",
]

BASE_CHOICES = (1, 2, 3)


class OrientationSign(enum.Enum):
    ABOVE = "above"
    COPLANAR = "coplanar"
    BELOW = "below"

    @classmethod
    def of(cls, value) -> "OrientationSign":
        if value > 0:
            return cls.ABOVE
        if value < 0:
            return cls.BELOW
        return cls.COPLANAR

    @property
    def symbol(self) -> str:
        return {"above": "+", "coplanar": "0", "below": "-"}[self.value]


@dataclass(frozen=True)
class Point3:
    """A binary64 point. Coordinates must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if not isinstance(v, float):
                object.__setattr__(self, name, float(v))
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"coordinate {name} is not finite: {v!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def hex_coords(self) -> tuple[str, str, str]:
        return (self.x.hex(), self.y.hex(), self.z.hex())


@dataclass(frozen=True)
class MajorityResult:
    """Extended majority-vote outcome: the vote, the three per-base signs,
    and whether the vote was a three-way tie (resolved to Coplanar)."""

    sign: OrientationSign
    per_base: tuple[OrientationSign, OrientationSign, OrientationSign]
    tie: bool


def _rotate(a: Point3, b: Point3, c: Point3, base: int):
    if base == 1:
        return a, b, c
    if base == 2:
        return b, c, a
    if base == 3:
        return c, a, b
    raise ValueError(f"base must be one of {BASE_CHOICES}, got {base!r}")


def _det_rows_float64(p1, p2, p3, d):
    ux = p2.x - p1.x
    uy = p2.y - p1.y
    uz = p2.z - p1.z
    vx = p3.x - p1.x
    vy = p3.y - p1.y
    vz = p3.z - p1.z
    wx = d.x - p1.x
    wy = d.y - p1.y
    wz = d.z - p1.z
    m1 = vy * wz - vz * wy
    m2 = vx * wz - vz * wx
    m3 = vx * wy - vy * wx
    return (ux * m1 - uy * m2) + uz * m3


def _det_rows_float32(p1, p2, p3, d):
    f = np.float32
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        p1x, p1y, p1z = f(p1.x), f(p1.y), f(p1.z)
        ux = f(p2.x) - p1x
        uy = f(p2.y) - p1y
        uz = f(p2.z) - p1z
        vx = f(p3.x) - p1x
        vy = f(p3.y) - p1y
        vz = f(p3.z) - p1z
        wx = f(d.x) - p1x
        wy = f(d.y) - p1y
        wz = f(d.z) - p1z
        m1 = vy * wz - vz * wy
        m2 = vx * wz - vz * wx
        m3 = vx * wy - vy * wx
        det = (ux * m1 - uy * m2) + uz * m3
    return float(det)


def orientation_determinant(
    a: Point3, b: Point3, c: Point3, d: Point3, base: int = 1, width: int = 64
) -> float:
    """The floating-point determinant value behind :func:`orient_base`,
    exposed for bit-exact fixtures and encoder round-trips. In 32-bit mode
    the inputs are rounded to binary32 first and every operation rounds to
    binary32; the result is returned widened to binary64."""
    p1, p2, p3 = _rotate(a, b, c, base)
    if width == 64:
        return _det_rows_float64(p1, p2, p3, d)
    if width == 32:
        return _det_rows_float32(p1, p2, p3, d)
    raise ValueError(f"width must be 32 or 64, got {width!r}")


def orient_base(
    a: Point3, b: Point3, c: Point3, d: Point3, base: int = 1, width: int = 64
) -> OrientationSign:
    """Single floating-point orientation test against the plane through
    (a, b, c) rotated so the chosen base point comes first. A determinant
    that rounds to exactly zero reports Coplanar; a NaN determinant (only
    possible via intermediate overflow) also reports Coplanar."""
    det = orientation_determinant(a, b, c, d, base, width)
    if det > 0.0:
        return OrientationSign.ABOVE
    if det < 0.0:
        return OrientationSign.BELOW
    return OrientationSign.COPLANAR


def majority_from_signs(
    signs: tuple[OrientationSign, OrientationSign, OrientationSign],
) -> MajorityResult:
    """The vote rule: any sign attained at least twice wins; three pairwise
    distinct signs are a tie, resolved conservatively to Coplanar."""
    s1, s2, s3 = signs
    if s1 == s2 or s1 == s3:
        return MajorityResult(s1, signs, False)
    if s2 == s3:
        return MajorityResult(s2, signs, False)
    return MajorityResult(OrientationSign.COPLANAR, signs, True)


def orient_majority_detail(
    a: Point3, b: Point3, c: Point3, d: Point3, width: int = 64
) -> MajorityResult:
    signs = tuple(orient_base(a, b, c, d, base, width) for base in BASE_CHOICES)
    return majority_from_signs(signs)


def orient_majority(
    a: Point3, b: Point3, c: Point3, d: Point3, width: int = 64
) -> OrientationSign:
    """Majority vote over the three base choices."""
    return orient_majority_detail(a, b, c, d, width).sign


def scaled_int_coords(points) -> list[tuple[int, int, int]]:
    """Represent each point's coordinates as integers on a common
    power-of-two grid. Exact: binary64 values are dyadic rationals, so the
    largest denominator among them rescales all without loss."""
    ratios = [(c.as_integer_ratio()) for p in points for c in p.as_tuple()]
    common = max(den for _, den in ratios)
    scaled = [num * (common // den) for num, den in ratios]
    return [tuple(scaled[i : i + 3]) for i in range(0, len(scaled), 3)]


def _det3_int(u, v, w) -> int:
    return (
        u[0] * (v[1] * w[2] - v[2] * w[1])
        - u[1] * (v[0] * w[2] - v[2] * w[0])
        + u[2] * (v[0] * w[1] - v[1] * w[0])
    )


def orient_exact_scaled(sa, sb, sc, sd) -> OrientationSign:
    """Exact orientation of pre-scaled integer coordinate triples."""
    u = (sb[0] - sa[0], sb[1] - sa[1], sb[2] - sa[2])
    v = (sc[0] - sa[0], sc[1] - sa[1], sc[2] - sa[2])
    w = (sd[0] - sa[0], sd[1] - sa[1], sd[2] - sa[2])
    return OrientationSign.of(_det3_int(u, v, w))


def orient_exact(a: Point3, b: Point3, c: Point3, d: Point3) -> OrientationSign:
    """The true sign of det[b-a, c-a, d-a] with every coordinate taken as
    the exact rational its binary64 representation denotes."""
    sa, sb, sc, sd = scaled_int_coords((a, b, c, d))
    return orient_exact_scaled(sa, sb, sc, sd)
