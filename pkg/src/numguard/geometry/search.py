"""Directed search for orientation-predicate failures.

The failure regime sits on inputs nearly coplanar with the spanning plane,
so the generator manufactures them outright: pick three lattice points with
exactly representable coordinates, place a fourth point exactly on their
plane through an affine combination with power-of-two weights (all
arithmetic exact in binary64 by construction), then nudge one coordinate by
a handful of ulps. The exact predicate supplies the ground-truth sign; the
floating-point evaluations are then scored against it.

Two search modes: ``single_base`` records inputs where any one base
evaluation errs; ``majority`` records inputs where the majority vote itself
errs. Runs are deterministic given (config, seed), chunk-partitionable
across workers, and every recorded counterexample replays bit-exactly from
its hex-float fixture.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .._seeding import CHUNK_SIZE, GENERATOR_NAME, chunk_ranges, chunk_rng
from .predicates import (
    BASE_CHOICES,
    MajorityResult,
    OrientationSign,
    Point3,
    majority_from_signs,
    orient_base,
    orient_exact,
)

__all__ = [
    "MODES",
    "OrientSearchConfig",
    "OrientCounterexample",
    "SearchStats",
    "SearchReport",
    "gen_near_coplanar",
    "gen_near_coplanar_cloud",
    "search_disagreement",
    "replay_counterexample",
    "find_hull_breakage_cloud",
    "report_to_json",
    "counterexample_from_dict",
]

MODES = ("single_base", "majority")
SCHEMA_VERSION = 1

# Lattice extents per float width: base-point mantissas within +/-_MANTISSA,
# on-plane weights on the 1/8 grid within +/-1. Chosen so every constructed
# coordinate is exact at the given width.
_MANTISSA = {64: 1 << 20, 32: 1 << 8}
_WEIGHT_SHIFT = 3
_WEIGHT_RANGE = 8
# Exponent band limits keeping scaled lattice coordinates normal (never
# subnormal, never overflowing) at each width.
_EXP_LIMITS = {64: (-990, 960), 32: (-100, 100)}


@dataclass(frozen=True)
class OrientSearchConfig:
    """Search-space narrowing and budget for the disagreement hunt.

    The exponent band [e_min, e_max] steers where coordinates live. The
    generator reads it as the scale of its integer lattice (coordinates are
    mantissas up to 2**20, or 2**8 at binary32, times 2**e with e drawn from
    the band); the SMT emitter asserts the literal reading — each coordinate's
    magnitude inside [2**e_min, 2**(e_max+1)) or zero — which is what an
    external solver can enforce on all twelve coordinates at once.
    """

    seed: int
    iterations: int = 100_000
    float_width: int = 64
    e_min: int = 0
    e_max: int = 0
    ulp_radius: int = 2
    time_budget: Optional[float] = None
    mode: str = "single_base"
    max_records: int = 1000

    def __post_init__(self) -> None:
        if self.float_width not in (32, 64):
            raise ValueError("float_width must be 32 or 64")
        if self.e_min > self.e_max:
            raise ValueError("e_min must be <= e_max")
        lo, hi = _EXP_LIMITS[self.float_width]
        if self.e_min < lo or self.e_max > hi:
            raise ValueError(
                f"exponent band must stay within [{lo}, {hi}] for width {self.float_width}"
            )
        if self.ulp_radius < 1:
            raise ValueError("ulp_radius must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.max_records < 0:
            raise ValueError("max_records must be >= 0")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive when given")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iterations": self.iterations,
            "float_width": self.float_width,
            "e_min": self.e_min,
            "e_max": self.e_max,
            "ulp_radius": self.ulp_radius,
            "time_budget": self.time_budget,
            "mode": self.mode,
            "max_records": self.max_records,
        }


@dataclass(frozen=True)
class OrientCounterexample:
    """A quadruple on which floating-point orientation disagrees with the
    exact sign, with every recorded sign replayable bit-exactly."""

    a: Point3
    b: Point3
    c: Point3
    d: Point3
    per_base: tuple[OrientationSign, OrientationSign, OrientationSign]
    majority_sign: OrientationSign
    exact_sign: OrientationSign
    float_width: int

    def points(self) -> tuple[Point3, Point3, Point3, Point3]:
        return (self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        return {
            "a": list(self.a.hex_coords()),
            "b": list(self.b.hex_coords()),
            "c": list(self.c.hex_coords()),
            "d": list(self.d.hex_coords()),
            "per_base": [s.value for s in self.per_base],
            "majority_sign": self.majority_sign.value,
            "exact_sign": self.exact_sign.value,
            "float_width": self.float_width,
        }


def counterexample_from_dict(doc: dict) -> OrientCounterexample:
    def point(key: str) -> Point3:
        return Point3(*(float.fromhex(h) for h in doc[key]))

    return OrientCounterexample(
        a=point("a"),
        b=point("b"),
        c=point("c"),
        d=point("d"),
        per_base=tuple(OrientationSign(s) for s in doc["per_base"]),
        majority_sign=OrientationSign(doc["majority_sign"]),
        exact_sign=OrientationSign(doc["exact_sign"]),
        float_width=int(doc["float_width"]),
    )


@dataclass
class SearchStats:
    samples: int = 0
    base_errors: list = field(default_factory=lambda: [0, 0, 0])
    one_base_err: int = 0
    two_base_err: int = 0
    majority_err: int = 0
    wrong_sign_majority: int = 0
    ties: int = 0
    found_total: int = 0

    def merge(self, other: "SearchStats") -> None:
        self.samples += other.samples
        for i in range(3):
            self.base_errors[i] += other.base_errors[i]
        self.one_base_err += other.one_base_err
        self.two_base_err += other.two_base_err
        self.majority_err += other.majority_err
        self.wrong_sign_majority += other.wrong_sign_majority
        self.ties += other.ties
        self.found_total += other.found_total

    def to_dict(self) -> dict:
        rates = [
            (e / self.samples) if self.samples else 0.0 for e in self.base_errors
        ]
        return {
            "samples": self.samples,
            "base_errors": list(self.base_errors),
            "base_error_rates": rates,
            "one_base_err": self.one_base_err,
            "two_base_err": self.two_base_err,
            "majority_err": self.majority_err,
            "wrong_sign_majority": self.wrong_sign_majority,
            "ties": self.ties,
            "found_total": self.found_total,
        }


@dataclass
class SearchReport:
    config: OrientSearchConfig
    stats: SearchStats = field(default_factory=SearchStats)
    counterexamples: list = field(default_factory=list)


def _nudge_ulps(x: float, k: int, width: int) -> float:
    if width == 64:
        target = math.inf if k > 0 else -math.inf
        for _ in range(abs(k)):
            x = math.nextafter(x, target)
        return x
    v = np.float32(x)
    target = np.float32(np.inf) if k > 0 else np.float32(-np.inf)
    for _ in range(abs(k)):
        v = np.nextafter(v, target)
    return float(v)


def _lattice_triangle(rng, width: int, e_scale: int):
    """Three exactly representable non-collinear lattice points plus their
    integer coordinates (before scaling)."""
    m = _MANTISSA[width]
    while True:
        ints = [[rng.randint(-m, m) for _ in range(3)] for _ in range(3)]
        (ax, ay, az), (bx, by, bz), (cx, cy, cz) = ints
        ux, uy, uz = bx - ax, by - ay, bz - az
        vx, vy, vz = cx - ax, cy - ay, cz - az
        nx = uy * vz - uz * vy
        ny = uz * vx - ux * vz
        nz = ux * vy - uy * vx
        if nx or ny or nz:
            pts = tuple(
                Point3(*(math.ldexp(w, e_scale) for w in triple)) for triple in ints
            )
            return pts, ints, (nx, ny, nz)


def _on_plane_point(rng, ints, e_scale: int) -> Point3:
    """An affine combination of the triangle corners with weights on the
    1/8 grid; every intermediate is an integer small enough that the scaled
    result is exact."""
    (a, b, c) = ints
    jb = rng.randint(-_WEIGHT_RANGE, _WEIGHT_RANGE)
    jc = rng.randint(-_WEIGHT_RANGE, _WEIGHT_RANGE)
    nums = [
        (a[t] << _WEIGHT_SHIFT) + jb * (b[t] - a[t]) + jc * (c[t] - a[t]) for t in range(3)
    ]
    return Point3(*(math.ldexp(n, e_scale - _WEIGHT_SHIFT) for n in nums))


def gen_near_coplanar(config: OrientSearchConfig, rng, max_attempts: int = 64):
    """One search sample: (a, b, c, d, exact_sign).

    d starts exactly on plane(a, b, c) — verified against the exact
    predicate before perturbation — then one coordinate moves by k ulps,
    1 <= |k| <= ulp_radius, at the configured width. Samples whose
    perturbation stays exactly coplanar (plane normal orthogonal to the
    chosen axis) are redrawn.
    """
    for _ in range(max_attempts):
        e_scale = rng.randint(config.e_min, config.e_max)
        (a, b, c), ints, _normal = _lattice_triangle(rng, config.float_width, e_scale)
        d0 = _on_plane_point(rng, ints, e_scale)
        if orient_exact(a, b, c, d0) != OrientationSign.COPLANAR:
            raise AssertionError("on-plane construction produced a non-coplanar point")
        axis = rng.randrange(3)
        k = rng.randint(1, config.ulp_radius)
        if rng.randint(0, 1):
            k = -k
        coords = list(d0.as_tuple())
        coords[axis] = _nudge_ulps(coords[axis], k, config.float_width)
        d = Point3(*coords)
        exact_sign = orient_exact(a, b, c, d)
        if exact_sign != OrientationSign.COPLANAR:
            return a, b, c, d, exact_sign
    raise RuntimeError(f"no valid near-coplanar sample within {max_attempts} attempts")


def _score_sample(a, b, c, d, exact_sign, width: int):
    signs = tuple(orient_base(a, b, c, d, base, width) for base in BASE_CHOICES)
    vote: MajorityResult = majority_from_signs(signs)
    return signs, vote


def _search_chunk(config: OrientSearchConfig, chunk_index: int, start: int, stop: int):
    rng = chunk_rng(config.seed, "orient-search", chunk_index)
    stats = SearchStats()
    found = []
    for _ in range(start, stop):
        a, b, c, d, exact_sign = gen_near_coplanar(config, rng)
        signs, vote = _score_sample(a, b, c, d, exact_sign, config.float_width)
        errs = sum(1 for s in signs if s != exact_sign)
        stats.samples += 1
        for i, s in enumerate(signs):
            if s != exact_sign:
                stats.base_errors[i] += 1
        if errs >= 1:
            stats.one_base_err += 1
        if errs >= 2:
            stats.two_base_err += 1
        if vote.tie:
            stats.ties += 1
        majority_wrong = vote.sign != exact_sign
        if majority_wrong:
            stats.majority_err += 1
            if vote.sign not in (exact_sign, OrientationSign.COPLANAR):
                stats.wrong_sign_majority += 1
        hit = majority_wrong if config.mode == "majority" else errs >= 1
        if hit:
            stats.found_total += 1
            found.append(
                OrientCounterexample(
                    a, b, c, d, signs, vote.sign, exact_sign, config.float_width
                )
            )
    return stats, found


def search_disagreement(config: OrientSearchConfig, jobs: int = 1) -> SearchReport:
    """Run the configured search; statistics always come back, recorded
    counterexamples are capped at config.max_records (found_total keeps the
    true count). Deterministic given (config, seed) when iteration-bounded;
    a worker-partitioned run merges identically to a single-threaded one."""
    report = SearchReport(config)
    deadline = None if config.time_budget is None else time.monotonic() + config.time_budget
    chunks = list(chunk_ranges(config.iterations))

    def consume(result):
        stats, found = result
        report.stats.merge(stats)
        room = config.max_records - len(report.counterexamples)
        if room > 0:
            report.counterexamples.extend(found[:room])

    if jobs <= 1:
        for index, start, stop in chunks:
            if deadline is not None and time.monotonic() >= deadline:
                break
            consume(_search_chunk(config, index, start, stop))
        return report
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        window = max(2 * jobs, 4)
        position = 0
        while position < len(chunks):
            if deadline is not None and time.monotonic() >= deadline:
                break
            batch = chunks[position : position + window]
            futures = [pool.submit(_search_chunk, config, i, s, t) for i, s, t in batch]
            for fut in futures:
                consume(fut.result())
            position += len(batch)
    return report


def replay_counterexample(cex: OrientCounterexample) -> bool:
    """Recompute every recorded sign from the stored points; all must
    reproduce bit-exactly, including the exact-arithmetic sign."""
    signs, vote = _score_sample(cex.a, cex.b, cex.c, cex.d, cex.exact_sign, cex.float_width)
    return (
        signs == cex.per_base
        and vote.sign == cex.majority_sign
        and orient_exact(cex.a, cex.b, cex.c, cex.d) == cex.exact_sign
    )


def gen_near_coplanar_cloud(
    config: OrientSearchConfig, rng, near_points: int = 24
) -> list[Point3]:
    """An adversarial hull input: a triangle's corners, a swarm of points a
    few ulps off the triangle's plane, and two anchor points clearly off the
    plane so the cloud has genuine 3D extent."""
    e_scale = rng.randint(config.e_min, config.e_max)
    (a, b, c), ints, normal = _lattice_triangle(rng, config.float_width, e_scale)
    cloud = [a, b, c]
    for _ in range(near_points):
        d0 = _on_plane_point(rng, ints, e_scale)
        axis = rng.randrange(3)
        k = rng.randint(1, config.ulp_radius)
        if rng.randint(0, 1):
            k = -k
        coords = list(d0.as_tuple())
        coords[axis] = _nudge_ulps(coords[axis], k, config.float_width)
        cloud.append(Point3(*coords))

    # Anchors: base corner offset along the (integer) plane normal, shrunk
    # back onto the lattice so coordinates stay exact.
    m = _MANTISSA[config.float_width]
    bits = max(x.bit_length() for x in normal)
    shift = max(0, bits - m.bit_length() + 1)
    ns = [x >> shift for x in normal]
    if not any(ns):
        ns = [(x > 0) - (x < 0) for x in normal]
    base = ints[0]
    for direction in (1, -1):
        coords = [math.ldexp(base[t] + direction * ns[t], e_scale) for t in range(3)]
        cloud.append(Point3(*coords))
    rng.shuffle(cloud)
    return cloud


def find_hull_breakage_cloud(config: OrientSearchConfig, attempts: int = 200,
                             near_points: int = 24):
    """Search for a cloud whose float-predicate hull either fails
    construction or fails exact validation. Returns (points, outcome,
    attempts_used) where outcome is the failure report or the invalid
    hull; None when the budget is exhausted."""
    from .hull import HullFailure, incremental_hull, validate_hull

    rng = chunk_rng(config.seed, "hull-breakage", 0)
    for attempt in range(1, attempts + 1):
        cloud = gen_near_coplanar_cloud(config, rng, near_points)
        outcome = incremental_hull(cloud, predicate="float_single")
        if isinstance(outcome, HullFailure):
            return cloud, outcome, attempt
        if not validate_hull(cloud, outcome).valid:
            return cloud, outcome, attempt
    return None


def report_to_json(report: SearchReport) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "orient-search",
        "generator": GENERATOR_NAME,
        "chunk_size": CHUNK_SIZE,
        "config": report.config.to_dict(),
        "stats": report.stats.to_dict(),
        "counterexamples": [c.to_dict() for c in report.counterexamples],
    }
    return json.dumps(doc, indent=2) + "\n"
