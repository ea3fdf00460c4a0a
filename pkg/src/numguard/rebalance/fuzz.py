"""Structured random search for rebalancing counterexamples.

Inputs are drawn from the lattice 2**e + delta (e in [0, exponent_max],
delta in [-delta_bound, delta_bound]): small offsets from large powers of
two exercise the full mantissa and provoke rounding in the floating-point
loop. Two campaigns share the sampler:

* :func:`find_float_counterexamples` hunts inputs where the floating-point
  rebalancer loses (or gains) tasks.
* :func:`differential_fuzz` checks the integer rebalancer against its
  contract on every sampled input: exact sum, floor/ceil bounds, elementwise
  agreement with the rational reference, and the rest-accumulator range
  invariant from the instrumented trace.

Both are deterministic given (config, seed) and may be partitioned across
worker processes; the merged report is identical to a single-threaded run
because sub-seeds are derived per fixed-size chunk (see
:mod:`numguard._seeding`).
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .._seeding import CHUNK_SIZE, GENERATOR_NAME, chunk_ranges, chunk_rng
from .core import (
    TaskDistribution,
    exact_share_bounds,
    rebalance_float,
    rebalance_int_trace,
    rebalance_rational,
)

__all__ = [
    "FuzzConfig",
    "RebalanceCounterexample",
    "FuzzReport",
    "DifferentialReport",
    "lattice_value",
    "sample_value",
    "find_float_counterexamples",
    "differential_fuzz",
    "replay_counterexample",
    "report_to_csv",
    "report_to_json",
    "differential_report_to_json",
]

CSV_HEADER = "s_values;new_total;final_rest_hex;final_rest_dec;lost"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FuzzConfig:
    """Knobs of the counterexample search space and run budget."""

    seed: int
    iterations: int = 1_000_000
    exponent_max: int = 40
    delta_bound: int = 100
    node_count: int = 2
    time_budget: Optional[float] = None

    def __post_init__(self) -> None:
        if self.exponent_max < 0:
            raise ValueError("exponent_max must be >= 0")
        if self.delta_bound < 0:
            raise ValueError("delta_bound must be >= 0")
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive when given")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iterations": self.iterations,
            "exponent_max": self.exponent_max,
            "delta_bound": self.delta_bound,
            "node_count": self.node_count,
            "time_budget": self.time_budget,
        }


@dataclass(frozen=True)
class RebalanceCounterexample:
    """An input on which the floating-point rebalancer mis-sums.

    ``lost`` is new_total minus the produced sum; negative means surplus.
    Replaying tasks/new_total through rebalance_float reproduces
    ``final_rest`` bit-exactly.
    """

    tasks: tuple[int, ...]
    new_total: int
    final_rest: float
    lost: int

    def to_dict(self) -> dict:
        return {
            "tasks": list(self.tasks),
            "new_total": self.new_total,
            "final_rest_hex": self.final_rest.hex(),
            "final_rest_dec": repr(self.final_rest),
            "lost": self.lost,
        }


@dataclass
class FuzzReport:
    config: FuzzConfig
    iterations_done: int = 0
    resampled_values: int = 0
    invalid_tuples: int = 0
    surplus_count: int = 0
    counterexamples: list[RebalanceCounterexample] = field(default_factory=list)

    @property
    def found(self) -> int:
        return len(self.counterexamples)


@dataclass
class DifferentialReport:
    config: FuzzConfig
    iterations_done: int = 0
    resampled_values: int = 0
    invalid_tuples: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def violation_count(self) -> int:
        return len(self.violations)


def lattice_value(exponent: int, delta: int) -> int:
    """The search-lattice point 2**exponent + delta."""
    return (1 << exponent) + delta


class _CountingSampler:
    """Draws lattice values, redrawing non-positive ones and counting redraws."""

    def __init__(self, config: FuzzConfig, rng: random.Random) -> None:
        self.config = config
        self.rng = rng
        self.resampled = 0

    def draw(self) -> int:
        while True:
            e = self.rng.randint(0, self.config.exponent_max)
            delta = self.rng.randint(-self.config.delta_bound, self.config.delta_bound)
            value = lattice_value(e, delta)
            if value > 0:
                return value
            self.resampled += 1


def sample_value(config: FuzzConfig, rng: random.Random) -> int:
    """One positive lattice draw: 2**e + delta with e, delta uniform,
    redrawn while the result is <= 0."""
    return _CountingSampler(config, rng).draw()


def _draw_input(sampler: _CountingSampler) -> tuple[tuple[int, ...], int]:
    tasks = tuple(sampler.draw() for _ in range(sampler.config.node_count))
    new_total = sampler.draw()
    return tasks, new_total


def _float_chunk(config: FuzzConfig, chunk_index: int, start: int, stop: int):
    rng = chunk_rng(config.seed, "rebalance-fuzz", chunk_index)
    sampler = _CountingSampler(config, rng)
    found = []
    for _ in range(start, stop):
        tasks, new_total = _draw_input(sampler)
        out = rebalance_float(TaskDistribution(tasks), new_total)
        lost = new_total - out.total
        if lost != 0:
            found.append(RebalanceCounterexample(tasks, new_total, out.final_rest, lost))
    return stop - start, sampler.resampled, found


def _diff_chunk(config: FuzzConfig, chunk_index: int, start: int, stop: int):
    rng = chunk_rng(config.seed, "rebalance-fuzz", chunk_index)
    sampler = _CountingSampler(config, rng)
    violations = []

    def record(kind: str, tasks, new_total, detail) -> None:
        violations.append(
            {"property": kind, "tasks": list(tasks), "new_total": new_total, "detail": detail}
        )

    for _ in range(start, stop):
        tasks, new_total = _draw_input(sampler)
        dist = TaskDistribution(tasks)
        out, steps = rebalance_int_trace(dist, new_total)

        if out.total != new_total:
            record("exact-sum", tasks, new_total, {"sum": out.total})
        for i, t in enumerate(dist.tasks):
            lo, hi = exact_share_bounds(t, dist.total, new_total)
            if not lo <= out.new_tasks[i] <= hi:
                record(
                    "floor-ceil-bounds",
                    tasks,
                    new_total,
                    {"index": i, "value": out.new_tasks[i], "floor": lo, "ceil": hi},
                )
        reference = rebalance_rational(dist, new_total)
        if reference.new_tasks != out.new_tasks:
            record(
                "rational-equivalence",
                tasks,
                new_total,
                {"int": list(out.new_tasks), "rational": list(reference.new_tasks)},
            )
        for step in steps:
            if not 0 <= step.rest_after < dist.total:
                record(
                    "rest-range",
                    tasks,
                    new_total,
                    {"index": step.index, "rest": step.rest_after},
                )
        if steps and steps[-1].rest_after != 0:
            record("rest-zero-exit", tasks, new_total, {"rest": steps[-1].rest_after})
    return stop - start, sampler.resampled, violations


def _run_chunked(config: FuzzConfig, worker, jobs: int) -> Iterable[tuple]:
    """Run worker(config, chunk_index, start, stop) over all chunks, in chunk
    order, optionally on a process pool. Yields chunk results in order; the
    time budget is checked between chunks (single-threaded) or between
    submission windows (pooled), so a budgeted run is a prefix of the full
    deterministic stream."""
    deadline = None if config.time_budget is None else time.monotonic() + config.time_budget
    chunks = list(chunk_ranges(config.iterations))
    if jobs <= 1:
        for index, start, stop in chunks:
            if deadline is not None and time.monotonic() >= deadline:
                break
            yield worker(config, index, start, stop)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        window = max(2 * jobs, 4)
        position = 0
        while position < len(chunks):
            if deadline is not None and time.monotonic() >= deadline:
                break
            batch = chunks[position : position + window]
            futures = [pool.submit(worker, config, i, s, t) for i, s, t in batch]
            for fut in futures:
                yield fut.result()
            position += len(batch)


def find_float_counterexamples(config: FuzzConfig, jobs: int = 1) -> FuzzReport:
    """Fuzz the floating-point rebalancer; every input whose output sum
    drifts from new_total is recorded. Deterministic given (config, seed)
    when iteration-bounded."""
    report = FuzzReport(config)
    for done, resampled, found in _run_chunked(config, _float_chunk, jobs):
        report.iterations_done += done
        report.resampled_values += resampled
        report.counterexamples.extend(found)
    report.surplus_count = sum(1 for c in report.counterexamples if c.lost < 0)
    return report


def differential_fuzz(config: FuzzConfig, jobs: int = 1) -> DifferentialReport:
    """Check exact-sum, floor/ceil bounds, rational equivalence and the rest
    invariant for the integer rebalancer over fuzzed inputs. Violations are
    reported, never raised; an empty list is the expected outcome."""
    report = DifferentialReport(config)
    for done, resampled, violations in _run_chunked(config, _diff_chunk, jobs):
        report.iterations_done += done
        report.resampled_values += resampled
        report.violations.extend(violations)
    return report


def replay_counterexample(cex: RebalanceCounterexample) -> bool:
    """Re-execute the floating-point rebalancer on the recorded input and
    confirm final_rest (bit-exact) and the lost count reproduce."""
    out = rebalance_float(TaskDistribution(cex.tasks), cex.new_total)
    same_rest = out.final_rest.hex() == cex.final_rest.hex()
    return same_rest and (cex.new_total - out.total) == cex.lost


def report_to_csv(report: FuzzReport) -> str:
    lines = [CSV_HEADER]
    for cex in report.counterexamples:
        lines.append(
            ";".join(
                (
                    ",".join(str(t) for t in cex.tasks),
                    str(cex.new_total),
                    cex.final_rest.hex(),
                    repr(cex.final_rest),
                    str(cex.lost),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _report_header(report) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": GENERATOR_NAME,
        "chunk_size": CHUNK_SIZE,
        "config": report.config.to_dict(),
        "iterations_done": report.iterations_done,
        "resampled_values": report.resampled_values,
        "invalid_tuples": report.invalid_tuples,
    }


def report_to_json(report: FuzzReport) -> str:
    doc = _report_header(report)
    doc["kind"] = "rebalance-fuzz"
    doc["surplus_count"] = report.surplus_count
    doc["counterexamples"] = [c.to_dict() for c in report.counterexamples]
    return json.dumps(doc, indent=2) + "\n"


def differential_report_to_json(report: DifferentialReport) -> str:
    doc = _report_header(report)
    doc["kind"] = "rebalance-differential"
    doc["violations"] = report.violations
    return json.dumps(doc, indent=2) + "\n"
