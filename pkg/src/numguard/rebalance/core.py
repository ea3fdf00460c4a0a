"""Three semantics of the cluster task-redistribution step.

A cluster holds ``tasks[i]`` tasks on node i (total ``s``); the load has to
be re-spread so the new counts sum to ``new_total`` while each node keeps
roughly its old share. Three implementations of the same loop live here:

* :func:`rebalance_float` — the historical floating-point version, preserved
  bug-for-bug. It accumulates fractional shares in binary64 and hands out an
  extra task whenever the accumulator is epsilon-close to 1.0. Rounding can
  make its output sum drift from ``new_total``; that drift is the behaviour
  under study, not a defect of this module.
* :func:`rebalance_int` — the integer revision: the remainder accumulator
  counts exact modular residues and drains whenever it reaches one whole
  unit of ``s``. Its output sum always equals ``new_total`` and every entry
  stays within floor/ceil of the exact proportional share.
* :func:`rebalance_rational` — the floating-point loop re-run on exact
  rationals (``fractions.Fraction``), with the epsilon test degenerated to
  the exact threshold ``rest >= 1``. Serves as the ground-truth reference
  the integer revision is differentially tested against.

All functions are pure; inputs are immutable value objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "FLT_EPSILON",
    "INPUT_BIT_BOUND",
    "PreconditionError",
    "TaskDistribution",
    "RebalanceOutput",
    "RebalanceStep",
    "is_nearly_equal",
    "rebalance_float",
    "rebalance_int",
    "rebalance_int_trace",
    "rebalance_rational",
    "exact_share_bounds",
]

# Gap between 1.0 and the next larger binary32 value. The original code used
# this single-precision epsilon while computing in double precision; the
# mismatch is reproduced on purpose.
FLT_EPSILON = 2.0 ** -23

# Inputs are held below 2**63 so the scaled products fit 128-bit integers in
# a fixed-width port. Python ints never overflow; the bound is kept as the
# documented contract.
INPUT_BIT_BOUND = 63


class PreconditionError(ValueError):
    """An input violates one of the documented preconditions."""


@dataclass(frozen=True)
class TaskDistribution:
    """Per-node task counts before rebalancing.

    Invariants: at least one node, every count >= 0, total > 0, every count
    below 2**63.
    """

    tasks: tuple[int, ...]

    def __init__(self, tasks) -> None:
        object.__setattr__(self, "tasks", tuple(int(t) for t in tasks))
        if len(self.tasks) < 1:
            raise PreconditionError("length tasks >= 1: node count must be at least 1")
        for i, t in enumerate(self.tasks):
            if t < 0:
                raise PreconditionError(f"tasks[i] >= 0: tasks[{i}] = {t}")
            if t >= 1 << INPUT_BIT_BOUND:
                raise PreconditionError(
                    f"tasks[{i}] exceeds the {INPUT_BIT_BOUND}-bit input bound"
                )
        if sum(self.tasks) <= 0:
            raise PreconditionError("0 < total_tasks: task counts sum to zero")

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def total(self) -> int:
        return sum(self.tasks)


@dataclass(frozen=True)
class RebalanceOutput:
    """Result of one rebalancing run.

    ``final_rest`` is diagnostic: binary64 for the floating-point semantics,
    exact :class:`~fractions.Fraction` for the integer and rational ones.
    """

    new_tasks: tuple[int, ...]
    final_rest: Union[float, Fraction]

    @property
    def total(self) -> int:
        return sum(self.new_tasks)


@dataclass(frozen=True)
class RebalanceStep:
    """One iteration of the instrumented integer loop."""

    index: int
    floor_size: int
    rest_after: int


def is_nearly_equal(a: float, b: float) -> bool:
    """Absolute epsilon comparison at single-precision epsilon, evaluated in
    binary64: |a - b| < 2**-23. NaN inputs compare unequal."""
    return abs(a - b) < FLT_EPSILON


def _require_new_total(new_total: int) -> int:
    new_total = int(new_total)
    if new_total < 0:
        raise PreconditionError(f"0 <= new_total_tasks: got {new_total}")
    if new_total >= 1 << INPUT_BIT_BOUND:
        raise PreconditionError(
            f"new_total_tasks exceeds the {INPUT_BIT_BOUND}-bit input bound"
        )
    return new_total


def _require_binary64_exact(value: int, what: str) -> float:
    try:
        as_float = float(value)
    except OverflowError:
        raise PreconditionError(f"{what} = {value} is not representable in binary64") from None
    if int(as_float) != value:
        raise PreconditionError(f"{what} = {value} is not exactly representable in binary64")
    return as_float


def rebalance_float(dist: TaskDistribution, new_total: int) -> RebalanceOutput:
    """Historical floating-point rebalancing, executed faithfully in binary64.

    Per node: share = tasks[i]/total, real_size = share*new_total, the floor
    goes to the node and the fractional part is added to ``rest``; when
    ``rest`` is epsilon-close to 1.0 one extra task is handed out and rest is
    decremented once (never drained in a loop). The output sum may differ
    from ``new_total``.

    All inputs, including the derived total, must be exactly representable
    in binary64; anything else is rejected rather than silently rounded.
    """
    new_total = _require_new_total(new_total)
    new_total_f = _require_binary64_exact(new_total, "new_total_tasks")
    total_f = _require_binary64_exact(dist.total, "total_tasks")
    for i, t in enumerate(dist.tasks):
        _require_binary64_exact(t, f"tasks[{i}]")

    rest = 0.0
    new_tasks = []
    for t in dist.tasks:
        share = float(t) / total_f
        real_size = share * new_total_f
        floor_size = math.floor(real_size)
        rest += real_size - floor_size
        assigned = floor_size
        if is_nearly_equal(rest, 1.0):
            assigned += 1
            rest -= 1
        new_tasks.append(assigned)
    return RebalanceOutput(tuple(new_tasks), rest)


def _rebalance_int(dist: TaskDistribution, new_total: int, steps: list | None):
    total = dist.total
    rest = 0
    new_tasks = []
    for i, t in enumerate(dist.tasks):
        scaled = new_total * t
        floor_size = scaled // total
        rest += scaled % total
        assigned = floor_size
        if rest >= total:
            assigned += 1
            rest -= total
        new_tasks.append(assigned)
        if steps is not None:
            steps.append(RebalanceStep(i, floor_size, rest))
    return RebalanceOutput(tuple(new_tasks), Fraction(rest, total))


def rebalance_int(dist: TaskDistribution, new_total: int) -> RebalanceOutput:
    """Integer rebalancing: floor of the scaled share per node, modular
    residues accumulated in ``rest`` and drained one whole ``total`` at a
    time. The output sum equals ``new_total`` and ``rest`` is 0 at exit."""
    return _rebalance_int(dist, _require_new_total(new_total), None)


def rebalance_int_trace(
    dist: TaskDistribution, new_total: int
) -> tuple[RebalanceOutput, tuple[RebalanceStep, ...]]:
    """Same as :func:`rebalance_int` but also returns the per-iteration
    trace (index, floor_size, rest after the iteration) for invariant
    checking: 0 <= rest < total holds after every step and rest == 0 at exit."""
    steps: list[RebalanceStep] = []
    out = _rebalance_int(dist, _require_new_total(new_total), steps)
    return out, tuple(steps)


def rebalance_rational(dist: TaskDistribution, new_total: int) -> RebalanceOutput:
    """The floating-point loop on exact rationals.

    Shares and the rest accumulator are Fractions, so the epsilon test
    collapses to the exact threshold ``rest >= 1`` — the only condition
    under which the accumulator can ever reach a full unit."""
    new_total = _require_new_total(new_total)
    total = dist.total
    rest = Fraction(0)
    new_tasks = []
    for t in dist.tasks:
        share = Fraction(t, total)
        real_size = share * new_total
        floor_size = math.floor(real_size)
        rest += real_size - floor_size
        assigned = floor_size
        if rest >= 1:
            assigned += 1
            rest -= 1
        new_tasks.append(assigned)
    return RebalanceOutput(tuple(new_tasks), rest)


def exact_share_bounds(task: int, total: int, new_total: int) -> tuple[int, int]:
    """Floor and ceiling of the exact proportional share task*new_total/total,
    computed on integers (exact rational floor/ceil)."""
    scaled = task * new_total
    lo = scaled // total
    hi = -((-scaled) // total)
    return lo, hi
