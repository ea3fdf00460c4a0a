"""Pydantic request/response models for the HTTP service.

Coordinates may arrive as JSON numbers or hex-float strings; hex-float is
the bit-exact form and is what responses emit for any float that matters.
"""

from __future__ import annotations

import math
from typing import Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

Coordinate = Union[float, str]


def coerce_coordinate(value: Coordinate) -> float:
    if isinstance(value, str):
        parsed = float.fromhex(value) if "0x" in value.lower() else float(value)
    else:
        parsed = float(value)
    if not math.isfinite(parsed):
        raise ValueError(f"non-finite coordinate {value!r}")
    return parsed


class PointsPayload(BaseModel):
    points: list[list[Coordinate]]

    @field_validator("points")
    @classmethod
    def _triples(cls, points):
        coerced = []
        for i, p in enumerate(points):
            if len(p) != 3:
                raise ValueError(f"point {i} must have 3 coordinates, got {len(p)}")
            coerced.append([coerce_coordinate(c) for c in p])
        return coerced


class RebalanceRequest(BaseModel):
    algo: Literal["float", "int", "rational"]
    tasks: list[int]
    new_total: int


class RebalanceChecks(BaseModel):
    sum_ok: bool
    bounds_ok: bool


class RebalanceResponse(BaseModel):
    algo: str
    new_tasks: list[int]
    sum: int
    final_rest: str = Field(description="Hex-float for algo=float, rational string otherwise.")
    final_rest_dec: Optional[str] = None
    lost: int
    checks: RebalanceChecks


class FuzzRebalanceRequest(BaseModel):
    seed: int
    iterations: int = 100_000
    exponent_max: int = 40
    delta_bound: int = 100
    node_count: int = 2
    time_budget: Optional[float] = None
    jobs: int = 1


class CounterexampleModel(BaseModel):
    tasks: list[int]
    new_total: int
    final_rest_hex: str
    final_rest_dec: str
    lost: int


class FuzzRebalanceResponse(BaseModel):
    generator: str
    iterations_done: int
    resampled_values: int
    invalid_tuples: int
    surplus_count: int
    counterexamples: list[CounterexampleModel]


class DifferentialResponse(BaseModel):
    generator: str
    iterations_done: int
    resampled_values: int
    invalid_tuples: int
    violations: list[dict]


class OrientRequest(PointsPayload):
    predicate: Literal["float", "majority", "exact"]
    base: int = 1
    width: Literal[32, 64] = 64


class OrientResponse(BaseModel):
    predicate: str
    sign: str
    exact_sign: str
    agrees_exact: bool
    base: Optional[int] = None
    per_base: Optional[list[str]] = None
    tie: Optional[bool] = None


class HullRequest(PointsPayload):
    predicate: Literal["float", "majority", "exact"]
    validate_hull: bool = True


class HullResponse(BaseModel):
    predicate: str
    built: bool
    facet_count: Optional[int] = None
    facets: Optional[list[list[int]]] = None
    validity: Optional[dict] = None
    failure: Optional[dict] = None


class SearchOrientRequest(BaseModel):
    seed: int
    iterations: int = 10_000
    float_width: Literal[32, 64] = 64
    e_min: int = 0
    e_max: int = 0
    ulp_radius: int = 2
    time_budget: Optional[float] = None
    mode: Literal["single_base", "majority"] = "single_base"
    max_records: int = 1000
    jobs: int = 1


class SearchOrientResponse(BaseModel):
    generator: str
    config: dict
    stats: dict
    counterexamples: list[dict]


class EmitSmtRequest(BaseModel):
    float_width: Literal[32, 64] = 64
    mode: Literal["single_base", "majority"] = "majority"
    e_min: int = 0
    e_max: int = 0
    fixed: Optional[dict[str, Coordinate]] = None
