"""FastAPI service wrapping the core package.

Every CLI capability is also reachable over HTTP for long-running or
multi-client use; the service holds no state, so responses are as
deterministic as the library calls behind them.
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__
from .._seeding import GENERATOR_NAME
from ..geometry.hull import DegenerateInputError, HullFailure, incremental_hull, validate_hull
from ..geometry.predicates import Point3, orient_base, orient_exact, orient_majority_detail
from ..geometry.search import OrientSearchConfig, search_disagreement
from ..geometry.smt import emit_smt
from ..rebalance.core import (
    PreconditionError,
    TaskDistribution,
    exact_share_bounds,
    rebalance_float,
    rebalance_int,
    rebalance_rational,
)
from ..rebalance.fuzz import FuzzConfig, differential_fuzz, find_float_counterexamples
from . import models

_PREDICATE_MAP = {"float": "float_single", "majority": "majority", "exact": "exact"}


def _points(payload: models.PointsPayload) -> list[Point3]:
    return [Point3(*p) for p in payload.points]


def create_app() -> FastAPI:
    app = FastAPI(title="numguard", version=__version__)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/rebalance", response_model=models.RebalanceResponse)
    def rebalance(req: models.RebalanceRequest):
        try:
            dist = TaskDistribution(req.tasks)
            runner = {
                "float": rebalance_float,
                "int": rebalance_int,
                "rational": rebalance_rational,
            }[req.algo]
            out = runner(dist, req.new_total)
        except PreconditionError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        lost = req.new_total - out.total
        bounds = [exact_share_bounds(t, dist.total, req.new_total) for t in dist.tasks]
        bounds_ok = all(lo <= v <= hi for v, (lo, hi) in zip(out.new_tasks, bounds))
        rational_rest = isinstance(out.final_rest, Fraction)
        return models.RebalanceResponse(
            algo=req.algo,
            new_tasks=list(out.new_tasks),
            sum=out.total,
            final_rest=str(out.final_rest) if rational_rest else out.final_rest.hex(),
            final_rest_dec=None if rational_rest else repr(out.final_rest),
            lost=lost,
            checks=models.RebalanceChecks(sum_ok=lost == 0, bounds_ok=bounds_ok),
        )

    def _fuzz_config(req: models.FuzzRebalanceRequest) -> FuzzConfig:
        try:
            return FuzzConfig(
                seed=req.seed,
                iterations=req.iterations,
                exponent_max=req.exponent_max,
                delta_bound=req.delta_bound,
                node_count=req.node_count,
                time_budget=req.time_budget,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.post("/fuzz/rebalance", response_model=models.FuzzRebalanceResponse)
    def fuzz_rebalance(req: models.FuzzRebalanceRequest):
        report = find_float_counterexamples(_fuzz_config(req), jobs=req.jobs)
        return models.FuzzRebalanceResponse(
            generator=GENERATOR_NAME,
            iterations_done=report.iterations_done,
            resampled_values=report.resampled_values,
            invalid_tuples=report.invalid_tuples,
            surplus_count=report.surplus_count,
            counterexamples=[
                models.CounterexampleModel(**c.to_dict()) for c in report.counterexamples
            ],
        )

    @app.post("/fuzz/rebalance/differential", response_model=models.DifferentialResponse)
    def fuzz_rebalance_differential(req: models.FuzzRebalanceRequest):
        report = differential_fuzz(_fuzz_config(req), jobs=req.jobs)
        return models.DifferentialResponse(
            generator=GENERATOR_NAME,
            iterations_done=report.iterations_done,
            resampled_values=report.resampled_values,
            invalid_tuples=report.invalid_tuples,
            violations=report.violations,
        )

    @app.post("/orient", response_model=models.OrientResponse)
    def orient(req: models.OrientRequest):
        pts = _points(req)
        if len(pts) != 4:
            raise HTTPException(status_code=422, detail=f"need 4 points, got {len(pts)}")
        if req.base not in (1, 2, 3):
            raise HTTPException(status_code=422, detail="base must be 1, 2 or 3")
        a, b, c, d = pts
        exact = orient_exact(a, b, c, d)
        extra: dict = {}
        if req.predicate == "exact":
            sign = exact
        elif req.predicate == "float":
            sign = orient_base(a, b, c, d, req.base, req.width)
            extra["base"] = req.base
        else:
            detail = orient_majority_detail(a, b, c, d, req.width)
            sign = detail.sign
            extra["per_base"] = [s.value for s in detail.per_base]
            extra["tie"] = detail.tie
        return models.OrientResponse(
            predicate=req.predicate,
            sign=sign.value,
            exact_sign=exact.value,
            agrees_exact=sign == exact,
            **extra,
        )

    @app.post("/hull", response_model=models.HullResponse)
    def hull(req: models.HullRequest):
        pts = _points(req)
        try:
            outcome = incremental_hull(pts, predicate=_PREDICATE_MAP[req.predicate])
        except (DegenerateInputError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if isinstance(outcome, HullFailure):
            return models.HullResponse(
                predicate=req.predicate, built=False, failure=outcome.to_dict()
            )
        validity = validate_hull(pts, outcome).to_dict() if req.validate_hull else None
        return models.HullResponse(
            predicate=req.predicate,
            built=True,
            facet_count=len(outcome.facets),
            facets=[list(f) for f in outcome.facets],
            validity=validity,
        )

    @app.post("/search/orient", response_model=models.SearchOrientResponse)
    def search_orient(req: models.SearchOrientRequest):
        try:
            config = OrientSearchConfig(
                seed=req.seed,
                iterations=req.iterations,
                float_width=req.float_width,
                e_min=req.e_min,
                e_max=req.e_max,
                ulp_radius=req.ulp_radius,
                time_budget=req.time_budget,
                mode=req.mode,
                max_records=req.max_records,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        report = search_disagreement(config, jobs=req.jobs)
        return models.SearchOrientResponse(
            generator=GENERATOR_NAME,
            config=config.to_dict(),
            stats=report.stats.to_dict(),
            counterexamples=[c.to_dict() for c in report.counterexamples],
        )

    @app.post("/emit-smt", response_class=PlainTextResponse)
    def emit(req: models.EmitSmtRequest):
        fixed = None
        if req.fixed:
            try:
                fixed = {k: models.coerce_coordinate(v) for k, v in req.fixed.items()}
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        try:
            config = OrientSearchConfig(
                seed=0,
                float_width=req.float_width,
                e_min=req.e_min,
                e_max=req.e_max,
                mode=req.mode,
            )
            return emit_smt(config, fixed=fixed)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
