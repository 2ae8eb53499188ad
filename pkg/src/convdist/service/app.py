"""FastAPI application exposing distances, the flow solver and experiments."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import BudgetExceededError, MassConservationError, RejectedInputError
from ..measures import FiniteMeasure
from ..metrics import (
    concentration,
    convex_1d,
    convex_2d_lower,
    kolmogorov,
    quantile,
    total_variation,
)
from ..prokhorov import (
    CouplingPlan,
    coupling_check,
    prokhorov_bruteforce,
    prokhorov_exact,
    scaling_transfer,
)
from ..experiments import run_experiment
from . import schemas as s


def create_app() -> FastAPI:
    app = FastAPI(
        title="convdist",
        version=__version__,
        description=(
            "Distances between discrete probability measures and their "
            "convolution powers: Kolmogorov, total variation, convex-set "
            "bounds, exact Prokhorov with couplings, and the verification "
            "experiments."
        ),
    )

    @app.exception_handler(RejectedInputError)
    async def _rejected(request: Request, exc: RejectedInputError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(BudgetExceededError)
    async def _budget(request: Request, exc: BudgetExceededError):
        return JSONResponse(status_code=413, content={"detail": str(exc)})

    @app.exception_handler(MassConservationError)
    async def _mass(request: Request, exc: MassConservationError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    @app.get("/health", response_model=s.HealthOut)
    def health() -> s.HealthOut:
        return s.HealthOut(status="ok", version=__version__)

    @app.post("/measures/validate", response_model=s.MeasureSummaryOut)
    def validate_measure(doc: s.MeasureDoc) -> s.MeasureSummaryOut:
        m = s.to_measure(doc)
        pts, w = m.support()
        return s.MeasureSummaryOut(
            kind="finite" if isinstance(m, FiniteMeasure) else "lattice",
            dim=m.dim,
            support_size=int(len(w)),
            total_mass=float(m.masses.sum()),
        )

    @app.post("/distances/kolmogorov", response_model=s.DistanceOut)
    def dist_kolmogorov(req: s.PairRequest) -> s.DistanceOut:
        rep = kolmogorov(s.to_measure(req.f), s.to_measure(req.g))
        return s.DistanceOut(**rep.to_doc())

    @app.post("/distances/total-variation", response_model=s.DistanceOut)
    def dist_tv(req: s.PairRequest) -> s.DistanceOut:
        rep = total_variation(s.to_measure(req.f), s.to_measure(req.g))
        return s.DistanceOut(**rep.to_doc())

    @app.post("/distances/convex-1d", response_model=s.DistanceOut)
    def dist_convex_1d(req: s.PairRequest) -> s.DistanceOut:
        rep = convex_1d(s.to_measure(req.f), s.to_measure(req.g))
        return s.DistanceOut(**rep.to_doc())

    @app.post("/distances/convex-2d-lower", response_model=s.DistanceOut)
    def dist_convex_2d(req: s.ConvexLowerRequest) -> s.DistanceOut:
        rep = convex_2d_lower(
            s.to_measure(req.f), s.to_measure(req.g),
            samples=req.samples, seed=req.seed,
        )
        return s.DistanceOut(**rep.to_doc())

    @app.post("/distances/concentration", response_model=s.ValueOut)
    def dist_concentration(req: s.ConcentrationRequest) -> s.ValueOut:
        return s.ValueOut(value=concentration(s.to_measure(req.f), req.lam))

    @app.post("/measures/quantile", response_model=s.ValueOut)
    def measure_quantile(req: s.QuantileRequest) -> s.ValueOut:
        return s.ValueOut(value=quantile(s.to_measure(req.f), req.q))

    @app.post("/prokhorov/exact", response_model=s.ProkhorovOut)
    def prokhorov(req: s.ProkhorovRequest) -> s.ProkhorovOut:
        res = prokhorov_exact(
            s.to_measure(req.f), s.to_measure(req.g),
            point_budget=req.point_budget, include_plan=req.include_plan,
        )
        doc = res.to_doc()
        return s.ProkhorovOut(**doc)

    @app.post("/prokhorov/bruteforce", response_model=s.ValueOut)
    def prokhorov_brute(req: s.PairRequest) -> s.ValueOut:
        return s.ValueOut(
            value=prokhorov_bruteforce(s.to_measure(req.f), s.to_measure(req.g))
        )

    @app.post("/prokhorov/coupling-check", response_model=s.CouplingCheckOut)
    def check_coupling(req: s.CouplingCheckRequest) -> s.CouplingCheckOut:
        plan = CouplingPlan(
            row_points=req.plan.row_points,
            col_points=req.plan.col_points,
            joint=req.plan.joint,
        )
        exceed, ok = coupling_check(plan, req.epsilon)
        return s.CouplingCheckOut(exceed_mass=exceed, ok=ok)

    @app.post("/prokhorov/scaling-transfer", response_model=s.ScalingTransferOut)
    def scaling(req: s.ScalingTransferRequest) -> s.ScalingTransferOut:
        lhs, rhs = scaling_transfer(
            s.to_measure(req.f), s.to_measure(req.g), req.a, req.b,
            point_budget=req.point_budget,
        )
        return s.ScalingTransferOut(lhs=lhs, rhs=rhs)

    @app.post("/experiments/run", response_model=s.ExperimentOut)
    def experiments(req: s.ExperimentRequest) -> s.ExperimentOut:
        measure = None
        measure_id = "none"
        if req.measure is not None:
            measure, measure_id = req.measure.resolve()
        report = run_experiment(
            req.experiment,
            measure=measure,
            measure_id=measure_id,
            n_grid=req.n_grid,
            p=req.p,
            q=req.q,
            radius=req.radius,
            samples=req.samples,
            seed=req.seed,
            cell_budget=req.cell_budget,
            point_budget=req.point_budget,
        )
        doc = report.to_doc()
        rows = [s.ExperimentRowOut(**row) for row in doc["rows"]]
        return s.ExperimentOut(
            experiment=doc["experiment"],
            id=doc["id"],
            rows=rows,
            metadata=doc["metadata"],
            all_passed=doc["all_passed"],
        )

    return app


app = create_app()
