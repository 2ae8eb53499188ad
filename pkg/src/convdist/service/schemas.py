"""Pydantic request/response models for the HTTP service.

Measure payloads mirror the on-disk JSON document format: a lattice document
``{"dim", "step", "offset", "masses"}`` or a point-set document
``{"points", "masses"}``.  Clients send measure content inline; the service
never reads files.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

from ..errors import RejectedInputError
from ..measures import Measure, measure_from_doc


class LatticeDoc(BaseModel):
    dim: Literal[1, 2]
    step: list[float]
    offset: list[float]
    masses: list

    model_config = {"extra": "forbid"}


class FiniteDoc(BaseModel):
    points: list[list[float]]
    masses: list[float]

    model_config = {"extra": "forbid"}


MeasureDoc = Union[LatticeDoc, FiniteDoc]


def to_measure(doc: MeasureDoc) -> Measure:
    return measure_from_doc(doc.model_dump())


class MeasureSpec(BaseModel):
    """A measure given either as a built-in descriptor or as a document."""

    builtin: Optional[str] = None
    doc: Optional[MeasureDoc] = None

    def resolve(self) -> tuple[Measure, str]:
        from ..experiments import builtin_measure

        if (self.builtin is None) == (self.doc is None):
            raise RejectedInputError("provide exactly one of 'builtin' or 'doc'")
        if self.builtin is not None:
            return builtin_measure(self.builtin), self.builtin
        return to_measure(self.doc), "document"


class PairRequest(BaseModel):
    f: MeasureDoc
    g: MeasureDoc


class ConvexLowerRequest(PairRequest):
    samples: int = 64
    seed: int = 0


class ConcentrationRequest(BaseModel):
    f: MeasureDoc
    lam: float = Field(ge=0)


class QuantileRequest(BaseModel):
    f: MeasureDoc
    q: float = Field(ge=0, le=1)


class DistanceOut(BaseModel):
    value: float
    kind: str
    witness: Optional[dict] = None


class ValueOut(BaseModel):
    value: float


class ProkhorovRequest(PairRequest):
    point_budget: int = 4000
    include_plan: bool = True


class CouplingPlanDoc(BaseModel):
    row_points: list[list[float]]
    col_points: list[list[float]]
    joint: list[list[float]]


class ProkhorovOut(BaseModel):
    epsilon: float
    deficiency_curve: list[tuple[float, float]]
    plan: Optional[CouplingPlanDoc] = None


class CouplingCheckRequest(BaseModel):
    plan: CouplingPlanDoc
    epsilon: float


class CouplingCheckOut(BaseModel):
    exceed_mass: float
    ok: bool


class ScalingTransferRequest(PairRequest):
    a: float = Field(gt=0)
    b: float = Field(gt=0)
    point_budget: int = 4000


class ScalingTransferOut(BaseModel):
    lhs: float
    rhs: float


class MeasureSummaryOut(BaseModel):
    kind: str
    dim: int
    support_size: int
    total_mass: float


class ExperimentRequest(BaseModel):
    experiment: str
    measure: Optional[MeasureSpec] = None
    n_grid: Optional[list[int]] = None
    p: Optional[float] = None
    q: Optional[float] = None
    radius: Optional[float] = None
    samples: int = 64
    seed: int = 0
    cell_budget: int = 1_000_000
    point_budget: int = 4000


class ExperimentRowOut(BaseModel):
    n: int
    raw: Optional[float]
    scaled: Optional[float]
    bound: Optional[float]
    passed: bool = Field(alias="pass")
    extras: Optional[dict] = None
    note: str = ""

    model_config = {"populate_by_name": True}


class ExperimentOut(BaseModel):
    experiment: str
    id: str
    rows: list[ExperimentRowOut]
    metadata: dict
    all_passed: bool


class HealthOut(BaseModel):
    status: str
    version: str
