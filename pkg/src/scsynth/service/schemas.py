"""Pydantic request/response models for the HTTP service."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class GateModel(BaseModel):
    id: str
    op: str
    args: list[str]


class StageModel(BaseModel):
    name: str | None = None
    inputs: list[str]
    gates: list[GateModel]
    output: str
    function: str
    symbolic_inputs: list[str] | None = None
    upstream_input: str | None = None


class ProblemModel(BaseModel):
    """Wire form of a problem document; validated by the core parser."""

    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    n: int
    encoding: str
    inputs: list[str]
    gates: list[GateModel] | None = None
    output: str | None = None
    function: str | None = None
    select_stream: str | None = None
    dff_wraparound: bool | None = None
    stages: list[StageModel] | None = None

    def to_document(self) -> dict:
        return self.model_dump(exclude_none=True)

    @property
    def is_staged(self) -> bool:
        return self.stages is not None


class OptionsModel(BaseModel):
    """Mirrors the encoder options."""

    fix_boundary_rows: bool = False
    fix_first_sequence: str | list[int] | None = "ramp"
    symbolic_select: bool = False
    dff_wraparound: bool | None = None
    strict_binaries: bool = False


class SolveConfigModel(BaseModel):
    gap: float | str = 0
    time_budget: float | None = None
    seed: int = 0
    restarts: int = Field(default=4, ge=1)
    mode: Literal["exact", "anneal", "auto"] = "auto"


class SynthRequest(BaseModel):
    problem: ProblemModel
    n: int | None = None
    options: OptionsModel = OptionsModel()
    config: SolveConfigModel = SolveConfigModel()
    threads: int = Field(default=1, ge=1)


class SynthResponse(BaseModel):
    name: str
    n: int
    encoding: str
    sequences: list[list[int]]
    objective: float
    objective_exact: str
    lower_bound: float
    lower_bound_exact: str
    status: str
    gap: float
    avg_abs_error: float
    avg_abs_error_exact: str
    mse: float
    elapsed_s: float


class EvalRequest(BaseModel):
    problem: ProblemModel
    n: int | None = None
    sequences: list[list[int]] | None = None
    builtin: list[str] | None = None
    method: str | None = None
    with_scc: bool = True


class EvalResponse(BaseModel):
    n: int
    circuit: str
    encoding: str
    method: str
    avg_abs_err: float
    avg_abs_err_exact: str
    mse: float
    mse_exact: str
    avg_scc: float | None
    elapsed_s: float
    status: str
    gap: float | None
    csv: str


class ExportRequest(BaseModel):
    problem: ProblemModel
    n: int | None = None
    options: OptionsModel = OptionsModel()


class ExportResponse(BaseModel):
    lp: str
    variables: int
    binaries: int
    constraints: int


class ImportRequest(BaseModel):
    problem: ProblemModel
    n: int | None = None
    options: OptionsModel = OptionsModel()
    solution: str


class ViolationModel(BaseModel):
    constraint: str
    detail: str


class ImportResponse(BaseModel):
    feasible: bool
    violation: ViolationModel | None = None
    objective: float | None = None
    objective_exact: str | None = None
    sequences: list[list[int]] | None = None
    avg_abs_error: float | None = None
    avg_abs_error_exact: str | None = None


class BenchRequest(BaseModel):
    """Benchmark config; problem specs must be inlined by the client."""

    config: dict


class BenchResponse(BaseModel):
    reports: list[dict]
    csv: str


class StageResultModel(BaseModel):
    name: str
    objective: float
    objective_exact: str
    lower_bound: float
    status: str
    output_rows: int
    elapsed_s: float


class StagedSynthResponse(BaseModel):
    name: str
    n: int
    encoding: str
    stages: list[StageResultModel]
    sequences: dict[str, list[int]]
    avg_abs_error: float
    avg_abs_error_exact: str
    mse: float
