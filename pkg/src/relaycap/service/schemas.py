"""Request and response models for the HTTP service.

Networks arrive as free-form JSON objects and are validated by the core
parser, which produces better diagnostics than schema validation would; the
response models mirror the report payloads field for field.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from ..baselines import SCHEMES


class NetworkRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    network: dict
    field: Optional[str] = None  # what-if override of the file's field


class BoundRequest(NetworkRequest):
    threads: Optional[int] = None


class AchievableRequest(BoundRequest):
    pass


class CertificateRequest(BoundRequest):
    pass


class UnfoldRequest(NetworkRequest):
    stages: int = 2


class TrellisRequest(NetworkRequest):
    stages: int = 4


class LoopRequest(NetworkRequest):
    # subsets of node names; drawn from the seed when omitted
    subsets: Optional[list[list[str]]] = None
    length: int = 3
    seed: int = 0


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    param: str = "a"
    values: list[float]
    schemes: list[str] = Field(default_factory=lambda: list(SCHEMES))
    field: str = "real"


class SimulateRequest(NetworkRequest):
    trials: int
    block_len: int
    rate_bits: float
    seed: int = 0
    noise_scale: float = 1.0
    quantizer_levels: int = 1 << 16
    threads: Optional[int] = None


class CensusRequest(SimulateRequest):
    pass


class MinCut(BaseModel):
    omega: list[str]
    value: float


class CutRow(BaseModel):
    omega: list[str]
    mi_iid_bits: float
    mi_quantized_bits: float
    cap_wf_bits: float


class BoundResponse(BaseModel):
    upper_bits: float
    min_cut_iid: MinCut
    min_cut_quantized: MinCut
    min_cut_waterfilled: MinCut
    num_cuts: int
    per_cut: list[CutRow]


class AchievableResponse(BaseModel):
    layered: bool
    qmf_general_bits: float
    qmf_layered_bits: Optional[float]
    qmf_conservative_bits: Optional[float]
    lower_bits: float


class CertificateResponse(BaseModel):
    upper_bits: float
    lower_bits: float
    gap_bits: float
    bound_bits: float
    min_cut_iid: MinCut
    per_cut: list[CutRow]


class UnfoldEdge(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    tail: str = Field(alias="from")
    head: str = Field(alias="to")
    gain: tuple[float, float]
    lossless: bool


class UnfoldResponse(BaseModel):
    stages: int
    num_nodes: int
    num_edges: int
    crossing_edges: int
    memory_edges: int
    nodes: list[str]
    edges: list[UnfoldEdge]


class TrellisResponse(BaseModel):
    stages: int
    states: int
    cuts_checked: int
    violations: int
    holds: bool
    vacuous: bool
    factor: int
    min_original_bits: float
    threshold_bits: float
    min_value_bits: float
    margin_bits: float


class LoopResponse(BaseModel):
    length: int
    subsets: list[list[str]]
    tilde: list[list[str]]
    lhs_bits: float
    rhs_bits: float
    margin_bits: float
    counts_match: bool
    holds: bool


class SweepRow(BaseModel):
    a: float
    upper_bits: float
    qmf_lower_bits: Optional[float] = None
    af_bits: Optional[float] = None
    df_bits: Optional[float] = None
    cf_bits: Optional[float] = None
    gap_qmf_bits: Optional[float] = None
    gap_af_bits: Optional[float] = None
    gap_df_bits: Optional[float] = None


class SweepResponse(BaseModel):
    param: str
    schemes: list[str]
    columns: list[str]
    rows: list[SweepRow]


class SimulateResponse(BaseModel):
    trials: int
    errors: int
    error_rate: float
    T: int
    rate_bits: float
    seed: int


class CensusNode(BaseModel):
    node: str
    distinct: int
    exponent_bits: float
    theory_rate_bits: float
    cap_exponent_bits: float
    ok: bool


class CensusResponse(BaseModel):
    trials: int
    T: int
    ok: bool
    per_node: list[CensusNode]


class HealthResponse(BaseModel):
    status: str
    version: str
