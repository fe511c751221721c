"""HTTP facade over the analysis core.

Every endpoint is a thin adapter: parse the network, call one core routine,
flatten the result through the reporting payload builders. Domain errors map
to 422 (bad input) and enumeration or simulation budget errors to 413.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, reporting
from ..baselines import sweep
from ..cuts import (gap_certificate, is_layered, min_cut_analysis,
                    qmf_achievable_general, qmf_achievable_layered)
from ..errors import BudgetExceededError, CapacityError, RelaycapError, ValidationError
from ..model import RelayNetwork, network_from_dict
from ..rng import stream_key, uniforms
from ..sim import SimConfig, estimate_error_rate, list_size_census
from ..unfold import (make_subset_sequence, unfold, verify_loop_lemma,
                      verify_trellis_lemma)
from . import schemas

_TOO_LARGE = (CapacityError, BudgetExceededError)
_SUBSET_SALT = 0x10B5


def _net(req: schemas.NetworkRequest) -> RelayNetwork:
    obj = req.network
    if req.field is not None:
        obj = {**obj, "field": req.field}
    return network_from_dict(obj)


def draw_subsets(net: RelayNetwork, length: int, seed: int) -> list[list[int]]:
    """Seeded subsets for the loop check: each relay joins a coin flip,
    the destination always belongs, the source never does."""
    subs = []
    for k in range(length):
        key = stream_key(seed, _SUBSET_SALT, k)
        u = uniforms(key, np.arange(net.num_nodes, dtype=np.uint64))
        subs.append([r for r in net.relays if u[r] < 0.5] + [net.destination])
    return subs


def create_app() -> FastAPI:
    app = FastAPI(title="relaycap", version=__version__)

    @app.exception_handler(RelaycapError)
    async def _domain_error(_req: Request, exc: RelaycapError):
        status = 413 if isinstance(exc, _TOO_LARGE) else 422
        return JSONResponse(status_code=status,
                            content={"error": type(exc).__name__,
                                     "detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/v1/bound", response_model=schemas.BoundResponse)
    def bound(req: schemas.BoundRequest):
        net = _net(req)
        return reporting.bound_payload(net, min_cut_analysis(net, threads=req.threads))

    @app.post("/v1/achievable", response_model=schemas.AchievableResponse)
    def achievable(req: schemas.AchievableRequest):
        net = _net(req)
        analysis = min_cut_analysis(net, threads=req.threads)
        layered = qmf_achievable_layered(net, analysis) if is_layered(net) else None
        return reporting.achievable_payload(
            net, qmf_achievable_general(net, analysis), layered)

    @app.post("/v1/certificate", response_model=schemas.CertificateResponse)
    def certificate(req: schemas.CertificateRequest):
        net = _net(req)
        return reporting.certificate_payload(net, gap_certificate(net, threads=req.threads))

    @app.post("/v1/unfold", response_model=schemas.UnfoldResponse,
              response_model_by_alias=True)
    def unfold_net(req: schemas.UnfoldRequest):
        return reporting.unfold_payload(unfold(_net(req), req.stages))

    @app.post("/v1/verify/trellis", response_model=schemas.TrellisResponse)
    def verify_trellis(req: schemas.TrellisRequest):
        net = _net(req)
        return reporting.trellis_payload(net, verify_trellis_lemma(net, req.stages))

    @app.post("/v1/verify/loop", response_model=schemas.LoopResponse)
    def verify_loop(req: schemas.LoopRequest):
        net = _net(req)
        if req.subsets is not None:
            members = [[net.index_of(name) for name in s] for s in req.subsets]
        else:
            members = draw_subsets(net, req.length, req.seed)
        seq = make_subset_sequence(net, members)
        return reporting.loop_payload(net, seq, verify_loop_lemma(net, seq))

    @app.post("/v1/sweep", response_model=schemas.SweepResponse,
              response_model_exclude_none=True)
    def run_sweep(req: schemas.SweepRequest):
        if req.param != "a":
            raise ValidationError(f"unknown sweep parameter {req.param!r}")
        if not req.values:
            raise ValidationError("sweep needs at least one value")
        return reporting.sweep_payload(
            sweep(req.values, req.schemes, req.param, req.field))

    def _sim_config(req: schemas.SimulateRequest) -> SimConfig:
        return SimConfig(block_len=req.block_len, rate_bits=req.rate_bits,
                         trials=req.trials, seed=req.seed,
                         quantizer_levels=req.quantizer_levels,
                         noise_scale=req.noise_scale)

    @app.post("/v1/simulate", response_model=schemas.SimulateResponse)
    def simulate(req: schemas.SimulateRequest):
        net, cfg = _net(req), _sim_config(req)
        return reporting.simulate_payload(cfg, estimate_error_rate(net, cfg, req.threads))

    @app.post("/v1/census", response_model=schemas.CensusResponse)
    def census(req: schemas.CensusRequest):
        net, cfg = _net(req), _sim_config(req)
        return reporting.census_payload(list_size_census(net, cfg))

    return app


app = create_app()
