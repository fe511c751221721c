"""Desk-scale Monte Carlo simulation of quantize-map-forward relaying.

Supported plants: real-field networks with destination depth 1 or 2 and at
most two relays (line and diamond shapes). The source sends a random Gaussian
codeword; each relay quantizes its received block with a unit-step scalar
lattice and re-maps each quantizer cell through a seeded random map to a
fresh transmit symbol. The destination runs a thresholded maximum-likelihood
chain search: for every candidate message it considers all quantizer outputs
within a fixed window of the plausible relay receptions, scores the best
consistent chain, and accepts when both the relay-side and destination-side
block residuals sit within mean + 3 sd of their noise statistics. Declared
message is the surviving candidate with the smallest total residual.

Everything random is a pure function of (seed, stream, counter): per-trial
noise streams are derived from (seed, trial index) while codebooks and relay
maps depend on the seed only, so repeated trials share codebooks and results
never depend on evaluation order or thread count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .cuts import quantizer_params
from .errors import BudgetExceededError, DomainError, ValidationError
from .model import FIELD_REAL, RelayNetwork, layering
from .parallel import parallel_map
from .rng import normals, stream_key, trial_seed

# candidate quantizer cells per symbol: lattice points within +-4 steps
OFFSETS = np.arange(-4, 5, dtype=np.int64)

# stream salt tags
_CODEBOOK = 0xC0DEB00C
_MAP = 0x3A9F
_NOISE = 0x7E11
_MSG = 0x3157
_CENSUS = 0xCE25

_WORK_BUDGET = 3 * 10 ** 8
CENSUS_EPSILON = 0.25


@dataclass(frozen=True)
class SimConfig:
    block_len: int
    rate_bits: float
    trials: int
    seed: int = 0
    quantizer_levels: int = 1 << 16
    noise_scale: float = 1.0

    @property
    def message_bits(self) -> int:
        return math.ceil(self.rate_bits * self.block_len)

    @property
    def num_messages(self) -> int:
        return 1 << self.message_bits


@dataclass(frozen=True)
class RelayFunction:
    """Quantize-and-remap behavior of one relay: a unit-step scalar lattice
    clamped to +-levels, then a seeded random map from lattice cell to a
    clipped-Gaussian transmit amplitude."""

    node: int
    map_key: int
    levels: int
    clip: float  # amplitude cap keeping every mapped codeword inside the power budget

    def quantize(self, y: np.ndarray) -> np.ndarray:
        q = np.rint(y).astype(np.int64)
        return np.clip(q, -self.levels, self.levels)

    def remap(self, q: np.ndarray) -> np.ndarray:
        counters = np.ascontiguousarray(q, dtype=np.int64).view(np.uint64)
        return np.clip(normals(self.map_key, counters), -self.clip, self.clip)


@dataclass(frozen=True)
class TrialOutcome:
    truth: int
    decoded: int  # -1 when no candidate survived the thresholds

    @property
    def ok(self) -> bool:
        return self.decoded == self.truth


@dataclass(frozen=True)
class SimResult:
    trials: int
    errors: int
    error_rate: float
    wall_time: float = field(compare=False, default=0.0)


@dataclass(frozen=True)
class CensusEntry:
    node: str
    distinct: int
    exponent: float  # log2(distinct) / T
    theory_rate_bits: float
    cap_exponent: float  # 1 + epsilon
    ok: bool


@dataclass(frozen=True)
class CensusReport:
    entries: tuple[CensusEntry, ...]
    trials: int
    block_len: int
    ok: bool


def _validate(net: RelayNetwork, cfg: SimConfig):
    if net.field != FIELD_REAL:
        raise ValidationError("simulation supports real-field networks only")
    decomp = layering(net)
    if decomp.num_layers > 2:
        raise ValidationError("simulation supports depth-1 and depth-2 networks only")
    relays = list(decomp.layers[1]) if decomp.num_layers == 2 else []
    if len(relays) > 2:
        raise ValidationError("simulation supports at most two relays")
    if not (1 <= cfg.block_len <= 16):
        raise BudgetExceededError(f"block length {cfg.block_len} outside 1..16")
    if cfg.rate_bits <= 0:
        raise DomainError("rate must be positive")
    if cfg.message_bits > 20:
        raise BudgetExceededError(
            f"ceil(rate * block) = {cfg.message_bits} exceeds the 20-bit message budget")
    if cfg.trials < 1:
        raise DomainError("trials must be at least 1")
    if cfg.quantizer_levels < 8:
        raise DomainError("quantizer_levels must be at least 8")
    if cfg.noise_scale < 0:
        raise DomainError("noise_scale must be non-negative")
    work = cfg.num_messages * cfg.block_len * len(OFFSETS) ** max(1, len(relays))
    if work > _WORK_BUDGET:
        raise BudgetExceededError(f"decode work {work} exceeds budget {_WORK_BUDGET}")
    return relays


class _Context:
    """Per-(network, config) decode tables, shared across trials."""

    def __init__(self, net: RelayNetwork, cfg: SimConfig):
        relays = _validate(net, cfg)
        self.net, self.cfg = net, cfg
        self.relays = relays
        T, M = cfg.block_len, cfg.num_messages
        self.clip = math.sqrt(1.0 + 3.0 / math.sqrt(T))

        cb_key = stream_key(cfg.seed, _CODEBOOK, net.source)
        raw = normals(cb_key, np.arange(M * T, dtype=np.uint64)).reshape(M, T)
        self.codebook = np.clip(raw, -self.clip, self.clip)

        self.funcs = [RelayFunction(node=r,
                                    map_key=stream_key(cfg.seed, _MAP, r),
                                    levels=cfg.quantizer_levels,
                                    clip=self.clip)
                      for r in relays]
        self.h_in = [complex(net.gain(net.source, r) or 0.0).real for r in relays]
        self.h_out = [complex(net.gain(r, net.destination) or 0.0).real for r in relays]
        self.h_direct = complex(net.gain(net.source, net.destination) or 0.0).real

        # decode tables: per relay, per window offset, the candidate lattice
        # cells' relay-side residuals and mapped amplitudes for every message
        self.res_tab, self.amp_tab = [], []
        for i, fn in enumerate(self.funcs):
            mean = self.h_in[i] * self.codebook
            base = np.clip(np.rint(mean).astype(np.int64),
                           -fn.levels, fn.levels)
            res = np.empty((OFFSETS.size, M, T))
            amp = np.empty((OFFSETS.size, M, T))
            for k, off in enumerate(OFFSETS):
                cand = np.clip(base + off, -fn.levels, fn.levels)
                res[k] = (cand.astype(np.float64) - mean) ** 2
                amp[k] = fn.remap(cand)
            self.res_tab.append(res)
            self.amp_tab.append(amp)

        nv2 = cfg.noise_scale ** 2
        m = len(relays)
        self.tau_relay = (nv2 + 1.0 / 12.0) * (m * T + 3.0 * math.sqrt(2.0 * m * T)) if m else 0.0
        self.tau_dest = nv2 * (T + 3.0 * math.sqrt(2.0 * T))

    def noise(self, tseed: int, node: int) -> np.ndarray:
        key = stream_key(tseed, _NOISE, node)
        return self.cfg.noise_scale * normals(key, np.arange(self.cfg.block_len, dtype=np.uint64))

    def draw_message(self, tseed: int) -> int:
        return stream_key(tseed, _MSG) & (self.cfg.num_messages - 1)


@lru_cache(maxsize=4)
def _context(net: RelayNetwork, cfg: SimConfig) -> _Context:
    return _Context(net, cfg)


def _transmit(ctx: _Context, w: int, tseed: int) -> np.ndarray:
    """Forward pass: source block through relays to the destination signal."""
    net, cfg = ctx.net, ctx.cfg
    x_s = ctx.codebook[w]
    y_d = ctx.h_direct * x_s + ctx.noise(tseed, net.destination)
    for i, fn in enumerate(ctx.funcs):
        y_r = ctx.h_in[i] * x_s + ctx.noise(tseed, fn.node)
        y_d = y_d + ctx.h_out[i] * fn.remap(fn.quantize(y_r))
    return y_d


def _decode(ctx: _Context, y_d: np.ndarray) -> int:
    T, M = ctx.cfg.block_len, ctx.cfg.num_messages
    m = len(ctx.funcs)
    relay_sum = np.zeros(M)
    dest_sum = np.zeros(M)

    if m == 0:
        diff = y_d[None, :] - ctx.h_direct * ctx.codebook
        dest_sum = np.sum(diff * diff, axis=1)
    else:
        for t in range(T):
            best_tot = np.full(M, np.inf)
            best_res = np.zeros(M)
            best_dst = np.zeros(M)
            if m == 1:
                res_t = ctx.res_tab[0][:, :, t]
                dst = y_d[t] - ctx.h_out[0] * ctx.amp_tab[0][:, :, t]
                dst = dst * dst
                tot = res_t + dst
                k = np.argmin(tot, axis=0)
                cols = np.arange(M)
                best_tot = tot[k, cols]
                best_res = res_t[k, cols]
                best_dst = dst[k, cols]
            else:
                for k1 in range(OFFSETS.size):
                    r1 = ctx.res_tab[0][k1, :, t]
                    a1 = ctx.h_out[0] * ctx.amp_tab[0][k1, :, t]
                    for k2 in range(OFFSETS.size):
                        res = r1 + ctx.res_tab[1][k2, :, t]
                        dst = y_d[t] - a1 - ctx.h_out[1] * ctx.amp_tab[1][k2, :, t]
                        dst = dst * dst
                        tot = res + dst
                        better = tot < best_tot
                        best_tot = np.where(better, tot, best_tot)
                        best_res = np.where(better, res, best_res)
                        best_dst = np.where(better, dst, best_dst)
            relay_sum += best_res
            dest_sum += best_dst

    survives = (relay_sum <= ctx.tau_relay) & (dest_sum <= ctx.tau_dest)
    if not np.any(survives):
        return -1
    score = np.where(survives, relay_sum + dest_sum, np.inf)
    return int(np.argmin(score))


def run_trial(net: RelayNetwork, cfg: SimConfig, trial_index: int) -> TrialOutcome:
    """One seeded encode/transmit/decode round."""
    ctx = _context(net, cfg)
    tseed = trial_seed(cfg.seed, trial_index)
    truth = ctx.draw_message(tseed)
    y_d = _transmit(ctx, truth, tseed)
    return TrialOutcome(truth=truth, decoded=_decode(ctx, y_d))


def estimate_error_rate(net: RelayNetwork, cfg: SimConfig,
                        threads: Optional[int] = None) -> SimResult:
    """Run cfg.trials independent trials and aggregate the error count."""
    _context(net, cfg)  # validate and build tables before timing
    start = time.perf_counter()
    outcomes = parallel_map(lambda i: run_trial(net, cfg, i), range(cfg.trials), threads)
    errors = sum(1 for o in outcomes if not o.ok)
    return SimResult(trials=cfg.trials, errors=errors,
                     error_rate=errors / cfg.trials,
                     wall_time=time.perf_counter() - start)


def list_size_census(net: RelayNetwork, cfg: SimConfig) -> CensusReport:
    """Count the distinct relay descriptions one message can produce.

    Fix the message, redraw the channel noise, and count how many
    descriptions at the test channel's distortion the relay's observation
    can take: the scaled residuals alpha * (y - h x) are covered greedily
    by balls of squared radius T * sigma_n^2 * (1 + epsilon), and each ball
    center is one distinguishable description. The count's growth exponent
    should track the test-channel rate (1/2) log2(1 + alpha^2 / sigma_n^2)
    and stay under 2^(T * (1 + epsilon)). A raw unit-step lattice count
    would not work here: its per-symbol entropy is that of rounded
    unit-variance noise (about two bits) at any gain, which says nothing
    about the list the decoder has to resolve.
    """
    ctx = _context(net, cfg)
    if not ctx.funcs:
        raise ValidationError("census needs at least one relay")
    T = cfg.block_len
    cap = 2.0 ** (T * (1.0 + CENSUS_EPSILON))
    ns2 = cfg.noise_scale ** 2
    entries = []
    for i, fn in enumerate(ctx.funcs):
        received_var = max(1.0, ctx.h_in[i] ** 2 + ns2)
        qp = quantizer_params(received_var, net.rate_scale)
        radius2 = T * qp.sigma2_n * (1.0 + CENSUS_EPSILON)
        reps: list[np.ndarray] = []
        for trial in range(cfg.trials):
            tseed = trial_seed(cfg.seed, trial)
            target = qp.alpha * ctx.noise(tseed, fn.node)  # alpha (y_r - h x_s)
            if not any(float(np.sum((target - r) ** 2)) <= radius2 for r in reps):
                reps.append(target)
        count = len(reps)
        entries.append(CensusEntry(
            node=net.names[fn.node],
            distinct=count,
            exponent=math.log2(count) / T if count else 0.0,
            theory_rate_bits=qp.rate_bits,
            cap_exponent=1.0 + CENSUS_EPSILON,
            ok=count <= cap))
    return CensusReport(entries=tuple(entries), trials=cfg.trials,
                        block_len=T, ok=all(e.ok for e in entries))
