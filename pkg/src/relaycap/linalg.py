"""Gaussian channel kernels: log-det, mutual information, waterfilling.

All rates are log base 2. `field_factor` is 1 for complex signaling and 1/2
for real signaling; callers usually pass `net.rate_scale`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError
from .model import RelayNetwork, gain_submatrix

LOG2E = math.log2(math.e)
LOG2_2PIE = math.log2(2.0 * math.pi * math.e)


def logdet_psd(m: np.ndarray) -> float:
    """log2 det of a strictly positive definite matrix, via Cholesky."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        return 0.0
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    m = 0.5 * (m + m.conj().T)  # clamp asymmetry from accumulated round-off
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise SingularMatrixError("matrix is not strictly positive definite") from None
    diag = np.real(np.diag(chol))
    if np.any(diag <= 0.0):
        raise SingularMatrixError("matrix is numerically singular")
    return float(2.0 * np.sum(np.log2(diag)))


def singular_values(h: np.ndarray) -> np.ndarray:
    """Singular values of h, descending, length min(rows, cols)."""
    h = np.atleast_2d(np.asarray(h))
    if h.size == 0:
        return np.zeros(0)
    return np.linalg.svd(h, compute_uv=False)


def mi_gaussian_iid(h: np.ndarray, noise_var: float = 1.0,
                    field_factor: float = 1.0) -> float:
    """Mutual information of y = h x + z with iid unit-power Gaussian inputs.

    z is white with per-receiver variance noise_var. Uses the smaller Gram
    side, so cost is min(r, t)^3.
    """
    if noise_var <= 0:
        raise DomainError("noise_var must be positive")
    h = np.atleast_2d(np.asarray(h))
    r, t = h.shape
    if r == 0 or t == 0:
        return 0.0
    if r <= t:
        gram = h @ h.conj().T
        eye = np.eye(r)
    else:
        gram = h.conj().T @ h
        eye = np.eye(t)
    return field_factor * logdet_psd(eye + gram / noise_var)


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    water_level: float
    degenerate: bool = False  # every eigenvalue was zero; uniform fallback

    @property
    def total(self) -> float:
        return float(np.sum(self.powers))


def waterfill(eigenvalues, total_power: float) -> PowerAllocation:
    """Allocate total_power over parallel channels maximizing sum log2(1 + p*lam).

    Analytic active-set solve on the sorted eigenvalues, then a bisection
    polish of the water level to 1e-12 relative.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    if lam.ndim != 1:
        raise DomainError("eigenvalues must be a 1-d array")
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise DomainError("eigenvalues must be finite and non-negative")
    if total_power <= 0:
        raise DomainError("total_power must be positive")

    n = lam.size
    pos = lam > 0
    if not np.any(pos):
        return PowerAllocation(np.full(n, total_power / n), math.inf, degenerate=True)

    inv = np.sort(1.0 / lam[pos])  # ascending noise-to-gain levels
    m = inv.size
    csum = np.cumsum(inv)
    active = m
    for k in range(1, m + 1):
        level = (total_power + csum[k - 1]) / k
        if k == m or level <= inv[k]:
            active = k
            break
    level = (total_power + csum[active - 1]) / active

    def residual(mu):
        return float(np.sum(np.maximum(0.0, mu - inv)) - total_power)

    lo, hi = level * (1 - 1e-9) - 1e-12, level * (1 + 1e-9) + 1e-12
    while residual(lo) > 0:
        lo = level - (level - lo) * 4
    while residual(hi) < 0:
        hi = level + (hi - level) * 4
    for _ in range(200):
        if hi - lo <= 1e-12 * max(1.0, abs(level)):
            break
        mid = 0.5 * (lo + hi)
        if residual(mid) < 0:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)

    powers = np.zeros(n)
    powers[pos] = np.maximum(0.0, level - 1.0 / lam[pos])
    return PowerAllocation(powers, level)


def capacity_waterfilled(h: np.ndarray, field_factor: float = 1.0) -> float:
    """Point-to-point MIMO capacity with total power min(r, t) * 1.

    Eigenvalues are the squared singular values of h; with total power equal
    to the mode count, equal power per mode is within the waterfilled value
    and never more than field_factor bits per mode below it.
    """
    h = np.atleast_2d(np.asarray(h))
    if h.size == 0:
        return 0.0
    sv = singular_values(h)
    lam = sv * sv
    alloc = waterfill(lam, float(lam.size))
    if alloc.degenerate:
        return 0.0
    return float(field_factor * np.sum(np.log2(1.0 + alloc.powers * lam)))


def received_covariance(net: RelayNetwork, receivers, conditioned=()) -> np.ndarray:
    """Covariance of the receivers' signals given the conditioned transmitters.

    Unconditioned nodes transmit iid unit-power Gaussians; receiver noise is
    unit. Result is I + G G^H over the remaining transmit columns.
    """
    rows = sorted(receivers)
    cond = set(conditioned)
    cols = [v for v in range(net.num_nodes) if v not in cond]
    g = gain_submatrix(net, rows, cols)
    cov = np.eye(len(rows), dtype=g.dtype) + g @ g.conj().T
    return 0.5 * (cov + cov.conj().T)


def gaussian_cond_entropy(net: RelayNetwork, receivers, conditioned=(),
                          field_factor: float | None = None) -> float:
    """Differential entropy (fixed additive convention) of receiver signals.

    Computed as field_factor * (r * log2(2 pi e) + log2 det Sigma). The
    additive constant cancels in every difference where receiver counts
    match, which is the only way such entropies are combined here.
    """
    rows = sorted(receivers)
    if not rows:
        return 0.0
    if field_factor is None:
        field_factor = net.rate_scale
    cov = received_covariance(net, rows, conditioned)
    return field_factor * (len(rows) * LOG2_2PIE + logdet_psd(cov))
