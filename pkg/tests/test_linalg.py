"""Log-det, mutual information, and waterfilling kernels.

Waterfilling is checked against two independent oracles: an exhaustive grid
search over allocations and the KKT conditions applied directly to the
returned allocation.
"""

import itertools
import math

import numpy as np
import pytest

from relaycap.errors import DomainError, SingularMatrixError
from relaycap.linalg import (
    capacity_waterfilled,
    gaussian_cond_entropy,
    logdet_psd,
    mi_gaussian_iid,
    received_covariance,
    singular_values,
    waterfill,
)
from relaycap.model import diamond_network, make_cut


def random_psd_shifted(rng, n, complex_field=True):
    """A random I + G G^H matrix, eigenvalues >= 1."""
    if complex_field:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    else:
        g = rng.standard_normal((n, n))
    scale = 10.0 ** rng.uniform(-3, 3)
    g = g * scale
    return np.eye(n, dtype=g.dtype) + g @ g.conj().T


def test_logdet_matches_slogdet():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        m = random_psd_shifted(rng, n, complex_field=bool(rng.integers(0, 2)))
        sign, logabs = np.linalg.slogdet(m)
        assert sign.real == pytest.approx(1.0)
        want = logabs / math.log(2.0)
        got = logdet_psd(m)
        assert got == pytest.approx(want, rel=1e-10, abs=1e-9)


def test_logdet_edge_cases():
    assert logdet_psd(np.zeros((0, 0))) == 0.0
    assert logdet_psd(np.eye(3)) == 0.0
    assert logdet_psd(np.diag([2.0, 4.0])) == pytest.approx(3.0)
    with pytest.raises(DomainError):
        logdet_psd(np.ones((2, 3)))
    with pytest.raises(DomainError):
        logdet_psd(np.array([[np.inf, 0.0], [0.0, 1.0]]))
    with pytest.raises(SingularMatrixError):
        logdet_psd(np.zeros((2, 2)))
    with pytest.raises(SingularMatrixError):
        logdet_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite


def test_logdet_huge_dynamic_range():
    # one pivot near 1, another near 1e18; must not be flagged singular
    m = np.eye(2) + np.diag([1e18, 0.0])
    assert logdet_psd(m) == pytest.approx(math.log2(1e18 + 1), rel=1e-12)


def test_mi_smaller_side_equivalence():
    rng = np.random.default_rng(17)
    for _ in range(100):
        r, t = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        h = rng.standard_normal((r, t)) + 1j * rng.standard_normal((r, t))
        direct = logdet_psd(np.eye(r) + h @ h.conj().T)
        gram = logdet_psd(np.eye(t) + h.conj().T @ h)
        assert direct == pytest.approx(gram, rel=1e-10, abs=1e-9)
        assert mi_gaussian_iid(h) == pytest.approx(direct, rel=1e-12)


def test_mi_scalar_and_noise():
    # scalar y = 3x + z: log2(1 + 9); noise variance 2 halves the SNR term
    assert mi_gaussian_iid(np.array([[3.0]])) == pytest.approx(math.log2(10.0))
    assert mi_gaussian_iid(np.array([[3.0]]), noise_var=2.0) == pytest.approx(
        math.log2(1.0 + 9.0 / 2.0))
    assert mi_gaussian_iid(np.array([[3.0]]), field_factor=0.5) == pytest.approx(
        0.5 * math.log2(10.0))
    assert mi_gaussian_iid(np.zeros((2, 0))) == 0.0
    with pytest.raises(DomainError):
        mi_gaussian_iid(np.eye(2), noise_var=0.0)


def grid_best(lam, total, steps=60):
    """Exhaustive simplex-grid oracle for the waterfilling objective."""
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    best = -1.0
    for split in itertools.product(range(steps + 1), repeat=n - 1):
        if sum(split) > steps:
            continue
        p = np.array(list(split) + [steps - sum(split)], dtype=float)
        p *= total / steps
        best = max(best, float(np.sum(np.log2(1.0 + p * lam))))
    return best


def kkt_check(lam, alloc, total):
    """Stationarity and feasibility of a claimed waterfilling optimum."""
    if alloc.degenerate:
        return
    lam = np.asarray(lam, dtype=float)
    p = alloc.powers
    assert np.all(p >= -1e-15)
    assert float(np.sum(p)) == pytest.approx(total, rel=1e-9)
    for li, pi in zip(lam, p):
        if li == 0.0:
            assert pi == 0.0
            continue
        if pi > 1e-9:
            # active channel: water level met exactly
            assert pi + 1.0 / li == pytest.approx(alloc.water_level, rel=1e-9)
        else:
            # inactive channel: level below the channel's floor
            assert alloc.water_level <= 1.0 / li + 1e-9 * alloc.water_level


def test_waterfill_against_grid_and_kkt():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(1, 5))
        lam = 10.0 ** rng.uniform(-2, 2, size=n)
        if rng.random() < 0.3:
            lam[rng.integers(0, n)] = 0.0
        total = float(10.0 ** rng.uniform(-1, 1))
        alloc = waterfill(lam, total)
        kkt_check(lam, alloc, total)
        value = float(np.sum(np.log2(1.0 + alloc.powers * lam)))
        if n > 1:
            assert value >= grid_best(lam, total) - 1e-6
        else:
            assert value == pytest.approx(math.log2(1.0 + total * lam[0]), rel=1e-9)


def test_waterfill_hand_case():
    # lam = [1, 4], P = 2: level mu solves (mu-1) + (mu-1/4) = 2, mu = 13/8;
    # powers [5/8, 11/8], value log2(13/8) + log2(1 + 11/2) = log2(10.5625)
    alloc = waterfill([1.0, 4.0], 2.0)
    assert alloc.water_level == pytest.approx(13.0 / 8.0, rel=1e-12)
    assert alloc.powers == pytest.approx([5.0 / 8.0, 11.0 / 8.0], rel=1e-10)
    value = float(np.sum(np.log2(1.0 + alloc.powers * np.array([1.0, 4.0]))))
    assert value == pytest.approx(math.log2(10.5625), rel=1e-12)


def test_waterfill_excludes_weak_channel():
    # lam = [4, 0.1], P = 0.5: level 0.75 < 10, weak channel gets nothing
    alloc = waterfill([4.0, 0.1], 0.5)
    assert alloc.powers[1] == 0.0
    assert alloc.powers[0] == pytest.approx(0.5, rel=1e-12)


def test_waterfill_degenerate_and_domain():
    alloc = waterfill([0.0, 0.0], 1.0)
    assert alloc.degenerate
    assert alloc.total == pytest.approx(1.0)
    with pytest.raises(DomainError):
        waterfill([-1.0], 1.0)
    with pytest.raises(DomainError):
        waterfill([1.0], 0.0)
    with pytest.raises(DomainError):
        waterfill([[1.0]], 1.0)


def test_capacity_waterfilled_brackets_equal_power():
    rng = np.random.default_rng(31)
    for _ in range(100):
        r, t = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        h = (rng.standard_normal((r, t)) + 1j * rng.standard_normal((r, t)))
        h *= 10.0 ** rng.uniform(-2, 2)
        for u in (1.0, 0.5):
            cap = capacity_waterfilled(h, field_factor=u)
            ep = mi_gaussian_iid(h, field_factor=u)
            n_modes = min(r, t)
            assert cap >= ep - 1e-9
            assert cap - ep <= u * n_modes + 1e-9
    assert capacity_waterfilled(np.zeros((2, 2))) == 0.0
    assert capacity_waterfilled(np.zeros((0, 3))) == 0.0


def test_capacity_waterfilled_scalar():
    # single mode, total power 1: waterfilling cannot beat log2(1 + |h|^2)
    assert capacity_waterfilled(np.array([[3.0]])) == pytest.approx(math.log2(10.0))


def test_singular_values():
    sv = singular_values(np.diag([3.0, 4.0]))
    assert sv == pytest.approx([4.0, 3.0])
    assert singular_values(np.zeros((0, 2))).size == 0


def test_received_covariance_diamond():
    net = diamond_network(2.0)
    # destination hears A1 (gain 8) and A2 (gain 32): 1 + 64 + 1024
    cov = received_covariance(net, [3])
    np.testing.assert_allclose(cov, [[1089.0]])
    # conditioning on both relays silences everything
    cov = received_covariance(net, [3], conditioned=[1, 2])
    np.testing.assert_allclose(cov, [[1.0]])
    # both relays hear X_S, so the joint covariance correlates through it:
    # diag 1 + 32^2, 1 + 4^2 and off-diagonal 32 * 4
    cov = received_covariance(net, [1, 2])
    np.testing.assert_allclose(cov, [[1025.0, 128.0], [128.0, 17.0]])


def test_gaussian_cond_entropy_differences():
    net = diamond_network(2.0)
    # h(Y_D) - h(Y_D | X_S, X_A1, X_A2) = I(X; Y_D) = 0.5 log2(1089)
    hy = gaussian_cond_entropy(net, [3])
    hyx = gaussian_cond_entropy(net, [3], conditioned=[0, 1, 2])
    assert hy - hyx == pytest.approx(0.5 * math.log2(1089.0), rel=1e-12)
    assert gaussian_cond_entropy(net, []) == 0.0
