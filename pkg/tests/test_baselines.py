"""Amplify-, decode-, and compress-forward baselines plus the diamond sweep.

Frozen values are hand computations on the a = 2 diamond: gains 32, 4 into
the relays and 8, 32 out. Unit amplification at both relays means
alpha = (1/32, 1/4), signal powers 8^2 + 32^2 = 1088, and forwarded-noise
power (8/32)^2 + (32/4)^2 = 65.0625 - 1.
"""

import math

import numpy as np
import pytest

from relaycap.baselines import (
    SCHEMES,
    af_optimize,
    af_rate,
    cf_optimize,
    cf_rate_layered,
    df_rate,
    sweep,
)
from relaycap.cuts import min_cut_analysis
from relaycap.errors import (
    DomainError,
    InfeasibleDistortionError,
    NotLayeredError,
    PowerViolationError,
    ValidationError,
)
from relaycap.model import diamond_network, line_network, network_from_dict
from tests.conftest import random_layered_network


def fan_in_network(g_in=2.0, g_out=100.0):
    """Two relays, weak first hop and strong second: hop capacities dominate,
    so unit distortions are feasible for compress-forward."""
    return network_from_dict({
        "field": "real", "nodes": ["S", "A1", "A2", "D"],
        "source": "S", "destination": "D",
        "edges": [
            {"from": "S", "to": "A1", "gain": [g_in, 0.0]},
            {"from": "S", "to": "A2", "gain": [g_in, 0.0]},
            {"from": "A1", "to": "D", "gain": [g_out, 0.0]},
            {"from": "A2", "to": "D", "gain": [g_out, 0.0]},
        ]})


def test_af_literal_frozen():
    net = diamond_network(2.0)
    rate = af_rate(net, [1.0 / 32.0, 1.0 / 4.0])
    assert rate == pytest.approx(0.5 * math.log2(1088.0 / 65.0625), rel=1e-12)


def test_af_coherent_frozen():
    net = diamond_network(2.0)
    rate = af_rate(net, [1.0 / 32.0, 1.0 / 4.0], coherent=True)
    # amplitudes add: (8 + 32)^2 over the same forwarded noise, plus the +1
    assert rate == pytest.approx(0.5 * math.log2(1.0 + 1600.0 / 65.0625), rel=1e-12)


def test_af_power_feasibility():
    net = diamond_network(2.0)
    with pytest.raises(PowerViolationError):
        af_rate(net, [1.0 / 16.0, 1.0 / 4.0])
    # exactly at the unit-power boundary is allowed
    af_rate(net, [1.0 / 32.0, 1.0 / 4.0])
    with pytest.raises(ValidationError):
        af_rate(net, [0.1])  # wrong count
    with pytest.raises(ValidationError):
        af_rate(line_network([2.0, 2.0, 2.0]), [0.1, 0.1])  # not two-hop


def test_af_zero_amplification():
    assert af_rate(diamond_network(2.0), [0.0, 0.0]) == 0.0
    assert af_rate(diamond_network(2.0), [0.0, 0.0], coherent=True) == 0.0


def test_af_coherent_dominates_literal():
    # with signs aligned to the product gains the amplitudes add in phase,
    # so the coherent rate can only beat the power-sum variant
    rng = np.random.default_rng(41)
    for _ in range(50):
        net = random_layered_network(rng, max_width=3, max_hops=2, field="real")
        alphas = []
        for r in net.relays:
            h_in = complex(net.gain(net.source, r) or 0.0).real
            h_out = complex(net.gain(r, net.destination) or 0.0).real
            cap = 1.0 / abs(h_in) if h_in else 1.0
            sign = -1.0 if h_in * h_out < 0 else 1.0
            alphas.append(sign * float(rng.uniform(0.0, cap)))
        lit = af_rate(net, alphas)
        coh = af_rate(net, alphas, coherent=True)
        assert coh >= lit - 1e-9


def test_af_optimize_diamond():
    net = diamond_network(2.0)
    report = af_optimize(net)
    assert report.scheme == "af"
    assert report.params["coherent"] is True
    assert set(report.params["alphas"]) == {"A1", "A2"}
    # feasible and at least as good as the unit-amplification corner
    corner = af_rate(net, [1.0 / 32.0, 1.0 / 4.0], coherent=True)
    assert report.rate_bits >= corner - 1e-9
    a1, a2 = report.params["alphas"]["A1"], report.params["alphas"]["A2"]
    assert a1 * a1 * 32.0 ** 2 <= 1.0 + 1e-9
    assert a2 * a2 * 4.0 ** 2 <= 1.0 + 1e-9
    assert report.params["literal_bits"] == pytest.approx(
        af_rate(net, [a1, a2]), rel=1e-12)


def test_af_optimize_many_relays():
    # five relays take the no-grid path: full amplification then refinement
    names = ["S"] + [f"A{i}" for i in range(1, 6)] + ["D"]
    edges = []
    for i, n in enumerate(names[1:-1], start=1):
        edges.append({"from": "S", "to": n, "gain": [float(i), 0.0]})
        edges.append({"from": n, "to": "D", "gain": [float(7 - i), 0.0]})
    net = network_from_dict({"field": "real", "nodes": names, "source": "S",
                             "destination": "D", "edges": edges})
    report = af_optimize(net)
    assert report.rate_bits > 0.0
    for name, alpha in report.params["alphas"].items():
        h_in = abs(net.gain(0, net.index_of(name)))
        assert alpha * alpha * h_in * h_in <= 1.0 + 1e-9


def test_df_diamond_frozen():
    report = df_rate(diamond_network(2.0))
    # decoding at A1 alone: relay hop 0.5 log2(1025), exit hop 0.5 log2(65)
    assert report.rate_bits == pytest.approx(0.5 * math.log2(65.0), rel=1e-12)
    assert report.params["subset"] == ["A1"]


def test_df_explicit_subsets():
    net = diamond_network(2.0)
    assert df_rate(net, subset=[2]).rate_bits == pytest.approx(
        0.5 * math.log2(17.0), rel=1e-12)
    # both relays must decode; A2's weak inbound hop binds
    assert df_rate(net, subset=[1, 2]).rate_bits == pytest.approx(
        0.5 * math.log2(17.0), rel=1e-12)
    assert df_rate(net, subset=[]).rate_bits == 0.0
    with pytest.raises(ValidationError):
        df_rate(net, subset=[0])


def test_df_line_network():
    report = df_rate(line_network([100.0, 5.0]))
    assert report.rate_bits == pytest.approx(0.5 * math.log2(26.0), rel=1e-12)
    assert report.params["subset"] == ["R1"]


def test_df_best_over_subsets():
    rng = np.random.default_rng(43)
    for _ in range(30):
        net = random_layered_network(rng, field="real")
        best = df_rate(net)
        relays = list(net.relays)
        for mask in range(1 << len(relays)):
            chosen = [v for b, v in enumerate(relays) if mask >> b & 1]
            assert df_rate(net, subset=chosen).rate_bits <= best.rate_bits + 1e-9


def test_cf_all_ones_reduces_to_quantized_min_cut():
    # needs dominating hop capacities; the weak-in strong-out fan qualifies
    for net in (fan_in_network(), line_network([3.0, 50.0])):
        relays = list(net.relays)
        report = cf_rate_layered(net, {r: 1.0 for r in relays})
        want = min_cut_analysis(net).min_mi_quantized
        assert report.rate_bits == pytest.approx(want, rel=1e-12)


def test_cf_all_ones_infeasible_when_description_overflows():
    # a = 2 diamond: describing both relays at the noise floor needs
    # 0.5 log2(1025 * 17) ~ 7.04 bits against a 0.5 log2(1089) ~ 5.04 hop
    with pytest.raises(InfeasibleDistortionError):
        cf_rate_layered(diamond_network(2.0), {1: 1.0, 2: 1.0})


def test_cf_distortion_costs_two_log_a():
    # inflating one relay's distortion to a^2 loses about u * 2 log2 a
    net = line_network([1000.0, 1000.0])
    a = 32.0
    base = cf_rate_layered(net, {1: 1.0}).rate_bits
    hit = cf_rate_layered(net, {1: a * a}).rate_bits
    assert abs((base - hit) - 2.0 * 0.5 * math.log2(a)) <= 1.0


def test_cf_large_distortion_removes_relay():
    net = fan_in_network()
    solo = network_from_dict({
        "field": "real", "nodes": ["S", "A2", "D"], "source": "S",
        "destination": "D",
        "edges": [{"from": "S", "to": "A2", "gain": [2.0, 0.0]},
                  {"from": "A2", "to": "D", "gain": [100.0, 0.0]}]})
    full = cf_rate_layered(net, {1: 1e12, 2: 1.0}).rate_bits
    removed = cf_rate_layered(solo, {1: 1.0}).rate_bits
    assert full == pytest.approx(removed, abs=1e-3)


def test_cf_validation():
    net = fan_in_network()
    with pytest.raises(DomainError):
        cf_rate_layered(net, {1: 0.5})
    with pytest.raises(ValidationError):
        cf_rate_layered(net, {0: 2.0})
    with pytest.raises(NotLayeredError):
        cf_rate_layered(network_from_dict({
            "field": "real", "nodes": ["S", "R", "D"], "source": "S",
            "destination": "D",
            "edges": [{"from": "S", "to": "R", "gain": [2.0, 0.0]},
                      {"from": "R", "to": "D", "gain": [2.0, 0.0]},
                      {"from": "S", "to": "D", "gain": [1.0, 0.0]}]}), {})


def test_cf_optimize_feasible_and_bounded():
    for a in (2.0, 4.0):
        net = diamond_network(a)
        report = cf_optimize(net)
        assert report.scheme == "cf"
        assert report.rate_bits >= 0.0
        assert report.rate_bits <= min_cut_analysis(net).min_mi_iid + 1e-9
        for name, d in report.params["distortions"].items():
            assert d >= 1.0
            # chosen distortions must themselves be feasible
        cf_rate_layered(net, {net.index_of(n): d
                              for n, d in report.params["distortions"].items()})


def test_sweep_structure():
    table = sweep([2.0, 4.0])
    assert table.param == "a"
    assert table.schemes == SCHEMES
    assert len(table.rows) == 2
    row = table.rows[0]
    assert row["a"] == 2.0
    for key in ("upper_bits", "qmf_lower_bits", "af_bits", "df_bits",
                "cf_bits", "gap_qmf_bits", "gap_af_bits", "gap_df_bits"):
        assert key in row
    assert row["gap_qmf_bits"] == pytest.approx(
        row["upper_bits"] - row["qmf_lower_bits"], abs=1e-12)
    assert row["gap_af_bits"] == pytest.approx(
        row["upper_bits"] - row["af_bits"], abs=1e-12)
    assert row["df_bits"] == pytest.approx(0.5 * math.log2(65.0), rel=1e-12)


def test_sweep_scheme_selection():
    table = sweep([2.0], schemes=("qmf",))
    row = table.rows[0]
    assert "af_bits" not in row and "cf_bits" not in row
    assert set(row) == {"a", "upper_bits", "qmf_lower_bits", "gap_qmf_bits"}
    with pytest.raises(ValidationError):
        sweep([2.0], schemes=("qmf", "bf"))


def test_sweep_baselines_stay_below_upper():
    for row in sweep([2.0, 8.0, 32.0]).rows:
        for key in ("qmf_lower_bits", "af_bits", "df_bits", "cf_bits"):
            assert row[key] <= row["upper_bits"] + 1e-9
