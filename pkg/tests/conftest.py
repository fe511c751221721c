"""Shared test helpers: seeded random network builders."""

import numpy as np

from relaycap.model import network_from_dict


def random_network(rng, max_nodes=6, field="complex"):
    """Random connected network on a source-to-destination spine.

    Every node sits on the spine S -> V1 -> ... -> D (so validity never
    fails), then extra edges are sprinkled in. Gains are log-uniform over
    60 dB around unity, mirroring the spread the bounds must survive.
    """
    n = int(rng.integers(2, max_nodes + 1))
    names = ["S"] + [f"V{i}" for i in range(1, n - 1)] + ["D"]

    def gain():
        mag = 10.0 ** rng.uniform(-3.0, 3.0)
        if field == "complex":
            ph = rng.uniform(0.0, 2.0 * np.pi)
            return [mag * np.cos(ph), mag * np.sin(ph)]
        return [mag * float(rng.choice([-1.0, 1.0])), 0.0]

    edges = {}
    for i in range(n - 1):
        edges[(i, i + 1)] = gain()
    for _ in range(int(rng.integers(0, n * n))):
        i, j = int(rng.integers(0, n)), int(rng.integers(0, n))
        if i != j and (i, j) not in edges:
            edges[(i, j)] = gain()
    return network_from_dict({
        "field": field, "nodes": names, "source": "S", "destination": "D",
        "edges": [{"from": names[i], "to": names[j], "gain": g}
                  for (i, j), g in edges.items()]})


def random_layered_network(rng, max_width=3, max_hops=3, field="complex"):
    """Random fully connected layered network (every path has equal length)."""
    hops = int(rng.integers(2, max_hops + 1))
    widths = [1] + [int(rng.integers(1, max_width + 1)) for _ in range(hops - 1)] + [1]
    names, layers = [], []
    for l, w in enumerate(widths):
        if l == 0:
            layer = ["S"]
        elif l == len(widths) - 1:
            layer = ["D"]
        else:
            layer = [f"L{l}N{k}" for k in range(w)]
        layers.append(layer)
        names.extend(layer)
    edges = []
    for l in range(len(layers) - 1):
        for a in layers[l]:
            for b in layers[l + 1]:
                mag = 10.0 ** rng.uniform(-2.0, 2.0)
                if field == "complex":
                    ph = rng.uniform(0.0, 2.0 * np.pi)
                    g = [mag * np.cos(ph), mag * np.sin(ph)]
                else:
                    g = [mag * float(rng.choice([-1.0, 1.0])), 0.0]
                edges.append({"from": a, "to": b, "gain": g})
    return network_from_dict({
        "field": field, "nodes": names, "source": "S", "destination": "D",
        "edges": edges})


def random_subsets(rng, net, length):
    """Subset sequence members for the loop check: relays by coin flip,
    destination always in, source never."""
    subs = []
    for _ in range(length):
        subs.append([int(r) for r in net.relays if rng.random() < 0.5]
                    + [net.destination])
    return subs


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    print(f"[ACCEPTANCE] {name}: {'PASS' if report.passed else 'FAIL'}",
          flush=True)
