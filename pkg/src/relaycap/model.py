"""Relay network model: parsing, validation, cut enumeration, layering.

A network is a directed graph with one source, one destination, and a complex
gain per edge. Transmit power and receiver noise are unit per node, so the
gains carry all the geometry. Rates are in bits; real-field networks carry a
factor 1/2 on every mutual-information quantity (the `rate_scale` property).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

import numpy as np

from .errors import CapacityError, NotLayeredError, SchemaError, ValidationError

FIELD_REAL = "real"
FIELD_COMPLEX = "complex"

# Enumeration ceiling: 2^30 cut evaluations is the desk-scale limit.
MAX_ENUM_RELAYS = 30


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    gain: complex


@dataclass(frozen=True)
class RelayNetwork:
    field: str
    names: tuple[str, ...]
    source: int
    destination: int
    edges: tuple[Edge, ...]

    @cached_property
    def num_nodes(self) -> int:
        return len(self.names)

    @cached_property
    def rate_scale(self) -> float:
        """Field factor on rates: 1 for complex signals, 1/2 for real."""
        return 1.0 if self.field == FIELD_COMPLEX else 0.5

    @cached_property
    def gain_map(self) -> dict[tuple[int, int], complex]:
        return {(e.tail, e.head): e.gain for e in self.edges}

    @cached_property
    def out_map(self) -> dict[int, tuple[Edge, ...]]:
        out: dict[int, list[Edge]] = {v: [] for v in range(self.num_nodes)}
        for e in self.edges:
            out[e.tail].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def in_map(self) -> dict[int, tuple[Edge, ...]]:
        inc: dict[int, list[Edge]] = {v: [] for v in range(self.num_nodes)}
        for e in self.edges:
            inc[e.head].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def relays(self) -> tuple[int, ...]:
        ends = {self.source, self.destination}
        return tuple(v for v in range(self.num_nodes) if v not in ends)

    def gain(self, tail: int, head: int) -> Optional[complex]:
        return self.gain_map.get((tail, head))

    def received_power(self, node: int) -> float:
        """Unit noise plus incoming signal power under unit transmit powers."""
        return 1.0 + sum(abs(e.gain) ** 2 for e in self.in_map[node])

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"unknown node name {name!r}") from None


@dataclass(frozen=True)
class Cut:
    """Source-side node set of a source/destination partition."""

    source_side: frozenset[int]


@dataclass(frozen=True)
class CrossSection:
    """Gain matrix across a cut.

    Rows cover only destination-side nodes with at least one in-edge from the
    source side; `silent` records the destination-side nodes whose rows would
    be all zero and are omitted.
    """

    matrix: np.ndarray
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    silent: tuple[int, ...]


@dataclass(frozen=True)
class LayerDecomposition:
    depth: dict[int, int]
    layers: tuple[tuple[int, ...], ...]
    num_layers: int  # depth of the destination


def _require(cond: bool, exc: type, message: str) -> None:
    if not cond:
        raise exc(message)


def network_from_dict(obj) -> RelayNetwork:
    """Build and validate a network from a decoded JSON object."""
    _require(isinstance(obj, dict), SchemaError, "network document must be a JSON object")
    for key in ("field", "nodes", "source", "destination", "edges"):
        _require(key in obj, SchemaError, f"missing required key {key!r}")

    field = obj["field"]
    _require(field in (FIELD_REAL, FIELD_COMPLEX), SchemaError,
             f"field must be 'real' or 'complex', got {field!r}")

    nodes = obj["nodes"]
    _require(isinstance(nodes, list) and nodes, SchemaError, "nodes must be a non-empty list")
    _require(all(isinstance(n, str) for n in nodes), SchemaError, "node names must be strings")
    _require(len(set(nodes)) == len(nodes), ValidationError, "duplicate node names")
    names = tuple(nodes)
    index = {n: i for i, n in enumerate(names)}

    for key in ("source", "destination"):
        _require(isinstance(obj[key], str), SchemaError, f"{key} must be a node name string")
        _require(obj[key] in index, ValidationError, f"{key} {obj[key]!r} not in nodes")
    source = index[obj["source"]]
    destination = index[obj["destination"]]
    _require(source != destination, ValidationError, "source and destination must differ")

    raw_edges = obj["edges"]
    _require(isinstance(raw_edges, list), SchemaError, "edges must be a list")
    edges = []
    seen = set()
    for k, item in enumerate(raw_edges):
        where = f"edges[{k}]"
        _require(isinstance(item, dict), SchemaError, f"{where} must be an object")
        for key in ("from", "to", "gain"):
            _require(key in item, SchemaError, f"{where} missing key {key!r}")
        _require(item["from"] in index, ValidationError, f"{where}.from: unknown node {item['from']!r}")
        _require(item["to"] in index, ValidationError, f"{where}.to: unknown node {item['to']!r}")
        tail, head = index[item["from"]], index[item["to"]]
        _require(tail != head, ValidationError, f"{where}: self-loop at {item['from']!r}")
        _require((tail, head) not in seen, ValidationError,
                 f"{where}: duplicate edge {item['from']!r} -> {item['to']!r}")
        seen.add((tail, head))
        g = item["gain"]
        _require(isinstance(g, list) and len(g) == 2, SchemaError,
                 f"{where}.gain must be [re, im]")
        _require(all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in g),
                 SchemaError, f"{where}.gain entries must be numbers")
        re, im = float(g[0]), float(g[1])
        _require(math.isfinite(re) and math.isfinite(im), ValidationError,
                 f"{where}.gain must be finite")
        if field == FIELD_REAL:
            _require(im == 0.0, ValidationError,
                     f"{where}.gain has nonzero imaginary part on a real-field network")
        edges.append(Edge(tail, head, complex(re, im)))

    net = RelayNetwork(field, names, source, destination, tuple(edges))
    _validate_connectivity(net)
    return net


def _validate_connectivity(net: RelayNetwork) -> None:
    """Every node must lie on some source-to-destination path."""
    fwd = _reachable(net, net.source, forward=True)
    bwd = _reachable(net, net.destination, forward=False)
    for v in range(net.num_nodes):
        if v not in fwd or v not in bwd:
            raise ValidationError(
                f"node {net.names[v]!r} is not on any source-to-destination path")


def _reachable(net: RelayNetwork, start: int, forward: bool) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        nxt = net.out_map[v] if forward else net.in_map[v]
        for e in nxt:
            w = e.head if forward else e.tail
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def parse_network(text: str) -> RelayNetwork:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    return network_from_dict(obj)


def network_to_dict(net: RelayNetwork) -> dict:
    return {
        "field": net.field,
        "nodes": list(net.names),
        "source": net.names[net.source],
        "destination": net.names[net.destination],
        "edges": [
            {"from": net.names[e.tail], "to": net.names[e.head],
             "gain": [e.gain.real, e.gain.imag]}
            for e in net.edges
        ],
    }


def network_to_json(net: RelayNetwork) -> str:
    return json.dumps(network_to_dict(net), indent=2)


def diamond_network(a: float, field: str = FIELD_REAL) -> RelayNetwork:
    """Two-relay diamond with gains (a^5, a^2) on the first hop, (a^3, a^5) on the second."""
    a = float(a)
    _require(a > 0 and math.isfinite(a), ValidationError, "diamond parameter a must be positive and finite")
    return network_from_dict({
        "field": field,
        "nodes": ["S", "A1", "A2", "D"],
        "source": "S",
        "destination": "D",
        "edges": [
            {"from": "S", "to": "A1", "gain": [a ** 5, 0.0]},
            {"from": "S", "to": "A2", "gain": [a ** 2, 0.0]},
            {"from": "A1", "to": "D", "gain": [a ** 3, 0.0]},
            {"from": "A2", "to": "D", "gain": [a ** 5, 0.0]},
        ],
    })


def line_network(gains: Iterable[float], field: str = FIELD_REAL) -> RelayNetwork:
    """Chain S -> R1 -> ... -> D with the given per-hop gains."""
    gains = [float(g) for g in gains]
    _require(len(gains) >= 1, ValidationError, "need at least one hop")
    names = ["S"] + [f"R{i}" for i in range(1, len(gains))] + ["D"]
    edges = [{"from": names[i], "to": names[i + 1], "gain": [gains[i], 0.0]}
             for i in range(len(gains))]
    return network_from_dict({
        "field": field, "nodes": names, "source": "S", "destination": "D",
        "edges": edges,
    })


def make_cut(net: RelayNetwork, members: Iterable[int]) -> Cut:
    side = frozenset(members)
    _require(net.source in side, ValidationError, "cut must contain the source")
    _require(net.destination not in side, ValidationError, "cut must exclude the destination")
    _require(all(0 <= v < net.num_nodes for v in side), ValidationError, "cut contains unknown node")
    return Cut(side)


def enumerate_cuts(net: RelayNetwork, max_relays: int = MAX_ENUM_RELAYS) -> list[Cut]:
    """All 2^(|V|-2) source/destination cuts, ordered by relay bitmask."""
    relays = net.relays
    if len(relays) > max_relays:
        raise CapacityError(
            f"{len(relays)} relays exceeds the enumeration ceiling of {max_relays}")
    cuts = []
    for mask in range(1 << len(relays)):
        side = {net.source}
        for b, v in enumerate(relays):
            if mask >> b & 1:
                side.add(v)
        cuts.append(Cut(frozenset(side)))
    return cuts


def layering(net: RelayNetwork) -> LayerDecomposition:
    """Breadth-first depths from the source; every edge must advance one layer.

    Raises NotLayeredError with two source-to-destination paths of different
    lengths when the network is not layered.
    """
    depth = {net.source: 0}
    parent: dict[int, int] = {}
    queue = deque([net.source])
    while queue:
        v = queue.popleft()
        for e in net.out_map[v]:
            if e.head not in depth:
                depth[e.head] = depth[v] + 1
                parent[e.head] = v
                queue.append(e.head)

    for e in net.edges:
        if depth[e.head] != depth[e.tail] + 1:
            raise NotLayeredError(
                f"edge {net.names[e.tail]!r} -> {net.names[e.head]!r} spans depths "
                f"{depth[e.tail]} -> {depth[e.head]}",
                witness=_unequal_paths(net, parent, e))

    n_layers = depth[net.destination]
    layers = [[] for _ in range(n_layers + 1)]
    for v in range(net.num_nodes):
        layers[depth[v]].append(v)
    return LayerDecomposition(
        depth=depth,
        layers=tuple(tuple(sorted(layer)) for layer in layers),
        num_layers=n_layers)


def _unequal_paths(net, parent, bad_edge):
    """Two source-to-destination paths of different lengths through a bad edge."""
    def root_path(v):
        path = [v]
        while path[-1] != net.source:
            path.append(parent[path[-1]])
        return path[::-1]

    suffix = _any_path(net, bad_edge.head, net.destination)
    short = root_path(bad_edge.head) + suffix[1:]
    long = root_path(bad_edge.tail) + suffix  # crosses bad_edge into the suffix
    return (tuple(net.names[v] for v in short), tuple(net.names[v] for v in long))


def _any_path(net, start, goal):
    prev = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == goal:
            break
        for e in net.out_map[v]:
            if e.head not in prev:
                prev[e.head] = v
                queue.append(e.head)
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def gain_submatrix(net: RelayNetwork, receivers: Iterable[int],
                   transmitters: Iterable[int]) -> np.ndarray:
    """Dense gain matrix, one row per receiver and one column per transmitter."""
    rows = list(receivers)
    cols = list(transmitters)
    dtype = np.complex128 if net.field == FIELD_COMPLEX else np.float64
    mat = np.zeros((len(rows), len(cols)), dtype=dtype)
    for rj, j in enumerate(rows):
        for ci, i in enumerate(cols):
            g = net.gain_map.get((i, j))
            if g is not None:
                mat[rj, ci] = g if dtype == np.complex128 else g.real
    return mat


def cut_crossing_matrix(net: RelayNetwork, cut: Cut) -> CrossSection:
    """Gains from the source side into the destination side of a cut."""
    side = cut.source_side
    cols = tuple(sorted(side))
    active, silent = [], []
    for j in sorted(set(range(net.num_nodes)) - side):
        if any(e.tail in side for e in net.in_map[j]):
            active.append(j)
        else:
            silent.append(j)
    matrix = gain_submatrix(net, active, cols)
    return CrossSection(matrix=matrix, rows=tuple(active), cols=cols,
                        silent=tuple(silent))


def layer_cut_decomposition(net: RelayNetwork, cut: Cut):
    """Per-stage (transmit, receive) node pairs of a cut in a layered network.

    Stage l pairs the cut's layer-(l-1) transmitters with the complement's
    layer-l receivers; the union of crossing edges over stages is exactly the
    cut's crossing edge set.
    """
    decomp = layering(net)
    side = cut.source_side
    pairs = []
    for l in range(1, decomp.num_layers + 1):
        tx = frozenset(v for v in decomp.layers[l - 1] if v in side)
        rx = frozenset(v for v in decomp.layers[l] if v not in side)
        pairs.append((tx, rx))
    return pairs
