"""Time expansion: unfolded networks, trellis min-cut checks, loop inequality.

Unfolding replicates the node set over K stages; every base edge becomes a
stage-crossing copy i -> i+1, and the source and destination each get a chain
of lossless memory edges tying their copies together. A cut of the unfolded
network is a per-stage partition; any cut that severs a memory edge has value
+inf, so finite cuts keep every source copy on the source side and every
destination copy on the destination side.

The trellis check verifies, exhaustively over all per-stage cut sequences,
that the unfolded cut value is at least (K - L) times the original min-cut,
where L is the number of distinct per-stage cuts (2^(|V|-2)). The K - L
constant is what the loop-extraction argument actually yields: the K - 1
transition terms lose at most L - 1 to the final loop-free remainder, and a
one-relay chain meets K - L with equality, so the often-quoted K - L + 1
over-counts by one.

The loop inequality bounds a cyclic sum of conditional entropies
h(Y_{V_2}|X_{V_1}) + ... + h(Y_{V_1}|X_{V_l}) from below by the same sum
evaluated on the intersection-closure sets V~_k (union of all k-wise
intersections); it is the submodularity step that makes wiggling cuts no
cheaper than steady ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, ValidationError
from .linalg import gaussian_cond_entropy, mi_gaussian_iid
from .model import Cut, RelayNetwork, gain_submatrix

TRELLIS_BUDGET = 10 ** 7


@dataclass(frozen=True)
class UnfoldedEdge:
    tail: tuple[int, int]  # (base node, stage)
    head: tuple[int, int]
    gain: complex
    lossless: bool


@dataclass(frozen=True)
class UnfoldedNetwork:
    base: RelayNetwork
    stages: int
    edges: tuple[UnfoldedEdge, ...]

    @property
    def num_nodes(self) -> int:
        return self.base.num_nodes * self.stages

    def node_label(self, node: int, stage: int) -> str:
        return f"{self.base.names[node]}[{stage + 1}]"


@dataclass(frozen=True)
class UnfoldedCut:
    """Per-stage source-side sets, stage index 0 .. K-1, over base node ids."""

    stage_sides: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class TrellisCheck:
    stages: int
    num_states: int           # distinct per-stage cuts L
    factor: int               # K - L
    min_original: float
    threshold: float          # factor * min_original
    min_value: float          # smallest finite unfolded cut value
    argmin: tuple[int, ...]   # per-stage relay bitmasks achieving min_value
    margin: float             # min_value - threshold
    checked: int
    violations: tuple[tuple[int, ...], ...]
    vacuous: bool
    holds: bool


@dataclass(frozen=True)
class SubsetSequence:
    """Cyclic sequence of node subsets, each containing the destination and
    excluding the source. Duplicates are allowed (the inequality then holds
    with equality in the two-subset case)."""

    subsets: tuple[frozenset[int], ...]

    @property
    def length(self) -> int:
        return len(self.subsets)


@dataclass(frozen=True)
class LoopCheck:
    lhs_bits: float
    rhs_bits: float
    margin_bits: float
    tilde: tuple[frozenset[int], ...]
    counts_match: bool
    holds: bool


def unfold(net: RelayNetwork, stages: int) -> UnfoldedNetwork:
    if stages < 2:
        raise ValidationError("unfolding needs at least 2 stages")
    edges = []
    for i in range(stages - 1):
        for e in net.edges:
            edges.append(UnfoldedEdge((e.tail, i), (e.head, i + 1), e.gain, False))
        edges.append(UnfoldedEdge((net.source, i), (net.source, i + 1), 0j, True))
        edges.append(UnfoldedEdge((net.destination, i), (net.destination, i + 1), 0j, True))
    unf = UnfoldedNetwork(base=net, stages=stages, edges=tuple(edges))
    # every channel edge must advance exactly one stage
    assert all(e.head[1] == e.tail[1] + 1 for e in unf.edges)
    return unf


def make_unfolded_cut(unfolded: UnfoldedNetwork, stage_sides) -> UnfoldedCut:
    sides = tuple(frozenset(s) for s in stage_sides)
    net = unfolded.base
    if len(sides) != unfolded.stages:
        raise ValidationError(f"expected {unfolded.stages} stage sets, got {len(sides)}")
    for side in sides:
        if not all(0 <= v < net.num_nodes for v in side):
            raise ValidationError("stage set contains unknown node")
    if net.source not in sides[0]:
        raise ValidationError("first stage must contain the source")
    if net.destination in sides[-1]:
        raise ValidationError("last stage must exclude the destination")
    return UnfoldedCut(sides)


def steady_cut(unfolded: UnfoldedNetwork, cut: Cut) -> UnfoldedCut:
    """Lift an original cut to the unfolded network, same side at every stage."""
    return make_unfolded_cut(unfolded, [cut.source_side] * unfolded.stages)


def classify_cut(cut: UnfoldedCut) -> str:
    first = cut.stage_sides[0]
    return "steady" if all(s == first for s in cut.stage_sides[1:]) else "wiggling"


def _stage_matrix(net: RelayNetwork, tx_side: frozenset[int],
                  next_side: frozenset[int]) -> np.ndarray:
    """Crossing gains from stage-i transmitters in tx_side into stage-(i+1)
    receivers outside next_side, conditioned on the stage-i complement."""
    receivers = [w for w in range(net.num_nodes)
                 if w not in next_side
                 and any(e.tail in tx_side for e in net.in_map[w])]
    return gain_submatrix(net, receivers, sorted(tx_side))


def unfolded_cut_value(unfolded: UnfoldedNetwork, cut: UnfoldedCut) -> float:
    """Sum of per-stage crossing informations; +inf if a memory edge is cut."""
    net = unfolded.base
    for side in cut.stage_sides:
        if net.source not in side or net.destination in side:
            return math.inf
    u = net.rate_scale
    values = []
    for i in range(unfolded.stages - 1):
        mat = _stage_matrix(net, cut.stage_sides[i], cut.stage_sides[i + 1])
        values.append(mi_gaussian_iid(mat, 1.0, u))
    return math.fsum(values)


def _state_sides(net: RelayNetwork) -> list[frozenset[int]]:
    """All finite per-stage cut sides, ordered by relay bitmask."""
    relays = net.relays
    sides = []
    for mask in range(1 << len(relays)):
        side = {net.source}
        for b, v in enumerate(relays):
            if mask >> b & 1:
                side.add(v)
        sides.append(frozenset(side))
    return sides


def verify_trellis_lemma(net: RelayNetwork, stages: int,
                         budget: int = TRELLIS_BUDGET,
                         tolerance: float = 1e-9) -> TrellisCheck:
    """Exhaustively check every finite unfolded cut against the trellis bound.

    Cut values factor through consecutive stage pairs, so an L x L table of
    stage-pair informations turns the L^K enumeration into table lookups.
    """
    if stages < 2:
        raise ValidationError("need at least 2 stages")
    sides = _state_sides(net)
    L = len(sides)
    total = L ** stages
    if total > budget:
        raise CapacityError(
            f"{L}^{stages} = {total} cut sequences exceeds the budget of {budget}")

    u = net.rate_scale
    table = np.empty((L, L))
    for i, tx in enumerate(sides):
        for j, nxt in enumerate(sides):
            table[i, j] = mi_gaussian_iid(_stage_matrix(net, tx, nxt), 1.0, u)

    min_original = float(np.min(np.diag(table)))
    factor = stages - L
    threshold = factor * min_original

    min_value = math.inf
    argmin_seq: tuple[int, ...] = ()
    violations: list[tuple[int, ...]] = []
    chunk = 1 << 18
    powers = [L ** (stages - 1 - i) for i in range(stages)]
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        value = np.zeros(idx.size)
        prev = (idx // powers[0]) % L
        for i in range(1, stages):
            cur = (idx // powers[i]) % L
            value += table[prev, cur]
            prev = cur
        k = int(np.argmin(value))
        if value[k] < min_value:
            min_value = float(value[k])
            argmin_seq = _decode_sequence(int(idx[k]), powers, L)
        if len(violations) < 32:
            for flat in idx[value + tolerance < threshold][:32 - len(violations)]:
                violations.append(_decode_sequence(int(flat), powers, L))

    vacuous = factor <= 0
    return TrellisCheck(
        stages=stages, num_states=L, factor=factor,
        min_original=min_original, threshold=threshold,
        min_value=min_value, argmin=argmin_seq, margin=min_value - threshold,
        checked=total, violations=tuple(violations),
        vacuous=vacuous, holds=not violations)


def _decode_sequence(flat: int, powers, L: int) -> tuple[int, ...]:
    return tuple((flat // p) % L for p in powers)


def tilde_sets(seq: SubsetSequence) -> tuple[frozenset[int], ...]:
    """Intersection closure: the k-th set is the union of all k-wise
    intersections of the sequence, k = 1 .. length."""
    l = seq.length
    out = []
    for k in range(1, l + 1):
        union: set[int] = set()
        for idx in combinations(range(l), k):
            inter = set(seq.subsets[idx[0]])
            for i in idx[1:]:
                inter &= seq.subsets[i]
            union |= inter
        out.append(frozenset(union))
    return tuple(out)


def make_subset_sequence(net: RelayNetwork, subsets) -> SubsetSequence:
    sets = tuple(frozenset(s) for s in subsets)
    if len(sets) < 2:
        raise ValidationError("need at least two subsets")
    for s in sets:
        if net.destination not in s:
            raise ValidationError("every subset must contain the destination")
        if net.source in s:
            raise ValidationError("no subset may contain the source")
        if not all(0 <= v < net.num_nodes for v in s):
            raise ValidationError("subset contains unknown node")
    return SubsetSequence(sets)


def verify_loop_lemma(net: RelayNetwork, seq: SubsetSequence,
                      tolerance: float = 1e-9) -> LoopCheck:
    """Check the cyclic conditional-entropy inequality for one sequence."""
    l = seq.length
    lhs_terms = [gaussian_cond_entropy(net, seq.subsets[(i + 1) % l], seq.subsets[i])
                 for i in range(l)]
    tilde = tilde_sets(seq)
    rhs_terms = [gaussian_cond_entropy(net, t, t) for t in tilde]
    lhs = math.fsum(lhs_terms)
    rhs = math.fsum(rhs_terms)

    counts_match = True
    for v in range(net.num_nodes):
        in_seq = sum(1 for s in seq.subsets if v in s)
        in_tilde = sum(1 for t in tilde if v in t)
        if in_seq != in_tilde:
            counts_match = False
            break

    margin = lhs - rhs
    return LoopCheck(lhs_bits=lhs, rhs_bits=rhs, margin_bits=margin,
                     tilde=tilde, counts_match=counts_match,
                     holds=bool(margin >= -tolerance))
