"""Priors, conditional-probability classes and the duplicate probability.

Scoring walks the merged DAG bottom-up. Every compared value pair gets a
prior: 1/0 identity in exact mode, or a normalized edit similarity
1 - D(a, b) / max(|a|, |b|) in edit mode. Above the leaves there are only
three deterministic table classes: identity at single-attribute nodes
(CP1), AND at the sensor node (CP2), and for the tag set an OR across
each row plus the row average (CP3). Under those tables the sink
probability collapses to the closed form

    P = P(sensor ids match) * (sum_i [1 - prod_j (1 - p_ij)]) / M

which ``document_similarity`` evaluates directly. ``enumerate_exact`` is
the independent check: it sums over every binary assignment of the value
pairs and applies the tables literally.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum

from .bayesnet import BnGraph, BnNodeKind, merge_trees
from .document import PmlTree
from .errors import EmptyRow, EmptySet, TooLarge
from .reduce import ReducedTree, reduce_pml

#: Default duplicate threshold (lower edge of the accepted band).
DEFAULT_THRESHOLD = 0.4095


@dataclass(frozen=True)
class SimConfig:
    """Similarity settings shared by the library and the CLI.

    weights maps attribute names to their importance; weights must sum to
    one per compared node. Value leaves carry a single attribute, so the
    only admissible weight is 1 and priors reduce to the raw similarity.
    """

    similarity: str = "exact"
    weights: Mapping[str, float] = field(default_factory=lambda: {"ID": 1.0})
    threshold: float = DEFAULT_THRESHOLD
    symmetrize: bool = False

    def __post_init__(self) -> None:
        if self.similarity not in ("exact", "edit"):
            raise ValueError(f"similarity must be 'exact' or 'edit', got {self.similarity!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        total = 0.0
        for name, w in self.weights.items():
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {name}={w} outside [0, 1]")
            total += w
        if self.weights and abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {total}")


class CptClass(Enum):
    CP1 = "CP1"           # identity on the single value attribute
    CP2 = "CP2"           # AND over the sensor's two feeds
    CP3_SET = "CP3-set"   # average of the row indicators
    CP3_ROW = "CP3-row"   # OR across one row of pair nodes
    PASS_THROUGH = "pass"  # observation mirrors the tag set


def levenshtein(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions, substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        append = cur.append
        left = i
        for j, cb in enumerate(b, 1):
            diag = prev[j - 1]
            left = diag if ca == cb else min(prev[j], left, diag) + 1
            append(left)
        prev = cur
    return prev[-1]


def string_similarity(a: str, b: str, cfg: SimConfig) -> float:
    """Similarity of two strings in [0, 1] under the configured mode."""
    if cfg.similarity == "exact":
        return 1.0 if a == b else 0.0
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def leaf_prior(pair: tuple[str, str], cfg: SimConfig) -> float:
    """Prior probability that a compared value pair is a duplicate."""
    return string_similarity(pair[0], pair[1], cfg)


def noisy_or(row_priors: Sequence[float]) -> float:
    """Probability that at least one candidate matches: 1 - prod(1 - p)."""
    if len(row_priors) == 0:
        raise EmptyRow("no candidates to combine")
    prod = 1.0
    for p in row_priors:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        prod *= 1.0 - p
    return 1.0 - prod


def tag_set_prob(rows: Sequence[float], m: int) -> float:
    """Average of the row probabilities over the first document's tag count."""
    if m <= 0:
        raise EmptySet("tag set average needs at least one row")
    if len(rows) != m:
        raise ValueError(f"expected {m} rows, got {len(rows)}")
    return sum(rows) / m


def closed_form_probability(sensor_prior: float, pair_rows: Sequence[Sequence[float]],
                            m: int, n: int) -> float:
    """Sink probability from explicit priors.

    pair_rows holds the M x N pair priors. When both sides have no tags
    the tag term is vacuously 1; when exactly one side has tags it is 0.
    """
    if m == 0 and n == 0:
        observation = 1.0
    elif m == 0 or n == 0:
        observation = 0.0
    else:
        observation = tag_set_prob([noisy_or(row) for row in pair_rows], m)
    return sensor_prior * observation


@dataclass(frozen=True)
class ProbAnnotatedGraph:
    """A merged graph plus its leaf-pair priors and per-node table classes."""

    graph: BnGraph
    priors: Mapping[tuple[str, str], float]
    cpt_class: Mapping[str, CptClass]


_CP1_KINDS = (BnNodeKind.ID_VAR, BnNodeKind.TAG_PAIR_VAR)

_CLASS_BY_KIND = {
    BnNodeKind.ID_VAR: CptClass.CP1,
    BnNodeKind.TAG_PAIR_VAR: CptClass.CP1,
    BnNodeKind.SENSOR_VAR: CptClass.CP2,
    BnNodeKind.TAG_SET_VAR: CptClass.CP3_SET,
    BnNodeKind.TAG_ROW_VAR: CptClass.CP3_ROW,
    BnNodeKind.OBSERVATION_VAR: CptClass.PASS_THROUGH,
}


def value_pair(g: BnGraph, node_id: str) -> tuple[str, str]:
    """Leaf ids feeding a comparison node, in insertion (a, b) order."""
    leaves = [
        src for src in g.causes_of(node_id)
        if g.node(src).kind is BnNodeKind.VALUE_LEAF
    ]
    if len(leaves) != 2:
        raise ValueError(f"node {node_id} is fed by {len(leaves)} value leaves")
    return leaves[0], leaves[1]


def annotate(g: BnGraph, cfg: SimConfig) -> ProbAnnotatedGraph:
    """Attach leaf-pair priors and table classes to a merged graph."""
    priors: dict[tuple[str, str], float] = {}
    classes: dict[str, CptClass] = {}
    for node in g.nodes:
        if node.kind is BnNodeKind.VALUE_LEAF:
            continue
        classes[node.node_id] = _CLASS_BY_KIND[node.kind]
        if node.kind in _CP1_KINDS:
            ida, idb = value_pair(g, node.node_id)
            pair = (g.node(ida).payload, g.node(idb).payload)
            priors[(ida, idb)] = leaf_prior(pair, cfg)
    return ProbAnnotatedGraph(graph=g, priors=priors, cpt_class=classes)


def evaluate_closed_form(ann: ProbAnnotatedGraph) -> float:
    """Closed-form sink probability of an annotated document graph."""
    g = ann.graph
    if g.is_empty:
        return 0.0
    id_nodes = g.nodes_of_kind(BnNodeKind.ID_VAR)
    if len(id_nodes) != 1:
        raise ValueError("document graph must carry exactly one sensor-id node")
    sensor_prior = ann.priors[value_pair(g, id_nodes[0].node_id)]
    rows = []
    for row_node in g.nodes_of_kind(BnNodeKind.TAG_ROW_VAR):
        row = [
            ann.priors[value_pair(g, pair_id)]
            for pair_id in g.causes_of(row_node.node_id)
        ]
        rows.append(row)
    return closed_form_probability(sensor_prior, rows, g.m, g.n)


def enumerate_exact(ann: ProbAnnotatedGraph, cap: int = 20) -> float:
    """Sink probability by full enumeration over the value-pair variables.

    Sums over all binary assignments of the compared pairs, weighting each
    by the product of leaf priors and applying the table classes
    literally. Cost is 2**(number of pairs); graphs beyond the cap raise
    TooLarge.
    """
    g = ann.graph
    if g.is_empty:
        return 0.0
    cp1_ids = [n.node_id for n in g.nodes if n.kind in _CP1_KINDS]
    if len(cp1_ids) > cap:
        raise TooLarge(f"{len(cp1_ids)} value pairs exceed the enumeration cap {cap}")
    pair_prior = {nid: ann.priors[value_pair(g, nid)] for nid in cp1_ids}
    pair_index = {nid: k for k, nid in enumerate(cp1_ids)}

    order = g.topological_order()
    kind_of = {n.node_id: n.kind for n in g.nodes}
    causes = {n.node_id: g.causes_of(n.node_id) for n in g.nodes}
    sink = g.sink_id()

    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(cp1_ids)):
        weight = 1.0
        for nid in cp1_ids:
            p = pair_prior[nid]
            weight *= p if bits[pair_index[nid]] else 1.0 - p
        if weight == 0.0:
            continue
        value: dict[str, float] = {}
        for nid in order:
            kind = kind_of[nid]
            if kind is BnNodeKind.VALUE_LEAF:
                continue
            if kind in _CP1_KINDS:
                value[nid] = float(bits[pair_index[nid]])
            elif kind is BnNodeKind.TAG_ROW_VAR:
                value[nid] = 1.0 if any(value[c] == 1.0 for c in causes[nid]) else 0.0
            elif kind is BnNodeKind.TAG_SET_VAR:
                feeds = causes[nid]
                value[nid] = sum(value[c] for c in feeds) / len(feeds)
            elif kind is BnNodeKind.OBSERVATION_VAR:
                feeds = causes[nid]
                if feeds:
                    value[nid] = value[feeds[0]]
                else:
                    value[nid] = 1.0 if (g.m == 0 and g.n == 0) else 0.0
            elif kind is BnNodeKind.SENSOR_VAR:
                prod = 1.0
                for c in causes[nid]:
                    prod *= value[c]
                value[nid] = prod
            else:  # pragma: no cover - kinds are exhaustive
                raise ValueError(f"unhandled node kind {kind}")
        total += weight * value[sink]
    return total


def pair_probability(a: ReducedTree, b: ReducedTree, cfg: SimConfig) -> float:
    """Duplicate probability of two already-reduced documents."""
    p = _one_way(a, b, cfg)
    if cfg.symmetrize:
        p = 0.5 * (p + _one_way(b, a, cfg))
    return p


def _one_way(a: ReducedTree, b: ReducedTree, cfg: SimConfig) -> float:
    g = merge_trees(a, b)
    if g.is_empty:
        return 0.0
    return evaluate_closed_form(annotate(g, cfg))


def document_similarity(a: PmlTree, b: PmlTree, cfg: SimConfig | None = None) -> float:
    """Duplicate probability of two documents: reduce, merge, evaluate."""
    if cfg is None:
        cfg = SimConfig()
    return pair_probability(reduce_pml(a), reduce_pml(b), cfg)
