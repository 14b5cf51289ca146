"""Merge two reduced trees into the duplicate-model DAG.

The merged graph is the dependency structure used for scoring: each edge
points from a cause to the variable it feeds, so leaves carry the string
values being compared and the single sink node represents "the two
Sensors are duplicates". With M tags on one side and N on the other, the
tag comparison expands into one set node, M row nodes and M*N pair nodes,
each pair fed by its two value leaves.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .reduce import ReducedTree


class BnNodeKind(Enum):
    SENSOR_VAR = "SensorVar"
    ID_VAR = "IdVar"
    OBSERVATION_VAR = "ObservationVar"
    TAG_SET_VAR = "TagSetVar"
    TAG_ROW_VAR = "TagRowVar"
    TAG_PAIR_VAR = "TagPairVar"
    VALUE_LEAF = "ValueLeaf"


@dataclass(frozen=True)
class BnNode:
    node_id: str
    kind: BnNodeKind
    payload: str = ""


@dataclass(frozen=True)
class BnGraph:
    """Immutable DAG; edges run cause -> effect, the sink is the query node."""

    nodes: tuple[BnNode, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()
    m: int = 0
    n: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    @property
    def is_root_mismatch(self) -> bool:
        # Merging differing root labels yields the empty graph.
        return self.is_empty

    def node(self, node_id: str) -> BnNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def nodes_of_kind(self, kind: BnNodeKind) -> tuple[BnNode, ...]:
        return tuple(n for n in self.nodes if n.kind is kind)

    def causes_of(self, node_id: str) -> tuple[str, ...]:
        """Incoming neighbors in edge-insertion order."""
        return tuple(src for src, dst in self.edges if dst == node_id)

    def sink_id(self) -> str:
        """The unique node without outgoing edges (the inference target)."""
        sources = {src for src, _ in self.edges}
        sinks = [n.node_id for n in self.nodes if n.node_id not in sources]
        if len(sinks) != 1:
            raise ValueError(f"expected one sink, found {sinks}")
        return sinks[0]

    def topological_order(self) -> list[str]:
        """Kahn order, causes first; raises ValueError on a cycle."""
        out_deg = {n.node_id: 0 for n in self.nodes}
        incoming: dict[str, list[str]] = {n.node_id: [] for n in self.nodes}
        for src, dst in self.edges:
            out_deg[src] += 1
            incoming[dst].append(src)
        ready = [nid for nid, _ in incoming.items() if not incoming[nid]]
        remaining = {nid: len(incoming[nid]) for nid in incoming}
        order: list[str] = []
        outgoing: dict[str, list[str]] = {n.node_id: [] for n in self.nodes}
        for src, dst in self.edges:
            outgoing[src].append(dst)
        while ready:
            nid = ready.pop()
            order.append(nid)
            for nxt in outgoing[nid]:
                remaining[nxt] -= 1
                if remaining[nxt] == 0:
                    ready.append(nxt)
        if len(order) != len(self.nodes):
            raise ValueError("graph contains a cycle")
        return order


def merge_trees(a: ReducedTree, b: ReducedTree) -> BnGraph:
    """Merge two reduced trees; differing root labels yield the empty graph."""
    if a.label != b.label:
        return BnGraph()

    tags_a = a.tag_ids()
    tags_b = b.tag_ids()
    m, n = len(tags_a), len(tags_b)

    nodes: list[BnNode] = []
    edges: list[tuple[str, str]] = []

    def add(node: BnNode, *, feeds: str | None = None) -> str:
        nodes.append(node)
        if feeds is not None:
            edges.append((node.node_id, feeds))
        return node.node_id

    sensor = add(BnNode("sensor", BnNodeKind.SENSOR_VAR))
    id_var = add(BnNode("sensor_id", BnNodeKind.ID_VAR, payload="ID"), feeds=sensor)
    add(
        BnNode("sensor_id/a", BnNodeKind.VALUE_LEAF, payload=a.id_value or ""),
        feeds=id_var,
    )
    add(
        BnNode("sensor_id/b", BnNodeKind.VALUE_LEAF, payload=b.id_value or ""),
        feeds=id_var,
    )
    obs = add(BnNode("observation", BnNodeKind.OBSERVATION_VAR), feeds=sensor)

    if m > 0 and n > 0:
        tagset = add(
            BnNode("tagset", BnNodeKind.TAG_SET_VAR, payload=f"{m}x{n}"), feeds=obs
        )
        for i in range(1, m + 1):
            row = add(
                BnNode(f"row{i}", BnNodeKind.TAG_ROW_VAR, payload=str(i)), feeds=tagset
            )
            for j in range(1, n + 1):
                pair = add(
                    BnNode(f"pair{i}_{j}", BnNodeKind.TAG_PAIR_VAR, payload=f"{i},{j}"),
                    feeds=row,
                )
                add(
                    BnNode(
                        f"pair{i}_{j}/a", BnNodeKind.VALUE_LEAF, payload=tags_a[i - 1]
                    ),
                    feeds=pair,
                )
                add(
                    BnNode(
                        f"pair{i}_{j}/b", BnNodeKind.VALUE_LEAF, payload=tags_b[j - 1]
                    ),
                    feeds=pair,
                )

    return BnGraph(tuple(nodes), tuple(edges), m, n)


def expected_node_count(m: int, n: int) -> int:
    """Closed-form node count of a merged graph with tag counts m and n."""
    tag_part = (1 + m + m * n + 2 * m * n) if (m > 0 and n > 0) else 0
    return 3 + tag_part + 2


_MAX_LABEL_PAYLOAD = 24


def _dot_label(node: BnNode) -> str:
    label = node.kind.value
    if node.payload:
        payload = node.payload
        if len(payload) > _MAX_LABEL_PAYLOAD:
            payload = payload[: _MAX_LABEL_PAYLOAD - 3] + "..."
        payload = payload.replace("\\", "\\\\").replace('"', '\\"')
        label += "\\n" + payload
    return label


def export_dot(g: BnGraph) -> str:
    """Render the graph in DOT syntax; output is stable for equal graphs."""
    lines = ["digraph duplicate_model {"]
    for node in g.nodes:
        lines.append(f'  "{node.node_id}" [label="{_dot_label(node)}"];')
    for src, dst in g.edges:
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
