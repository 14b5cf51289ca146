"""Redundancy reduction: strip a document down to its EPC skeleton.

Everything except EPC-identifying content is redundant for duplicate
scoring: under an Observation the ID, Command and DateTime leaves and any
Data subtrees; under a Tag any Data subtrees and nested Sensor subtrees.
What survives is the Sensor's ID, its Observations, and each Tag's ID.
The survivors are expressed as a triple (label, attribute pairs,
subtrees).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .document import EMPTY_TREE, NodeKind, NodePath, PmlNode, PmlTree
from .errors import MissingRequired, NoSuchNode, NotALeaf, NotPml


@dataclass(frozen=True)
class ReducedTree:
    """Triple form of a reduced document: (label, pairs, subtrees).

    After reducing a conforming document: the root is labeled Sensor and
    carries the ("ID", epc) pair; its subtrees are Observations whose only
    subtrees are Tags; each Tag carries its ("ID", epc) pair and nothing
    else.
    """

    label: NodeKind
    pairs: frozenset[tuple[str, str]]
    subtrees: tuple["ReducedTree", ...] = ()

    @property
    def id_value(self) -> str | None:
        for name, value in self.pairs:
            if name == "ID":
                return value
        return None

    def tag_ids(self) -> list[str]:
        """EPC strings of all Tag subtrees, pooled in document order."""
        if self.label is NodeKind.TAG:
            v = self.id_value
            return [v] if v is not None else []
        out: list[str] = []
        for sub in self.subtrees:
            out.extend(sub.tag_ids())
        return out


def resolve(tree: PmlTree, path: NodePath) -> PmlNode:
    """Resolve a child-index path; raises NoSuchNode if it does not exist."""
    if tree.root is None:
        raise NoSuchNode("tree is empty")
    node = tree.root
    for idx in path:
        if idx < 0 or idx >= len(node.children):
            raise NoSuchNode(f"path {path} does not resolve")
        node = node.children[idx]
    return node


def _without(node: PmlNode, path: NodePath) -> PmlNode:
    idx = path[0]
    if len(path) == 1:
        children = node.children[:idx] + node.children[idx + 1 :]
    else:
        rebuilt = _without(node.children[idx], path[1:])
        children = node.children[:idx] + (rebuilt,) + node.children[idx + 1 :]
    return PmlNode(node.kind, node.value, children)


def del_leaf(tree: PmlTree, target: NodePath) -> PmlTree:
    """Delete a leaf node; remaining siblings keep their relative order.

    A node counts as a leaf when it has no element children; Text children
    holding its value are removed along with it. Deleting the root of a
    leaf-only tree yields the empty-tree sentinel.
    """
    node = resolve(tree, target)
    if not node.is_element_leaf():
        raise NotALeaf(f"node at {target} has element children")
    if not target:
        return EMPTY_TREE
    assert tree.root is not None
    return PmlTree(_without(tree.root, target), tree.source_id)


def del_subtree(tree: PmlTree, target: NodePath) -> PmlTree:
    """Delete the whole subtree at the path; order of siblings is kept."""
    resolve(tree, target)
    if not target:
        return EMPTY_TREE
    assert tree.root is not None
    return PmlTree(_without(tree.root, target), tree.source_id)


# (parent kind, child kind) pairs that are redundant. True = the child is
# deleted as a leaf, False = as a whole subtree.
_RULES: dict[tuple[NodeKind, NodeKind], bool] = {
    (NodeKind.OBSERVATION, NodeKind.ID): True,
    (NodeKind.OBSERVATION, NodeKind.COMMAND): True,
    (NodeKind.OBSERVATION, NodeKind.DATETIME): True,
    (NodeKind.OBSERVATION, NodeKind.DATA): False,
    (NodeKind.TAG, NodeKind.DATA): False,
    (NodeKind.TAG, NodeKind.SENSOR): False,
}


def _next_redundant(tree: PmlTree) -> tuple[NodePath, bool] | None:
    """Level-order scan for the first redundant node still present."""
    if tree.root is None:
        return None
    queue: deque[tuple[NodePath, PmlNode]] = deque([((), tree.root)])
    while queue:
        path, node = queue.popleft()
        for i, child in enumerate(node.children):
            rule = _RULES.get((node.kind, child.kind))
            if rule is not None:
                as_leaf = rule and child.is_element_leaf()
                return path + (i,), as_leaf
            if not child.is_text:
                queue.append((path + (i,), child))
    return None


def prune(tree: PmlTree) -> PmlTree:
    """Apply the deletion rules until no redundant node remains."""
    current = tree
    while True:
        found = _next_redundant(current)
        if found is None:
            return current
        path, as_leaf = found
        current = del_leaf(current, path) if as_leaf else del_subtree(current, path)


def _to_triple(node: PmlNode) -> ReducedTree:
    if node.kind is NodeKind.SENSOR:
        epc = _first_id_value(node)
        if epc is None:
            raise MissingRequired("Sensor without an ID value")
        subs = tuple(
            _to_triple(c)
            for c in node.element_children()
            if c.kind is NodeKind.OBSERVATION
        )
        return ReducedTree(NodeKind.SENSOR, frozenset({("ID", epc)}), subs)
    if node.kind is NodeKind.OBSERVATION:
        subs = tuple(
            _to_triple(c) for c in node.element_children() if c.kind is NodeKind.TAG
        )
        return ReducedTree(NodeKind.OBSERVATION, frozenset(), subs)
    if node.kind is NodeKind.TAG:
        epc = _first_id_value(node)
        if epc is None:
            raise MissingRequired("Tag without an ID value")
        return ReducedTree(NodeKind.TAG, frozenset({("ID", epc)}))
    raise NotPml(f"cannot reduce a {node.kind.value}-rooted subtree")


def _first_id_value(node: PmlNode) -> str | None:
    for c in node.element_children():
        if c.kind is NodeKind.ID:
            return c.text_value().strip()
    return None


def reduce_pml(tree: PmlTree) -> ReducedTree:
    """Reduce a document to its EPC skeleton triple."""
    if tree.root is None:
        raise NotPml("cannot reduce the empty tree")
    return _to_triple(prune(tree).root)


def embed(reduced: ReducedTree) -> PmlTree:
    """Embed a reduced triple back into document form.

    The embedding carries exactly the skeleton, so reducing it again
    reproduces the same triple. It is used for serialization and is not a
    conforming document (required DateTime leaves were redundancy).
    """
    return PmlTree(_embed_node(reduced), source_id="")


def _embed_node(rt: ReducedTree) -> PmlNode:
    children: list[PmlNode] = []
    for name, value in sorted(rt.pairs):
        kind = NodeKind(name) if name in {k.value for k in NodeKind} else None
        if kind is None:
            raise ValueError(f"pair attribute {name!r} is not a PML element name")
        children.append(PmlNode(kind, children=(PmlNode(NodeKind.TEXT, value=value),)))
    children.extend(_embed_node(s) for s in rt.subtrees)
    return PmlNode(rt.label, children=tuple(children))
