"""PML document model: parsing, serialization and structural validation.

PML sensor documents are a small XML vocabulary (Sensor, ID, Observation,
Command, DateTime, Data, Tag). A parsed document is an ordered labeled
tree: element nodes are labeled with their tag name, text content becomes
child nodes of kind Text, and child order is document order. Trees are
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum

from .errors import MalformedXml, MissingRequired, NotPml

NodePath = tuple[int, ...]


class NodeKind(Enum):
    """Label of a tree node; element kinds mirror the PML tag names."""

    SENSOR = "Sensor"
    ID = "ID"
    OBSERVATION = "Observation"
    COMMAND = "Command"
    DATETIME = "DateTime"
    DATA = "Data"
    TAG = "Tag"
    TEXT = "#text"


ELEMENT_KINDS = {k.value: k for k in NodeKind if k is not NodeKind.TEXT}


@dataclass(frozen=True)
class PmlNode:
    """One node of the ordered labeled tree.

    Text nodes carry their string in ``value`` and never have children.
    Element nodes keep their children (including Text children) in
    document order.
    """

    kind: NodeKind
    value: str | None = None
    children: tuple["PmlNode", ...] = ()

    @property
    def is_text(self) -> bool:
        return self.kind is NodeKind.TEXT

    def element_children(self) -> tuple["PmlNode", ...]:
        return tuple(c for c in self.children if not c.is_text)

    def text_value(self) -> str:
        """Concatenated text content of this node's Text children."""
        return "".join(c.value or "" for c in self.children if c.is_text)

    def is_element_leaf(self) -> bool:
        """True if no element children (Text children do not count)."""
        return not self.element_children()


@dataclass(frozen=True)
class PmlTree:
    """A parsed PML document plus a corpus-level identifier."""

    root: PmlNode | None
    source_id: str = ""

    @property
    def is_empty(self) -> bool:
        return self.root is None


#: Sentinel returned when a deletion removes the whole tree.
EMPTY_TREE = PmlTree(root=None, source_id="")


@dataclass(frozen=True)
class Violation:
    """One composition-rule breach, located by an XPath-like path."""

    path: str
    message: str


def _local_name(tag: str) -> str:
    # ElementTree encodes namespaces as {uri}local; prefixes survive only
    # in documents without xmlns declarations.
    if tag.startswith("{"):
        tag = tag.split("}", 1)[1]
    if ":" in tag:
        tag = tag.rsplit(":", 1)[1]
    return tag


def _build_node(elem: ET.Element) -> PmlNode:
    local = _local_name(elem.tag)
    kind = ELEMENT_KINDS.get(local)
    if kind is None:
        raise NotPml(f"unknown element <{local}> is outside the PML subset")

    children: list[PmlNode] = []
    # Attributes fold into child nodes placed before sub-elements, sorted
    # by attribute name. An attribute named like a PML element (e.g.
    # ID="...") becomes that element with a Text child.
    for name in sorted(elem.attrib):
        value = elem.attrib[name]
        akind = ELEMENT_KINDS.get(_local_name(name))
        if akind is not None:
            text = PmlNode(NodeKind.TEXT, value=value)
            children.append(PmlNode(akind, children=(text,)))
        else:
            children.append(PmlNode(NodeKind.TEXT, value=value))
    if elem.text and elem.text.strip():
        children.append(PmlNode(NodeKind.TEXT, value=elem.text.strip()))
    for sub in elem:
        children.append(_build_node(sub))
        if sub.tail and sub.tail.strip():
            children.append(PmlNode(NodeKind.TEXT, value=sub.tail.strip()))
    return PmlNode(kind, children=tuple(children))


def parse_pml(text: str, source_id: str = "") -> PmlTree:
    """Parse PML text into an ordered labeled tree.

    Raises MalformedXml for invalid markup, NotPml when the root element
    is not Sensor (or an element outside the PML subset appears), and
    MissingRequired when the Sensor lacks an ID or Observation child.
    """
    try:
        root_elem = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    if _local_name(root_elem.tag) != NodeKind.SENSOR.value:
        raise NotPml(
            f"root element is <{_local_name(root_elem.tag)}>, expected <Sensor>"
        )
    root = _build_node(root_elem)

    kinds = {c.kind for c in root.element_children()}
    if NodeKind.ID not in kinds:
        raise MissingRequired("Sensor has no ID child")
    if NodeKind.OBSERVATION not in kinds:
        raise MissingRequired("Sensor has no Observation child")
    return PmlTree(root=root, source_id=source_id)


def parse_pml_file(path, source_id: str | None = None) -> PmlTree:
    """Read a UTF-8 PML file; source_id defaults to the file stem."""
    from pathlib import Path

    p = Path(path)
    sid = p.stem if source_id is None else source_id
    return parse_pml(p.read_text(encoding="utf-8"), source_id=sid)


def _to_element(node: PmlNode) -> ET.Element:
    elem = ET.Element(node.kind.value)
    prev: ET.Element | None = None
    for child in node.children:
        if child.is_text:
            if prev is None:
                elem.text = (elem.text or "") + (child.value or "")
            else:
                prev.tail = (prev.tail or "") + (child.value or "")
        else:
            prev = _to_element(child)
            elem.append(prev)
    return elem


def serialize_pml(tree: PmlTree, indent: bool = True) -> str:
    """Serialize back to XML; parse(serialize(t)) is structurally equal to t."""
    if tree.root is None:
        raise NotPml("cannot serialize the empty tree")
    elem = _to_element(tree.root)
    if indent:
        ET.indent(elem, space="  ")
    return ET.tostring(elem, encoding="unicode") + "\n"


def walk(node: PmlNode, path: NodePath = ()) -> Iterator[tuple[NodePath, PmlNode]]:
    """Pre-order traversal yielding (path, node); paths index ``children``."""
    yield path, node
    for i, child in enumerate(node.children):
        yield from walk(child, path + (i,))


def find_paths(tree: PmlTree, kind: NodeKind) -> list[NodePath]:
    """Paths of all nodes with the given kind, in document order."""
    if tree.root is None:
        return []
    return [p for p, n in walk(tree.root) if n.kind is kind]


# Composition rules: allowed child kinds and required-singular children
# per structural container.
_SENSOR_ALLOWED = {NodeKind.ID, NodeKind.OBSERVATION}
_OBS_ALLOWED = {
    NodeKind.ID,
    NodeKind.COMMAND,
    NodeKind.DATETIME,
    NodeKind.DATA,
    NodeKind.TAG,
}
_TAG_ALLOWED = {NodeKind.ID, NodeKind.DATA, NodeKind.SENSOR}
_VALUE_LEAVES = {NodeKind.ID, NodeKind.COMMAND, NodeKind.DATETIME}


@dataclass
class _Checker:
    out: list[Violation] = field(default_factory=list)

    def flag(self, path: str, message: str) -> None:
        self.out.append(Violation(path, message))

    def child_path(self, parent: str, node: PmlNode, ordinal: int) -> str:
        return f"{parent}/{node.kind.value}[{ordinal}]"

    def check_sensor(self, node: PmlNode, path: str) -> None:
        counts = self._count_kinds(node)
        if counts.get(NodeKind.ID, 0) == 0:
            self.flag(path, "Sensor requires an ID child")
        if counts.get(NodeKind.ID, 0) > 1:
            self.flag(path, "Sensor has more than one ID child")
        if counts.get(NodeKind.OBSERVATION, 0) == 0:
            self.flag(path, "Sensor requires an Observation child")
        self._check_children(node, path, _SENSOR_ALLOWED)

    def check_observation(self, node: PmlNode, path: str) -> None:
        counts = self._count_kinds(node)
        if counts.get(NodeKind.DATETIME, 0) == 0:
            self.flag(path, "Observation requires a DateTime child")
        for kind in (NodeKind.ID, NodeKind.COMMAND, NodeKind.DATETIME):
            if counts.get(kind, 0) > 1:
                self.flag(path, f"Observation has more than one {kind.value} child")
        self._check_children(node, path, _OBS_ALLOWED)

    def check_tag(self, node: PmlNode, path: str) -> None:
        counts = self._count_kinds(node)
        if counts.get(NodeKind.ID, 0) == 0:
            self.flag(path, "Tag requires an ID child")
        if counts.get(NodeKind.ID, 0) > 1:
            self.flag(path, "Tag has more than one ID child")
        if counts.get(NodeKind.DATA, 0) > 1:
            self.flag(path, "Tag has more than one Data child")
        self._check_children(node, path, _TAG_ALLOWED)

    def _count_kinds(self, node: PmlNode) -> dict[NodeKind, int]:
        counts: dict[NodeKind, int] = {}
        for c in node.element_children():
            counts[c.kind] = counts.get(c.kind, 0) + 1
        return counts

    def _check_children(self, node: PmlNode, path: str, allowed: set[NodeKind]) -> None:
        ordinals: dict[NodeKind, int] = {}
        for child in node.children:
            if child.is_text:
                self.flag(path, "unexpected text content")
                continue
            ordinals[child.kind] = ordinals.get(child.kind, 0) + 1
            cpath = self.child_path(path, child, ordinals[child.kind])
            if child.kind not in allowed:
                self.flag(cpath, f"{child.kind.value} is not allowed here")
                continue
            if child.kind is NodeKind.OBSERVATION:
                self.check_observation(child, cpath)
            elif child.kind is NodeKind.TAG:
                self.check_tag(child, cpath)
            elif child.kind is NodeKind.SENSOR:
                self.check_sensor(child, cpath)
            elif child.kind in _VALUE_LEAVES:
                if not child.is_element_leaf():
                    self.flag(cpath, f"{child.kind.value} must not contain elements")
                if child.kind is NodeKind.ID and not child.text_value().strip():
                    self.flag(cpath, "ID must carry a non-empty value")
            # Data is opaque payload: anything goes inside.


def validate(tree: PmlTree) -> list[Violation]:
    """Check the element-composition rules; an empty list means conforming."""
    if tree.root is None:
        return [Violation("/", "empty tree")]
    checker = _Checker()
    if tree.root.kind is not NodeKind.SENSOR:
        checker.flag("/", f"root is {tree.root.kind.value}, expected Sensor")
        return checker.out
    checker.check_sensor(tree.root, "/Sensor")
    return checker.out
