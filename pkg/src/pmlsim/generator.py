"""Synthetic PML corpora with controlled duplicate fractions.

Documents are drawn from a seeded Mersenne Twister stream
(random.Random), so a corpus is a pure function of its spec. Duplicates
are copies of uniformly chosen earlier documents, optionally perturbed by
single-character EPC edits, and every within-group pair is recorded as
ground truth.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .document import NodeKind, PmlNode, PmlTree, serialize_pml
from .errors import BadSpec

#: Digits used by the 'd' placeholder of an id scheme.
_DIGITS = "0123456789"

DEFAULT_ID_SCHEME = "ddd:ddd.ddd.ddd"
DEFAULT_COMMAND = "READ_PALLET_TAGS_ONLY"


@dataclass(frozen=True)
class CorpusSpec:
    """Parameters of one synthetic corpus.

    id_alphabet is a template where every 'd' becomes a uniform random
    digit and any other character is kept verbatim. edits > 0 applies
    that many single-character substitutions to each injected duplicate.
    """

    count: int
    tags_per_doc: tuple[int, int] = (1, 3)
    id_alphabet: str = DEFAULT_ID_SCHEME
    duplicate_fraction: float = 0.0
    edits: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise BadSpec(f"count must be >= 1, got {self.count}")
        lo, hi = self.tags_per_doc
        if lo < 0 or hi < lo:
            raise BadSpec(f"bad tag range {self.tags_per_doc}")
        if not 0.0 <= self.duplicate_fraction <= 1.0:
            raise BadSpec(f"duplicate fraction {self.duplicate_fraction} outside [0, 1]")
        if self.edits < 0:
            raise BadSpec(f"edits must be >= 0, got {self.edits}")
        if "d" not in self.id_alphabet:
            raise BadSpec("id scheme needs at least one 'd' placeholder")


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[PmlTree, ...]
    truth: frozenset[tuple[str, str]]


def _random_epc(rng: random.Random, scheme: str) -> str:
    return "".join(rng.choice(_DIGITS) if c == "d" else c for c in scheme)


def _text(value: str) -> PmlNode:
    return PmlNode(NodeKind.TEXT, value=value)


def _leaf(kind: NodeKind, value: str) -> PmlNode:
    return PmlNode(kind, children=(_text(value),))


def _random_datetime(rng: random.Random) -> str:
    return (
        f"2002-11-{rng.randint(1, 28):02d}T"
        f"{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:{rng.randint(0, 59):02d}-06:00"
    )


def _random_tag(rng: random.Random, spec: CorpusSpec) -> PmlNode:
    children: list[PmlNode] = [_leaf(NodeKind.ID, _random_epc(rng, spec.id_alphabet))]
    if rng.random() < 0.25:
        children.append(_leaf(NodeKind.DATA, f"eeprom {rng.randrange(16 ** 4):04x}"))
    if rng.random() < 0.05:
        children.append(_minimal_sensor(rng, spec))
    return PmlNode(NodeKind.TAG, children=tuple(children))


def _minimal_sensor(rng: random.Random, spec: CorpusSpec) -> PmlNode:
    obs = PmlNode(
        NodeKind.OBSERVATION,
        children=(_leaf(NodeKind.DATETIME, _random_datetime(rng)),),
    )
    return PmlNode(
        NodeKind.SENSOR,
        children=(_leaf(NodeKind.ID, _random_epc(rng, spec.id_alphabet)), obs),
    )


def _observation(rng: random.Random, spec: CorpusSpec, tags: list[PmlNode]) -> PmlNode:
    children: list[PmlNode] = []
    if rng.random() < 0.5:
        children.append(_leaf(NodeKind.ID, f"{rng.randrange(10 ** 8):08d}"))
    children.append(_leaf(NodeKind.COMMAND, DEFAULT_COMMAND))
    children.append(_leaf(NodeKind.DATETIME, _random_datetime(rng)))
    if rng.random() < 0.25:
        children.append(_leaf(NodeKind.DATA, f"reader note {rng.randrange(1000)}"))
    children.extend(tags)
    return PmlNode(NodeKind.OBSERVATION, children=tuple(children))


def _random_document(rng: random.Random, spec: CorpusSpec, doc_id: str) -> PmlTree:
    lo, hi = spec.tags_per_doc
    tags = [_random_tag(rng, spec) for _ in range(rng.randint(lo, hi))]
    # Occasionally split the tags over two observations; the skeleton
    # pools tags, so the split must not change any score.
    if len(tags) >= 2 and rng.random() < 0.1:
        cut = rng.randint(1, len(tags) - 1)
        observations = [
            _observation(rng, spec, tags[:cut]),
            _observation(rng, spec, tags[cut:]),
        ]
    else:
        observations = [_observation(rng, spec, tags)]
    children = (_leaf(NodeKind.ID, _random_epc(rng, spec.id_alphabet)), *observations)
    return PmlTree(PmlNode(NodeKind.SENSOR, children=tuple(children)), source_id=doc_id)


def _epc_text_paths(tree: PmlTree) -> list[tuple[int, ...]]:
    """Paths of the Text nodes holding sensor and tag EPCs."""
    paths: list[tuple[int, ...]] = []

    def visit(node: PmlNode, path: tuple[int, ...]) -> None:
        for i, child in enumerate(node.children):
            cpath = path + (i,)
            if (
                child.kind is NodeKind.ID
                and node.kind in (NodeKind.SENSOR, NodeKind.TAG)
            ):
                for j, sub in enumerate(child.children):
                    if sub.kind is NodeKind.TEXT:
                        paths.append(cpath + (j,))
            elif not child.is_text:
                visit(child, cpath)

    assert tree.root is not None
    visit(tree.root, ())
    return paths


def _replace_value(node: PmlNode, path: tuple[int, ...], value: str) -> PmlNode:
    if not path:
        return PmlNode(node.kind, value, node.children)
    idx = path[0]
    rebuilt = _replace_value(node.children[idx], path[1:], value)
    children = node.children[:idx] + (rebuilt,) + node.children[idx + 1 :]
    return PmlNode(node.kind, node.value, children)


def perturb(doc: PmlTree, edits: int, seed: int) -> PmlTree:
    """Apply single-character substitutions to randomly chosen EPC strings."""
    if edits == 0:
        return doc
    rng = random.Random(seed)
    targets = _epc_text_paths(doc)
    if not targets:
        return doc
    root = doc.root
    assert root is not None
    for _ in range(edits):
        path = targets[rng.randrange(len(targets))]
        node = root
        for idx in path:
            node = node.children[idx]
        s = node.value or ""
        if not s:
            continue
        pos = rng.randrange(len(s))
        old = s[pos]
        new = rng.choice(_DIGITS.replace(old, "") if old in _DIGITS else _DIGITS)
        root = _replace_value(root, path, s[:pos] + new + s[pos + 1 :])
    return PmlTree(root, doc.source_id)


def generate_corpus(spec: CorpusSpec) -> LabeledCorpus:
    """Deterministically generate a corpus with labeled duplicate pairs."""
    rng = random.Random(spec.seed)
    n_dup = math.floor(spec.duplicate_fraction * spec.count)
    n_orig = spec.count - n_dup

    docs: list[PmlTree] = []
    group_of: dict[str, int] = {}
    for i in range(n_orig):
        doc = _random_document(rng, spec, f"doc-{i:04d}")
        docs.append(doc)
        group_of[doc.source_id] = i
    for k in range(n_dup):
        source = docs[rng.randrange(len(docs))]
        doc_id = f"doc-{n_orig + k:04d}"
        copy = PmlTree(source.root, source_id=doc_id)
        if spec.edits > 0:
            copy = perturb(copy, spec.edits, seed=rng.getrandbits(32))
        docs.append(copy)
        group_of[doc_id] = group_of[source.source_id]

    groups: dict[int, list[str]] = {}
    for doc_id, g in group_of.items():
        groups.setdefault(g, []).append(doc_id)
    truth = set()
    for members in groups.values():
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                truth.add(tuple(sorted((members[x], members[y]))))
    return LabeledCorpus(tuple(docs), frozenset(truth))


def write_corpus(corpus: LabeledCorpus, out_dir) -> Path:
    """Write one XML file per document plus truth.csv; returns the directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for doc in corpus.documents:
        (out / f"{doc.source_id}.xml").write_text(
            serialize_pml(doc), encoding="utf-8"
        )
    with open(out / "truth.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b"])
        for a, b in sorted(corpus.truth):
            writer.writerow([a, b])
    return out
