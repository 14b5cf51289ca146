"""Duplicate-probability scoring for PML sensor documents.

The pipeline: parse a document into an ordered labeled tree, reduce it to
its EPC skeleton, merge two skeletons into a directed acyclic dependency
graph, and evaluate the duplicate probability of the two sensors. A
seeded corpus generator and a pairwise evaluation harness support
simulation studies.
"""

from .bayesnet import (
    BnGraph,
    BnNode,
    BnNodeKind,
    expected_node_count,
    export_dot,
    merge_trees,
)
from .document import (
    EMPTY_TREE,
    NodeKind,
    PmlNode,
    PmlTree,
    Violation,
    parse_pml,
    parse_pml_file,
    serialize_pml,
    validate,
    walk,
)
from .errors import (
    BadSpec,
    EmptyRow,
    EmptySet,
    MalformedXml,
    MissingRequired,
    NoSuchNode,
    NotALeaf,
    NotPml,
    PmlError,
    TooLarge,
)
from .evaluate import (
    EvalReport,
    classify,
    histogram_counts,
    linear_r2,
    load_corpus_dir,
    load_truth,
    pairwise_matrix,
)
from .generator import (
    CorpusSpec,
    LabeledCorpus,
    generate_corpus,
    perturb,
    write_corpus,
)
from .inference import (
    DEFAULT_THRESHOLD,
    CptClass,
    ProbAnnotatedGraph,
    SimConfig,
    annotate,
    closed_form_probability,
    document_similarity,
    enumerate_exact,
    evaluate_closed_form,
    leaf_prior,
    levenshtein,
    noisy_or,
    pair_probability,
    string_similarity,
    tag_set_prob,
)
from .reduce import ReducedTree, del_leaf, del_subtree, embed, reduce_pml

__version__ = "0.1.0"

__all__ = [
    "BadSpec",
    "BnGraph",
    "BnNode",
    "BnNodeKind",
    "CorpusSpec",
    "CptClass",
    "DEFAULT_THRESHOLD",
    "EMPTY_TREE",
    "EmptyRow",
    "EmptySet",
    "EvalReport",
    "LabeledCorpus",
    "MalformedXml",
    "MissingRequired",
    "NoSuchNode",
    "NodeKind",
    "NotALeaf",
    "NotPml",
    "PmlError",
    "PmlNode",
    "PmlTree",
    "ProbAnnotatedGraph",
    "ReducedTree",
    "SimConfig",
    "TooLarge",
    "Violation",
    "annotate",
    "classify",
    "closed_form_probability",
    "del_leaf",
    "del_subtree",
    "document_similarity",
    "embed",
    "enumerate_exact",
    "evaluate_closed_form",
    "expected_node_count",
    "export_dot",
    "generate_corpus",
    "histogram_counts",
    "leaf_prior",
    "levenshtein",
    "linear_r2",
    "load_corpus_dir",
    "load_truth",
    "merge_trees",
    "noisy_or",
    "pair_probability",
    "pairwise_matrix",
    "parse_pml",
    "parse_pml_file",
    "perturb",
    "reduce_pml",
    "serialize_pml",
    "string_similarity",
    "tag_set_prob",
    "validate",
    "walk",
    "write_corpus",
]
