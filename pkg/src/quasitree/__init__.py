"""Cuts, structure trees and tree approximations of finite graphs."""

from .cuts import (
    CapExceeded,
    Caps,
    Cut,
    FilterMode,
    Treeset,
    enumerate_cuts,
    partition_into_treesets,
    validate_treeset,
)
from .decompose import (
    Certificate,
    CertificateError,
    accessibility_pipeline,
    contract,
    free_intersection_check,
    one_endedness_modulus,
    spanning_forest_of_classes,
    split,
    subdivide,
    treeify,
)
from .graph import Graph, lipschitz_constant, quasi_isometry_constants
from .structure_tree import build_structure_tree, tree_distance, validate_structure_tree

__all__ = [
    "CapExceeded",
    "Caps",
    "Certificate",
    "CertificateError",
    "Cut",
    "FilterMode",
    "Graph",
    "Treeset",
    "accessibility_pipeline",
    "build_structure_tree",
    "contract",
    "enumerate_cuts",
    "free_intersection_check",
    "lipschitz_constant",
    "one_endedness_modulus",
    "partition_into_treesets",
    "quasi_isometry_constants",
    "spanning_forest_of_classes",
    "split",
    "subdivide",
    "tree_distance",
    "treeify",
    "validate_structure_tree",
]
