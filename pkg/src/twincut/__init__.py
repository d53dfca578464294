"""Twincut graphs: triangle-free graphs G_k with chromatic number k, built as
realizations of structured trees, plus the checks and certificates that go
with them."""

from twincut.certificate import (
    CertificateError,
    ClosureCertificate,
    certificate_stats,
    derive_certificate,
    replay,
    same_labelled_graph,
    twincut_certificate,
)
from twincut.coloring import (
    Budget,
    ChiResult,
    Coloring,
    chromatic_number,
    constructive_coloring,
    edge_deleted_coloring,
    export_kcolor_cnf,
    is_proper,
    rainbow_branch,
    unique_top_coloring,
)
from twincut.construction import address_of, twincut_graph, twincut_tree, vertex_count, vertex_of
from twincut.criticality import CriticalityReport, verify_critical
from twincut.graph import (
    Graph,
    GraphError,
    build_graph,
    decode_graph6,
    encode_dimacs,
    encode_graph6,
    induced_subgraph,
    is_isomorphic,
)
from twincut.structure import (
    DecompositionWitness,
    contains_induced_cube,
    decompose,
    find_edgeless_cutset,
    find_nonadjacent_twins,
    has_triangle,
)
from twincut.tree import Address, Branch, StructuredTree, branches, realize

__all__ = [
    "Address", "Branch", "Budget", "CertificateError", "ChiResult", "ClosureCertificate", "Coloring",
    "CriticalityReport", "DecompositionWitness", "Graph", "GraphError", "StructuredTree",
    "address_of", "branches", "build_graph", "certificate_stats", "chromatic_number",
    "constructive_coloring", "contains_induced_cube", "decode_graph6", "decompose",
    "derive_certificate", "edge_deleted_coloring", "encode_dimacs", "encode_graph6",
    "export_kcolor_cnf", "find_edgeless_cutset", "find_nonadjacent_twins", "has_triangle",
    "induced_subgraph", "is_isomorphic", "is_proper", "rainbow_branch", "realize", "replay",
    "same_labelled_graph", "twincut_certificate", "twincut_graph", "twincut_tree", "unique_top_coloring",
    "verify_critical", "vertex_count", "vertex_of",
]
