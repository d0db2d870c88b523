"""Spectral solver for discrete quantum graphs.

Metric graphs sampled on a lattice: each edge carries a finite
difference chain, vertices enforce value continuity and a weighted
current balance. The package builds the secular matrix whose
determinant zeros give the spectrum, classifies each zero against edge
resonances, reconstructs eigenfunctions, and cross-checks everything
with a dense reference solver.
"""

from .chain import (
    ChainProblem,
    chain_eigenvalues,
    characteristic_roots,
    continuum_limit_error,
    dirichlet_eigenvalues,
    evaluate_exact_solution,
    neumann_eigenvalues,
)
from .continuum import (
    continuous_determinant,
    continuous_secular_matrix,
    continuous_solution_sample,
    find_continuous_roots,
)
from .eigenfunctions import (
    EigenMode,
    RootClassification,
    SpectrumSolution,
    classify_root,
    extract_nullspace,
    has_constant_mode,
    reconstruct,
    residuals,
    solve_spectrum,
)
from .graph import (
    EdgeSpec,
    GraphSpec,
    GraphValidationError,
    LatticeFunction,
    ShapeMismatchError,
    SpecFileError,
    ValidatedGraph,
    dump_spec,
    graph_from_dict,
    inner_product,
    load_spec,
    norm,
    spec_file_digest,
    validate,
)
from .oracle import (
    AssembledOperator,
    NonRealSpectrumError,
    SingularConstraintError,
    apply_operator,
    assemble,
    boundary_form,
    spectrum,
    to_lattice_function,
)
from .rootfind import (
    CountReport,
    InvalidScanConfigError,
    Root,
    RootSet,
    ScanConfig,
    count_check,
    find_roots,
)
from .secular import (
    DegenerateBasisError,
    EdgeBasis,
    Regime,
    SecularMatrix,
    assemble_secular,
    band_edges,
    batch_logdet,
    edge_basis,
    secular_determinant,
)

__version__ = "0.1.0"

__all__ = [
    "AssembledOperator",
    "ChainProblem",
    "CountReport",
    "DegenerateBasisError",
    "EdgeBasis",
    "EdgeSpec",
    "EigenMode",
    "GraphSpec",
    "GraphValidationError",
    "InvalidScanConfigError",
    "LatticeFunction",
    "NonRealSpectrumError",
    "Regime",
    "Root",
    "RootClassification",
    "RootSet",
    "ScanConfig",
    "SecularMatrix",
    "ShapeMismatchError",
    "SingularConstraintError",
    "SpecFileError",
    "SpectrumSolution",
    "ValidatedGraph",
    "apply_operator",
    "assemble",
    "assemble_secular",
    "band_edges",
    "batch_logdet",
    "boundary_form",
    "chain_eigenvalues",
    "characteristic_roots",
    "classify_root",
    "continuous_determinant",
    "continuous_secular_matrix",
    "continuous_solution_sample",
    "continuum_limit_error",
    "count_check",
    "dirichlet_eigenvalues",
    "dump_spec",
    "edge_basis",
    "evaluate_exact_solution",
    "extract_nullspace",
    "find_continuous_roots",
    "find_roots",
    "graph_from_dict",
    "has_constant_mode",
    "inner_product",
    "load_spec",
    "neumann_eigenvalues",
    "norm",
    "reconstruct",
    "residuals",
    "secular_determinant",
    "solve_spectrum",
    "spec_file_digest",
    "spectrum",
    "to_lattice_function",
    "validate",
]
