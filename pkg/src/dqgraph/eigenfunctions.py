"""Nullspace extraction, mode reconstruction, and root classification.

A determinant zero is not automatically an eigenvalue: whenever some
edge's characteristic basis vanishes at its far endpoint (an edge
resonance), the secular matrix drops rank but every nullvector
reconstructs to the identically zero function. Classification therefore
maps the whole nullspace to sampled functions and counts the rank of
that image: the rank is the geometric multiplicity, and rank zero marks
a resonance-only root.

All functions here take polished roots (the scanner refines to float
resolution); gauges are fixed deterministically so repeated runs emit
identical data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import LatticeFunction, validate
from .rootfind import Root, RootSet, ScanConfig, find_roots
from .secular import assemble_secular, edge_basis

_NULL_RTOL = 1e-8
_SAMPLE_RTOL = 1e-6
_GAUGE_FLOOR = 1e-8


class EmptyNullspaceError(RuntimeError):
    """No singular value fell below the nullspace threshold."""


def extract_nullspace(matrix: np.ndarray, rel_tol: float = _NULL_RTOL):
    """Orthonormal nullspace basis (columns) and the singular values."""
    _, sing, vt = np.linalg.svd(np.asarray(matrix, dtype=float))
    smax = sing[0] if len(sing) else 0.0
    null_mask = sing <= rel_tol * max(smax, 1e-300)
    dim = int(np.count_nonzero(null_mask))
    if dim == 0:
        raise EmptyNullspaceError(
            f"smallest singular value {sing[-1]:.3e} vs max {smax:.3e}")
    return vt[len(sing) - dim:].T.copy(), sing


def reconstruct(graph, k: float, coefficients: np.ndarray) -> LatticeFunction:
    """Per-edge samples from a secular coefficient vector.

    Layout matches the secular columns: vertex values first, then the
    near-end coefficient per edge, then the far-end coefficient.
    """
    g = validate(graph)
    c = np.asarray(coefficients)
    n_v, n_e = g.vertices, g.edge_count
    values = []
    for idx, e in enumerate(g.edges):
        basis = edge_basis(k, e.step, e.points)
        n = np.arange(e.points + 1)
        ci = c[n_v + idx]
        cj = c[n_v + n_e + idx]
        values.append(ci * basis.values(e.points - n) + cj * basis.values(n))
    return LatticeFunction(g, values)


@dataclass(frozen=True)
class ModeResiduals:
    recurrence: float
    continuity: float
    conservation: float

    @property
    def worst(self) -> float:
        return max(self.recurrence, self.continuity, self.conservation)


def residuals(graph, k: float, psi: LatticeFunction) -> ModeResiduals:
    """Sup-norm-relative defect of the three defining conditions.

    recurrence: interior three-term relation on every edge;
    continuity: agreement of edge-end samples at each shared vertex
    (absolute value at pinned vertices);
    conservation: sum of outward first differences equals weight times
    the vertex value.
    """
    g = validate(graph)
    scale = psi.sup_norm()
    if scale == 0.0:
        return ModeResiduals(0.0, 0.0, 0.0)
    rec = 0.0
    for e_idx, e in enumerate(g.edges):
        arr = np.asarray(psi.values[e_idx])
        coef = 2.0 - (k * e.step) ** 2
        if e.points >= 2:
            defect = arr[:-2] - coef * arr[1:-1] + arr[2:]
            rec = max(rec, float(np.abs(defect).max()))
    cont = 0.0
    cons = 0.0
    for v in range(1, g.vertices + 1):
        ends = []
        flux = 0.0
        for e_idx, end in g.adjacency[v]:
            arr = np.asarray(psi.values[e_idx])
            if end == 0:
                ends.append(arr[0])
                flux += arr[1] - arr[0]
            else:
                ends.append(arr[-1])
                flux += arr[-2] - arr[-1]
        if g.is_pinned(v):
            cont = max(cont, float(max(abs(x) for x in ends)))
            continue
        ref = ends[0]
        for x in ends[1:]:
            cont = max(cont, float(abs(x - ref)))
        cons = max(cons, float(abs(flux - g.weight(v) * ref)))
    return ModeResiduals(rec / scale, cont / scale, cons / scale)


@dataclass(frozen=True)
class EigenMode:
    k: float
    function: LatticeFunction
    coefficients: np.ndarray
    residuals: ModeResiduals


@dataclass(frozen=True)
class RootClassification:
    root: Root
    null_dimension: int
    multiplicity: int
    modes: tuple

    @property
    def is_resonance_only(self) -> bool:
        return self.multiplicity == 0


def _fix_gauge(stacked: np.ndarray) -> np.ndarray:
    big = np.nonzero(np.abs(stacked) > _GAUGE_FLOOR)[0]
    pivot = big[0] if len(big) else int(np.argmax(np.abs(stacked)))
    if stacked[pivot] < 0:
        return -stacked
    return stacked


def classify_root(graph, root: Root) -> RootClassification:
    """Split a determinant zero into genuine modes and resonance content."""
    g = validate(graph)
    matrix = assemble_secular(root.k, g).matrix
    null_basis, _ = extract_nullspace(matrix)
    null_dim = null_basis.shape[1]
    columns = []
    per_vec = []
    for j in range(null_dim):
        fn = reconstruct(g, root.k, null_basis[:, j])
        per_vec.append(fn)
        columns.append(fn.stacked())
    samples = np.column_stack(columns)
    u, sing, wt = np.linalg.svd(samples, full_matrices=False)
    smax = sing[0] if len(sing) else 0.0
    mult = int(np.count_nonzero(sing > _SAMPLE_RTOL * max(smax, 1.0)))
    modes = []
    for j in range(mult):
        stacked = _fix_gauge(u[:, j])
        sign = 1.0 if np.array_equal(stacked, u[:, j]) else -1.0
        coeff = sign * (null_basis @ wt[j, :]) / sing[j]
        fn = _unstack(g, stacked)
        modes.append(EigenMode(root.k, fn, coeff, residuals(g, root.k, fn)))
    return RootClassification(root, null_dim, mult, tuple(modes))


def _unstack(graph, stacked: np.ndarray) -> LatticeFunction:
    values = []
    pos = 0
    for e in graph.edges:
        m = e.points + 1
        values.append(stacked[pos:pos + m].copy())
        pos += m
    return LatticeFunction(graph, values)


def has_constant_mode(graph) -> bool:
    """True when the constant function is a k=0 solution: every weight
    zero and nothing pinned."""
    g = validate(graph)
    if g.pinned:
        return False
    return all(g.weight(v) == 0.0 for v in range(1, g.vertices + 1))


@dataclass(frozen=True)
class SpectrumSolution:
    graph: object
    root_set: RootSet
    classifications: tuple
    constant_mode: bool

    @property
    def modes_by_root(self) -> tuple:
        return tuple(c.multiplicity for c in self.classifications)

    @property
    def wavenumbers_with_multiplicity(self) -> np.ndarray:
        out = []
        for c in self.classifications:
            out.extend([c.root.k] * c.multiplicity)
        return np.asarray(out)

    @property
    def modes(self) -> tuple:
        out = []
        for c in self.classifications:
            out.extend(c.modes)
        return tuple(out)

    @property
    def resonance_only_count(self) -> int:
        return sum(1 for c in self.classifications if c.is_resonance_only)


def solve_spectrum(graph, config: ScanConfig | None = None) -> SpectrumSolution:
    """Scan, classify every root, and reconstruct unit-norm modes."""
    g = validate(graph)
    rs = find_roots(g, config)
    classes = tuple(classify_root(g, r) for r in rs.roots)
    return SpectrumSolution(g, rs, classes, has_constant_mode(g))
