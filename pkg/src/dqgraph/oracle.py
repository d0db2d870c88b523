"""Dense reference solver built directly from the difference operator.

Vertex values are not independent unknowns: the matching conditions fix
each one as a weighted average of the adjacent first interior samples,

    value(v) = sum over incident edge ends of psi(first sample)
               / (degree(v) + weight(v)),

so the operator restricted to interior samples is a finite matrix whose
spectrum comes straight from LAPACK. This route shares nothing with the
secular-matrix construction (no characteristic basis, no determinant)
and serves as the independent cross-check.

Pinned vertices hold value 0 and drop out of the averaging. A vertex
with degree(v) + weight(v) == 0 makes the elimination singular and is
rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import LatticeFunction, validate


class SingularConstraintError(ValueError):
    """degree + weight vanished at a vertex; its value is not determined."""


class NonRealSpectrumError(RuntimeError):
    """General eigensolver returned complex eigenvalues beyond tolerance."""


@dataclass(frozen=True)
class AssembledOperator:
    graph: object
    matrix: np.ndarray
    offsets: tuple
    reconstruction: np.ndarray
    symmetric: bool

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def assemble(graph) -> AssembledOperator:
    """Interior-sample matrix of the difference operator plus the
    vertex reconstruction map (one row per vertex)."""
    g = validate(graph)
    offsets = []
    pos = 0
    for e in g.edges:
        offsets.append(pos)
        pos += e.points - 1
    dim = pos
    recon = np.zeros((g.vertices, dim))
    for v in range(1, g.vertices + 1):
        if g.is_pinned(v):
            continue
        denom = g.degrees[v] + g.weight(v)
        if abs(denom) < 1e-12:
            raise SingularConstraintError(
                f"vertex {v}: degree + weight = {denom!r}, value undetermined")
        for e_idx, end in g.adjacency[v]:
            e = g.edges[e_idx]
            idx = offsets[e_idx] if end == 0 else offsets[e_idx] + e.points - 2
            recon[v - 1, idx] += 1.0 / denom
    h = np.zeros((dim, dim))
    for e_idx, e in enumerate(g.edges):
        s = offsets[e_idx]
        n_pts = e.points
        inv2 = 1.0 / (e.step * e.step)
        for n in range(1, n_pts):
            row = s + n - 1
            h[row, row] += 2.0 * inv2
            if n - 1 == 0:
                h[row, :] -= inv2 * recon[e.i - 1, :]
            else:
                h[row, row - 1] -= inv2
            if n + 1 == n_pts:
                h[row, :] -= inv2 * recon[e.j - 1, :]
            else:
                h[row, row + 1] -= inv2
    scale = max(float(np.abs(h).max()), 1.0)
    symmetric = bool(np.abs(h - h.T).max() <= 1e-13 * scale)
    return AssembledOperator(g, h, tuple(offsets), recon, symmetric)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    vectors: np.ndarray | None
    zero_modes: int
    symmetric: bool

    @property
    def wavenumbers(self) -> np.ndarray:
        scale = max(float(np.abs(self.eigenvalues).max()), 1.0) if len(self.eigenvalues) else 1.0
        lam = self.eigenvalues[self.eigenvalues > 1e-10 * scale]
        return np.sqrt(lam)


def spectrum(op: AssembledOperator, with_vectors: bool = False) -> SpectrumResult:
    """Sorted eigenvalues (and optionally interior-sample eigenvectors).

    Unequal steps make the matrix non-symmetric, but it is similar to a
    symmetric one via the diagonal step-squared weighting, so real
    eigenvalues are still guaranteed and asserted here.
    """
    if op.symmetric:
        if with_vectors:
            lam, vec = np.linalg.eigh(op.matrix)
        else:
            lam = np.linalg.eigvalsh(op.matrix)
            vec = None
    else:
        lam, vec = np.linalg.eig(op.matrix)
        scale = max(float(np.abs(lam).max()), 1.0)
        if np.abs(lam.imag).max() > 1e-9 * scale:
            raise NonRealSpectrumError(
                f"max imaginary part {np.abs(lam.imag).max():.3e} exceeds tolerance")
        lam = lam.real
        order = np.argsort(lam)
        lam = lam[order]
        vec = vec.real[:, order] if with_vectors else None
    scale = max(float(np.abs(lam).max()), 1.0)
    nonneg_weights = all(op.graph.weight(v) >= 0 for v in range(1, op.graph.vertices + 1))
    if nonneg_weights and len(lam) and lam[0] < -1e-10 * scale:
        raise NonRealSpectrumError(
            f"negative eigenvalue {lam[0]!r} with nonnegative vertex weights")
    zero = int(np.count_nonzero(np.abs(lam) <= 1e-10 * scale))
    return SpectrumResult(np.asarray(lam, dtype=float), vec, zero, op.symmetric)


def to_lattice_function(op: AssembledOperator, interior: np.ndarray) -> LatticeFunction:
    """Expand an interior-sample vector to a full per-edge function,
    restoring vertex values through the reconstruction map."""
    g = op.graph
    interior = np.asarray(interior)
    vertex_vals = op.reconstruction @ interior
    values = []
    for e_idx, e in enumerate(g.edges):
        s = op.offsets[e_idx]
        arr = np.empty(e.points + 1, dtype=interior.dtype)
        arr[0] = vertex_vals[e.i - 1]
        arr[1:e.points] = interior[s:s + e.points - 1]
        arr[e.points] = vertex_vals[e.j - 1]
        values.append(arr)
    return LatticeFunction(g, values)


def apply_operator(graph, psi: LatticeFunction) -> LatticeFunction:
    """Raw second-difference action on a full lattice function.

    Interior samples get (-psi(n-1) + 2 psi(n) - psi(n+1)) / step^2;
    endpoint samples map to zero (the operator has no stencil there).
    """
    g = validate(graph)
    out = []
    for e_idx, e in enumerate(g.edges):
        arr = np.asarray(psi.values[e_idx])
        res = np.zeros_like(arr)
        inv2 = 1.0 / (e.step * e.step)
        res[1:-1] = inv2 * (-arr[:-2] + 2.0 * arr[1:-1] - arr[2:])
        out.append(res)
    return LatticeFunction(g, out)


def boundary_form(graph, psi: LatticeFunction, phi: LatticeFunction):
    """Surface term of the difference operator:

        <H psi, phi> - <psi, H phi>
          = sum over edges of -(1/step^2) * (
                psi(0) phi*(1) - psi(1) phi*(0)
              + psi(N) phi*(N-1) - psi(N-1) phi*(N))

    an exact identity for any pair of lattice functions. It vanishes on
    pairs satisfying the vertex conditions when all incident steps at
    each vertex agree.
    """
    g = validate(graph)
    total = 0.0 + 0.0j
    for e_idx, e in enumerate(g.edges):
        p = np.asarray(psi.values[e_idx])
        q = np.conj(np.asarray(phi.values[e_idx]))
        inv2 = 1.0 / (e.step * e.step)
        total += -inv2 * (p[0] * q[1] - p[1] * q[0] + p[-1] * q[-2] - p[-2] * q[-1])
    if abs(total.imag) == 0.0:
        return float(total.real)
    return complex(total)
