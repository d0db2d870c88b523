"""Secular matrix for the graph eigenproblem.

On each edge the difference equation is solved exactly by a pair of
basis profiles built from one real scalar function

    F(n) = sin(n*phase)                         for k*a < 2  (oscillatory)
    F(n) = (-1)^n * sinh(n*growth)/sinh(N*growth)  for k*a > 2  (hyperbolic)

with phase = 2*arcsin(k*a/2) and growth = 2*arccosh(k*a/2). F satisfies
F(n+1) = (2 - k^2 a^2) F(n) - F(n-1) and F(0) = 0 in both regimes, and
is proportional to the complex root-power difference r_+^n - r_-^n, so
replacing that difference by F rescales matrix columns without moving
determinant zeros; the payoff is a real matrix whose determinant can be
sign-bracketed. The hyperbolic branch is normalized by its far-endpoint
magnitude (a positive constant per edge): sinh(N*growth) reaches 1e80
on fine lattices and would otherwise drown the unit entries of the
matrix, turning both the determinant sign and the nullspace threshold
into noise. Every column scaling by a positive constant preserves the
zero set and the sign pattern, so the scan is unaffected. At k*a = 2
both roots collide at -1 and the pair degenerates (F vanishes
identically): those isolated wavenumbers are excluded from evaluation.

Edge samples are parametrized as

    psi(n) = c_i * F(N - n) + c_j * F(n)

so c_i * F(N) is the value at the i end, c_j * F(N) the value at the j
end. Unknown ordering (columns):

    [vertex values 1..V | c_i per edge | c_j per edge]

with edges in sorted (i, j) order. Equation ordering (rows):

    [value match at i per edge | value match at j per edge |
     per-vertex current balance, or value pin for dirichlet vertices]

The current balance at vertex v sums the first differences into each
incident edge and equates them to weight(v) times the vertex value.
Entering an edge at its i end contributes c_i*(F(N-1)-F(N)) + c_j*F(1);
at its j end the two coefficients swap roles.

The determinant vanishes at every eigenvalue, and also at every edge
resonance F_e(N_e) = 0, where the two basis profiles become linearly
dependent and a coefficient vector can represent the zero function.
Root classification (eigenfunctions module) separates the two cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import ValidatedGraph, validate


class Regime(Enum):
    ZERO = "zero"
    OSCILLATORY = "oscillatory"
    DEGENERATE = "degenerate"
    HYPERBOLIC = "hyperbolic"


class DegenerateBasisError(ValueError):
    """k sits on an edge band edge k*a = 2 where the basis pair collapses."""


@dataclass(frozen=True)
class EdgeBasis:
    """Stable real solution basis of one edge at one wavenumber."""

    k: float
    step: float
    points: int
    regime: Regime
    # phase (oscillatory) or growth rate (hyperbolic); 0 otherwise
    rate: float

    def values(self, n):
        """F(n), vectorized over n."""
        n = np.asarray(n, dtype=float)
        if self.regime is Regime.OSCILLATORY:
            out = np.sin(n * self.rate)
        elif self.regime is Regime.HYPERBOLIC:
            # sinh(n g)/sinh(N g), overflow-free: every exponent is <= 0
            out = (np.where(n % 2 == 0, 1.0, -1.0)
                   * np.exp((n - self.points) * self.rate)
                   * np.expm1(-2.0 * n * self.rate)
                   / np.expm1(-2.0 * self.points * self.rate))
        else:
            out = np.zeros_like(n)
        return out if out.shape else float(out)

    @property
    def end_value(self) -> float:
        """F(N): the basis value at the far endpoint."""
        return float(self.values(self.points))

    @property
    def first_difference(self) -> float:
        """F(N-1) - F(N): first difference of the reversed profile at its start."""
        return float(self.values(self.points - 1) - self.values(self.points))


_BAND_EDGE_RTOL = 1e-12


def edge_basis(k: float, step: float, points: int) -> EdgeBasis:
    """Classify the regime at wavenumber k and build the edge basis."""
    ka = k * step
    if ka < 0:
        raise ValueError("wavenumber must be >= 0")
    if ka == 0.0:
        return EdgeBasis(k, step, points, Regime.ZERO, 0.0)
    if abs(ka - 2.0) <= _BAND_EDGE_RTOL * 2.0:
        return EdgeBasis(k, step, points, Regime.DEGENERATE, 0.0)
    if ka < 2.0:
        return EdgeBasis(k, step, points, Regime.OSCILLATORY, 2.0 * np.arcsin(ka / 2.0))
    return EdgeBasis(k, step, points, Regime.HYPERBOLIC, 2.0 * np.arccosh(ka / 2.0))


@dataclass(frozen=True)
class SecularMatrix:
    """Assembled square system whose determinant zeros locate spectra."""

    k: float
    matrix: np.ndarray
    graph: ValidatedGraph

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def vertex_column(self, v: int) -> int:
        return v - 1

    def coeff_i_column(self, edge_index: int) -> int:
        return self.graph.vertices + edge_index

    def coeff_j_column(self, edge_index: int) -> int:
        return self.graph.vertices + self.graph.edge_count + edge_index


def assemble_secular(k: float, graph) -> SecularMatrix:
    """Build the (2E+V) x (2E+V) real system at wavenumber k > 0.

    Raises DegenerateBasisError if k sits on any edge's band edge.
    """
    g = validate(graph)
    bases = []
    for e in g.edges:
        b = edge_basis(k, e.step, e.points)
        if b.regime is Regime.DEGENERATE:
            raise DegenerateBasisError(f"k={k} is the band edge of edge ({e.i},{e.j})")
        bases.append(b)
    V, E = g.vertices, g.edge_count
    M = np.zeros((2 * E + V, 2 * E + V))
    for idx, (e, b) in enumerate(zip(g.edges, bases)):
        end = b.end_value
        M[idx, V + idx] = end
        M[idx, e.i - 1] = -1.0
        M[E + idx, V + E + idx] = end
        M[E + idx, e.j - 1] = -1.0
    for v in range(1, V + 1):
        row = 2 * E + v - 1
        if g.is_pinned(v):
            M[row, v - 1] = 1.0
            continue
        for idx, (e, b) in enumerate(zip(g.edges, bases)):
            first = float(b.values(1))
            diff = b.first_difference
            if e.i == v:
                M[row, V + idx] += diff
                M[row, V + E + idx] += first
            if e.j == v:
                M[row, V + idx] += first
                M[row, V + E + idx] += diff
        M[row, v - 1] = -g.weight(v)
    return SecularMatrix(k, M, g)


def secular_determinant(k: float, graph) -> float:
    """det of the assembled system; real, continuous between band edges."""
    sign, logmag = np.linalg.slogdet(assemble_secular(k, graph).matrix)
    if sign == 0.0:
        return 0.0
    return float(sign * np.exp(min(logmag, 709.0)))


def band_edges(graph) -> np.ndarray:
    """Ascending distinct wavenumbers 2/a_e where some edge degenerates."""
    g = validate(graph)
    return np.unique(np.asarray([2.0 / a for a in g.steps]))


# ---------------------------------------------------------------------------
# batch evaluation used by the scanner
# ---------------------------------------------------------------------------

def _basis_batch(ks: np.ndarray, step: float, n: int, n_total: int) -> np.ndarray:
    """F(n) for every k in ks, for one edge. ks must avoid band edges."""
    ka = ks * step
    out = np.empty_like(ka)
    osc = ka < 2.0
    out[osc] = np.sin(n * 2.0 * np.arcsin(ka[osc] / 2.0))
    hyp = ~osc
    if hyp.any():
        sign = -1.0 if n % 2 else 1.0
        g = 2.0 * np.arccosh(ka[hyp] / 2.0)
        out[hyp] = (sign * np.exp((n - n_total) * g)
                    * np.expm1(-2.0 * n * g) / np.expm1(-2.0 * n_total * g))
    return out


def batch_logdet(ks: np.ndarray, graph, chunk: int = 4096, deflate: bool = False):
    """(signs, log magnitudes) of the secular determinant over a k grid.

    deflate=True divides out every edge's far-end basis value F_e(N_e).
    The determinant vanishes at each edge resonance F_e(N_e) = 0 whether
    or not an eigenfunction exists there, so the deflated function keeps
    exactly the eigenvalue zeros: a scan of it cannot lose a genuine
    root hiding in the same grid cell as a resonance.
    """
    g = validate(graph)
    ks = np.asarray(ks, dtype=float)
    V, E = g.vertices, g.edge_count
    d = 2 * E + V
    signs = np.empty(ks.shape)
    logs = np.empty(ks.shape)
    tiny = np.finfo(float).tiny
    for lo in range(0, len(ks), chunk):
        sel = slice(lo, min(lo + chunk, len(ks)))
        kk = ks[sel]
        M = np.zeros((len(kk), d, d))
        end_values = []
        for idx, e in enumerate(g.edges):
            endv = _basis_batch(kk, e.step, e.points, e.points)
            end_values.append(endv)
            M[:, idx, V + idx] = endv
            M[:, idx, e.i - 1] = -1.0
            M[:, E + idx, V + E + idx] = endv
            M[:, E + idx, e.j - 1] = -1.0
        for v in range(1, V + 1):
            row = 2 * E + v - 1
            if g.is_pinned(v):
                M[:, row, v - 1] = 1.0
                continue
            for idx, e in enumerate(g.edges):
                if e.i != v and e.j != v:
                    continue
                first = _basis_batch(kk, e.step, 1, e.points)
                diff = (_basis_batch(kk, e.step, e.points - 1, e.points)
                        - _basis_batch(kk, e.step, e.points, e.points))
                if e.i == v:
                    M[:, row, V + idx] += diff
                    M[:, row, V + E + idx] += first
                if e.j == v:
                    M[:, row, V + idx] += first
                    M[:, row, V + E + idx] += diff
            M[:, row, v - 1] = -g.weight(v)
        sg, lg = np.linalg.slogdet(M)
        if deflate:
            for endv in end_values:
                safe = np.where(endv == 0.0, tiny, endv)
                sg = sg * np.sign(safe)
                lg = lg - np.log(np.abs(safe))
        signs[sel] = sg
        logs[sel] = lg
    return signs, logs
