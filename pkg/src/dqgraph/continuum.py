"""Continuous counterpart of the secular construction.

Same unknown layout and row recipe as the lattice version, with the
edge solution A sin(k(L - x)) + B sin(kx) in place of the characteristic
basis: value rows pin the endpoint samples to the vertex values, vertex
rows balance inward derivatives against weight times value. Lengths are
the only geometry; point counts in the graph are ignored here.

The root engine is shared with the lattice scanner, so windows and
tolerances behave identically.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import validate
from .rootfind import RootSet, ScanConfig, scan_function_roots


def continuous_secular_matrix(k: float, graph) -> np.ndarray:
    g = validate(graph)
    n_v, n_e = g.vertices, g.edge_count
    dim = 2 * n_e + n_v
    m = np.zeros((dim, dim))
    for idx, e in enumerate(g.edges):
        s = math.sin(k * e.length)
        m[idx, n_v + idx] = s
        m[idx, e.i - 1] = -1.0
        m[n_e + idx, n_v + n_e + idx] = s
        m[n_e + idx, e.j - 1] = -1.0
    for v in range(1, n_v + 1):
        row = 2 * n_e + v - 1
        if g.is_pinned(v):
            m[row, v - 1] = 1.0
            continue
        for e_idx, end in g.adjacency[v]:
            e = g.edges[e_idx]
            c = math.cos(k * e.length)
            if end == 0:
                m[row, n_v + e_idx] += -k * c
                m[row, n_v + n_e + e_idx] += k
            else:
                m[row, n_v + e_idx] += k
                m[row, n_v + n_e + e_idx] += -k * c
        m[row, v - 1] = -g.weight(v)
    return m


def continuous_determinant(k: float, graph) -> float:
    sign, logmag = np.linalg.slogdet(continuous_secular_matrix(k, graph))
    if sign == 0.0:
        return 0.0
    return float(sign * np.exp(min(logmag, 709.0)))


def _batch(ks: np.ndarray, graph):
    signs = np.empty(len(ks))
    logs = np.empty(len(ks))
    for i, k in enumerate(np.asarray(ks, dtype=float)):
        signs[i], logs[i] = np.linalg.slogdet(continuous_secular_matrix(k, graph))
    return signs, logs


def find_continuous_roots(graph, config: ScanConfig | None = None) -> RootSet:
    """Zeros of the continuous secular determinant.

    Default window: same lower guard as the lattice scanner, upper end
    six half-waves of the shortest edge. No band edges exist here, so
    the window is a single interval.
    """
    g = validate(graph)
    cfg = config or ScanConfig()
    lmax = max(e.length for e in g.edges)
    lmin = min(e.length for e in g.edges)
    k_min = cfg.k_min if cfg.k_min is not None else 1e-6 * math.pi / lmax
    k_max = cfg.k_max if cfg.k_max is not None else 6.0 * math.pi / lmin
    rs = scan_function_roots(lambda ks: _batch(ks, g), [(k_min, k_max)],
                             cfg.grid_points, cfg.tol_k, cfg.tol_det_factor, config=cfg)
    return RootSet(rs.roots, k_min, k_max, rs.intervals, rs.median_log, rs.threshold_log, cfg)


def continuous_solution_sample(k: float, coeff_near: float, coeff_far: float,
                               length: float, x) -> np.ndarray:
    """A sin(k(L - x)) + B sin(kx) evaluated at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    return coeff_near * np.sin(k * (length - x)) + coeff_far * np.sin(k * x)
