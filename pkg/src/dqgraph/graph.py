"""Graph data model: vertices, discretized edges, lattice functions.

A graph is a set of vertices 1..V joined by edges. Each edge (i, j) with
i < j carries a 1D lattice of N subintervals over a physical length L,
so the step is a = L/N and the sample points are x_n = n*a for
n = 0..N. Sample n=0 sits at vertex i, sample n=N at vertex j.

Vertex behavior is either a weighted current-balance condition with a
real coupling weight (weight 0 is the plain matching condition) or a
hard pin of the vertex value to zero ("dirichlet" vertices).
"""

from __future__ import annotations

import json
import hashlib
from dataclasses import dataclass, field

import numpy as np

SPEC_FORMAT_VERSION = 1


class GraphValidationError(ValueError):
    """Raised by validate(); carries the full list of violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"{kind}: {msg}" for kind, msg in self.violations))


class ShapeMismatchError(ValueError):
    pass


class SpecFileError(ValueError):
    """Malformed or unsupported graph spec file."""


@dataclass(frozen=True)
class EdgeSpec:
    """One discretized edge. i < j, length > 0, points = N >= 2."""

    i: int
    j: int
    length: float
    points: int

    @property
    def step(self) -> float:
        return self.length / self.points


@dataclass(frozen=True)
class GraphSpec:
    """Raw user input, not yet validated."""

    vertices: int
    edges: tuple
    vertex_weights: dict = field(default_factory=dict)  # vertex id -> real weight
    pinned: frozenset = frozenset()  # vertex ids with value forced to zero


class ValidatedGraph:
    """Normalized, immutable graph produced by validate().

    Edges are sorted by (i, j). Cached: steps, degrees, adjacency,
    component structure. Mutating attempts raise AttributeError.
    """

    def __init__(self, spec: GraphSpec, warnings: tuple):
        object.__setattr__(self, "vertices", spec.vertices)
        object.__setattr__(self, "edges", tuple(sorted(spec.edges, key=lambda e: (e.i, e.j))))
        object.__setattr__(self, "vertex_weights",
                           {v: float(spec.vertex_weights.get(v, 0.0)) for v in range(1, spec.vertices + 1)})
        object.__setattr__(self, "pinned", frozenset(spec.pinned))
        object.__setattr__(self, "warnings", tuple(warnings))
        deg = {v: 0 for v in range(1, spec.vertices + 1)}
        adj = {v: [] for v in range(1, spec.vertices + 1)}  # (edge index, end) with end 0 or N
        for idx, e in enumerate(self.edges):
            deg[e.i] += 1
            deg[e.j] += 1
            adj[e.i].append((idx, 0))
            adj[e.j].append((idx, e.points))
        object.__setattr__(self, "degrees", deg)
        object.__setattr__(self, "adjacency", {v: tuple(lst) for v, lst in adj.items()})
        object.__setattr__(self, "steps", tuple(e.step for e in self.edges))
        object.__setattr__(self, "edge_count", len(self.edges))
        object.__setattr__(self, "interior_dim", sum(e.points - 1 for e in self.edges))

    def __setattr__(self, name, value):
        raise AttributeError("ValidatedGraph is immutable")

    def weight(self, v: int) -> float:
        return self.vertex_weights[v]

    def is_pinned(self, v: int) -> bool:
        return v in self.pinned

    def __repr__(self):
        return (f"ValidatedGraph(V={self.vertices}, E={self.edge_count}, "
                f"pinned={sorted(self.pinned)})")


def _components(vertices: int, edges) -> list:
    parent = list(range(vertices + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        ri, rj = find(e.i), find(e.j)
        if ri != rj:
            parent[ri] = rj
    return sorted({find(v) for v in range(1, vertices + 1)})


def validate(spec) -> ValidatedGraph:
    """Check a GraphSpec and return the normalized immutable graph.

    Collects every violation before raising. Idempotent: passing an
    already-validated graph returns it unchanged.
    """
    if isinstance(spec, ValidatedGraph):
        return spec
    violations = []
    if spec.vertices < 1:
        violations.append(("no_vertices", f"vertex count {spec.vertices} < 1"))
    seen = set()
    for e in spec.edges:
        tag = f"edge ({e.i},{e.j})"
        if e.i == e.j:
            violations.append(("self_loop", tag))
            continue
        if not (e.i < e.j):
            violations.append(("unordered_endpoints", f"{tag}: endpoints must satisfy i < j"))
        if (e.i, e.j) in seen:
            violations.append(("duplicate_edge", tag))
        seen.add((e.i, e.j))
        if not (e.length > 0):
            violations.append(("non_positive_length", f"{tag}: length {e.length}"))
        if e.points < 2:
            violations.append(("too_few_points", f"{tag}: points {e.points} < 2"))
        for v in (e.i, e.j):
            if not (1 <= v <= spec.vertices):
                violations.append(("dangling_vertex_reference", f"{tag}: vertex {v} outside 1..{spec.vertices}"))
    referenced = {v for e in spec.edges for v in (e.i, e.j)}
    for v in range(1, spec.vertices + 1):
        # a degree-0 vertex leaves its value unconstrained and the
        # eigenproblem singular, so it is rejected rather than warned
        if v not in referenced:
            violations.append(("isolated_vertex", f"vertex {v} has no incident edge"))
    for v in spec.pinned:
        if not (1 <= v <= spec.vertices):
            violations.append(("dangling_vertex_reference", f"pinned vertex {v} outside 1..{spec.vertices}"))
    for v in spec.vertex_weights:
        if not (1 <= v <= spec.vertices):
            violations.append(("dangling_vertex_reference", f"weight for vertex {v} outside 1..{spec.vertices}"))
    if violations:
        raise GraphValidationError(violations)
    warnings = []
    if len(_components(spec.vertices, spec.edges)) > 1:
        warnings.append("graph is disconnected; spectra of components are merged")
    return ValidatedGraph(spec, warnings)


class LatticeFunction:
    """Per-edge sample vectors over a validated graph.

    values[e] has length points_e + 1 and includes both endpoint
    samples. Continuity across a shared vertex is a property of the
    values, not of the container; raw test functions may violate it.
    """

    def __init__(self, graph: ValidatedGraph, values):
        if len(values) != graph.edge_count:
            raise ShapeMismatchError(f"expected {graph.edge_count} edge arrays, got {len(values)}")
        vals = []
        for e, arr in zip(graph.edges, values):
            arr = np.asarray(arr)
            if arr.shape != (e.points + 1,):
                raise ShapeMismatchError(
                    f"edge ({e.i},{e.j}): expected {e.points + 1} samples, got {arr.shape}")
            vals.append(arr.copy())
        self.graph = graph
        self.values = tuple(vals)

    def stacked(self) -> np.ndarray:
        return np.concatenate(self.values)

    def sup_norm(self) -> float:
        return max(float(np.abs(v).max()) for v in self.values)

    def __mul__(self, c):
        return LatticeFunction(self.graph, [v * c for v in self.values])

    __rmul__ = __mul__


def inner_product(psi: LatticeFunction, phi: LatticeFunction):
    """Unweighted sum over every sample of every edge, second argument
    conjugated. Endpoint samples count once per incident edge."""
    if psi.graph is not phi.graph and psi.graph.edges != phi.graph.edges:
        raise ShapeMismatchError("functions live on different graphs")
    total = 0.0 + 0.0j
    for p, q in zip(psi.values, phi.values):
        total += np.sum(p * np.conj(q))
    if psi.stacked().dtype.kind != "c" and phi.stacked().dtype.kind != "c":
        return float(total.real)
    return complex(total)


def norm(psi: LatticeFunction) -> float:
    return float(np.sqrt(abs(inner_product(psi, psi))))


# ---------------------------------------------------------------------------
# spec file format (versioned)
# ---------------------------------------------------------------------------

def graph_from_dict(data: dict) -> ValidatedGraph:
    try:
        version = data["format_version"]
    except KeyError:
        raise SpecFileError("missing format_version") from None
    if version != SPEC_FORMAT_VERSION:
        raise SpecFileError(f"unsupported format_version {version!r}, expected {SPEC_FORMAT_VERSION}")
    try:
        vertices = int(data["vertices"])
        edges = tuple(
            EdgeSpec(int(e["i"]), int(e["j"]), float(e["length"]), int(e["points"]))
            for e in data["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed spec: {exc}") from None
    weights = {int(v): float(w) for v, w in data.get("lambda", {}).items()}
    pinned = frozenset(int(v) for v in data.get("dirichlet", []))
    return validate(GraphSpec(vertices, edges, weights, pinned))


def load_spec(path) -> ValidatedGraph:
    """Load and validate a graph spec file (JSON, format_version 1)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecFileError(f"{path}: not valid JSON ({exc})") from None
    return graph_from_dict(data)


def dump_spec(graph: ValidatedGraph, path) -> None:
    data = {
        "format_version": SPEC_FORMAT_VERSION,
        "vertices": graph.vertices,
        "edges": [
            {"i": e.i, "j": e.j, "length": e.length, "points": e.points}
            for e in graph.edges
        ],
        "lambda": {str(v): w for v, w in sorted(graph.vertex_weights.items()) if w != 0.0},
        "dirichlet": sorted(graph.pinned),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def spec_file_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
