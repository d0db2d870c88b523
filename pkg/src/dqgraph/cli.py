"""Command line front end.

Subcommands:
  chain   closed-form, secular, and dense-solver spectra of a uniform
          chain with pinned (dirichlet) or free (neumann) ends, tabulated
          against the continuum values pi*m/L.
  graph   full scan of a graph spec file: every determinant zero with
          its classified multiplicity (resonance-only zeros get 0),
          optional dense-solver cross-check and eigenfunction dumps.
  wave    exact free-chain solution at a fixed wavenumber sampled on
          several lattice steps, next to the continuum wave.
  specs   list the bundled example spec files.

Every data file is written twice: a 7-decimal table and a *_full.csv
companion at 17 significant digits. Data files are byte-deterministic
for identical inputs; the run manifest records wall time and is not.

Exit codes: 0 success, 2 usage, 3 spec or validation error,
4 numerical failure (including a failed --oracle-check).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .chain import (
    ChainProblem,
    NonIntegerPointCountError,
    chain_eigenvalues,
    evaluate_exact_solution,
)
from .eigenfunctions import EmptyNullspaceError, solve_spectrum
from .graph import (
    EdgeSpec,
    GraphSpec,
    GraphValidationError,
    ShapeMismatchError,
    SpecFileError,
    load_spec,
    spec_file_digest,
    validate,
)
from .oracle import NonRealSpectrumError, SingularConstraintError, assemble, spectrum
from .rootfind import InvalidScanConfigError, ScanConfig
from .secular import DegenerateBasisError


def _fmt7(x) -> str:
    return "" if x is None else f"{x:.7f}"


def _fmt17(x) -> str:
    return "" if x is None else f"{x:.17g}"


def _write_pair(out_dir: Path, stem: str, header: list, rows: list) -> list:
    """Write <stem>.csv (7 decimals) and <stem>_full.csv (17 digits).

    rows hold raw values (floats, ints, strings, or None)."""
    written = []
    for suffix, fmt in ((".csv", _fmt7), ("_full.csv", _fmt17)):
        path = out_dir / (stem + suffix)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                cells = [c if isinstance(c, str) else ("" if c is None else
                         (str(c) if isinstance(c, (int, np.integer)) else fmt(float(c))))
                         for c in row]
                fh.write(",".join(cells) + "\n")
        written.append(path.name)
    return written


def _write_manifest(out_dir: Path, stem: str, command: str, resolved: dict,
                    inputs: dict, artifacts: list, started: float) -> str:
    name = stem + "_manifest.json"
    payload = {
        "command": command,
        "package_version": __version__,
        "resolved_options": resolved,
        "inputs": inputs,
        "artifacts": artifacts,
        "wall_time_seconds": round(time.perf_counter() - started, 6),
    }
    with open(out_dir / name, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return name


def _out_dir(args) -> Path:
    d = Path(args.output_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _bundled_dir():
    return resources.files("dqgraph") / "specs"


def resolve_spec_path(name: str) -> Path:
    """Filesystem path first, then the bundled spec directory."""
    p = Path(name)
    if p.exists():
        return p
    candidates = [name] if name.endswith(".spec") else [name + ".spec", name]
    for cand in candidates:
        bundled = Path(str(_bundled_dir() / cand))
        if bundled.exists():
            return bundled
    raise SpecFileError(f"spec file not found: {name!r} (not a path, not bundled)")


# ---------------------------------------------------------------------------
# chain
# ---------------------------------------------------------------------------

def _chain_graph(length: float, points: int, boundary: str):
    pinned = frozenset({1, 2}) if boundary == "dirichlet" else frozenset()
    return validate(GraphSpec(2, (EdgeSpec(1, 2, length, points),), {}, pinned))


def cmd_chain(args) -> int:
    started = time.perf_counter()
    problem = ChainProblem(args.length, args.points)
    closed = chain_eigenvalues(problem, args.boundary)
    if len(closed) == 0:
        print("error: chain has no nonzero modes at this size", file=sys.stderr)
        return 3
    modes = min(args.modes, len(closed))
    if modes < args.modes:
        print(f"note: only {modes} nonzero modes exist, trimming table", file=sys.stderr)
    closed = closed[:modes]
    continuum = np.array([math.pi * m / args.length for m in range(1, modes + 1)])

    want_secular = args.which in ("secular", "all")
    want_oracle = args.which in ("oracle", "all")
    sec_ks = None
    if want_secular:
        all_closed = chain_eigenvalues(problem, args.boundary)
        if modes < len(all_closed):
            k_max = 0.5 * (all_closed[modes - 1] + all_closed[modes])
        else:
            k_max = all_closed[-1] + 0.25 * (all_closed[-1] - all_closed[-2]) if modes > 1 \
                else 1.5 * all_closed[-1]
        k_max = min(k_max, 2.0 / problem.step - 1e-9)
        cfg = ScanConfig(k_max=float(k_max), grid_points=args.grid)
        solution = solve_spectrum(_chain_graph(args.length, args.points, args.boundary), cfg)
        sec_ks = solution.wavenumbers_with_multiplicity
    ora_ks = None
    if want_oracle:
        ora = spectrum(assemble(_chain_graph(args.length, args.points, args.boundary)))
        ora_ks = ora.wavenumbers

    rows = []
    for m in range(1, modes + 1):
        k_cf = float(closed[m - 1])
        k_sec = float(sec_ks[m - 1]) if sec_ks is not None and len(sec_ks) >= m else None
        k_ora = float(ora_ks[m - 1]) if ora_ks is not None and len(ora_ks) >= m else None
        k_cont = float(continuum[m - 1])
        rows.append([m, k_cf, k_sec, k_ora, k_cont, abs(k_cf - k_cont)])

    out = _out_dir(args)
    stem = f"chain_{args.boundary}_N{args.points}"
    header = ["m", "k_closedform", "k_secular", "k_oracle", "k_continuous",
              "abs_err_vs_continuous"]
    artifacts = _write_pair(out, stem, header, rows)
    resolved = {"length": args.length, "points": args.points, "boundary": args.boundary,
                "which": args.which, "modes": modes, "grid": args.grid}
    artifacts.append(_write_manifest(out, stem, "chain", resolved, {}, artifacts[:], started))
    print(f"wrote {', '.join(artifacts)} in {out}")
    status = 0
    if want_secular and (sec_ks is None or len(sec_ks) < modes):
        print("numerical failure: secular scan found fewer modes than requested",
              file=sys.stderr)
        status = 4
    return status


# ---------------------------------------------------------------------------
# graph
# ---------------------------------------------------------------------------

def cmd_graph(args) -> int:
    started = time.perf_counter()
    spec_path = resolve_spec_path(args.spec_file)
    graph = load_spec(spec_path)
    for w in graph.warnings:
        print(f"warning: {w}", file=sys.stderr)
    cfg = ScanConfig(k_min=args.kmin, k_max=args.kmax, grid_points=args.grid)
    solution = solve_spectrum(graph, cfg)
    classes = list(solution.classifications)
    if args.modes is not None:
        classes = classes[:args.modes]

    ora = spectrum(assemble(graph))
    ora_ks = ora.wavenumbers
    lo = solution.root_set.k_min
    hi = classes[-1].root.k + 1e-6 if (args.modes is not None and classes) \
        else solution.root_set.k_max
    ora_window = [float(k) for k in ora_ks if lo <= k <= hi]

    rows = []
    mode_counter = 0
    consumed = 0
    worst_diff = 0.0
    for idx, cls in enumerate(classes, start=1):
        matched = ora_window[consumed:consumed + cls.multiplicity]
        consumed += len(matched)
        diff = max((abs(cls.root.k - mk) for mk in matched), default=None)
        if diff is not None:
            worst_diff = max(worst_diff, diff)
        rows.append([idx, cls.root.k, cls.multiplicity, cls.root.det_residual,
                     matched[0] if matched else None, diff])
        mode_counter += cls.multiplicity

    out = _out_dir(args)
    stem = f"graph_{spec_path.stem}_spectrum"
    header = ["index", "k", "multiplicity", "det_residual", "oracle_k", "abs_diff"]
    artifacts = _write_pair(out, stem, header, rows)

    if args.emit_eigenfunctions:
        mode_idx = 0
        for cls in classes:
            for mode in cls.modes:
                mode_idx += 1
                mrows = []
                for e_idx, e in enumerate(graph.edges):
                    vals = mode.function.values[e_idx]
                    for n in range(e.points + 1):
                        mrows.append([e_idx, e.i, e.j, n, n * e.step, float(vals[n])])
                mheader = ["edge", "i", "j", "n", "x", "value"]
                artifacts += _write_pair(out, f"graph_{spec_path.stem}_mode_{mode_idx:04d}",
                                         mheader, mrows)

    count_ok = consumed == len(ora_window) and mode_counter == consumed
    check = {"matched_modes": mode_counter, "oracle_modes_in_window": len(ora_window),
             "max_abs_diff": worst_diff, "count_match": count_ok}
    resolved = {"spec_file": str(spec_path), "kmin": lo, "kmax": solution.root_set.k_max,
                "grid": args.grid, "modes": args.modes,
                "oracle_check": bool(args.oracle_check),
                "emit_eigenfunctions": bool(args.emit_eigenfunctions)}
    inputs = {"spec_file": {"path": str(spec_path), "sha256": spec_file_digest(spec_path)}}
    resolved["oracle_comparison"] = check
    artifacts.append(_write_manifest(out, f"graph_{spec_path.stem}", "graph", resolved,
                                     inputs, artifacts[:], started))
    print(f"wrote {', '.join(artifacts)} in {out}")
    print(f"roots: {len(rows)} listed, {mode_counter} genuine modes, "
          f"{solution.resonance_only_count} resonance-only")
    if args.oracle_check:
        if not count_ok:
            print(f"oracle check FAILED: {mode_counter} secular modes vs "
                  f"{len(ora_window)} dense modes in window", file=sys.stderr)
            return 4
        if worst_diff > 1e-6:
            print(f"oracle check FAILED: max |k - k_oracle| = {worst_diff:.3e} > 1e-6",
                  file=sys.stderr)
            return 4
        print(f"oracle check passed: max |k - k_oracle| = {worst_diff:.3e}")
    return 0


# ---------------------------------------------------------------------------
# wave
# ---------------------------------------------------------------------------

def cmd_wave(args) -> int:
    started = time.perf_counter()
    out = _out_dir(args)
    artifacts = []
    header = ["x", "value_re", "value_im"]
    for step in args.steps:
        if step <= 0:
            print(f"error: step {step} must be positive", file=sys.stderr)
            return 3
        count = int(math.floor(args.xmax / step + 1e-9))
        n = np.arange(count + 1)
        psi = evaluate_exact_solution(args.k, step, args.coeff_plus, args.coeff_minus, n)
        rows = [[float(i * step), float(v.real), float(v.imag)] for i, v in zip(n, psi)]
        artifacts += _write_pair(out, f"wave_step_{step:g}", header, rows)
    x = np.linspace(0.0, args.xmax, args.samples)
    cont = (args.coeff_plus * np.exp(1j * args.k * x)
            + args.coeff_minus * np.exp(-1j * args.k * x))
    rows = [[float(xv), float(cv.real), float(cv.imag)] for xv, cv in zip(x, cont)]
    artifacts += _write_pair(out, "wave_continuum", header, rows)
    resolved = {"k": args.k, "coeff_plus": args.coeff_plus, "coeff_minus": args.coeff_minus,
                "steps": list(args.steps), "xmax": args.xmax, "samples": args.samples}
    artifacts.append(_write_manifest(out, "wave", "wave", resolved, {}, artifacts[:], started))
    print(f"wrote {', '.join(artifacts)} in {out}")
    return 0


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------

def cmd_specs(_args) -> int:
    base = _bundled_dir()
    names = sorted(p.name for p in base.iterdir() if p.name.endswith(".spec"))
    for name in names:
        g = load_spec(Path(str(base / name)))
        desc = ", ".join(f"({e.i},{e.j}) L={e.length:g} N={e.points}" for e in g.edges)
        print(f"{name}: {g.vertices} vertices, {g.edge_count} edges: {desc}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqgraph",
        description="Spectra of discrete quantum graphs via the secular determinant.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain", help="uniform chain spectra, three routes plus continuum")
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--points", type=int, required=True, help="lattice intervals N")
    p.add_argument("--boundary", choices=("dirichlet", "neumann"), required=True)
    p.add_argument("--which", choices=("closedform", "secular", "oracle", "all"),
                   default="all")
    p.add_argument("--modes", type=int, default=5)
    p.add_argument("--grid", type=int, default=20000)
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("graph", help="scan a graph spec file")
    p.add_argument("--spec-file", required=True,
                   help="path, or the name of a bundled spec (see 'specs')")
    p.add_argument("--kmin", type=float, default=None)
    p.add_argument("--kmax", type=float, default=None)
    p.add_argument("--grid", type=int, default=20000)
    p.add_argument("--modes", type=int, default=None,
                   help="cap the number of listed determinant zeros")
    p.add_argument("--emit-eigenfunctions", action="store_true")
    p.add_argument("--oracle-check", action="store_true",
                   help="exit 4 unless the dense solver confirms the spectrum")
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("wave", help="free-chain solution vs the continuum wave")
    p.add_argument("--k", type=float, default=0.8)
    p.add_argument("--coeff-plus", type=float, default=1.0)
    p.add_argument("--coeff-minus", type=float, default=1.0)
    p.add_argument("--steps", type=float, nargs="+", default=[1.0, 0.5, 0.1])
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("specs", help="list bundled spec files")
    p.set_defaults(func=cmd_specs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpecFileError, GraphValidationError, ShapeMismatchError,
            InvalidScanConfigError, NonIntegerPointCountError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NonRealSpectrumError, SingularConstraintError, DegenerateBasisError,
            EmptyNullspaceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
