"""Deterministic root scan for secular determinants.

Strategy: evaluate the determinant's sign and log magnitude on a dense
grid over each scan interval, then

  * refine every sign change by bisection (simple roots), and
  * refine every interior local minimum of log|det| without an adjacent
    sign change by golden section, keeping it only if the refined
    magnitude drops below a median-relative threshold (even-multiplicity
    roots never change sign).

Scan intervals exclude a guard band around every edge band edge
k = 2/a_e, where the determinant vanishes identically of its own accord
and no isolated root can be resolved. All refinements run to float
resolution; reported tolerances are upper bounds. No randomness, no
parallelism: identical inputs give identical RootSets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import validate
from .secular import band_edges, batch_logdet

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class InvalidScanConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScanConfig:
    """Scan window and tolerances.

    k_min defaults to 1e-6 * pi / L_max (excludes the trivial k=0 zero),
    k_max to the largest band edge minus the guard, so unequal-step
    graphs are scanned through the mixed oscillatory/hyperbolic range.
    tol_det_factor is relative to the median |det| over the grid.
    """

    k_min: float | None = None
    k_max: float | None = None
    grid_points: int = 20000
    tol_k: float = 1e-10
    tol_det_factor: float = 1e-9
    band_guard: float = 1e-9

    def __post_init__(self):
        if self.grid_points < 16:
            raise InvalidScanConfigError(f"grid_points {self.grid_points} < 16")
        if self.tol_k <= 0 or self.tol_det_factor <= 0 or self.band_guard <= 0:
            raise InvalidScanConfigError("tolerances must be positive")
        if self.k_min is not None and self.k_min <= 0:
            raise InvalidScanConfigError("k_min must be positive")
        if None not in (self.k_min, self.k_max) and self.k_max <= self.k_min:
            raise InvalidScanConfigError("k_max must exceed k_min")


@dataclass(frozen=True)
class Root:
    k: float
    multiplicity_hint: int
    bracket: tuple
    det_residual: float
    log_residual: float


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    k_min: float
    k_max: float
    intervals: tuple
    median_log: float
    threshold_log: float
    config: ScanConfig = field(repr=False, default=None)

    @property
    def values(self) -> np.ndarray:
        return np.asarray([r.k for r in self.roots])

    def __len__(self):
        return len(self.roots)


def resolve_window(graph, config: ScanConfig):
    """(k_min, k_max, interval list) honoring band-edge guards."""
    g = validate(graph)
    lmax = max(e.length for e in g.edges)
    k_min = config.k_min if config.k_min is not None else 1e-6 * math.pi / lmax
    edges_k = band_edges(g)
    k_max = config.k_max if config.k_max is not None else float(edges_k[-1]) - config.band_guard
    if k_max <= k_min:
        raise InvalidScanConfigError(f"window ({k_min}, {k_max}) is empty")
    cuts = [k_min]
    for b in edges_k:
        if k_min < b < k_max:
            cuts.extend((b - config.band_guard, b + config.band_guard))
    cuts.append(k_max)
    intervals = []
    for lo, hi in zip(cuts[::2], cuts[1::2]):
        if hi > lo:
            intervals.append((float(lo), float(hi)))
    return k_min, k_max, tuple(intervals)


def _bisect_all(batch_fn, lows, highs, low_signs):
    """Vectorized simultaneous bisection on sign changes."""
    lows = np.asarray(lows, dtype=float).copy()
    highs = np.asarray(highs, dtype=float).copy()
    low_signs = np.asarray(low_signs, dtype=float)
    for _ in range(90):
        width = highs - lows
        if (width <= 4.0 * np.finfo(float).eps * np.maximum(np.abs(highs), 1.0)).all():
            break
        mids = 0.5 * (lows + highs)
        sg, _ = batch_fn(mids)
        same = sg == low_signs
        lows = np.where(same, mids, lows)
        highs = np.where(same, highs, mids)
    return 0.5 * (lows + highs)


def _golden_all(batch_fn, lows, highs):
    """Vectorized simultaneous golden-section minimization of log|det|."""
    lo = np.asarray(lows, dtype=float).copy()
    hi = np.asarray(highs, dtype=float).copy()
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    _, f1 = batch_fn(x1)
    _, f2 = batch_fn(x2)
    for _ in range(110):
        width = hi - lo
        if (width <= 8.0 * np.finfo(float).eps * np.maximum(np.abs(hi), 1.0)).all():
            break
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        probe = np.where(left, hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo))
        _, fp = batch_fn(probe)
        x1, x2 = np.where(left, probe, x2), np.where(left, x1, probe)
        f1, f2 = np.where(left, fp, f2), np.where(left, f1, fp)
    return 0.5 * (lo + hi)


def scan_function_roots(batch_fn, intervals, grid_points, tol_k, tol_det_factor, config=None):
    """Root scan of an arbitrary real determinant function.

    batch_fn maps a k array to (sign array, log|det| array).
    """
    intervals = [(float(lo), float(hi)) for lo, hi in intervals if hi > lo]
    if not intervals:
        raise InvalidScanConfigError("no scan intervals")
    total = sum(hi - lo for lo, hi in intervals)
    sign_brackets = []  # (lo, hi, sign_lo)
    min_brackets = []  # (lo, hi)
    direct_roots = []
    all_logs = []
    for lo, hi in intervals:
        n = max(64, int(round(grid_points * (hi - lo) / total))) + 1
        ks = np.linspace(lo, hi, n)
        sg, lg = batch_fn(ks)
        all_logs.append(lg)
        crossing = np.zeros(n, dtype=bool)
        for i in range(n - 1):
            if sg[i] == 0.0:
                direct_roots.append(ks[i])
                continue
            if sg[i] * sg[i + 1] < 0:
                sign_brackets.append((ks[i], ks[i + 1], sg[i]))
                crossing[i] = crossing[i + 1] = True
        if sg[n - 1] == 0.0:
            direct_roots.append(ks[n - 1])
        for i in range(1, n - 1):
            if crossing[i - 1] or crossing[i] or crossing[i + 1]:
                continue
            if lg[i] <= lg[i - 1] and lg[i] <= lg[i + 1]:
                min_brackets.append((ks[i - 1], ks[i + 1]))
    finite = np.concatenate(all_logs)
    finite = finite[np.isfinite(finite)]
    median_log = float(np.median(finite)) if finite.size else float("-inf")
    threshold_log = median_log + math.log(tol_det_factor)
    roots = []
    if sign_brackets:
        lows, highs, lsg = zip(*sign_brackets)
        refined = _bisect_all(batch_fn, lows, highs, lsg)
        _, logres = batch_fn(refined)
        for k, (lo, hi, _), lres in zip(refined, sign_brackets, logres):
            roots.append(Root(float(k), 1, (lo, hi), _exp_clip(lres), float(lres)))
    if min_brackets:
        lows, highs = zip(*min_brackets)
        refined = _golden_all(batch_fn, lows, highs)
        _, logres = batch_fn(refined)
        for k, (lo, hi), lres in zip(refined, min_brackets, logres):
            if lres <= threshold_log:
                roots.append(Root(float(k), 2, (lo, hi), _exp_clip(lres), float(lres)))
    for k in direct_roots:
        roots.append(Root(float(k), 1, (k, k), 0.0, float("-inf")))
    roots.sort(key=lambda r: r.k)
    merged = []
    for r in roots:
        if merged and r.k - merged[-1].k < tol_k:
            keep = merged[-1] if merged[-1].log_residual <= r.log_residual else r
            hint = max(merged[-1].multiplicity_hint, r.multiplicity_hint)
            merged[-1] = Root(keep.k, hint, keep.bracket, keep.det_residual, keep.log_residual)
        else:
            merged.append(r)
    return RootSet(tuple(merged), intervals[0][0], intervals[-1][1], tuple(intervals),
                   median_log, threshold_log, config)


def _exp_clip(logmag: float) -> float:
    if not np.isfinite(logmag):
        return 0.0
    return float(np.exp(min(logmag, 709.0)))


def find_roots(graph, config: ScanConfig | None = None) -> RootSet:
    """All determinant zeros of the graph's secular system in the window.

    Includes edge-resonance zeros that carry no eigenfunction; use the
    eigenfunctions module to classify. An empty RootSet is a legal
    outcome for a window between eigenvalues.

    Two scans run over the same grid: the raw determinant and the
    resonance-deflated one. The raw pass supplies the resonance zeros;
    the deflated pass cannot lose an eigenvalue that shares a grid cell
    with a resonance, so the union is complete for both kinds.
    """
    g = validate(graph)
    cfg = config or ScanConfig()
    k_min, k_max, intervals = resolve_window(g, cfg)

    def raw_fn(ks):
        return batch_logdet(np.asarray(ks, dtype=float), g)

    def deflated_fn(ks):
        return batch_logdet(np.asarray(ks, dtype=float), g, deflate=True)

    raw = scan_function_roots(raw_fn, intervals, cfg.grid_points, cfg.tol_k,
                              cfg.tol_det_factor, config=cfg)
    defl = scan_function_roots(deflated_fn, intervals, cfg.grid_points, cfg.tol_k,
                               cfg.tol_det_factor, config=cfg)
    roots = list(raw.roots)
    for extra in defl.roots:
        if any(abs(extra.k - r.k) < cfg.tol_k for r in roots):
            continue
        _, lres = raw_fn(np.asarray([extra.k]))
        roots.append(Root(extra.k, extra.multiplicity_hint, extra.bracket,
                          _exp_clip(float(lres[0])), float(lres[0])))
    roots.sort(key=lambda r: r.k)
    return RootSet(tuple(roots), k_min, k_max, raw.intervals,
                   raw.median_log, raw.threshold_log, cfg)


@dataclass(frozen=True)
class CountReport:
    matched: bool
    secular_count: int
    oracle_count: int
    resonance_only_roots: int
    max_abs_diff: float
    discrepancies: tuple


def count_check(graph, config: ScanConfig | None = None, tol: float = 1e-8) -> CountReport:
    """Compare the classified secular spectrum against the dense solver.

    Counts eigenvalues with multiplicity inside the scan window on both
    routes and reports element-wise differences of the sorted lists.
    """
    from .eigenfunctions import solve_spectrum
    from .oracle import assemble, spectrum

    g = validate(graph)
    cfg = config or ScanConfig()
    result = solve_spectrum(g, cfg)
    oracle_ks = spectrum(assemble(g)).wavenumbers
    oracle_ks = oracle_ks[(oracle_ks >= result.root_set.k_min) & (oracle_ks <= result.root_set.k_max)]
    sec = result.wavenumbers_with_multiplicity
    discrepancies = []
    if len(sec) != len(oracle_ks):
        discrepancies.append(f"count mismatch: secular {len(sec)} vs oracle {len(oracle_ks)}")
        max_diff = float("inf")
    else:
        diffs = np.abs(sec - oracle_ks)
        max_diff = float(diffs.max()) if len(diffs) else 0.0
        for i in np.nonzero(diffs > tol)[0]:
            discrepancies.append(f"index {i}: secular {sec[i]!r} vs oracle {oracle_ks[i]!r}")
    spurious = sum(1 for m in result.modes_by_root if m == 0)
    return CountReport(not discrepancies, len(sec), len(oracle_ks), spurious,
                       max_diff, tuple(discrepancies))
