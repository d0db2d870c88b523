"""End-to-end acceptance checks.

Each numbered test pins one externally visible guarantee of the package
against frozen reference values at fixed tolerances. Every test prints a
single machine-greppable PASS/FAIL line (visible under pytest -s, and in
the captured-output section of any failure report). Criterion 3c is
expected to fail and is marked xfail(strict): the tangent-sum condition
it asserts holds only for balance-family roots, while two of the five
continuum star roots are arm resonances. Criterion 3d tests the
corrected two-family reduction instead.
"""

import importlib.resources
import time

import numpy as np
import pytest

from dqgraph import (
    ChainProblem,
    LatticeFunction,
    ScanConfig,
    apply_operator,
    assemble,
    boundary_form,
    characteristic_roots,
    chain_eigenvalues,
    continuous_determinant,
    continuum_limit_error,
    count_check,
    edge_basis,
    evaluate_exact_solution,
    find_continuous_roots,
    find_roots,
    graph_from_dict,
    inner_product,
    load_spec,
    norm,
    solve_spectrum,
    spectrum,
)

TOL_TABLE = 5e-7  # reference tables carry 7 decimals

# chain of unit length, N interior steps, both ends pinned
DIRICHLET_TABLE = {
    (0.1, 10): (3.1286893, 6.1803398, 9.0798099, 11.7557050, 14.1421356),
    (0.01, 100): (3.1414634, 6.2821518, 9.4212901, 12.5581039, 15.6918191),
    (0.002, 500): (3.1415874, 6.2831439, 9.4246384, 12.5660398, 15.7073173),
}
# same chain, free (reflecting) ends, first five nonzero modes
NEUMANN_TABLE = {
    (0.1, 10): (3.4729635, 6.8404028, 9.9999999, 12.8557521, 15.3208888),
    (0.01, 100): (3.1731927, 6.3455866, 9.5163831, 12.6847839, 15.8499913),
    (0.002, 500): (3.1478832, 6.2957352, 9.4435249, 12.5912209, 15.7387923),
}

STAR_LENGTHS = (0.8, 1.1, 1.5)
# three-arm star, first five determinant zeros per lattice resolution
STAR_TABLE = {
    0.1: (1.2293914, 1.7771792, 2.0905692, 2.8462967, 2.9088003),
    0.01: (1.1847666, 1.6865131, 2.0943568, 2.7654332, 2.8558963),
    0.005: (1.1823638, 1.6816835, 2.0943855, 2.7570667, 2.8559691),
}
STAR_CONTINUUM = (1.1799688, 1.6768750, 2.0943951, 2.7486684, 2.8559933)
STAR_WINDOW = {0.1: (3.05, 4000), 0.01: (2.95, 6000), 0.005: (2.9, 8000)}

EQUILATERAL_DOUBLETS = (1.651587, 4.909710, 8.033908)
EQUILATERAL_TRIPLE_RESONANCES = (3.128689, 6.180340, 9.079810)


def report(num, label, ok, detail=""):
    tail = f" ({detail})" if detail else ""
    print(f"[criterion {num}] {label}: {'PASS' if ok else 'FAIL'}{tail}")


def chain_graph(points, pinned):
    data = {
        "format_version": 1,
        "vertices": 2,
        "edges": [{"i": 1, "j": 2, "length": 1.0, "points": points}],
    }
    if pinned:
        data["dirichlet"] = [1, 2]
    return graph_from_dict(data)


def star_graph(step):
    edges = [{"i": 1, "j": 1 + idx, "length": length,
              "points": int(round(length / step))}
             for idx, length in enumerate(STAR_LENGTHS, start=1)]
    return graph_from_dict({"format_version": 1, "vertices": 4, "edges": edges})


def window_after_five(closed_form):
    # midpoint between the 5th and 6th closed-form values
    return 0.5 * (closed_form[4] + closed_form[5])


def test_criterion_1_pinned_chain_three_routes():
    t0 = time.perf_counter()
    worst = 0.0
    for (step, points), expected in DIRICHLET_TABLE.items():
        g = chain_graph(points, pinned=True)
        cf_all = chain_eigenvalues(ChainProblem(length=1.0, points=points), "dirichlet")
        closed = cf_all[:5]
        cfg = ScanConfig(k_max=window_after_five(cf_all))
        secular = find_roots(g, cfg).values[:5]
        oracle = spectrum(assemble(g)).wavenumbers[:5]
        for route in (closed, secular, oracle):
            assert len(route) == 5
            worst = max(worst, float(np.max(np.abs(route - np.asarray(expected)))))
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL_TABLE and elapsed <= 10.0
    report(1, "pinned chain tables, three routes", ok,
           f"worst abs err {worst:.2e}, {elapsed:.2f}s")
    assert worst <= TOL_TABLE
    assert elapsed <= 10.0


def test_criterion_2_free_chain_three_routes():
    worst = 0.0
    for (step, points), expected in NEUMANN_TABLE.items():
        g = chain_graph(points, pinned=False)
        cf_all = chain_eigenvalues(ChainProblem(length=1.0, points=points), "neumann")
        nonzero = cf_all[cf_all > 1e-9]
        closed = nonzero[:5]
        cfg = ScanConfig(k_max=0.5 * (nonzero[4] + nonzero[5]))
        sol = solve_spectrum(g, cfg)
        secular = sol.wavenumbers_with_multiplicity[:5]
        oracle = spectrum(assemble(g)).wavenumbers[:5]
        for route in (closed, secular, oracle):
            assert len(route) == 5
            worst = max(worst, float(np.max(np.abs(route - np.asarray(expected)))))
    ok = worst <= TOL_TABLE
    report(2, "free chain tables, three routes", ok, f"worst abs err {worst:.2e}")
    assert ok


def test_criterion_3a_star_lattice_tables():
    t0 = time.perf_counter()
    worst = 0.0
    finest_elapsed = 0.0
    for step, expected in STAR_TABLE.items():
        k_max, grid = STAR_WINDOW[step]
        t1 = time.perf_counter()
        rs = find_roots(star_graph(step), ScanConfig(k_max=k_max, grid_points=grid))
        if step == 0.005:
            finest_elapsed = time.perf_counter() - t1
        assert len(rs) == 5, f"step {step}: found {len(rs)} determinant zeros"
        worst = max(worst, float(np.max(np.abs(rs.values - np.asarray(expected)))))
    elapsed = time.perf_counter() - t0
    ok = worst <= TOL_TABLE and finest_elapsed <= 60.0
    report("3a", "star determinant-zero tables", ok,
           f"worst abs err {worst:.2e}, finest lattice {finest_elapsed:.2f}s, total {elapsed:.2f}s")
    assert worst <= TOL_TABLE
    assert finest_elapsed <= 60.0


def test_criterion_3b_star_continuum_column():
    rs = find_continuous_roots(star_graph(0.1), ScanConfig(k_max=3.0, grid_points=4000))
    assert len(rs) == 5
    worst = float(np.max(np.abs(rs.values - np.asarray(STAR_CONTINUUM))))
    ok = worst <= TOL_TABLE
    report("3b", "star continuum column", ok, f"worst abs err {worst:.2e}")
    assert ok


@pytest.mark.xfail(strict=True, reason="only three of the five continuum star "
                   "roots satisfy the tangent-sum condition; the other two are "
                   "arm resonances where it does not apply")
def test_criterion_3c_tangent_sum_at_all_continuum_roots():
    rs = find_continuous_roots(star_graph(0.1), ScanConfig(k_max=3.0, grid_points=4000))
    sums = np.array([np.sum(np.tan(k * np.asarray(STAR_LENGTHS))) for k in rs.values])
    ok = bool(np.all(np.abs(sums) <= 1e-5))
    report("3c", "tangent-sum condition at every continuum root (known defect)",
           ok, "sums " + ", ".join(f"{s:+.3e}" for s in sums))
    assert ok


def test_criterion_3d_corrected_continuum_reduction():
    g = star_graph(0.1)
    L = np.asarray(STAR_LENGTHS)

    def kirchhoff_sum(k):
        s, c = np.sin(k * L), np.cos(k * L)
        return float(sum(s[j] * np.prod(np.delete(c, j)) for j in range(len(L))))

    # the determinant factors into arm resonances times the current-balance sum
    worst_rel = 0.0
    for k in np.linspace(0.3, 3.2, 30):
        det = continuous_determinant(k, g)
        formula = -(k ** 4) * float(np.prod(np.sin(k * L))) * kirchhoff_sum(k)
        worst_rel = max(worst_rel, abs(det - formula) / max(abs(det), abs(formula), 1e-12))
    assert worst_rel <= 1e-9

    # each root belongs to exactly one factor family
    rs = find_continuous_roots(g, ScanConfig(k_max=3.0, grid_points=4000))
    expected_families = ("balance", "balance", "arm", "balance", "arm")
    families = []
    for k in rs.values:
        min_sin = float(np.min(np.abs(np.sin(k * L))))
        families.append("arm" if min_sin <= 1e-6 else "balance")
        if families[-1] == "balance":
            assert abs(kirchhoff_sum(k)) <= 1e-6
        else:
            # arm roots violate the bare tangent-sum condition
            assert abs(np.sum(np.tan(k * L))) > 1e-3
    ok = tuple(families) == expected_families and worst_rel <= 1e-9
    report("3d", "corrected continuum reduction and root families", ok,
           f"factorization rel err {worst_rel:.2e}, families {families}")
    assert tuple(families) == expected_families


def random_graph(seed):
    rng = np.random.default_rng(20260816 + seed)
    nv = int(rng.integers(2, 6))
    pairs = [(int(rng.integers(1, v)), v) for v in range(2, nv + 1)]
    extra = int(rng.integers(0, 3))
    for _ in range(50):
        if extra == 0:
            break
        u, w = int(rng.integers(1, nv + 1)), int(rng.integers(1, nv + 1))
        if u == w:
            continue
        p = (min(u, w), max(u, w))
        if p in pairs:
            continue
        pairs.append(p)
        extra -= 1
    edges = [{"i": u, "j": w, "length": float(rng.uniform(0.5, 1.6)),
              "points": int(rng.integers(4, 13))} for u, w in pairs]
    lam = {}
    for v in range(1, nv + 1):
        value = float(rng.choice([0.0, 0.5, 1.0]))
        if value:
            lam[str(v)] = value
    return graph_from_dict({"format_version": 1, "vertices": nv,
                            "edges": edges, "lambda": lam})


def test_criterion_4_randomized_graph_ensemble():
    t0 = time.perf_counter()
    worst = 0.0
    total_modes = 0
    for seed in range(50):
        g = random_graph(seed)
        sol = solve_spectrum(g)
        rs = sol.root_set
        sec = sol.wavenumbers_with_multiplicity
        ora = spectrum(assemble(g)).wavenumbers
        ora = ora[(ora >= rs.k_min - 1e-9) & (ora <= rs.k_max + 1e-9)]
        assert len(sec) == len(ora), (
            f"seed {seed}: {len(sec)} secular modes vs {len(ora)} dense modes")
        if len(sec):
            worst = max(worst, float(np.max(np.abs(sec - ora))))
        total_modes += len(sec)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8
    report(4, "50 randomized graphs vs dense reference", ok,
           f"{total_modes} modes, worst abs diff {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_5_characteristic_root_identities():
    rng = np.random.default_rng(11)
    m = 10_000
    # sample both regimes; keep |ka - 2| >= 0.05 so the recurrence check is
    # well conditioned away from the double-root point of the characteristic
    # polynomial
    ka = np.where(rng.random(m) < 0.5,
                  rng.uniform(0.05, 1.95, m),
                  rng.uniform(2.05, 6.0, m))
    steps = rng.uniform(0.02, 0.5, m)
    ks = ka / steps
    worst_prod = worst_sum = worst_mod = worst_rec = 0.0
    nodes = np.arange(0, 42)
    for k, a in zip(ks, steps):
        g_plus, g_minus = characteristic_roots(k, a)
        worst_prod = max(worst_prod, abs(g_plus * g_minus - 1.0))
        s = 2.0 - (k * a) ** 2
        worst_sum = max(worst_sum, abs(g_plus + g_minus - s) / max(1.0, abs(s)))
        if k * a < 2.0:
            worst_mod = max(worst_mod, abs(abs(g_plus) - 1.0), abs(abs(g_minus) - 1.0))
        vals = edge_basis(k, a, 41).values(nodes)
        defect = np.abs(vals[:-2] + vals[2:] - s * vals[1:-1])
        worst_rec = max(worst_rec, float(np.max(defect) / np.max(np.abs(vals))))
    ok = max(worst_prod, worst_sum, worst_mod, worst_rec) <= 1e-12
    report(5, "characteristic root identities, 10^4 samples", ok,
           f"prod {worst_prod:.1e}, sum {worst_sum:.1e}, "
           f"modulus {worst_mod:.1e}, recurrence {worst_rec:.1e}")
    assert ok


def _random_function(g, rng):
    vals = [rng.uniform(-1, 1, e.points + 1) + 1j * rng.uniform(-1, 1, e.points + 1)
            for e in g.edges]
    return LatticeFunction(g, vals)


def _constrained_pair(g, rng):
    psi = _random_function(g, rng)
    vals = [v.copy() for v in psi.values]
    for v in range(1, g.vertices + 1):
        if g.is_pinned(v):
            value = 0.0
        else:
            first = [vals[e][1] if end == 0 else vals[e][-2]
                     for e, end in g.adjacency[v]]
            value = sum(first) / (g.degrees[v] + g.weight(v))
        for e, end in g.adjacency[v]:
            vals[e][0 if end == 0 else -1] = value
    return LatticeFunction(g, vals)


def test_criterion_6_boundary_form_identity_and_vanishing():
    rng = np.random.default_rng(13)
    # exact commutator identity on arbitrary functions, mixed step sizes
    mixed = [
        star_graph(0.1),
        graph_from_dict({"format_version": 1, "vertices": 3,
                         "edges": [{"i": 1, "j": 2, "length": 1.0, "points": 9},
                                   {"i": 2, "j": 3, "length": 1.3, "points": 7}],
                         "lambda": {"2": 0.5}}),
        graph_from_dict({"format_version": 1, "vertices": 2,
                         "edges": [{"i": 1, "j": 2, "length": 1.0, "points": 6}],
                         "dirichlet": [1]}),
    ]
    worst_identity = 0.0
    for g in mixed:
        for _ in range(34):
            psi, phi = _random_function(g, rng), _random_function(g, rng)
            lhs = inner_product(apply_operator(g, psi), phi) \
                - inner_product(psi, apply_operator(g, phi))
            rhs = boundary_form(g, psi, phi)
            worst_identity = max(worst_identity,
                                 abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))

    # the form vanishes on pairs satisfying the vertex conditions; steps are
    # binary-exact so equal-step edges compare bitwise equal
    worst_vanish = 0.0
    pairs = 0
    while pairs < 1000:
        a = float(rng.choice([0.125, 0.25, 0.5]))
        nv = int(rng.integers(2, 5))
        edges = []
        for v in range(2, nv + 1):
            n = int(rng.integers(4, 11))
            edges.append({"i": int(rng.integers(1, v)), "j": v,
                          "length": a * n, "points": n})
        lam = {str(v): float(rng.choice([0.0, 0.5, 1.0]))
               for v in range(1, nv + 1)}
        data = {"format_version": 1, "vertices": nv, "edges": edges,
                "lambda": {kk: vv for kk, vv in lam.items() if vv}}
        if rng.random() < 0.2:
            data["dirichlet"] = [1]
        g = graph_from_dict(data)
        for _ in range(5):
            psi, phi = _constrained_pair(g, rng), _constrained_pair(g, rng)
            worst_vanish = max(worst_vanish, abs(boundary_form(g, psi, phi)))
            pairs += 1
    ok = worst_identity <= 1e-12 and worst_vanish <= 1e-12
    report(6, "boundary form: commutator identity and vanishing", ok,
           f"identity {worst_identity:.1e}, vanishing {worst_vanish:.1e} over {pairs} pairs")
    assert worst_identity <= 1e-12
    assert worst_vanish <= 1e-12


def test_criterion_7_continuum_convergence_rates():
    # second-order eigenvalue convergence: error drops 100x from a=0.1 to a=0.01
    errs = continuum_limit_error(1, 1.0, [0.1, 0.01])
    ratio = errs[0] / errs[1]
    assert abs(errs[0] - 0.0129034) <= TOL_TABLE
    assert 95.0 <= ratio <= 105.0

    # lattice eigenvectors are exact sine samples, so shape convergence is
    # checked on the free-lattice solution against its continuum wave
    g = chain_graph(10, pinned=True)
    sol = solve_spectrum(g, ScanConfig(k_min=3.0, k_max=3.3))
    mode = sol.modes[0]
    samples = mode.function.values[0]
    sine = np.sin(np.pi * np.arange(11) / 10.0)
    sine = sine / np.linalg.norm(sine)
    exact_defect = float(np.max(np.abs(np.abs(samples) - np.abs(sine))))
    assert exact_defect <= 1e-12

    k = 0.8
    shape_errs = []
    for a in (0.1, 0.05, 0.025):
        x = np.round(np.arange(0, 5.0 + 1e-9, 0.1), 10)
        n = np.rint(x / a).astype(int)
        wave = np.real(evaluate_exact_solution(k, a, 1.0, 1.0, n))
        shape_errs.append(float(np.max(np.abs(wave - 2.0 * np.cos(k * x)))))
    r1 = shape_errs[0] / shape_errs[1]
    r2 = shape_errs[1] / shape_errs[2]
    ok = 3.2 <= r1 <= 4.8 and 3.2 <= r2 <= 4.8
    report(7, "continuum convergence rates", ok,
           f"eigenvalue ratio {ratio:.2f}, shape ratios {r1:.3f}/{r2:.3f}, "
           f"eigenvector defect {exact_defect:.1e}")
    assert ok


BUNDLED_WINDOWS = {
    "chain_unit_10.spec": (16.3, 20000),
    "chain_unit_100.spec": (17.0, 20000),
    "chain_unit_500.spec": (17.0, 20000),
    "star_three_arm.spec": (3.05, 4000),
    "star_three_arm_fine.spec": (2.95, 6000),
    "star_three_arm_finest.spec": (2.9, 8000),
    "star_equilateral.spec": (10.0, 8000),
}


def test_criterion_8_reconstructed_mode_quality():
    root = importlib.resources.files("dqgraph.specs")
    worst_res = worst_norm = 0.0
    checked = 0
    names = sorted(p.name for p in root.iterdir() if p.name.endswith(".spec"))
    assert names == sorted(BUNDLED_WINDOWS)
    for name in names:
        k_max, grid = BUNDLED_WINDOWS[name]
        with importlib.resources.as_file(root / name) as path:
            g = load_spec(path)
        sol = solve_spectrum(g, ScanConfig(k_max=k_max, grid_points=grid))
        assert sol.modes, name
        for mode in sol.modes:
            worst_res = max(worst_res, mode.residuals.worst)
            worst_norm = max(worst_norm, abs(norm(mode.function) - 1.0))
            checked += 1
    ok = worst_res <= 1e-9 and worst_norm <= 1e-12
    report(8, "mode residuals and normalization on bundled graphs", ok,
           f"{checked} modes, worst residual {worst_res:.1e}, "
           f"worst norm defect {worst_norm:.1e}")
    assert worst_res <= 1e-9
    assert worst_norm <= 1e-12


def test_criterion_9_degenerate_multiplicities():
    edges = [{"i": 1, "j": 1 + j, "length": 1.0, "points": 10} for j in (1, 2, 3)]
    g = graph_from_dict({"format_version": 1, "vertices": 4, "edges": edges})
    # 9.7 clears the singlet sitting exactly at k=10
    sol = solve_spectrum(g, ScanConfig(k_max=9.7, grid_points=8000))
    ora = spectrum(assemble(g)).wavenumbers

    # every genuine root's multiplicity equals the dense cluster size
    for cls in sol.classifications:
        cluster = int(np.sum(np.abs(ora - cls.root.k) <= 1e-6))
        assert cluster == cls.multiplicity, f"k={cls.root.k}"

    doublets = [c for c in sol.classifications if c.multiplicity == 2]
    assert len(doublets) == 3
    for c, expected in zip(doublets, EQUILATERAL_DOUBLETS):
        assert abs(c.root.k - expected) <= 1e-5

    triples = [c for c in sol.classifications if c.is_resonance_only]
    assert len(triples) == 3
    for c, expected in zip(triples, EQUILATERAL_TRIPLE_RESONANCES):
        assert abs(c.root.k - expected) <= 1e-5
        assert c.null_dimension == 3
        assert float(np.min(np.abs(ora - c.root.k))) > 1e-3

    # full band: every genuine mode of the dense operator is recovered
    cc = count_check(g)
    ok = cc.matched and cc.secular_count == cc.oracle_count == 26 \
        and cc.max_abs_diff <= 1e-8
    report(9, "degenerate multiplicities on the equilateral star", ok,
           f"3 doublets, 3 resonance triples, {cc.secular_count}/{cc.oracle_count} "
           f"modes, max diff {cc.max_abs_diff:.1e}")
    assert ok
