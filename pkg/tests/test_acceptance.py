"""Acceptance battery: one test per shipped guarantee, tolerances pinned.

Each test prints a single pass line on success; a failure carries the
measured quantity in its assertion message.
"""

import fractions
from collections import defaultdict

import numpy as np
import pytest

from cochainflow import (Cochain, FlowParams, InnerProductModel,
                         SimplicialComplex, build_flat_torus,
                         build_icosahedron_sphere, coboundary, converge_cup,
                         converge_wr, converge_weak_flow, cup, de_rham_map,
                         get_cup_table, harmonic_basis, parse_form, run,
                         steady_residual, taylor_green_form, whitney_map,
                         whitney_mass_matrix)
from cochainflow.cli import main as cli_main
from cochainflow.polyform import form_is_zero
from cochainflow.whitney import de_rham_exact, whitney_mass_matrix_quadrature


def _passed(num, label):
    print(f"criterion {num:02d} ({label}): PASS")


def _random_cochain(K, k, rng):
    return Cochain(K, k, rng.standard_normal(K.n_simplices(k)))


def _random_3complex(seed=2026, n_vertices=12, n_cells=40):
    rng = np.random.default_rng(seed)
    cells = set()
    while len(cells) < n_cells:
        cells.add(tuple(sorted(rng.choice(n_vertices, 4, replace=False))))
    return SimplicialComplex.from_cells(3, n_vertices, sorted(cells))


def test_c01_coboundary_squares_to_zero_exactly(torus4, torus8, sphere):
    meshes = [torus4, torus8, sphere, _random_3complex()]
    for K in meshes:
        for k in range(K.dim - 1):
            a = K.coboundary_matrix(k + 1)
            b = K.coboundary_matrix(k)
            assert a.dtype.kind == "i" and b.dtype.kind == "i"
            prod = (a @ b).toarray()
            assert not prod.any(), f"d.d != 0 at degree {k}"
    _passed(1, "coboundary squares to zero, exact integers")


def test_c02_integration_inverts_interpolation(torus4, torus8, sphere):
    # Float check on random cochains across meshes.
    rng = np.random.default_rng(100)
    for K in (torus4, torus8, sphere):
        for k in range(K.dim + 1):
            c = _random_cochain(K, k, rng)
            err = np.max(np.abs(de_rham_map(whitney_map(c)).values - c.values))
            assert err <= 1e-12, f"RW defect {err:.2e} at degree {k}"
    # Exact chain map on integer cochains: W(dc) == d(Wc) as rational forms.
    rng = np.random.default_rng(101)
    for k in (0, 1):
        vals = rng.integers(-9, 10, size=torus4.n_simplices(k)).astype(float)
        c = Cochain(torus4, k, vals)
        diff = whitney_map(coboundary(c)) - whitney_map(c).d()
        assert all(form_is_zero(p, torus4.dim + 1) for p in diff.pieces)
    _passed(2, "interpolation inverts integration, chain map exact")


def test_c03_cup_product_matches_wedge_exactly(torus4, torus8):
    K = torus4
    n = K.dim
    for j, k in [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1)]:
        table = defaultdict(fractions.Fraction)
        for a, b, c, frac in get_cup_table(K, j, k).exact_pairs():
            table[(a, b, c)] += frac
        # Support overlap: only pairs meeting in some top cell can interact.
        tops_j = K.faces_of_top(j)[0]
        tops_k = K.faces_of_top(k)[0]
        pairs = set()
        for t in range(K.n_simplices(n)):
            for a in tops_j[t]:
                for b in tops_k[t]:
                    pairs.add((int(a), int(b)))
        # Every table entry involves such a pair; any other pair has an
        # identically zero wedge, and the table gives it zero as well.
        assert all((a, b) in pairs for (a, b, _c) in table)
        Wj = [whitney_map(Cochain.elementary(K, j, i))
              for i in range(K.n_simplices(j))]
        Wk = Wj if j == k else [whitney_map(Cochain.elementary(K, k, i))
                                for i in range(K.n_simplices(k))]
        for a, b in sorted(pairs):
            rhs = de_rham_exact(Wj[a].wedge(Wk[b]))
            for ci, v in enumerate(rhs):
                assert v == table.get((a, b, ci), fractions.Fraction(0)), (
                    f"cup/wedge mismatch at degrees ({j},{k}), "
                    f"pair ({a},{b}), cell {ci}")
    # The degree (1,1) structure constant.
    assert np.allclose(np.abs(get_cup_table(K, 1, 1).coeffs), 1 / 6, atol=0)
    # Graded commutativity and the Leibniz rule on random cochains.
    rng = np.random.default_rng(102)
    degree_pairs = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)]
    for trial in range(100):
        j, k = degree_pairs[trial % len(degree_pairs)]
        a = _random_cochain(torus8, j, rng)
        b = _random_cochain(torus8, k, rng)
        comm = cup(a, b).values - (-1.0) ** (j * k) * cup(b, a).values
        assert np.max(np.abs(comm)) <= 1e-12
        if j + k < 2:
            leib = (coboundary(cup(a, b)).values
                    - cup(coboundary(a), b).values
                    - (-1.0) ** j * cup(a, coboundary(b)).values)
            assert np.max(np.abs(leib)) <= 1e-12
    _passed(3, "cup product is the integrated wedge, exactly")


def test_c04_mass_matrices_spd_and_verified(torus8):
    for k in (0, 1, 2):
        M = whitney_mass_matrix(torus8, k).toarray()
        assert np.max(np.abs(M - M.T)) <= 1e-14, f"asymmetry at degree {k}"
        np.linalg.cholesky(M)  # raises unless positive definite
        for degree in (8, 16):
            Q = whitney_mass_matrix_quadrature(torus8, k, degree).toarray()
            err = np.max(np.abs(M - Q))
            assert err <= 1e-10, f"quadrature oracle disagrees: {err:.2e}"
    _passed(4, "mass matrices symmetric positive definite, oracle-checked")


def test_c05_coclosed_projection(torus8):
    for variant in ("toy", "whitney"):
        model = InnerProductModel(torus8, variant)
        rng = np.random.default_rng(103)
        for _ in range(100):
            c = _random_cochain(torus8, 1, rng)
            p = model.project_coclosed(c)
            nc = model.norm(c)
            assert model.norm(model.project_coclosed(p) - p) <= 1e-10 * nc
            dstar = Cochain(torus8, 0,
                            model.adjoint_coboundary_apply(0, p.values))
            assert model.norm(dstar) <= 1e-10 * nc
        a = _random_cochain(torus8, 1, rng)
        b = _random_cochain(torus8, 1, rng)
        sym_defect = abs(model.inner(model.project_coclosed(a), b)
                         - model.inner(a, model.project_coclosed(b)))
        assert sym_defect <= 1e-10 * model.norm(a) * model.norm(b)
    _passed(5, "projection idempotent, self-adjoint, lands in ker delta*")


def test_c06_harmonic_subspaces(torus4, torus8, sphere):
    for variant in ("toy", "whitney"):
        for torus in (torus4, torus8):
            rep = harmonic_basis(InnerProductModel(torus, variant))
            assert len(rep.basis) == 2, f"torus dimension {len(rep.basis)}"
            assert rep.spectral_gap >= 1e3
        rep = harmonic_basis(InnerProductModel(sphere, variant))
        assert len(rep.basis) == 0, f"sphere dimension {len(rep.basis)}"
        assert rep.spectral_gap >= 1e3
    _passed(6, "harmonic dimensions match topology, gap >= 1e3")


def test_c07_inviscid_energy_conservation(whitney8):
    rng = np.random.default_rng(104)
    c = _random_cochain(whitney8.complex, 1, rng)
    c = whitney8.project_coclosed(c)
    c = c * (1.0 / whitney8.norm(c))
    drifts = []
    for dt in (1e-3, 5e-4):
        params = FlowParams(nu=0.0, dt=dt, t_final=1.0, stride=100)
        _, diags = run(whitney8, c, params)
        e = np.asarray(diags.energy)
        drifts.append(np.max(np.abs(e - e[0])) / e[0])
    assert drifts[0] <= 1e-8, f"energy drift {drifts[0]:.2e}"
    ratio = drifts[0] / drifts[1]
    assert ratio >= 8.0, f"halving dt improved drift only {ratio:.1f}x"
    _passed(7, "inviscid energy conserved; drift is integrator error")


def test_c08_viscous_energy_law(whitney8):
    nu, dt = 0.01, 2e-4
    c = de_rham_map(taylor_green_form(), whitney8.complex)
    params = FlowParams(nu=nu, dt=dt, t_final=0.02, stride=1)
    _, diags = run(whitney8, c, params)
    e = np.asarray(diags.energy)
    w = np.asarray(diags.vorticity_sq)
    lhs = (e[2:] - e[:-2]) / (2.0 * dt)
    rhs = -2.0 * nu * w[1:-1]
    rel = np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))
    assert rel <= 1e-6, f"energy law violated at relative {rel:.2e}"
    assert np.all(np.diff(e) < 0), "viscous energy not monotone"
    _passed(8, "viscous energy law d/dt ||c||^2 = -2 nu ||dc||^2")


def test_c09_harmonic_states_are_fixed_points(torus8):
    for variant in ("toy", "whitney"):
        model = InnerProductModel(torus8, variant)
        h = harmonic_basis(model).basis[0]
        for nu in (0.0, 0.01):
            assert steady_residual(model, h, nu) <= 1e-10
            params = FlowParams(nu=nu, dt=1e-3, t_final=1.0, stride=1000)
            final, _ = run(model, h, params)
            dev = model.norm(final.c - h)
            assert dev <= 1e-10, f"{variant}, nu={nu}: moved {dev:.2e}"
    _passed(9, "harmonic cochains are steady under the flow")


def test_c10_refinement_convergence_rates():
    import time
    t0 = time.time()
    wr = converge_wr(parse_form("sin(2pi x) dy"), [4, 8, 16, 32])
    assert wr.slope >= 0.9, f"interpolation slope {wr.slope:.3f}"
    cupstudy = converge_cup(parse_form("sin(2pi x) dx"),
                            parse_form("cos(2pi y) dy"), [4, 8, 16, 32])
    assert cupstudy.slope >= 0.9, f"cup slope {cupstudy.slope:.3f}"
    elapsed = time.time() - t0
    assert elapsed <= 120.0, f"studies took {elapsed:.0f}s"
    _passed(10, "first-order convergence of interpolation and cup")


def test_c11_weak_drift_convergence():
    tests = [parse_form("cos(2pi x) sin(2pi y) dx"),
             parse_form("sin(2pi x) cos(2pi y) dy"),
             parse_form("dx")]
    rep = converge_weak_flow(taylor_green_form(), 0.01, tests, [4, 8, 16, 32])
    assert len(rep.test_form_ids) >= 3
    for tid in rep.test_form_ids:
        gaps = [rep.gaps[(r, tid)] for r in rep.resolutions]
        for i in range(len(gaps) - 1):
            if gaps[i + 1] <= 1e-12:
                continue  # already at roundoff
            allowed = 1.05 if i == 0 else 1.0
            assert gaps[i + 1] <= allowed * gaps[i], (
                f"{tid}: gaps not decreasing, {gaps}")
    _passed(11, "weak pairings of the drift converge to the smooth limit")


def test_c12_cli_outputs_are_deterministic(tmp_path):
    sim = ["simulate", "--torus", "8", "--nu", "0.01", "--dt", "0.002",
           "--t-final", "0.02", "--init", "taylor-green"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli_main(sim + ["--out", str(a)]) == 0
    assert cli_main(sim + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    wr = ["converge-wr", "--form", "taylor-green", "--resolutions", "4,8,16"]
    ja, jb = tmp_path / "a.json", tmp_path / "b.json"
    ca, cb = tmp_path / "wa.csv", tmp_path / "wb.csv"
    assert cli_main(wr + ["--out", str(ca), "--summary", str(ja)]) == 0
    assert cli_main(wr + ["--out", str(cb), "--summary", str(jb)]) == 0
    assert ca.read_bytes() == cb.read_bytes()
    # Summaries record their invocation; strip the differing file names.
    import json
    da, db = json.loads(ja.read_text()), json.loads(jb.read_text())
    da.pop("invocation"), db.pop("invocation")
    assert da == db
    _passed(12, "identical inputs give byte-identical artifacts")
