"""Acceptance criteria 1-10. Each test records one PASS/FAIL line, printed
in the terminal summary (see conftest.py) and asserted afterwards."""
import io
import json
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from chenloops import geometry, itint, maps, oracles
from chenloops.bar import (
    BarElement,
    bar_differential,
    cohomology,
    complex_for,
    distortion_exponent,
    min_length_detector,
    same_class_up_to_scalar,
)
from chenloops.cdga import validate
from chenloops.cli import bound_setup, main
from chenloops.forms import FormSpec
from chenloops.models import cpn_model, data_path, two_sphere_cells, two_sphere_cells_degree9_words, sphere_model

RESULTS = {}

BASE_MESH, BASE_TIME = 24, 48


def record(n, title, ok, detail=""):
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    RESULTS[n] = line
    print(line)
    assert ok, line


def loop_space_ranks_cpn(n, top):
    # (1 + t) / (1 - t^{2n}), expanded without reference to the bar complex
    out = [0] * (top + 1)
    for k in range(0, top + 1, 2 * n):
        for e in (0, 1):
            if k + e <= top:
                out[k + e] += 1
    return out


def test_criterion_01_algebraic_invariants():
    t0 = time.perf_counter()
    algebras = [two_sphere_cells()] + [sphere_model(n) for n in range(2, 6)] + [cpn_model(n) for n in (1, 2, 3)]
    checked, bad = 0, []
    for A in algebras:
        validate(A)  # degrees, graded commutativity, associativity, d^2 = 0, Leibniz
        cx = complex_for(A)
        for d in range(15):
            cap = cx.default_max_length(d)
            checked += len(cx.index_words(d, cap))
            bad += [(A.name, w) for w in cx.d_squared_violations(d, cap)]
    dt = time.perf_counter() - t0
    record(1, "d² = 0 on bar words of degree <= 14; CDGA axioms exact", not bad and dt < 10,
           f"{len(algebras)} algebras, {checked} words, {dt:.2f} s")


def test_criterion_02_two_sphere_cells():
    A = two_sphere_cells()
    rep = cohomology(A, 9, 6, two_sphere_cells_degree9_words())
    r, x = min_length_detector(A, 9)
    target = BarElement.word(A, ["ω_a", "ω_z"])
    ref = rep.reference
    ok = (
        rep.rank == 1
        and r == 2
        and same_class_up_to_scalar(A, x, target)
        and distortion_exponent(10, r) == 11
        and (ref.dim_chains, ref.dim_cocycles, ref.dim_coboundaries) == (8, 7, 6)
        and rep.to_dict()["reference_basis"]["differs_from_full"]
    )
    record(2, "S^3 v S^3 with two 8-cells, degree 9: rank 1, r = 2, ∫ω_a ω_z, exponent 11", ok,
           f"reference basis {ref.dim_chains}/{ref.dim_cocycles}/{ref.dim_coboundaries}, "
           f"full {rep.dim_chains}/{rep.dim_cocycles}/{rep.dim_coboundaries}")


def test_criterion_03_sphere_ranks():
    s3 = [cohomology(sphere_model(3), d).rank for d in range(9)]
    s2 = [cohomology(sphere_model(2), d).rank for d in range(7)]
    ok = s3 == [1, 0, 1, 0, 1, 0, 1, 0, 1] and s2 == [1] * 7
    record(3, "ΩS^3 and ΩS^2 ranks", ok, f"S^3 {s3}, S^2 {s2}")


def test_criterion_04_cp2():
    A = cpn_model(2)
    ranks = [cohomology(A, d).rank for d in range(9)]
    oracle = loop_space_ranks_cpn(2, 8)
    r, x = min_length_detector(A, 4)
    ok = (
        ranks == oracle == [1, 1, 0, 0, 1, 1, 0, 0, 1]
        and bar_differential(A, ["ω", "ω^2"]).is_zero()
        and r == 2
        and same_class_up_to_scalar(A, x, BarElement.word(A, ["ω", "ω^2"]))
        and distortion_exponent(5, r) == 6
    )
    record(4, "CP^2: ranks match the Poincaré-series oracle, ∫ωω² generates degree 4, exponent 6", ok,
           f"ranks {ranks}")


def criterion_pairings():
    """(name, forms, family, mesh, time cells) for every pairing in criteria 5-8."""
    w2 = FormSpec.volume(2)
    out = [("degree:identity", [w2], geometry.desuspend(maps.identity(2), geometry.Sweepout(2)), BASE_MESH, BASE_TIME)]
    for k in (2, 3, 5):
        out.append((f"degree:suspension{k}", [w2], geometry.desuspend(maps.suspension_power(k), geometry.Sweepout(2)),
                    BASE_MESH, BASE_TIME))
    out.append(("hopf:hopf", [w2, w2], geometry.desuspend(maps.hopf(), geometry.Sweepout(3)), BASE_MESH, BASE_TIME))
    for mode, Ls in (("degree", [1, 2, 4, 8]), ("hopf", [1, 2, 3])):
        for L in Ls:
            forms, F = itint.scan_family(mode, L)
            out.append((f"sharpness:{mode}:L{L}", forms, F, 16, 24))
    return out


def test_criterion_05_degree():
    t0 = time.perf_counter()
    lines, ok = [], True
    ident = itint.degree_via_loops(maps.identity(2), BASE_MESH, BASE_TIME)
    ok &= abs(ident.value - 1) <= 1e-3
    lines.append(f"id {ident.value:.6f}")
    for k in (2, 3, 5):
        f = maps.suspension_power(k)
        val = itint.degree_via_loops(f, BASE_MESH, BASE_TIME).value
        oracle = oracles.preimage_degree(f)
        ok &= abs(val - k) <= 1e-2 and oracle == k
        lines.append(f"k={k}: {val:.5f} (oracle {oracle})")
    ok &= oracles.preimage_degree(maps.identity(2)) == 1
    dt = time.perf_counter() - t0
    record(5, "degree via loops", ok and dt < 60, ", ".join(lines) + f", {dt:.1f} s")


def test_criterion_06_hopf():
    t0 = time.perf_counter()
    f = maps.hopf()
    res = itint.hopf_via_loops(f, BASE_MESH, BASE_TIME)
    lk = oracles.linking_hopf(f)
    dt = time.perf_counter() - t0
    ok = abs(res.value - 1) <= 5e-2 and round(lk.value) == 1 and abs(lk.value - 1) < 1e-6
    record(6, "Hopf invariant via loops", ok and dt < 600,
           f"pairing {res.value:.5f}, linking oracle {lk.value:.6f}, {dt:.1f} s")


def test_criterion_07_length_bound():
    Ls = [1, 2, 4, 8, 16]
    worst, lhs = 0.0, {1: [], 2: []}
    for r in (1, 2):
        for L in Ls:
            forms, F, u0, gamma = bound_setup(r, "greatcircle", L)
            rep = itint.check_length_bound(forms, F, u0, samples=200, seed=20240611, slack=1e-9,
                                           gamma=gamma, raise_on_violation=False)
            worst = max(worst, rep.max_ratio)
            lhs[r].append(rep.lhs_max)
    slope2 = np.polyfit(np.log(Ls), np.log(lhs[2]), 1)[0]
    slope1 = np.polyfit(np.log(Ls), np.log(lhs[1]), 1)[0]
    ok = worst <= 1 + 1e-9 and abs(slope2 - 2) < 0.05
    record(7, "length bound for r = 1, 2 on great-circle powers", ok,
           f"max ratio {worst:.4f}, log-log slope of left side: r=1 {slope1:.3f}, r=2 {slope2:.3f}")


def test_criterion_08_sharpness():
    deg = itint.sharpness_scan([1, 2, 4, 8], "degree")
    hop = itint.sharpness_scan([1, 2, 3], "hopf")
    lin = max(abs(row.value / (row.L * deg[0].value) - 1) for row in deg)
    vols = [row.volume_estimate for row in deg]
    drift = (max(vols) - min(vols)) / min(vols)
    quad = max(abs(row.value / (row.L**2 * hop[0].value) - 1) for row in hop)
    ok = lin < 0.01 and drift < 0.05 and quad < 0.02
    record(8, "sharpness: degree pairings linear in L, hopf pairings quadratic", ok,
           f"linear dev {lin:.2e}, volume drift {drift:.2e}, quadratic dev {quad:.2e}, "
           f"hopf values {[round(r.value, 4) for r in hop]}")


def test_criterion_09_lemmas():
    catalog = [
        maps.rotation(2, 0.4),
        maps.rotation(3, 1.3, 0, 2),
        maps.rotation(3, 2.2, 1, 2),
        maps.reflection(2),
        maps.suspension_power(2),
        maps.suspension_power(-3),
        maps.conformal_dilation(2, 2.5),
        maps.conformal_dilation(3, 0.4),
        maps.hopf(),
        maps.quaternion_square(),
        maps.compose(maps.hopf(), maps.quaternion_square()),
    ]
    worst_pull = 0.0
    for f in catalog:
        pole = np.eye(f.source_dim + 1)[f.source_dim]
        rep = itint.lipschitz_pullback_check(f, FormSpec.volume(f.target_dim), samples=500, seed=11, slack=1e-9,
                                             extra_points=[pole], raise_on_violation=False)
        worst_pull = max(worst_pull, rep.max_ratio)
    # volume inequality for every pairing computed in criteria 5-8
    pairings = criterion_pairings()
    worst_vol, failures = 0.0, []
    for name, forms, F, res, cells in pairings:
        vb = itint.volume_bound_check(forms, F, res, cells)
        if vb.rhs > 0:
            worst_vol = max(worst_vol, vb.pairing / vb.rhs)
        if not vb.passed:
            failures.append(name)
    ok = worst_pull <= 1 + 1e-9 and not failures
    record(9, "pullback bound on catalog maps; volume bound on every pairing", ok,
           f"max pullback ratio {worst_pull:.6f} over {len(catalog)} maps; "
           f"{len(pairings)} pairings, max |pairing|/bound {worst_vol:.6f}" + (f"; failed {failures}" if failures else ""))


def test_criterion_10_determinism(tmp_path, monkeypatch):
    monkeypatch.setenv("CHEN_THREADS", "2")
    cells_alg = str(data_path("two_sphere_cells.toml"))
    runs = {
        "bar": ["bar", cells_alg, "--degree", "9", "--format", "json"],
        "detect": ["detect", str(data_path("cp2.toml")), "--degree", "4", "--n", "5"],
        "degree": ["degree", "--map", "suspension", "--k", "3"],
        "hopf": ["hopf", "--map", "hopf", "--mesh", "12", "--time", "24"],
        "bound": ["bound-check", "--r", "2", "--power", "2", "--samples", "20"],
        "sharpness": ["sharpness", "--mode", "degree", "--L", "1,2,4"],
    }
    bad = []
    for name, argv in runs.items():
        out = tmp_path / name
        with redirect_stdout(io.StringIO()):
            assert main(argv + ["--out", str(out)]) == 0
        (manifest,) = out.glob("*.manifest.json")
        buf = io.StringIO()
        with redirect_stdout(buf):
            code = main(["rerun", str(manifest), "--out", str(tmp_path / (name + "_again"))])
        recorded = json.loads(manifest.read_text())["outputs"]
        same = all((out / f).read_bytes() == (tmp_path / (name + "_again") / f).read_bytes() for f in recorded)
        if code != 0 or not same:
            bad.append(name)
    record(10, "rerun from manifest reproduces byte-identical outputs", not bad,
           f"{len(runs)} commands" + (f"; differing: {bad}" if bad else ""))
