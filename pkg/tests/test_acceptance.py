"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary block at the
end of the session lists every criterion.
"""
import math
import subprocess
import sys
import time

import numpy as np

from monochar.characters import (
    cech_check, cech_rep, character, characteristic_class, circle_distance, evaluate, holonomy,
    relation_defect, string_defect,
)
from monochar.fields import MonopoleConfig, flux, string_potential
from monochar.homology import AbelianGroupDescriptor, cohomology, homology, smith_normal_form
from monochar.simplicial import (
    fundamental_cycle, latitude_loop, random_cycle, random_two_chain, shell_mesh, sphere_mesh,
)
from monochar.verifier import quantization_scan

Z = AbelianGroupDescriptor("Z", 1)
ZERO = AbelianGroupDescriptor("Z")


def test_01_flux_quantization(record):
    t0 = time.perf_counter()
    K = sphere_mesh("octahedron", 3)
    F = fundamental_cycle(K)
    errs = {g: abs(flux(MonopoleConfig(g), K, F) - 4 * math.pi * g) for g in (0.5, 1.0, -1.0)}
    elapsed = time.perf_counter() - t0
    ok = max(errs.values()) < 1e-9 and elapsed < 1.0
    record(1, "flux = 4 pi g on octahedron L3", ok,
           f"max err {max(errs.values()):.2e}, {elapsed:.3f}s")
    assert ok


def test_02_character_relation(record):
    t0 = time.perf_counter()
    K = sphere_mesh("octahedron", 2)
    chi = character(MonopoleConfig(0.5), K)
    rng = np.random.default_rng(2024)
    worst = max(relation_defect(chi, random_cycle(K, rng), random_two_chain(K, rng))
                for _ in range(100))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 10.0
    record(2, "character relation on 100 random (C, S), g=0.5", ok,
           f"max defect {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_03_dirac_quantization(record):
    K = sphere_mesh("octahedron", 2)
    gs = [0.3, 0.5, 0.7, 1.0, 1.5]
    rows = quantization_scan(K, gs, seed=3)["rows"]
    expected = [0.4, 0.0, 0.4, 0.0, 0.0]
    errs = [abs(r["cap_disagreement"] - e) for r, e in zip(rows, expected)]
    also = [abs(r["cap_disagreement"] - circle_distance(2 * g, 0)) for r, g in zip(rows, gs)]
    ok = max(errs) < 1e-9 and max(also) < 1e-9
    record(3, "cap disagreement = dist(2g, Z)", ok,
           ", ".join(f"{r['cap_disagreement']:.3g}" for r in rows))
    assert ok


def test_04_string_unobservability(record):
    K = sphere_mesh("octahedron", 2)
    E = latitude_loop(K, 0.0)
    d1 = string_defect(MonopoleConfig(1.0), K, E)
    dq = string_defect(MonopoleConfig(0.25), K, E)
    ok = d1 < 1e-8 and abs(dq - 0.5) < 1e-8
    record(4, "string defect: 0 at g=1, 0.5 at g=0.25", ok, f"{d1:.2e}, {dq:.10f}")
    assert ok


def test_05_two_picture_consistency(record):
    worst = 0.0
    for level in (2, 3):
        K = sphere_mesh("octahedron", level)
        E = latitude_loop(K, 0.0)
        cfg = MonopoleConfig(0.5)
        hol = holonomy(string_potential(cfg, "south"), K, E)
        worst = max(worst, hol.distance(evaluate(character(cfg, K), E)))
    ok = worst < 1e-6
    record(5, "south-string holonomy = character on equator", ok, f"max gap {worst:.2e}")
    assert ok


def test_06_integral_homology(record):
    t0 = time.perf_counter()
    bad = []
    for scheme in ("octahedron", "icosahedron"):
        for level in (0, 1, 2):
            K = sphere_mesh(scheme, level)
            S = shell_mesh(scheme, level, 1.0, 2.0)
            want = [Z, ZERO, Z]
            got = [homology(K, k, "Z") for k in range(3)]
            got_shell = [homology(S, k, "Z") for k in range(3)]
            if got != want or got_shell != want:
                bad.append(f"{scheme}-L{level}")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30.0
    record(6, "H0=Z, H1=0, H2=Z on spheres and shells, levels 0-2", ok,
           f"{elapsed:.2f}s" + (f", failed {bad}" if bad else ""))
    assert ok


def test_07_uct(record):
    ok = True
    for scheme in ("octahedron", "icosahedron"):
        K = sphere_mesh(scheme, 1)
        h2 = cohomology(K, 2, "RmodZ")
        h1 = cohomology(K, 1, "RmodZ")
        ok = ok and h2 == AbelianGroupDescriptor("RmodZ", circle_factors=1) and h1.is_trivial
    record(7, "H^2(S2,R/Z) = R/Z, H^1(S2,R/Z) = 0", ok)
    assert ok


def test_08_cech(record):
    K = sphere_mesh("octahedron", 1)
    details = []
    ok = True
    for n in (-2, -1, 0, 1, 2):
        cfg = MonopoleConfig(n / 2)
        rep = cech_check(cech_rep(n, cfg, K), tol=1e-8)
        chern = characteristic_class(character(cfg, K))
        ok = ok and rep["pass"] and rep["max_cocycle_error"] < 1e-8 and rep["winding"] == chern
        details.append(f"{n}:{rep['winding']}")
    record(8, "Cech winding = characteristic class", ok, " ".join(details))
    assert ok


def _det(M):
    M = [list(r) for r in M]
    n, sign, prev = len(M), 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[-1][-1] if n else 1


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_09_snf_engine(record):
    rng = np.random.default_rng(9)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(200):
        m, n = (int(x) for x in rng.integers(1, 9, size=2))
        A = rng.integers(-9, 10, size=(m, n)).tolist()
        s = smith_normal_form(A)
        f = s.invariant_factors
        diag_ok = all(s.D[i][j] == (f[i] if i == j and i < len(f) else 0)
                      for i in range(m) for j in range(n))
        good = (_matmul(_matmul(s.U, A), s.V) == s.D and abs(_det(s.U)) == 1
                and abs(_det(s.V)) == 1 and diag_ok and all(b % a == 0 for a, b in zip(f, f[1:])))
        failures += not good
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 5.0
    record(9, "SNF: D = UAV, unimodular, divisibility (200 matrices)", ok,
           f"{failures} failures, {elapsed:.2f}s")
    assert ok


def test_10_determinism(record, tmp_path):
    runs = [
        ["scan", "--g", "0.3,0.5,1.0", "--seed", "17"],
        ["verify", "uct", "--scheme", "icosahedron", "--level", "1"],
        ["character", "--g", "1.5", "--loops", "equator,latitude:0.4", "--seed", "5"],
    ]
    ok = True
    for argv in runs:
        outs = []
        for i in range(2):
            path = tmp_path / f"out{i}.json"
            proc = subprocess.run([sys.executable, "-m", "monochar", *argv, "--out", str(path)],
                                  capture_output=True, check=False)
            outs.append((proc.returncode, proc.stdout, path.read_bytes()))
        ok = ok and outs[0] == outs[1] and outs[0][0] == 0
    record(10, "CLI output byte-identical across runs", ok)
    assert ok
