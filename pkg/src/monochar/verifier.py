"""Group-level claims about the monopole, recomputed from the mesh on every call.

Each report is a plain dict with a ``claims`` list of
``{"claim", "computed", "pass"}`` entries and an overall ``pass``.
"""
from __future__ import annotations

import numpy as np

from .characters import (
    EXACT_TOL, character, circle_distance, evaluate,
)
from .fields import FormField, MonopoleConfig, curvature_form, integrate_2form
from .homology import AbelianGroupDescriptor, cohomology, homology
from .simplicial import (
    IntChain, SimplicialComplex, cap, fundamental_cycle, random_cycle,
)

DEFAULT_G = (-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5)


def _claim(claim: str, computed, ok: bool) -> dict:
    if isinstance(computed, AbelianGroupDescriptor):
        computed = str(computed)
    return {"claim": claim, "computed": computed, "pass": bool(ok)}


def _report(name: str, K: SimplicialComplex, claims: list[dict], **extra) -> dict:
    return {"report": name, "mesh": K.label, **extra, "claims": claims,
            "pass": all(c["pass"] for c in claims)}


def _is_circle(d: AbelianGroupDescriptor) -> bool:
    return d.circle_factors == 1 and not d.torsion and not d.free_rank


def _period(omega: FormField, K: SimplicialComplex) -> float:
    return integrate_2form(omega, K, fundamental_cycle(K))


def sequence5_report(K: SimplicialComplex, k: int, g_values=DEFAULT_G) -> dict:
    """End terms of 0 -> H^k(R/Z) -> H^k_hat -> closed integral (k+1)-forms -> 0."""
    if k == 2:
        left = cohomology(K, 2, "RmodZ")
        # a surface carries no 3-simplices, hence no 3-forms
        no_top = K.dim < 3 and K.count(3) == 0
        claims = [
            _claim("H^2(S2,R/Z) is one circle factor", left, _is_circle(left)),
            _claim("closed 3-forms on S2 vanish", f"dim={K.dim}", no_top),
            _claim("H2_hat(S2,R/Z) = H^2(S2,R/Z) = R/Z", str(left), _is_circle(left) and no_top),
        ]
        return _report("sequence5", K, claims, k=2,
                       left="H^2(S2,R/Z)=circle" if _is_circle(left) else f"H^2(S2,R/Z)={left}",
                       right="Lambda3=0" if no_top else "Lambda3!=0",
                       iso="H2_hat ≅ R/Z" if _is_circle(left) and no_top else "failed")
    if k != 1:
        raise ValueError(f"sequence5_report covers k = 1 or 2, got {k}")

    left = cohomology(K, 1, "RmodZ")
    h1_real = cohomology(K, 1, "R")
    h2_int = cohomology(K, 2, "Z")
    periods = []
    for g in g_values:
        n = 2 * g
        if abs(n - round(n)) < EXACT_TOL:
            periods.append(_period(curvature_form(MonopoleConfig(g)), K))
    integral = all(abs(p - round(p)) < EXACT_TOL for p in periods)
    claims = [
        _claim("H^1(S2,R/Z) = 0 (curvature map injective)", left, left.is_trivial),
        _claim("H^1(S2,R) = 0: closed 1-forms have integral periods", h1_real, h1_real.is_trivial),
        _claim("H^2(S2,Z) = Z, torsion-free", h2_int,
               h2_int.free_rank == 1 and not h2_int.torsion),
        _claim("quantized curvatures have integral periods",
               [round(p, 12) for p in periods], integral),
    ]
    return _report("sequence5", K, claims, k=1, left=str(left),
                   closed_forms_quotient=str(h1_real),
                   periods=[round(p, 12) for p in periods])


def uct_report(K: SimplicialComplex) -> dict:
    """H^k(K; R/Z) = Hom(H_k, R/Z) + Ext(H_{k-1}, R/Z) for k = 0, 1, 2."""
    rows = []
    for k in range(3):
        hk = homology(K, k, "Z")
        below = homology(K, k - 1, "Z") if k > 0 else AbelianGroupDescriptor("Z")
        hom = AbelianGroupDescriptor("RmodZ", torsion=hk.torsion, circle_factors=hk.free_rank)
        total = cohomology(K, k, "RmodZ")
        rows.append({"k": k, "H_k": str(hk), "H_k-1": str(below), "Hom": str(hom),
                     "Ext": "0", "H^k(R/Z)": str(total), **total.to_dict()})
    h = [cohomology(K, k, "RmodZ") for k in range(3)]
    claims = [
        _claim("H^0(S2,R/Z) = Hom(Z,R/Z) = R/Z", h[0], _is_circle(h[0])),
        _claim("H^1(S2,R/Z) = 0", h[1], h[1].is_trivial),
        _claim("H^2(S2,R/Z) = Hom(Z,U(1)) = R/Z", h[2], _is_circle(h[2])),
    ]
    return _report("uct", K, claims, rows=rows)


def _cycle_samples(K: SimplicialComplex, rng: np.random.Generator, n: int) -> list[IntChain]:
    out = []
    while len(out) < n:
        C = random_cycle(K, rng)
        if C:
            out.append(C)
    return out


def quantization_scan(K: SimplicialComplex, g_list, seed: int = 0, n_cycles: int = 10) -> dict:
    """Per charge: period, integrality defect and measured cap dependence.

    For each random cycle C the cap S = cap(C) is compared with S + [S^2];
    the disagreement must vanish exactly when 2g is an integer and equal
    dist(2g, Z) otherwise. A cap solved from a different root face is also
    compared, against dist(m 2g, Z) where m is its multiple of [S^2].
    """
    F = fundamental_cycle(K)
    n_faces = K.count(2)
    rows = []
    for g in g_list:
        g = float(g)
        chi = character(MonopoleConfig(g), K, allow_defective=True)
        period = chi.period
        nearest = int(round(period))
        defect = abs(period - nearest)
        expected = circle_distance(2 * g, 0)
        rng = np.random.default_rng(seed)
        shift, roots = 0.0, 0.0
        for C in _cycle_samples(K, rng, n_cycles):
            r1, r2 = (int(x) for x in rng.integers(0, n_faces, 2))
            S1 = cap(K, C, root=r1)
            S2 = cap(K, C, root=r2)
            v1 = evaluate(chi, C, S1)
            shift = max(shift, v1.distance(evaluate(chi, C, S1 + F)))
            m = S2.coeffs.get(r1, 0) - S1.coeffs.get(r1, 0)
            got = v1.distance(evaluate(chi, C, S2))
            roots = max(roots, abs(got - circle_distance(m * 2 * g, 0)))
        quantized = abs(2 * g - round(2 * g)) < EXACT_TOL
        ok = abs(shift - expected) < EXACT_TOL and roots < EXACT_TOL
        if quantized:
            ok = ok and defect < EXACT_TOL
        rows.append({"g": g, "period": period, "nearest": nearest, "defect": defect,
                     "cap_disagreement": shift, "expected_disagreement": expected,
                     "root_consistency": roots, "quantized": quantized, "pass": ok})
    claims = [_claim(f"g={r['g']}: cap dependence = dist(2g, Z)", r["cap_disagreement"], r["pass"])
              for r in rows]
    return _report("quantization_scan", K, claims, rows=rows)


def r2_report(omega: FormField, u: int, K: SimplicialComplex, tol: float = EXACT_TOL) -> dict:
    """Is (omega, u) in R^2(S2, Z), i.e. does u map to the de Rham class of omega?"""
    h2 = cohomology(K, 2, "Z")
    period = _period(omega, K)
    torsion_free = not h2.torsion
    claims = [
        _claim("H^2(S2,Z) torsion-free, so r is injective", h2, torsion_free),
        _claim(f"r({u}) = [omega]", period, abs(period - u) < tol),
    ]
    return _report("r2_membership", K, claims, u=int(u), period=period)


def r2_membership(omega: FormField, u: int, K: SimplicialComplex, tol: float = EXACT_TOL) -> bool:
    return r2_report(omega, u, K, tol)["claims"][1]["pass"]


def retract_report(K_sphere: SimplicialComplex, K_shell: SimplicialComplex) -> dict:
    claims = []
    for k in range(3):
        a, b = homology(K_sphere, k), homology(K_shell, k)
        claims.append(_claim(f"H_{k}(sphere) = H_{k}(shell)", f"{a} / {b}", a == b))
    h3 = homology(K_shell, 3) if K_shell.dim >= 3 else AbelianGroupDescriptor("Z")
    claims.append(_claim("H_3(shell) = 0", h3, h3.is_trivial))
    h2 = homology(K_sphere, 2)
    claims.append(_claim("H_2(sphere) = Z", h2, h2.free_rank == 1 and not h2.torsion))
    return _report("retract", K_sphere, claims, shell=K_shell.label)


def character_report(g: float, K: SimplicialComplex, loops: dict[str, IntChain],
                     allow_defective: bool = False) -> dict:
    chi = character(MonopoleConfig(g), K, allow_defective=allow_defective)
    values = {name: float(evaluate(chi, C)) for name, C in loops.items()}
    return {"report": "character", "mesh": K.label, **chi.summary(), "evaluations": values}
