"""The monopole as a differential character on 1-cycles of a sphere mesh.

A character is stored canonically as its curvature form plus the rule
"integrate the curvature over any integer cap of the cycle, mod 1".
String potentials enter only as cross-checks through ``holonomy``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CocycleError, IntegralityError, QuantizationError, SingularityError
from .fields import (
    EXACT, TWO_PI, FormField, MonopoleConfig, QuadratureSpec, curvature_form,
    integrate_2form, line_integral, string_potential,
)
from .simplicial import IntChain, SimplicialComplex, boundary, cap, fundamental_cycle

EXACT_TOL = 1e-9
QUADRATURE_TOL = 1e-6


def circle_distance(a: float, b: float) -> float:
    d = float(a) - float(b)
    return abs(d - round(d))


@dataclass(frozen=True, eq=False)
class CircleValue:
    """A point of R/Z, stored in [0, 1). Equality is closeness on the circle."""

    value: float
    tol: float = EXACT_TOL

    def __post_init__(self):
        v = float(self.value) % 1.0
        object.__setattr__(self, "value", 0.0 if v == 1.0 else v)

    def distance(self, other) -> float:
        return circle_distance(self.value, float(other))

    def __float__(self) -> float:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, (CircleValue, int, float)):
            return self.distance(other) < self.tol
        return NotImplemented

    __hash__ = None

    def __add__(self, other) -> "CircleValue":
        return CircleValue(self.value + float(other), self.tol)

    __radd__ = __add__

    def __neg__(self) -> "CircleValue":
        return CircleValue(-self.value, self.tol)

    def __sub__(self, other) -> "CircleValue":
        return CircleValue(self.value - float(other), self.tol)

    def __repr__(self) -> str:
        return f"CircleValue({self.value!r} mod 1)"


@dataclass(frozen=True, eq=False)
class DifferentialCharacter:
    omega: FormField
    chern: int | None
    mesh: SimplicialComplex
    g: float
    period: float
    tol: float = EXACT_TOL
    defective: bool = False

    def summary(self) -> dict:
        return {"g": self.g, "chern": self.chern, "period": self.period,
                "defect": circle_distance(2 * self.g, 0)}


def character(cfg: MonopoleConfig, K: SimplicialComplex, tol: float = EXACT_TOL,
              allow_defective: bool = False) -> DifferentialCharacter:
    """The monopole's class in the first differential character group of K.

    Unquantized charges raise unless ``allow_defective`` is set; the
    resulting object then depends on the choice of cap.
    """
    n = 2 * cfg.g
    defect = abs(n - round(n))
    omega = curvature_form(cfg)
    period = integrate_2form(omega, K, fundamental_cycle(K))
    if defect < tol:
        if abs(period - round(n)) >= tol:
            raise IntegralityError(period, abs(period - round(n)))
        return DifferentialCharacter(omega, int(round(n)), K, cfg.g, period, tol)
    if not allow_defective:
        raise QuantizationError(cfg.g, defect)
    return DifferentialCharacter(omega, None, K, cfg.g, period, tol, defective=True)


def evaluate(chi: DifferentialCharacter, C: IntChain, S: IntChain | None = None,
             root: int = 0) -> CircleValue:
    """chi(C) = (integral of the curvature over a cap of C) mod 1.

    ``S`` overrides the cap; otherwise one is solved for, starting at face ``root``.
    """
    if C.dim != 1 or boundary(chi.mesh, C):
        raise ValueError("characters are evaluated on 1-cycles")
    if S is None:
        S = cap(chi.mesh, C, root=root)
    elif boundary(chi.mesh, S) != C:
        raise ValueError("S is not a cap of C")
    return CircleValue(integrate_2form(chi.omega, chi.mesh, S), chi.tol)


def relation_defect(chi: DifferentialCharacter, C: IntChain, S: IntChain) -> float:
    """Circle distance between chi(C + dS) and chi(C) + integral of the curvature over S."""
    if S.dim != 2:
        raise ValueError("S must be a 2-chain")
    lhs = evaluate(chi, C + boundary(chi.mesh, S))
    rhs = evaluate(chi, C) + integrate_2form(chi.omega, chi.mesh, S)
    return lhs.distance(rhs)


def holonomy(A: FormField, K: SimplicialComplex, C: IntChain,
             q: QuadratureSpec | None = None, tol: float = QUADRATURE_TOL) -> CircleValue:
    return CircleValue(line_integral(A, K, C, q), tol)


def string_defect(cfg: MonopoleConfig, K: SimplicialComplex, C: IntChain,
                  pole1: str = "north", pole2: str = "south",
                  q: QuadratureSpec | None = None) -> float:
    """How far apart (mod 1) the holonomies of two string placements are."""
    h1 = holonomy(string_potential(cfg, pole1), K, C, q)
    h2 = holonomy(string_potential(cfg, pole2), K, C, q)
    return h1.distance(h2)


def winding_number(K: SimplicialComplex, C: IntChain) -> int:
    """Winding of a 1-cycle about the z-axis from wrapped azimuth increments."""
    if C.dim != 1:
        raise ValueError("winding_number needs a 1-chain")
    total = 0.0
    E = K.simplices[1]
    P = K.points
    for e, c in C.items():
        a, b = P[E[e, 0]], P[E[e, 1]]
        if math.hypot(a[0], a[1]) < 1e-12 or math.hypot(b[0], b[1]) < 1e-12:
            raise SingularityError("edge touches the z-axis; winding undefined")
        d = math.atan2(b[1], b[0]) - math.atan2(a[1], a[0])
        d = (d + math.pi) % TWO_PI - math.pi
        total += c * d
    return int(round(total / TWO_PI))


def predicted_string_defect(cfg: MonopoleConfig, winding: int) -> float:
    return circle_distance(2 * cfg.g * winding, 0)


def characteristic_class(chi: DifferentialCharacter) -> int:
    nearest = round(chi.period)
    defect = abs(chi.period - nearest)
    if chi.defective or defect >= chi.tol:
        raise IntegralityError(chi.period, defect)
    return int(nearest)


# ---------------------------------------------------------------------------
# two-patch bundle with connection

@dataclass(frozen=True, eq=False)
class CechRep:
    """U(1) bundle glued from two patches with transition function exp(i n phi).

    The northern patch carries the south-string potential (regular on the
    north pole) and vice versa; they overlap in the band ``overlap``
    (bounds on z).
    """

    winding: int
    cfg: MonopoleConfig
    mesh: SimplicialComplex
    north_patch: FormField
    south_patch: FormField
    overlap: tuple[float, float] = (-0.5, 0.5)

    def transition(self, phi):
        return np.exp(1j * self.winding * np.asarray(phi))


def cech_rep(n: int, cfg: MonopoleConfig, K: SimplicialComplex,
             overlap: tuple[float, float] = (-0.5, 0.5)) -> CechRep:
    if 2 * cfg.g != n:
        raise ValueError(f"Cech data needs 2g == n, got 2g={2 * cfg.g}, n={n}")
    return CechRep(int(n), cfg, K, string_potential(cfg, "south"),
                   string_potential(cfg, "north"), overlap)


def cech_check(rep: CechRep, n_samples: int = 256, seed: int = 0,
               tol: float = 1e-8, order: int = 32) -> dict:
    """Check the gluing A_N - A_S = n dphi/2pi and the transition winding.

    Raises ``CocycleError`` on any mismatch beyond ``tol``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = rep.overlap
    z = rng.uniform(lo, hi, n_samples)
    phi = rng.uniform(0, TWO_PI, n_samples)
    rho = np.sqrt(1 - z * z)
    p = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)
    t = rng.normal(size=(n_samples, 3))
    dphi = (p[:, 0] * t[:, 1] - p[:, 1] * t[:, 0]) / (rho * rho) / TWO_PI
    gap = rep.north_patch(p, t) - rep.south_patch(p, t) - rep.winding * dphi
    max_err = float(np.max(np.abs(gap)))

    # integral of (A_N - A_S) around the equator
    x, w = np.polynomial.legendre.leggauss(order)
    ph = np.pi * (x + 1)
    eq = np.stack([np.cos(ph), np.sin(ph), np.zeros_like(ph)], axis=1)
    tang = np.pi * np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], axis=1)
    integral = float((rep.north_patch(eq, tang) - rep.south_patch(eq, tang)) @ w)
    winding = int(round(integral))

    # transition function winding by phase unwrapping
    samples = rep.transition(np.linspace(0, TWO_PI, 8 * abs(rep.winding) + 9))
    steps = np.angle(samples[1:] / samples[:-1])
    transition_winding = int(round(steps.sum() / TWO_PI))

    chern = characteristic_class(character(rep.cfg, rep.mesh))
    report = {
        "n": rep.winding,
        "max_cocycle_error": max_err,
        "equator_integral": integral,
        "winding": winding,
        "transition_winding": transition_winding,
        "characteristic_class": chern,
    }
    if max_err >= tol:
        raise CocycleError(f"A_N - A_S differs from n dphi/2pi by {max_err:.3g}")
    if abs(integral - rep.winding) >= tol or transition_winding != rep.winding:
        raise CocycleError(f"transition winding {integral} != {rep.winding}")
    if chern != winding:
        raise CocycleError(f"characteristic class {chern} != Cech winding {winding}")
    report["pass"] = True
    return report
