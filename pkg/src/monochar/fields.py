"""Monopole curvature, Dirac-string potentials and integration of forms over chains.

Forms are normalized by 2*pi: the curvature form integrates to 2g over the
sphere and potentials return A/2pi, so holonomies are plain numbers mod 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularityError
from .simplicial import IntChain, SimplicialComplex, boundary

TWO_PI = 2 * math.pi
SINGULAR_ANGLE = 1e-9
POLES = {"north": np.array([0.0, 0.0, 1.0]), "south": np.array([0.0, 0.0, -1.0])}


@dataclass(frozen=True)
class MonopoleConfig:
    g: float

    @property
    def normalized_charge(self) -> float:
        return 2 * self.g


@dataclass(frozen=True, eq=False)
class FormField:
    """A 1- or 2-form on R^3 - {0}.

    ``fn(points, *tangents)`` is vectorized over a leading axis. A form that
    is a constant multiple of the solid-angle form records that multiple in
    ``solid_angle_density``, which lets it be integrated exactly.
    """

    degree: int
    fn: Callable[..., np.ndarray]
    singular_ray: np.ndarray | None = None
    solid_angle_density: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ValueError(f"only 1- and 2-forms are supported, got degree {self.degree}")

    def check_regular(self, points) -> None:
        if self.singular_ray is None:
            return
        p = np.atleast_2d(np.asarray(points, dtype=float))
        ang = np.arctan2(np.linalg.norm(np.cross(p, self.singular_ray), axis=1), p @ self.singular_ray)
        if np.any(ang < SINGULAR_ANGLE):
            raise SingularityError(f"{self.name or 'form'} evaluated on its singular ray")

    def __call__(self, point, *tangents):
        if len(tangents) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} tangent vectors")
        self.check_regular(point)
        args = [np.asarray(x, dtype=float) for x in (point, *tangents)]
        return self.fn(*args)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def curvature_form(cfg: MonopoleConfig) -> FormField:
    c = cfg.g / TWO_PI

    def fn(p, u, v):
        r = np.linalg.norm(p, axis=-1)
        return c * _dot(p, np.cross(u, v)) / r ** 3

    return FormField(2, fn, solid_angle_density=c, name=f"curvature(g={cfg.g})")


def string_potential(cfg: MonopoleConfig, string_pole: str = "south") -> FormField:
    """A/2pi for the potential whose Dirac string runs out through ``string_pole``.

    south: g (1 - cos theta) dphi, north: -g (1 + cos theta) dphi, written
    without the 1/sin^2 theta so the regular pole is evaluated cleanly.
    """
    if string_pole not in POLES:
        raise ValueError(f"string_pole must be 'north' or 'south', got {string_pole!r}")
    c = cfg.g / TWO_PI
    s = 1.0 if string_pole == "south" else -1.0

    def fn(p, t):
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        r = np.linalg.norm(p, axis=-1)
        return s * c * (x * t[..., 1] - y * t[..., 0]) / (r * (r + s * z))

    return FormField(1, fn, singular_ray=POLES[string_pole],
                     name=f"{string_pole}-string(g={cfg.g})")


def angular_form(n: float = 1.0) -> FormField:
    """n dphi / 2pi, singular along the whole z-axis (checked on both rays)."""

    def fn(p, t):
        x, y = p[..., 0], p[..., 1]
        return n * (x * t[..., 1] - y * t[..., 0]) / (x * x + y * y) / TWO_PI

    return FormField(1, fn, singular_ray=POLES["north"], name=f"{n}*dphi/2pi")


def zero_form(degree: int) -> FormField:
    def fn(p, *t):
        return np.zeros(np.shape(p)[:-1])

    return FormField(degree, fn, solid_angle_density=0.0 if degree == 2 else None, name="zero")


# ---------------------------------------------------------------------------
# quadrature

@dataclass(frozen=True)
class QuadratureSpec:
    edge_rule_order: int = 16
    triangle_mode: str = "exact_solid_angle"
    triangle_order: int = 5

    def __post_init__(self):
        if self.edge_rule_order < 1 or self.triangle_order < 1:
            raise ValueError("quadrature orders must be >= 1")
        if self.triangle_mode not in ("exact_solid_angle", "numeric"):
            raise ValueError(f"unknown triangle_mode {self.triangle_mode!r}")

    @classmethod
    def numeric(cls, order: int = 5, edge_rule_order: int = 16) -> "QuadratureSpec":
        return cls(edge_rule_order, "numeric", order)


EXACT = QuadratureSpec()


def solid_angle(a, b, c) -> np.ndarray:
    """Signed solid angle of the cone over triangle(s) abc seen from the origin.

    Van Oosterom-Strackee: tan(Omega/2) = a.(b x c) / (abc + (a.b)c + (a.c)b + (b.c)a).
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    la, lb, lc = (np.linalg.norm(x, axis=-1) for x in (a, b, c))
    num = _dot(a, np.cross(b, c))
    den = la * lb * lc + _dot(a, b) * lc + _dot(a, c) * lb + _dot(b, c) * la
    return 2 * np.arctan2(num, den)


def _gauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def _triangle_values(omega: FormField, P: np.ndarray, order: int) -> np.ndarray:
    """Integral of omega over the radial projections of flat triangles P (n,3,3)."""
    x, w = _gauss(order)
    # collapsed (Duffy) rule on the reference triangle
    s = np.repeat(x, order)
    t = (1 - s) * np.tile(x, order)
    wt = np.repeat(w, order) * np.tile(w, order) * (1 - s)
    a = P[:, None, 0]
    u = (P[:, 1] - P[:, 0])[:, None]
    v = (P[:, 2] - P[:, 0])[:, None]
    p = a + s[None, :, None] * u + t[None, :, None] * v
    r = np.linalg.norm(p, axis=-1, keepdims=True)
    q = p / r
    du = (u - q * _dot(q, u)[..., None]) / r
    dv = (v - q * _dot(q, v)[..., None]) / r
    omega.check_regular(q.reshape(-1, 3))
    vals = omega.fn(q, du, dv)
    return vals @ wt


def integrate_2form(omega: FormField, K: SimplicialComplex, S: IntChain,
                    q: QuadratureSpec | None = None) -> float:
    if omega.degree != 2:
        raise ValueError(f"integrate_2form needs a 2-form, got degree {omega.degree}")
    if S.dim != 2:
        raise ValueError(f"integrate_2form needs a 2-chain, got a {S.dim}-chain")
    if not S:
        return 0.0
    q = q or EXACT
    idx = np.fromiter(S.coeffs.keys(), dtype=np.int64, count=len(S))
    coeff = np.fromiter(S.coeffs.values(), dtype=float, count=len(S))
    P = K.points[K.simplices[2][idx]]
    if q.triangle_mode == "exact_solid_angle":
        if omega.solid_angle_density is None:
            raise ValueError("exact_solid_angle mode only applies to multiples of the solid-angle form")
        vals = omega.solid_angle_density * solid_angle(P[:, 0], P[:, 1], P[:, 2])
    else:
        vals = _triangle_values(omega, P, q.triangle_order)
    return math.fsum((coeff * vals).tolist())


def _arc_min_angle(a: np.ndarray, b: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Smallest angle between direction d and the great-circle arcs a->b."""
    ah = a / np.linalg.norm(a, axis=-1, keepdims=True)
    bh = b / np.linalg.norm(b, axis=-1, keepdims=True)

    def ang(x, y):
        return np.arctan2(np.linalg.norm(np.cross(x, y), axis=-1), _dot(x, y))

    ends = np.minimum(ang(ah, d), ang(bh, d))
    n = np.cross(ah, bh)
    nn = np.linalg.norm(n, axis=-1, keepdims=True)
    n = np.divide(n, nn, out=np.zeros_like(n), where=nn > 0)
    dn = _dot(n, d)
    dp = d - dn[..., None] * n
    dpn = np.linalg.norm(dp, axis=-1)
    foot = np.divide(dp, dpn[..., None], out=np.zeros_like(dp), where=dpn[..., None] > 0)
    inside = (nn[..., 0] > 0) & (dpn > 0) & (
        np.abs(ang(ah, foot) + ang(foot, bh) - ang(ah, bh)) < 1e-12)
    interior = np.arctan2(np.abs(dn), dpn)
    return np.where(inside, np.minimum(interior, ends), ends)


def edge_integrals(A: FormField, a: np.ndarray, b: np.ndarray, order: int = 16) -> np.ndarray:
    """Integrals of a 1-form along great-circle arcs a->b (radius interpolated linearly)."""
    if A.singular_ray is not None and np.any(_arc_min_angle(a, b, A.singular_ray) < SINGULAR_ANGLE):
        raise SingularityError(f"an edge meets the singular ray of {A.name or 'the form'}")
    x, w = _gauss(order)
    ra = np.linalg.norm(a, axis=-1)[:, None, None]
    rb = np.linalg.norm(b, axis=-1)[:, None, None]
    ah, bh = a[:, None] / ra, b[:, None] / rb
    theta = np.arctan2(np.linalg.norm(np.cross(ah, bh), axis=-1), _dot(ah, bh))[..., None]
    t = x[None, :, None]
    sin_th = np.sin(theta)
    s = (np.sin((1 - t) * theta) * ah + np.sin(t * theta) * bh) / sin_th
    ds = theta * (-np.cos((1 - t) * theta) * ah + np.cos(t * theta) * bh) / sin_th
    r = ra + t * (rb - ra)
    p = r * s
    dp = (rb - ra) * s + r * ds
    return A.fn(p, dp) @ w


def line_integral(A: FormField, K: SimplicialComplex, C: IntChain,
                  q: QuadratureSpec | None = None) -> float:
    if A.degree != 1:
        raise ValueError(f"line_integral needs a 1-form, got degree {A.degree}")
    if C.dim != 1:
        raise ValueError(f"line_integral needs a 1-chain, got a {C.dim}-chain")
    if not C:
        return 0.0
    q = q or EXACT
    idx = np.fromiter(C.coeffs.keys(), dtype=np.int64, count=len(C))
    coeff = np.fromiter(C.coeffs.values(), dtype=float, count=len(C))
    E = K.simplices[1][idx]
    vals = edge_integrals(A, K.points[E[:, 0]], K.points[E[:, 1]], q.edge_rule_order)
    return math.fsum((coeff * vals).tolist())


def flux(cfg: MonopoleConfig, K: SimplicialComplex, surface: IntChain,
         q: QuadratureSpec | None = None) -> float:
    """Physical magnetic flux 2*pi * (integral of the normalized curvature)."""
    if surface.dim != 2 or boundary(K, surface):
        raise ValueError("flux is measured through a 2-cycle")
    return TWO_PI * integrate_2form(curvature_form(cfg), K, surface, q)
