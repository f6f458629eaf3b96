"""Exact integer Smith normal form and (co)homology of simplicial complexes.

All arithmetic is on Python ints, so nothing overflows no matter how the
intermediate entries grow.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .simplicial import SimplicialComplex, boundary_matrix

RINGS = ("Z", "R", "RmodZ")
_RING_ALIASES = {"Z": "Z", "R": "R", "RmodZ": "RmodZ", "R/Z": "RmodZ", "U(1)": "RmodZ"}


@dataclass(frozen=True)
class SmithDecomposition:
    """``D == U @ A @ V`` with U, V unimodular and D diagonal, d_i | d_{i+1}."""

    U: list[list[int]]
    D: list[list[int]]
    V: list[list[int]]
    invariant_factors: list[int]


@dataclass(frozen=True)
class AbelianGroupDescriptor:
    """Z^free_rank + (R/Z)^circle_factors + sum of Z/t over ``torsion``.

    For ring R only ``free_rank`` is used (it is the real dimension).
    """

    ring: str
    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    circle_factors: int = 0

    def __post_init__(self):
        ring = _RING_ALIASES.get(self.ring)
        if ring is None:
            raise ValueError(f"unknown ring {self.ring!r}")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if ring == "R" and self.torsion:
            raise ValueError("real vector spaces carry no torsion")
        if ring != "RmodZ" and self.circle_factors:
            raise ValueError("circle factors only occur with R/Z coefficients")
        if ring == "RmodZ" and self.free_rank:
            raise ValueError("R/Z-modules are described by circle factors and torsion")
        t = self.torsion
        if any(x < 2 for x in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion {t} is not an invariant-factor chain")

    @property
    def is_trivial(self) -> bool:
        return not (self.free_rank or self.torsion or self.circle_factors)

    def to_dict(self) -> dict:
        return {"ring": self.ring, "free_rank": self.free_rank,
                "torsion": list(self.torsion), "circle_factors": self.circle_factors}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "AbelianGroupDescriptor":
        return cls(d["ring"], d.get("free_rank", 0), tuple(d.get("torsion", ())),
                   d.get("circle_factors", 0))

    def __str__(self) -> str:
        base = {"Z": "Z", "R": "R", "RmodZ": "Z"}[self.ring]
        parts = []
        if self.free_rank:
            parts.append(base if self.free_rank == 1 else f"{base}^{self.free_rank}")
        if self.circle_factors:
            parts.append("R/Z" if self.circle_factors == 1 else f"(R/Z)^{self.circle_factors}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# Smith normal form

def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SmithDecomposition:
    """Smith normal form by smallest-pivot gcd reduction.

    ``A`` may be a nested list or a numpy array of integers; entries are
    converted to Python ints.
    """
    arr = np.asarray(A, dtype=object)
    if arr.size == 0 and arr.ndim != 2:
        arr = arr.reshape(0, 0)
    m, n = arr.shape
    D = [[int(x) for x in row] for row in arr.tolist()]
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    factors = []
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = D[i][j]
                    if x and (best is None or abs(x) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    clean = clean and D[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        factors.append(D[t][t])
    return SmithDecomposition(U, D, V, factors)


def _normalize_diagonal(diag: list[int]) -> list[int]:
    """Invariant factors of a diagonal matrix with the given nonzero entries."""
    d = [abs(x) for x in diag]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return d


def invariant_factors(M) -> list[int]:
    """Nonzero invariant factors of an integer matrix (dense or scipy sparse).

    Unit pivots are eliminated sparsely first; whatever is left goes
    through the dense Smith normal form.
    """
    coo = M.tocoo() if hasattr(M, "tocoo") else None
    rows: dict[int, dict[int, int]] = {}
    if coo is not None:
        it = zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())
    else:
        arr = np.asarray(M, dtype=object)
        it = ((i, j, arr[i, j]) for i, j in zip(*np.nonzero(arr)))
    for i, j, v in it:
        if v:
            rows.setdefault(i, {})[j] = rows.get(i, {}).get(j, 0) + int(v)
    cols: dict[int, set[int]] = {}
    for i, r in rows.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    units = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda j: (len(cols[j]), j)):
            members = cols.get(c)
            if not members:
                continue
            cand = [i for i in members if abs(rows[i][c]) == 1]
            if not cand:
                continue
            p = min(cand, key=lambda i: (len(rows[i]), i))
            prow = rows.pop(p)
            sign = prow[c]
            for i in list(members):
                if i == p:
                    continue
                q = rows[i][c] * sign
                r = rows[i]
                for j, v in prow.items():
                    nv = r.get(j, 0) - q * v
                    if nv:
                        if j not in r:
                            cols[j].add(i)
                        r[j] = nv
                    elif j in r:
                        del r[j]
                        cols[j].discard(i)
                if not r:
                    del rows[i]
            for j in prow:
                cols[j].discard(p)
            del cols[c]
            units += 1
            progress = True
    rest_cols = sorted(j for j, s in cols.items() if s)
    rest_rows = sorted(rows)
    factors = [1] * units
    if rest_cols and rest_rows:
        cidx = {j: k for k, j in enumerate(rest_cols)}
        dense = [[0] * len(rest_cols) for _ in rest_rows]
        for a, i in enumerate(rest_rows):
            for j, v in rows[i].items():
                dense[a][cidx[j]] = v
        factors += smith_normal_form(dense).invariant_factors
    return _normalize_diagonal(factors)


# ---------------------------------------------------------------------------
# (co)homology

def _ring(ring: str) -> str:
    try:
        return _RING_ALIASES[ring]
    except KeyError:
        raise ValueError(f"unknown ring {ring!r}; expected one of {RINGS}") from None


def _integral(K: SimplicialComplex, k: int) -> tuple[int, list[int]]:
    """(Betti number, torsion coefficients) of H_k(K; Z); zero outside 0..dim."""
    if k < 0 or k > K.dim:
        return 0, []
    rank_in = len(invariant_factors(boundary_matrix(K, k))) if k >= 1 else 0
    out = invariant_factors(boundary_matrix(K, k + 1)) if k < K.dim else []
    betti = K.count(k) - rank_in - len(out)
    return betti, [d for d in out if d > 1]


def _check_degree(K: SimplicialComplex, k: int):
    if not 0 <= k <= K.dim:
        raise ValueError(f"degree {k} out of range 0..{K.dim}")


def homology(K: SimplicialComplex, k: int, ring: str = "Z") -> AbelianGroupDescriptor:
    ring = _ring(ring)
    _check_degree(K, k)
    b, tors = _integral(K, k)
    if ring == "Z":
        return AbelianGroupDescriptor("Z", b, tuple(tors))
    if ring == "R":
        return AbelianGroupDescriptor("R", b)
    # H_k (x) R/Z  +  Tor(H_{k-1}, R/Z)
    _, tors_below = _integral(K, k - 1)
    return AbelianGroupDescriptor("RmodZ", torsion=tuple(tors_below), circle_factors=b)


def cohomology(K: SimplicialComplex, k: int, ring: str = "Z") -> AbelianGroupDescriptor:
    """H^k(K; ring) = Hom(H_k, ring) + Ext(H_{k-1}, ring)."""
    ring = _ring(ring)
    _check_degree(K, k)
    b, tors = _integral(K, k)
    if ring == "R":
        return AbelianGroupDescriptor("R", b)
    if ring == "Z":
        # Hom(H_k, Z) = Z^b, Ext(Z/m, Z) = Z/m
        _, tors_below = _integral(K, k - 1)
        return AbelianGroupDescriptor("Z", b, tuple(tors_below))
    # Hom(Z, R/Z) = R/Z, Hom(Z/m, R/Z) = Z/m; Ext(-, R/Z) = 0 since R/Z is divisible
    return AbelianGroupDescriptor("RmodZ", torsion=tuple(tors), circle_factors=b)


def betti_numbers(K: SimplicialComplex) -> list[int]:
    return [_integral(K, k)[0] for k in range(K.dim + 1)]
