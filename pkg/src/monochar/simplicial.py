"""Oriented simplicial complexes for the sphere and the spherical shell.

Simplices are stored per dimension as integer arrays of vertex indices.
Top-dimensional simplices keep the orientation they were built with
(outward for sphere triangles, positive volume for shell tetrahedra);
lower-dimensional faces are stored with sorted vertices.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .errors import GeometryError, HomologyObstructionError, ResourceError

MAX_LEVEL = 8
SCHEMES = ("icosahedron", "octahedron")


# ---------------------------------------------------------------------------
# chains

@dataclass(frozen=True)
class IntChain:
    """Integer chain: ``coeffs`` maps simplex index to a nonzero integer."""

    dim: int
    coeffs: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(i): int(c) for i, c in sorted(self.coeffs.items()) if int(c) != 0}
        object.__setattr__(self, "coeffs", clean)

    def _check(self, other: "IntChain"):
        if not isinstance(other, IntChain):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"cannot combine {self.dim}-chain with {other.dim}-chain")

    def __add__(self, other: "IntChain") -> "IntChain":
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return IntChain(self.dim, out)

    def __neg__(self) -> "IntChain":
        return IntChain(self.dim, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other: "IntChain") -> "IntChain":
        return self + (-other)

    def __mul__(self, k: int) -> "IntChain":
        return IntChain(self.dim, {i: k * c for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def items(self):
        return self.coeffs.items()

    @classmethod
    def zero(cls, dim: int) -> "IntChain":
        return cls(dim, {})

    def to_json(self) -> str:
        return json.dumps([[i, c] for i, c in self.coeffs.items()])

    @classmethod
    def from_json(cls, dim: int, text: str) -> "IntChain":
        return cls(dim, {int(i): int(c) for i, c in json.loads(text)})


# ---------------------------------------------------------------------------
# the complex

def _sort_with_parity(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort each row; return the sorted rows and the sign (+1/-1) of the sorting permutation."""
    n = rows.shape[1]
    inversions = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inversions += rows[:, i] > rows[:, j]
    sign = np.where(inversions % 2 == 0, 1, -1)
    return np.sort(rows, axis=1), sign


def _row_keys(rows: np.ndarray, base: int) -> np.ndarray:
    key = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        key = key * base + rows[:, j]
    return key


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    points: np.ndarray
    simplices: tuple[np.ndarray, ...]
    label: str = ""
    scheme: str | None = None
    level: int | None = None

    @classmethod
    def from_top(cls, points, top, label="", scheme=None, level=None) -> "SimplicialComplex":
        """Close a list of oriented top simplices under taking faces."""
        points = np.asarray(points, dtype=float)
        top = np.asarray(top, dtype=np.int64)
        d = top.shape[1] - 1
        if np.any(np.sort(top, axis=1)[:, 1:] == np.sort(top, axis=1)[:, :-1]):
            raise ValueError("simplex with repeated vertices")
        simplices = [np.arange(len(points), dtype=np.int64)[:, None]]
        for k in range(1, d):
            cols = [list(c) for c in _combinations(d + 1, k + 1)]
            faces = np.concatenate([top[:, c] for c in cols])
            faces = np.unique(np.sort(faces, axis=1), axis=0)
            simplices.append(faces)
        simplices.append(top)
        for arr in simplices:
            arr.setflags(write=False)
        points.setflags(write=False)
        return cls(points, tuple(simplices), label, scheme, level)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, k: int) -> int:
        if k < 0 or k > self.dim:
            return 0
        return len(self.simplices[k])

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    @cached_property
    def _incidence(self) -> dict[int, tuple[np.ndarray, np.ndarray]]:
        base = len(self.points) + 1
        out = {}
        for k in range(1, self.dim + 1):
            simp = self.simplices[k]
            lower_sorted, lower_sign = _sort_with_parity(self.simplices[k - 1])
            lower_keys = _row_keys(lower_sorted, base)
            order = np.argsort(lower_keys)
            idx = np.empty((len(simp), k + 1), dtype=np.int64)
            sgn = np.empty((len(simp), k + 1), dtype=np.int64)
            for i in range(k + 1):
                face = np.delete(simp, i, axis=1)
                face_sorted, face_sign = _sort_with_parity(face)
                keys = _row_keys(face_sorted, base)
                pos = np.searchsorted(lower_keys, keys, sorter=order)
                pos = np.minimum(pos, len(order) - 1)
                hit = order[pos]
                if not np.array_equal(lower_keys[hit], keys):
                    raise GeometryError("complex is not closed under faces")
                idx[:, i] = hit
                # face orientation relative to the stored (k-1)-simplex
                sgn[:, i] = (-1) ** i * face_sign * lower_sign[hit]
            out[k] = (idx, sgn)
        return out

    def faces(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """(face indices, incidence signs), each of shape (n_k, k+1)."""
        if k < 1 or k > self.dim:
            raise ValueError(f"no boundary in degree {k} for a {self.dim}-complex")
        return self._incidence[k]

    @cached_property
    def _cofaces(self) -> dict[int, list[list[tuple[int, int]]]]:
        out = {}
        for k in range(1, self.dim + 1):
            idx, sgn = self.faces(k)
            co: list[list[tuple[int, int]]] = [[] for _ in range(self.count(k - 1))]
            for s in range(len(idx)):
                for f, e in zip(idx[s].tolist(), sgn[s].tolist()):
                    co[f].append((s, e))
            out[k - 1] = co
        return out

    def cofaces(self, k: int) -> list[list[tuple[int, int]]]:
        """For each k-simplex, the (k+1)-simplices containing it with incidence sign."""
        return self._cofaces[k]

    def simplex_index(self, vertices: Iterable[int]) -> tuple[int, int]:
        """Index of the simplex with these vertices and the sign of the given ordering."""
        verts = np.asarray([list(vertices)], dtype=np.int64)
        k = verts.shape[1] - 1
        s_sorted, s_sign = _sort_with_parity(verts)
        st_sorted, st_sign = _sort_with_parity(self.simplices[k])
        hit = np.flatnonzero(np.all(st_sorted == s_sorted[0], axis=1))
        if len(hit) == 0:
            raise KeyError(f"no simplex {tuple(verts[0])}")
        return int(hit[0]), int(s_sign[0] * st_sign[hit[0]])


def _combinations(n: int, r: int):
    from itertools import combinations
    return combinations(range(n), r)


# ---------------------------------------------------------------------------
# meshes

def _octahedron():
    pts = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], float)
    faces = [[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4],
             [1, 0, 5], [2, 1, 5], [3, 2, 5], [0, 3, 5]]
    return pts, np.array(faces)


def _icosahedron():
    phi = (1 + 5 ** 0.5) / 2
    pts = []
    for a in (-1, 1):
        for b in (-phi, phi):
            pts += [[0, a, b], [a, b, 0], [b, 0, a]]
    pts = np.array(pts, float)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    edge = d[d > 1e-9].min()
    near = np.abs(d - edge) < 1e-9
    faces = [(i, j, k) for i in range(12) for j in range(i + 1, 12) for k in range(j + 1, 12)
             if near[i, j] and near[j, k] and near[i, k]]
    return pts, np.array(faces)


def _orient_outward(pts: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a, b, c = pts[faces[:, 0]], pts[faces[:, 1]], pts[faces[:, 2]]
    flip = np.einsum("ij,ij->i", np.cross(b - a, c - a), a + b + c) < 0
    faces = faces.copy()
    faces[flip, 1], faces[flip, 2] = faces[flip, 2], faces[flip, 1].copy()
    return faces


def _subdivide(pts: np.ndarray, faces: np.ndarray):
    edges = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    uniq, inv = np.unique(np.sort(edges, axis=1), axis=0, return_inverse=True)
    inv = inv.reshape(3, -1)
    mid = pts[uniq[:, 0]] + pts[uniq[:, 1]]
    mid /= np.linalg.norm(mid, axis=1)[:, None]
    m = len(pts) + inv
    a, b, c = faces.T
    ab, bc, ca = m
    new = np.concatenate([np.stack(t, axis=1) for t in
                          ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))])
    return np.concatenate([pts, mid]), new


def _sphere_data(scheme: str, level: int):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if not isinstance(level, (int, np.integer)) or level < 0:
        raise ValueError(f"level must be a nonnegative integer, got {level!r}")
    if level > MAX_LEVEL:
        raise ResourceError(f"level {level} exceeds the guard {MAX_LEVEL}")
    pts, faces = _octahedron() if scheme == "octahedron" else _icosahedron()
    faces = _orient_outward(pts, faces)
    for _ in range(level):
        pts, faces = _subdivide(pts, faces)
    return pts, faces


def sphere_mesh(scheme: str = "octahedron", level: int = 0) -> SimplicialComplex:
    """Coherently oriented (outward) triangulation of the unit sphere."""
    pts, faces = _sphere_data(scheme, level)
    return SimplicialComplex.from_top(pts, faces, f"{scheme}-L{level}", scheme, int(level))


def shell_mesh(scheme: str, level: int, r_inner: float, r_outer: float) -> SimplicialComplex:
    """One radial layer of prisms between two spheres, three tetrahedra per prism.

    Each prism over a triangle with sorted vertices v0 < v1 < v2 is cut along
    the diagonals (vi, vj') for i < j, so neighbouring prisms agree on their
    shared quadrilateral faces.
    """
    if not (0 < r_inner < r_outer):
        raise ValueError(f"need 0 < r_inner < r_outer, got {r_inner}, {r_outer}")
    pts, faces = _sphere_data(scheme, level)
    n = len(pts)
    points = np.concatenate([r_inner * pts, r_outer * pts])
    v0, v1, v2 = np.sort(faces, axis=1).T
    tets = np.concatenate([
        np.stack([v0, v1, v2, v2 + n], axis=1),
        np.stack([v0, v1, v1 + n, v2 + n], axis=1),
        np.stack([v0, v0 + n, v1 + n, v2 + n], axis=1),
    ])
    p = points[tets]
    vol = np.einsum("ij,ij->i", np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), p[:, 3] - p[:, 0])
    flip = vol < 0
    tets[flip, 2], tets[flip, 3] = tets[flip, 3], tets[flip, 2].copy()
    return SimplicialComplex.from_top(points, tets, f"{scheme}-L{level}-shell", scheme, int(level))


# ---------------------------------------------------------------------------
# boundary operators

def boundary_matrix(K: SimplicialComplex, k: int) -> sparse.csc_array:
    """Matrix of the boundary map from k-chains to (k-1)-chains."""
    if not 1 <= k <= 3 or k > K.dim:
        raise ValueError(f"boundary degree {k} out of range for a {K.dim}-complex")
    idx, sgn = K.faces(k)
    n = len(idx)
    cols = np.repeat(np.arange(n), k + 1)
    return sparse.csc_array((sgn.ravel(), (idx.ravel(), cols)), shape=(K.count(k - 1), n),
                            dtype=np.int64)


def boundary(K: SimplicialComplex, c: IntChain) -> IntChain:
    if c.dim < 1 or c.dim > K.dim:
        raise ValueError(f"cannot take the boundary of a {c.dim}-chain on a {K.dim}-complex")
    idx, sgn = K.faces(c.dim)
    out: dict[int, int] = {}
    n = len(idx)
    for s, coeff in c.items():
        if not 0 <= s < n:
            raise ValueError(f"{c.dim}-simplex index {s} out of range")
        for f, e in zip(idx[s].tolist(), sgn[s].tolist()):
            out[f] = out.get(f, 0) + e * coeff
    return IntChain(c.dim - 1, out)


def fundamental_cycle(K: SimplicialComplex) -> IntChain:
    """Sum of all top simplices with coefficient +1; must be a cycle."""
    top = IntChain(K.dim, {i: 1 for i in range(K.count(K.dim))})
    if boundary(K, top):
        raise GeometryError(f"{K.label}: top simplices are not a coherently oriented cycle")
    return top


def _is_closed_surface(K: SimplicialComplex) -> bool:
    return K.dim == 2 and all(len(co) == 2 for co in K.cofaces(1))


def cap(K: SimplicialComplex, C: IntChain, root: int = 0, root_value: int = 0) -> IntChain:
    """Integer 2-chain S with boundary(S) == C.

    On a closed surface the coefficients are propagated outward from ``root``
    along a spanning tree of the dual graph (a triangular integer solve, every
    pivot is +-1); different roots give caps differing by a multiple of the
    fundamental cycle. Other complexes fall back to a Smith normal form solve.
    """
    if C.dim != 1:
        raise ValueError(f"cap needs a 1-cycle, got a {C.dim}-chain")
    if boundary(K, C):
        raise ValueError("chain is not a cycle")
    if not C:
        return IntChain.zero(2)
    if not _is_closed_surface(K):
        return _cap_snf(K, C)

    idx, sgn = K.faces(2)
    cof = K.cofaces(1)
    n = K.count(2)
    if not 0 <= root < n:
        raise ValueError(f"root face {root} out of range")
    S = {root: root_value}
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for e, s_fe in zip(idx[f].tolist(), sgn[f].tolist()):
            (a, sa), (b, sb) = cof[e]
            h, s_he = (b, sb) if a == f else (a, sa)
            if h not in S:
                S[h] = (C.coeffs.get(e, 0) - s_fe * S[f]) * s_he
                queue.append(h)
    out = IntChain(2, S)
    if boundary(K, out) != C:
        raise HomologyObstructionError("cycle is not a boundary")
    return out


def _cap_snf(K: SimplicialComplex, C: IntChain) -> IntChain:
    from .homology import smith_normal_form

    A = boundary_matrix(K, 2).toarray().astype(object)
    snf = smith_normal_form(A.tolist())
    c = [C.coeffs.get(i, 0) for i in range(K.count(1))]
    Uc = [sum(u * x for u, x in zip(row, c)) for row in snf.U]
    r = len(snf.invariant_factors)
    if any(Uc[r:]):
        raise HomologyObstructionError("cycle is not a boundary")
    y = []
    for i, d in enumerate(snf.invariant_factors):
        if Uc[i] % d:
            raise HomologyObstructionError("cycle is not an integral boundary")
        y.append(Uc[i] // d)
    y += [0] * (K.count(2) - r)
    x = [sum(v * yy for v, yy in zip(row, y)) for row in snf.V]
    return IntChain(2, dict(enumerate(x)))


# ---------------------------------------------------------------------------
# loops and boundary components

def latitude_loop(K: SimplicialComplex, z0: float) -> IntChain:
    """Closed ring of mesh edges at (nearly) constant height, counterclockwise seen from +z.

    Vertex heights are grouped exactly (to 1e-12); the nearest height whose
    vertices form a single simple edge cycle is used.
    """
    if K.scheme != "octahedron" or K.dim != 2:
        raise ValueError("latitude loops need an octahedron-scheme sphere mesh")
    if not -1 < z0 < 1:
        raise ValueError(f"z0 must lie in (-1, 1), got {z0}")
    z = np.round(K.points[:, 2], 12)
    levels = np.unique(z)
    for zl in levels[np.argsort(np.abs(levels - z0), kind="stable")]:
        loop = _ring(K, np.flatnonzero(z == zl))
        if loop is not None:
            return loop
    raise GeometryError(f"no closed latitude ring near z0={z0}")


def _ring(K: SimplicialComplex, verts: np.ndarray) -> IntChain | None:
    if len(verts) < 3:
        return None
    ring = set(verts.tolist())
    edges = K.simplices[1]
    mask = np.isin(edges[:, 0], verts) & np.isin(edges[:, 1], verts)
    nbrs: dict[int, list[tuple[int, int]]] = {v: [] for v in ring}
    for e in np.flatnonzero(mask).tolist():
        a, b = edges[e].tolist()
        nbrs[a].append((b, e))
        nbrs[b].append((a, e))
    if any(len(v) != 2 for v in nbrs.values()):
        return None
    P = K.points
    start = min(ring)
    # step to the neighbour that is counterclockwise about +z
    cur, coeffs, seen = start, {}, {start}
    nxt, e = max(nbrs[start], key=lambda t: np.cross(P[start], P[t[0]])[2])
    while True:
        a, b = edges[e].tolist()
        coeffs[e] = 1 if (a, b) == (cur, nxt) else -1
        if nxt == start:
            break
        if nxt in seen:
            return None
        seen.add(nxt)
        prev, cur = cur, nxt
        nxt, e = next(t for t in nbrs[cur] if t[0] != prev)
    if len(seen) != len(ring):
        return None
    return IntChain(1, coeffs)


def boundary_components(K: SimplicialComplex) -> list[IntChain]:
    """Connected components of the boundary of the fundamental chain of K."""
    d = K.dim
    top = IntChain(d, {i: 1 for i in range(K.count(d))})
    bnd = boundary(K, top)
    faces = list(bnd.coeffs)
    if d < 2:
        return [IntChain(d - 1, {f: c}) for f, c in bnd.items()]
    idx, _ = K.faces(d - 1)
    by_ridge: dict[int, list[int]] = {}
    for f in faces:
        for r in idx[f].tolist():
            by_ridge.setdefault(r, []).append(f)
    comp: dict[int, int] = {}
    out = []
    for f in faces:
        if f in comp:
            continue
        label = len(out)
        comp[f] = label
        stack, members = [f], {}
        while stack:
            g = stack.pop()
            members[g] = bnd.coeffs[g]
            for r in idx[g].tolist():
                for h in by_ridge[r]:
                    if h not in comp:
                        comp[h] = label
                        stack.append(h)
        out.append(IntChain(d - 1, members))
    return out


# ---------------------------------------------------------------------------
# OFF files

def write_off(K: SimplicialComplex, path) -> None:
    if K.dim != 2:
        raise ValueError("OFF export needs a triangulated surface")
    faces = K.simplices[2]
    lines = ["OFF", f"{len(K.points)} {len(faces)} {K.count(1)}"]
    lines += [" ".join(repr(float(x)) for x in p) for p in K.points]
    lines += ["3 " + " ".join(str(int(v)) for v in f) for f in faces]
    Path(path).write_text("\n".join(lines) + "\n")


def read_off(path, label: str | None = None) -> SimplicialComplex:
    tokens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.append(line.split())
    if not tokens or tokens[0][0] != "OFF":
        raise ValueError(f"{path}: missing OFF header")
    head = tokens[0][1:] or tokens[1]
    body = tokens[1:] if tokens[0][1:] else tokens[2:]
    nv, nf = int(head[0]), int(head[1])
    pts = np.array([[float(x) for x in row[:3]] for row in body[:nv]])
    faces = []
    for row in body[nv:nv + nf]:
        if int(row[0]) != 3:
            raise ValueError(f"{path}: only triangular faces are supported")
        faces.append([int(v) for v in row[1:4]])
    return SimplicialComplex.from_top(pts, np.array(faces), label or Path(path).stem)


# ---------------------------------------------------------------------------
# random chains for property checks

def random_two_chain(K: SimplicialComplex, rng: np.random.Generator,
                     n_terms: int = 4, max_coeff: int = 3) -> IntChain:
    """A connected patch of faces (coefficient +-1) plus a few scattered faces."""
    n = K.count(2)
    idx, _ = K.faces(2)
    cof = K.cofaces(1)
    size = int(rng.integers(1, max(2, n // 2)))
    start = int(rng.integers(n))
    patch, queue = {start}, deque([start])
    while queue and len(patch) < size:
        f = queue.popleft()
        for e in idx[f].tolist():
            for h, _ in cof[e]:
                if h not in patch and len(patch) < size:
                    patch.add(h)
                    queue.append(h)
    sign = int(rng.choice([-1, 1]))
    out = IntChain(2, {f: sign for f in patch})
    coeffs = [c for c in range(-max_coeff, max_coeff + 1) if c]
    extra = {int(f): int(rng.choice(coeffs)) for f in rng.integers(0, n, size=n_terms)}
    return out + IntChain(2, extra)


def random_cycle(K: SimplicialComplex, rng: np.random.Generator) -> IntChain:
    """Boundary of a random 2-chain, plus a multiple of the equator when the mesh has one."""
    C = boundary(K, random_two_chain(K, rng))
    if K.scheme == "octahedron" and K.dim == 2:
        C = C + int(rng.integers(-1, 3)) * latitude_loop(K, 0.0)
    return C
