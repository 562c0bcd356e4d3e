"""Oriented simplicial complexes with optional embedded, periodic geometry.

Simplices are stored per degree as tuples of vertex ids in strictly
increasing order (the canonical orientation).  Incidence is kept as explicit
facet index arrays rather than recovered from vertex tuples, so that
parallel simplices with identical vertex tuples -- which occur in the
resolution-2 periodic torus -- stay distinct.  Geometry, when present, is
stored per simplex as an unwrapped coordinate representative, which keeps
all metric computations local and free of periodic branch cuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


class MeshError(ValueError):
    """Malformed, degenerate, or unsupported mesh input."""


# Quantization step used to key face geometry across cofaces.  Offsets of a
# shared face computed from two different top cells agree to roundoff; this
# step is far below any simplex diameter we handle.
_KEY_TOL = 1e-7


def _quantize(offsets: np.ndarray) -> tuple:
    return tuple(np.rint(np.asarray(offsets, dtype=float).ravel() / _KEY_TOL).astype(np.int64))


@dataclass(frozen=True)
class MeshQuality:
    eta: float
    fullness: float
    counts: tuple


class SimplicialComplex:
    """A finite oriented simplicial complex, immutable after construction."""

    def __init__(self, dim, n_vertices, simplices, facets, vertex_coords=None,
                 simplex_coords=None, periods=None):
        self.dim = dim
        self.n_vertices = n_vertices
        self.simplices = simplices          # simplices[k]: (N_k, k+1) int ids
        self.facets = facets                # facets[k]: (N_k, k+1) -> degree k-1 indices
        self.vertex_coords = vertex_coords  # (V, d) fundamental-domain coords, or None
        self.simplex_coords = simplex_coords  # per degree (N_k, k+1, d) unwrapped, or None
        self.periods = periods              # (d,) with 0 marking non-periodic axes, or None
        self._cache = {}

    # ------------------------------------------------------------------ build

    @classmethod
    def from_cells(cls, dim, n_vertices, cells, vertex_coords=None,
                   cell_coords=None, periods=None):
        """Build a complex from its top cells, enumerating all lower faces.

        ``cells`` is an (T, dim+1) array of vertex ids (any order; they are
        canonicalized to increasing order).  ``cell_coords`` gives unwrapped
        coordinates per cell vertex; when omitted for an embedded complex it
        is derived from ``vertex_coords`` by minimal-image unwrapping.
        """
        cells = np.asarray(cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise MeshError("cells must be (T, dim+1)")
        if cells.size and (cells.min() < 0 or cells.max() >= n_vertices):
            raise MeshError("cell references an unknown vertex id")
        for row in cells:
            if len(set(row.tolist())) != dim + 1:
                raise MeshError(f"degenerate cell with repeated vertex: {row.tolist()}")

        embedded = vertex_coords is not None
        if embedded:
            vertex_coords = np.asarray(vertex_coords, dtype=float)
            if cell_coords is None:
                cell_coords = _unwrap_cells(cells, vertex_coords, periods)
            else:
                cell_coords = np.asarray(cell_coords, dtype=float)

        # Canonical increasing vertex order per cell.
        order = np.argsort(cells, axis=1)
        cells = np.take_along_axis(cells, order, axis=1)
        if embedded:
            cell_coords = np.take_along_axis(cell_coords, order[:, :, None], axis=1)

        # Sort cells by (vertex tuple, geometry key) for deterministic indexing.
        def cell_key(i):
            ids = tuple(cells[i])
            if embedded:
                return ids + _quantize(cell_coords[i, 1:] - cell_coords[i, 0])
            return ids

        top_order = sorted(range(len(cells)), key=cell_key)
        keys = [cell_key(i) for i in top_order]
        for a, b in zip(keys, keys[1:]):
            if a == b:
                raise MeshError(f"duplicate simplex: {a[:dim + 1]}")
        cells = cells[top_order]
        if embedded:
            cell_coords = cell_coords[top_order]

        simplices = [None] * (dim + 1)
        facets = [None] * (dim + 1)
        coords = [None] * (dim + 1) if embedded else None
        simplices[dim] = cells
        if embedded:
            coords[dim] = cell_coords

        # Enumerate faces degree by degree, keyed by (ids, quantized offsets).
        cur_ids = cells
        cur_coords = cell_coords if embedded else None
        for k in range(dim, 0, -1):
            lookup = {}
            key_list, face_ids, face_coords = [], [], []
            fac = np.empty((len(cur_ids), k + 1), dtype=np.int64)
            for s in range(len(cur_ids)):
                for i in range(k + 1):
                    ids = tuple(np.delete(cur_ids[s], i).tolist())
                    if embedded:
                        fc = np.delete(cur_coords[s], i, axis=0)
                        key = ids + (_quantize(fc[1:] - fc[0]) if k > 1 else ())
                    else:
                        fc = None
                        key = ids
                    idx = lookup.get(key)
                    if idx is None:
                        idx = len(face_ids)
                        lookup[key] = idx
                        key_list.append(key)
                        face_ids.append(ids)
                        if embedded:
                            face_coords.append(fc)
                    fac[s, i] = idx
            # Re-sort faces canonically and remap the facet references.
            perm = sorted(range(len(face_ids)), key=lambda j: key_list[j])
            inv = np.empty(len(perm), dtype=np.int64)
            inv[perm] = np.arange(len(perm))
            fac = inv[fac]
            face_ids = np.array([face_ids[j] for j in perm], dtype=np.int64)
            if face_ids.ndim == 1:
                face_ids = face_ids.reshape(-1, k)
            facets[k] = fac
            simplices[k - 1] = face_ids
            if embedded:
                coords[k - 1] = np.array([face_coords[j] for j in perm], dtype=float)
            cur_ids = face_ids
            cur_coords = coords[k - 1] if embedded else None

        # Degree 0: index vertices by id so isolated vertices are kept.
        if dim >= 1:
            zero_ids = simplices[0][:, 0]
            facets[1] = zero_ids[facets[1]]
        simplices[0] = np.arange(n_vertices, dtype=np.int64)[:, None]
        facets[0] = np.zeros((n_vertices, 0), dtype=np.int64)
        if embedded:
            coords[0] = vertex_coords[:, None, :].copy()

        return cls(dim, n_vertices, simplices, facets,
                   vertex_coords=vertex_coords if embedded else None,
                   simplex_coords=coords, periods=periods)

    # ------------------------------------------------------------------ query

    @property
    def embedded(self):
        return self.simplex_coords is not None

    @property
    def embed_dim(self):
        return self.vertex_coords.shape[1] if self.embedded else None

    def n_simplices(self, k):
        if not 0 <= k <= self.dim:
            return 0
        return len(self.simplices[k])

    def counts(self):
        return tuple(self.n_simplices(k) for k in range(self.dim + 1))

    def coboundary_matrix(self, k):
        """Integer coboundary matrix from degree-k to degree-(k+1) cochains."""
        if not 0 <= k < self.dim:
            raise MeshError(f"coboundary degree out of range: {k}")
        key = ("cob", k)
        if key not in self._cache:
            fac = self.facets[k + 1]
            n_hi, n_lo = len(fac), self.n_simplices(k)
            rows = np.repeat(np.arange(n_hi), k + 2)
            cols = fac.ravel()
            signs = np.tile(np.array([(-1) ** i for i in range(k + 2)], dtype=np.int64), n_hi)
            mat = sp.coo_matrix((signs, (rows, cols)), shape=(n_hi, n_lo)).tocsr()
            mat.sum_duplicates()
            self._cache[key] = mat
        return self._cache[key]

    def is_closed(self):
        return self.offending_boundary_face() is None

    def offending_boundary_face(self):
        """Index of an (n-1)-simplex without exactly 2 cofaces, or None."""
        counts = np.bincount(self.facets[self.dim].ravel(),
                             minlength=self.n_simplices(self.dim - 1))
        bad = np.nonzero(counts != 2)[0]
        return int(bad[0]) if len(bad) else None

    def require_closed(self):
        bad = self.offending_boundary_face()
        if bad is not None:
            ids = self.simplices[self.dim - 1][bad].tolist()
            raise MeshError(f"complex is not closed at ({self.dim - 1})-simplex {ids}")

    def require_embedded(self):
        if not self.embedded:
            raise MeshError("operation requires an embedded complex")

    # --------------------------------------------------------------- geometry

    def _geom(self):
        self.require_embedded()
        key = "geom"
        if key not in self._cache:
            n = self.dim
            c = self.simplex_coords[n]
            E = np.transpose(c[:, 1:, :] - c[:, :1, :], (0, 2, 1))  # (N, d, n)
            EtE = np.einsum("sdi,sdj->sij", E, E)
            det = np.linalg.det(EtE)
            if np.any(det <= 0) or np.any(np.sqrt(np.abs(det)) < 1e-13):
                bad = int(np.argmin(det))
                raise MeshError(f"degenerate (zero-volume) top simplex index {bad}")
            vols = np.sqrt(det) / _factorial(n)
            inv = np.linalg.inv(EtE)
            grads_pos = np.einsum("sdi,sij->sjd", E, inv)  # (N, n, d): grad mu_i, i>=1
            grads = np.concatenate([-grads_pos.sum(axis=1, keepdims=True), grads_pos], axis=1)
            gram = np.einsum("sid,sjd->sij", grads, grads)  # (N, n+1, n+1)
            # Signed Jacobian in 2D (orientation of the increasing-order simplex).
            sdet = np.linalg.det(E) if E.shape[1] == E.shape[2] else None
            self._cache[key] = {"E": E, "vol": vols, "grads": grads, "gram": gram,
                                "sdet": sdet}
        return self._cache[key]

    @property
    def top_volumes(self):
        return self._geom()["vol"]

    @property
    def top_grads(self):
        return self._geom()["grads"]

    @property
    def top_gram(self):
        return self._geom()["gram"]

    @property
    def top_edge_mats(self):
        return self._geom()["E"]

    @property
    def top_signed_dets(self):
        return self._geom()["sdet"]

    def mesh_quality(self):
        self.require_embedded()
        n = self.dim
        c = self.simplex_coords[n]
        diam = 0.0
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                d = np.linalg.norm(c[:, i, :] - c[:, j, :], axis=1)
                diam = max(diam, float(d.max()))
        vols = self.top_volumes
        fullness = float((vols / diam ** n).min())
        return MeshQuality(eta=diam, fullness=fullness, counts=self.counts())

    # -------------------------------------------------------------- subfaces

    def face_of(self, degree, idx, positions):
        """Index of the face of a degree-``degree`` simplex at local positions."""
        cur = int(idx)
        present = list(range(degree + 1))
        target = set(positions)
        for k in range(degree, len(positions) - 1, -1):
            drop = max(i for i, p in enumerate(present) if p not in target)
            cur = int(self.facets[k][cur, drop])
            del present[drop]
        return cur

    def subface_index(self, top_idx, positions):
        """Index of the face of a top simplex spanned by the given local positions."""
        return self.face_of(self.dim, top_idx, positions)

    def faces_of_top(self, k):
        """(N_top, C(n+1, k+1)) global face indices, combinations in lex order."""
        key = ("faces_of_top", k)
        if key not in self._cache:
            n = self.dim
            combs = list(combinations(range(n + 1), k + 1))
            out = np.empty((self.n_simplices(n), len(combs)), dtype=np.int64)
            for s in range(self.n_simplices(n)):
                for j, pos in enumerate(combs):
                    out[s, j] = self.subface_index(s, pos)
            self._cache[key] = (out, combs)
        return self._cache[key]

    def top_reference(self, k):
        """For each k-simplex, one (top index, local positions) containing it."""
        key = ("top_ref", k)
        if key not in self._cache:
            table, combs = self.faces_of_top(k)
            ref = [None] * self.n_simplices(k)
            for s in range(table.shape[0]):
                for j, pos in enumerate(combs):
                    f = table[s, j]
                    if ref[f] is None:
                        ref[f] = (s, pos)
            if any(r is None for r in ref):
                raise MeshError(f"{k}-simplex without a top coface")
            self._cache[key] = ref
        return self._cache[key]


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _unwrap_cells(cells, vertex_coords, periods):
    """Minimal-image unwrapped coordinates per cell, anchored at the first vertex."""
    coords = vertex_coords[cells]  # (T, n+1, d)
    if periods is None:
        return coords
    p = np.asarray(periods, dtype=float)
    off = coords - coords[:, :1, :]
    for axis in range(len(p)):
        if p[axis] > 0:
            o = off[:, :, axis]
            o = np.mod(o + p[axis] / 2, p[axis]) - p[axis] / 2
            o[o <= -p[axis] / 2 + 1e-12] += p[axis]  # break ties toward +p/2
            off[:, :, axis] = o
    return coords[:, :1, :] + off


# ---------------------------------------------------------------------- builders

def build_flat_torus(n_resolution, dim=2):
    """Triangulation of the flat unit torus T^dim on an n x n (x n) grid.

    For dim 2 each grid square is split along the (i,j)-(i+1,j+1) diagonal;
    for dim 3 each cube is split into 6 Freudenthal tetrahedra.
    """
    n = int(n_resolution)
    if n < 2:
        raise MeshError("torus resolution must be >= 2")
    if dim == 2:
        h = 1.0 / n
        vid = lambda i, j: (i % n) * n + (j % n)
        verts = np.array([[i * h, j * h] for i in range(n) for j in range(n)])
        cells, coords = [], []
        for i in range(n):
            for j in range(n):
                a, b = (i, j), (i + 1, j)
                c, d = (i, j + 1), (i + 1, j + 1)
                for tri in ((a, b, d), (a, d, c)):
                    cells.append([vid(i_, j_) for i_, j_ in tri])
                    coords.append([[i_ * h, j_ * h] for i_, j_ in tri])
        return SimplicialComplex.from_cells(
            2, n * n, np.array(cells), vertex_coords=verts,
            cell_coords=np.array(coords), periods=np.array([1.0, 1.0]))
    if dim == 3:
        h = 1.0 / n
        vid = lambda i, j, k: ((i % n) * n + (j % n)) * n + (k % n)
        verts = np.array([[i * h, j * h, k * h]
                          for i in range(n) for j in range(n) for k in range(n)])
        cells, coords = [], []
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    base = np.array([i, j, k])
                    for perm in permutations(range(3)):
                        corners = [base.copy()]
                        cur = base.copy()
                        for axis in perm:
                            cur = cur.copy()
                            cur[axis] += 1
                            corners.append(cur)
                        cells.append([vid(*c) for c in corners])
                        coords.append([c * h for c in corners])
        return SimplicialComplex.from_cells(
            3, n ** 3, np.array(cells), vertex_coords=verts,
            cell_coords=np.array(coords, dtype=float),
            periods=np.array([1.0, 1.0, 1.0]))
    raise MeshError(f"unsupported torus dimension: {dim}")


def build_icosahedron_sphere():
    """The icosahedron boundary: a closed 2-complex embedded in R^3."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = []
    for a, b in [(1, phi), (-1, phi), (1, -phi), (-1, -phi)]:
        verts.append([0, a, b])
    for a, b in [(1, phi), (-1, phi), (1, -phi), (-1, -phi)]:
        verts.append([a, b, 0])
    for a, b in [(1, phi), (-1, phi), (1, -phi), (-1, -phi)]:
        verts.append([b, 0, a])
    verts = np.array(verts, dtype=float)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    # Faces from the convex hull (deterministic for a fixed vertex set).
    from scipy.spatial import ConvexHull
    hull = ConvexHull(verts)
    return SimplicialComplex.from_cells(2, len(verts), hull.simplices,
                                        vertex_coords=verts)


def subdivide(complex_, scheme="edgewise"):
    """Edgewise (midpoint) subdivision; halves the mesh size, keeps fullness in 2D."""
    if scheme != "edgewise":
        raise MeshError(f"unsupported subdivision scheme: {scheme}")
    complex_.require_embedded()
    n = complex_.dim
    if n not in (2, 3):
        raise MeshError(f"edgewise subdivision unsupported for dimension {n}")
    V = complex_.n_vertices
    periods = complex_.periods
    # New vertex per edge (global edge index), coordinates wrapped to the domain.
    edge_coords = complex_.simplex_coords[1]
    mids = edge_coords.mean(axis=1)
    if periods is not None:
        p = np.asarray(periods, dtype=float)
        for axis in range(len(p)):
            if p[axis] > 0:
                mids[:, axis] = np.mod(mids[:, axis], p[axis])
    new_vertex_coords = np.vstack([complex_.vertex_coords, mids])

    tops = complex_.simplices[n]
    top_coords = complex_.simplex_coords[n]
    edge_table, edge_combs = complex_.faces_of_top(1)

    def mid_id(s, pi, pj):
        j = edge_combs.index((min(pi, pj), max(pi, pj)))
        return V + int(edge_table[s, j])

    cells, cell_coords = [], []
    if n == 2:
        children = [((0,), (0, 1), (0, 2)), ((1,), (0, 1), (1, 2)),
                    ((2,), (0, 2), (1, 2)), ((0, 1), (0, 2), (1, 2))]
    else:
        # Bey's red refinement: 4 corner tets + 4 interior tets on the 02-13 diagonal.
        children = [((0,), (0, 1), (0, 2), (0, 3)), ((1,), (0, 1), (1, 2), (1, 3)),
                    ((2,), (0, 2), (1, 2), (2, 3)), ((3,), (0, 3), (1, 3), (2, 3)),
                    ((0, 1), (0, 2), (0, 3), (1, 3)), ((0, 1), (0, 2), (1, 2), (1, 3)),
                    ((0, 2), (0, 3), (1, 3), (2, 3)), ((0, 2), (1, 2), (1, 3), (2, 3))]
    for s in range(len(tops)):
        for child in children:
            ids, crd = [], []
            for node in child:
                if len(node) == 1:
                    ids.append(int(tops[s, node[0]]))
                    crd.append(top_coords[s, node[0]])
                else:
                    ids.append(mid_id(s, *node))
                    crd.append(0.5 * (top_coords[s, node[0]] + top_coords[s, node[1]]))
            cells.append(ids)
            cell_coords.append(crd)
    return SimplicialComplex.from_cells(
        n, V + complex_.n_simplices(1), np.array(cells),
        vertex_coords=new_vertex_coords, cell_coords=np.array(cell_coords),
        periods=periods)


# ---------------------------------------------------------------------- file I/O

def save_complex(complex_, path):
    """Write a complex in the line-oriented cochainmesh format."""
    complex_.require_embedded()
    tops = complex_.simplices[complex_.dim]
    tuples = [tuple(t) for t in tops]
    if len(set(tuples)) != len(tuples):
        raise MeshError("complex has parallel cells with identical vertex tuples; "
                        "not representable in the mesh file format")
    d = complex_.embed_dim
    periods = complex_.periods if complex_.periods is not None else np.zeros(d)
    lines = ["cochainmesh 1",
             "dim %d embed %d periodic %s" % (
                 complex_.dim, d, " ".join(repr(float(p)) for p in periods)),
             "vertices %d" % complex_.n_vertices]
    for i, xyz in enumerate(complex_.vertex_coords):
        lines.append("%d %s" % (i, " ".join(repr(float(x)) for x in xyz)))
    lines.append("cells %d" % len(tops))
    for t in tops:
        lines.append(" ".join(str(int(v)) for v in t))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_complex(path):
    """Load a complex from the cochainmesh format; all lower faces are generated."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    try:
        if lines[0] != "cochainmesh 1":
            raise MeshError(f"bad header: {lines[0]!r}")
        hdr = lines[1].split()
        if hdr[0] != "dim" or hdr[2] != "embed" or hdr[4] != "periodic":
            raise MeshError(f"bad dimension line: {lines[1]!r}")
        dim, d = int(hdr[1]), int(hdr[3])
        periods = np.array([float(x) for x in hdr[5:5 + d]])
        pos = 2
        if not lines[pos].startswith("vertices "):
            raise MeshError("missing vertices section")
        nv = int(lines[pos].split()[1])
        pos += 1
        verts = np.empty((nv, d))
        for i in range(nv):
            parts = lines[pos + i].split()
            if int(parts[0]) != i:
                raise MeshError(f"vertex ids must be consecutive, got {parts[0]}")
            verts[i] = [float(x) for x in parts[1:1 + d]]
        pos += nv
        if not lines[pos].startswith("cells "):
            raise MeshError("missing cells section")
        nc = int(lines[pos].split()[1])
        pos += 1
        cells = np.array([[int(v) for v in lines[pos + i].split()] for i in range(nc)],
                         dtype=np.int64)
    except (IndexError, ValueError) as exc:
        raise MeshError(f"malformed mesh file: {exc}") from exc
    seen = set()
    for row in cells:
        key = tuple(sorted(row.tolist()))
        if key in seen:
            raise MeshError(f"duplicate simplex: {list(key)}")
        seen.add(key)
    use_periods = periods if np.any(periods > 0) else None
    return SimplicialComplex.from_cells(dim, nv, cells, vertex_coords=verts,
                                        periods=use_periods)
