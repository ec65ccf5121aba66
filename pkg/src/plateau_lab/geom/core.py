"""Core geometric types: ambient spaces, closed polylines, oriented triangle
meshes, and the basic measurements on them (length, area, boundary structure,
orientation, winding multiplicity).

Flat-torus support works by storing every vertex inside the fundamental
domain [0, L) and carrying an integer lattice shift on each directed triangle
edge; an edge from v to w with shift s has geometric vector
pos(w) + s * periods - pos(v).
"""

from __future__ import annotations

import numpy as np

# absolute tolerance for geometric predicates (intersections, containment)
TAU_GEOM = 1e-9


def _as_points(arr, name="points"):
    a = np.array(arr, dtype=float)
    if a.ndim != 2 or a.shape[1] != 3:
        raise ValueError("%s must be an (n, 3) array, got shape %s" % (name, a.shape))
    if not np.all(np.isfinite(a)):
        raise ValueError("%s contains non-finite coordinates" % name)
    return a


class Parallelepiped:
    """Convex parallelepiped from a planar base quad plus one lateral edge
    vector; the top face is the base translated by that vector.

    Faces are cached as (point_on_face, outward_unit_normal) pairs so that
    containment and projection queries are six half-space evaluations.
    """

    def __init__(self, base_corners, lateral):
        base = _as_points(base_corners, "base_corners")
        if base.shape[0] != 4:
            raise ValueError("base_corners must list exactly 4 points")
        lat = np.asarray(lateral, dtype=float)
        if lat.shape != (3,) or not np.all(np.isfinite(lat)):
            raise ValueError("lateral must be a finite 3-vector")
        if np.linalg.norm(lat) < TAU_GEOM:
            raise ValueError("lateral edge vector is degenerate")
        # base quad must be planar
        n = np.cross(base[1] - base[0], base[3] - base[0])
        nn = np.linalg.norm(n)
        if nn < TAU_GEOM:
            raise ValueError("base quad is degenerate")
        if abs(np.dot(base[2] - base[0], n / nn)) > 1e-9:
            raise ValueError("base quad is not planar")
        self.base = base
        self.lateral = lat
        self.top = base + lat
        self.corners = np.vstack([self.base, self.top])
        center = self.corners.mean(axis=0)

        # six faces: base, top, and one quad per base edge swept along lateral
        quads = [self.base, self.top]
        for i in range(4):
            j = (i + 1) % 4
            quads.append(np.array([base[i], base[j], base[j] + lat, base[i] + lat]))
        pts, nrms = [], []
        for q in quads:
            fn = np.cross(q[1] - q[0], q[3] - q[0])
            fn = fn / np.linalg.norm(fn)
            if np.dot(fn, center - q[0]) > 0:
                fn = -fn  # make it outward
            pts.append(q[0])
            nrms.append(fn)
        self._face_points = np.array(pts)
        self._face_normals = np.array(nrms)

    def signed_distances(self, points):
        """(n, 6) outward signed distances to the six face planes
        (all negative strictly inside)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.einsum("nfk,fk->nf", p[:, None, :] - self._face_points[None, :, :],
                         self._face_normals)

    def contains(self, points, tol=0.0):
        """True where a point lies inside, shrunk/grown by tol."""
        d = self.signed_distances(points)
        return np.all(d < -tol, axis=1)

    def project_outside(self, points):
        """Project interior points onto the nearest face plane; points already
        outside are returned unchanged."""
        p = np.atleast_2d(np.array(points, dtype=float))
        d = self.signed_distances(p)
        inside = np.all(d < 0, axis=1)
        if np.any(inside):
            f = np.argmax(d[inside], axis=1)  # least-deep face
            p[inside] -= d[inside, f][:, None] * self._face_normals[f]
        return p


class Ambient:
    """Flat ambient space: plain Euclidean 3-space, or a flat 3-torus with
    box periods and an optional excluded parallelepiped region."""

    def __init__(self, kind, periods=None, excluded=None):
        if kind not in ("euclidean", "flat_torus"):
            raise ValueError("unknown ambient kind %r" % kind)
        self.kind = kind
        if kind == "flat_torus":
            L = np.asarray(periods, dtype=float)
            if L.shape != (3,) or not np.all(L > 0):
                raise ValueError("flat torus needs 3 positive periods")
            self.periods = L
        else:
            if periods is not None:
                raise ValueError("euclidean ambient takes no periods")
            self.periods = None
        if excluded is not None:
            if kind != "flat_torus":
                raise ValueError("excluded region only supported on the torus")
            c = excluded.corners
            if np.any(c <= 0) or np.any(c >= self.periods[None, :]):
                raise ValueError("excluded region must lie strictly inside one "
                                 "fundamental domain")
        self.excluded = excluded

    @property
    def is_torus(self):
        return self.kind == "flat_torus"

    def wrap(self, points):
        """Wrap points into [0, L) and return (wrapped, integer_cell) where
        points == wrapped + integer_cell * periods."""
        p = np.asarray(points, dtype=float)
        if not self.is_torus:
            return p.copy(), np.zeros(p.shape, dtype=np.int64)
        n = np.floor(p / self.periods).astype(np.int64)
        w = p - n * self.periods
        # guard against w == L from roundoff
        hit = w >= self.periods
        if np.any(hit):
            w[hit] -= self.periods[np.nonzero(hit)[1]]
            n[hit] += 1
        return w, n

    def min_image_offsets(self):
        """Integer lattice offsets to scan for nearest-image computations."""
        if not self.is_torus:
            return np.zeros((1, 3), dtype=np.int64)
        r = [-1, 0, 1]
        return np.array([(i, j, k) for i in r for j in r for k in r], dtype=np.int64)

    def __eq__(self, other):
        if not isinstance(other, Ambient):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.is_torus and not np.array_equal(self.periods, other.periods):
            return False
        return True


EUCLIDEAN = Ambient("euclidean")


def flat_torus(periods, excluded=None):
    return Ambient("flat_torus", periods, excluded)


class ClosedPolyline:
    """Ordered closed loop of vertices; segment i runs from vertex i to
    vertex i+1 (mod n) with an optional integer lattice shift per segment."""

    def __init__(self, vertices, shifts=None, ambient=EUCLIDEAN):
        v = _as_points(vertices, "vertices")
        if v.shape[0] < 3:
            raise ValueError("a closed polyline needs at least 3 vertices")
        self.ambient = ambient
        if shifts is None:
            shifts = np.zeros((v.shape[0], 3), dtype=np.int64)
        s = np.asarray(shifts)
        if s.shape != v.shape:
            raise ValueError("shifts must match vertices in shape")
        if not np.issubdtype(s.dtype, np.integer):
            raise ValueError("shifts must be integers")
        if not ambient.is_torus and np.any(s != 0):
            raise ValueError("nonzero shifts in a Euclidean ambient")
        if ambient.is_torus:
            if np.any(v < 0) or np.any(v >= ambient.periods[None, :]):
                raise ValueError("torus polyline vertices must lie in the "
                                 "fundamental domain")
        self.vertices = v
        self.shifts = s.astype(np.int64)
        ev = self.segment_vectors()
        if np.any(np.linalg.norm(ev, axis=1) < TAU_GEOM):
            raise ValueError("consecutive polyline vertices coincide")

    def __len__(self):
        return self.vertices.shape[0]

    def segment_vectors(self):
        nxt = np.roll(self.vertices, -1, axis=0)
        ev = nxt - self.vertices
        if self.ambient.is_torus:
            ev = ev + self.shifts * self.ambient.periods[None, :]
        return ev

    def reversed(self):
        """Same trace, opposite orientation."""
        v = self.vertices[::-1].copy()
        # segment i of the reversed loop retraces segment n-1-i backwards
        s = -np.roll(self.shifts[::-1], -1, axis=0)
        return ClosedPolyline(v, s, self.ambient)

    def lifted_vertices(self):
        """Vertices of one lift of the loop: start at vertices[0] and
        accumulate segment vectors (n+1 points; last differs from first by
        the total lattice translation)."""
        ev = self.segment_vectors()
        out = np.zeros((len(self) + 1, 3))
        out[0] = self.vertices[0]
        out[1:] = self.vertices[0] + np.cumsum(ev, axis=0)
        return out


def polyline_length(c: ClosedPolyline) -> float:
    """Total length of a closed polyline (shift-aware on the torus)."""
    return float(np.linalg.norm(c.segment_vectors(), axis=1).sum())


class TriSurfaceMesh:
    """Oriented indexed triangle mesh.

    tri_shifts[t, k] is the integer lattice shift of the directed edge from
    corner k to corner (k+1) % 3 of triangle t (torus ambients only; None in
    Euclidean space). boundary_fixed flags the vertices a solver must pin.
    """

    def __init__(self, vertices, triangles, boundary_fixed=None,
                 tri_shifts=None, ambient=EUCLIDEAN, validate=True):
        self.vertices = _as_points(vertices, "vertices")
        tris = np.asarray(triangles)
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise ValueError("triangles must be an (nt, 3) index array")
        self.triangles = tris.astype(np.int64)
        self.ambient = ambient
        nv, nt = self.vertices.shape[0], self.triangles.shape[0]
        if ambient.is_torus:
            if tri_shifts is None:
                tri_shifts = np.zeros((nt, 3, 3), dtype=np.int64)
            ts = np.asarray(tri_shifts)
            if ts.shape != (nt, 3, 3) or not np.issubdtype(ts.dtype, np.integer):
                raise ValueError("tri_shifts must be an integer (nt, 3, 3) array")
            self.tri_shifts = ts.astype(np.int64)
        else:
            if tri_shifts is not None and np.any(np.asarray(tri_shifts) != 0):
                raise ValueError("nonzero tri_shifts in a Euclidean ambient")
            self.tri_shifts = None
        if boundary_fixed is None:
            bf = np.zeros(nv, dtype=bool)
            be = self.boundary_directed_edges()
            if be.size:
                bf[be.ravel()] = True
            self.boundary_fixed = bf
        else:
            bf = np.asarray(boundary_fixed, dtype=bool)
            if bf.shape != (nv,):
                raise ValueError("boundary_fixed must be a (nv,) bool array")
            self.boundary_fixed = bf.copy()
        if validate:
            self.validate()

    # ---------- derived connectivity (recomputed on demand, cached) ----------

    def _edge_arrays(self):
        if not hasattr(self, "_edges_cache"):
            t = self.triangles
            tails = t.ravel()
            heads = t[:, [1, 2, 0]].ravel()
            self._edges_cache = (tails, heads)
        return self._edges_cache

    def directed_edge_keys(self):
        tails, heads = self._edge_arrays()
        nv = self.vertices.shape[0]
        return tails.astype(np.int64) * nv + heads

    def boundary_directed_edges(self):
        """(nb, 2) array of boundary directed edges (tail, head), in the
        orientation induced by their triangles."""
        if not hasattr(self, "_bedges_cache"):
            tails, heads = self._edge_arrays()
            nv = self.vertices.shape[0]
            keys = tails.astype(np.int64) * nv + heads
            rev = heads.astype(np.int64) * nv + tails
            has_rev = np.isin(rev, keys)
            self._bedges_cache = np.column_stack([tails[~has_rev], heads[~has_rev]])
        return self._bedges_cache

    def corner_edge_vectors(self):
        """(nt, 3, 3) geometric vectors of directed corner edges k -> k+1."""
        P = self.vertices
        t = self.triangles
        ev = P[t[:, [1, 2, 0]]] - P[t]
        if self.ambient.is_torus:
            ev = ev + self.tri_shifts * self.ambient.periods[None, None, :]
        return ev

    def lifted_triangles(self):
        """(nt, 3, 3) per-triangle lift: corner 0 at its stored position, the
        other corners placed by accumulating shift-aware edge vectors."""
        ev = self.corner_edge_vectors()
        out = np.empty((self.triangles.shape[0], 3, 3))
        out[:, 0] = self.vertices[self.triangles[:, 0]]
        out[:, 1] = out[:, 0] + ev[:, 0]
        out[:, 2] = out[:, 1] + ev[:, 1]
        return out

    def triangle_areas(self):
        ev = self.corner_edge_vectors()
        cr = np.cross(ev[:, 0], -ev[:, 2])
        return 0.5 * np.linalg.norm(cr, axis=1)

    def triangle_normals(self):
        """Unit normals; zero vector for degenerate triangles."""
        ev = self.corner_edge_vectors()
        cr = np.cross(ev[:, 0], -ev[:, 2])
        nn = np.linalg.norm(cr, axis=1)
        out = np.zeros_like(cr)
        ok = nn > TAU_GEOM**2
        out[ok] = cr[ok] / nn[ok, None]
        return out

    # ---------- structural validation ----------

    def validate(self):
        nv = self.vertices.shape[0]
        t = self.triangles
        if t.size == 0:
            raise ValueError("mesh has no triangles")
        if t.min() < 0 or t.max() >= nv:
            raise ValueError("triangle indices out of range")
        if np.any(t[:, 0] == t[:, 1]) or np.any(t[:, 1] == t[:, 2]) or \
           np.any(t[:, 0] == t[:, 2]):
            raise ValueError("triangle with repeated vertex index")
        tails, heads = self._edge_arrays()
        und = np.minimum(tails, heads).astype(np.int64) * nv + np.maximum(tails, heads)
        _, counts = np.unique(und, return_counts=True)
        if np.any(counts > 2):
            raise ValueError("an edge is shared by more than 2 triangles")
        if self.ambient.is_torus:
            if np.any(self.tri_shifts.sum(axis=1) != 0):
                raise ValueError("shift sum around a triangle is nonzero")
            L = self.ambient.periods
            if np.any(self.vertices < 0) or np.any(self.vertices >= L[None, :]):
                raise ValueError("torus mesh vertices must lie in the "
                                 "fundamental domain")
            self._validate_shift_antisymmetry()
        return self

    def _validate_shift_antisymmetry(self):
        nv = self.vertices.shape[0]
        tails, heads = self._edge_arrays()
        shifts = self.tri_shifts.reshape(-1, 3)
        order = np.lexsort((heads, tails))
        und = np.minimum(tails, heads).astype(np.int64) * nv + np.maximum(tails, heads)
        o2 = np.argsort(und, kind="stable")
        uk, start = np.unique(und[o2], return_index=True)
        for i, s0 in enumerate(start):
            s1 = start[i + 1] if i + 1 < len(start) else len(und)
            if s1 - s0 == 2:
                e0, e1 = o2[s0], o2[s1 - 1]
                same_dir = tails[e0] == tails[e1]
                a, b = shifts[e0], shifts[e1]
                if same_dir:
                    if np.any(a != b):
                        raise ValueError("inconsistent shifts on a repeated "
                                         "directed edge")
                else:
                    if np.any(a != -b):
                        raise ValueError("edge shifts are not antisymmetric")

    # ---------- topology / orientation queries ----------

    def euler_characteristic(self):
        nv = self.vertices.shape[0]
        nv_used = np.unique(self.triangles).size
        tails, heads = self._edge_arrays()
        und = np.minimum(tails, heads).astype(np.int64) * nv + np.maximum(tails, heads)
        ne = np.unique(und).size
        return int(nv_used - ne + self.triangles.shape[0])

    def connected_components(self):
        """Number of triangle-connected components (shared-edge adjacency)."""
        nv = self.vertices.shape[0]
        nt = self.triangles.shape[0]
        # union-find over vertices through edges, then count distinct roots
        parent = np.arange(nv)

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for tri in self.triangles:
            a = find(tri[0])
            for v in tri[1:]:
                b = find(v)
                parent[b] = a
        roots = {find(self.triangles[k, 0]) for k in range(nt)}
        return len(roots)

    def replace_vertices(self, new_positions, rewrap=False):
        """Same connectivity with moved vertices. With rewrap=True (torus),
        positions are wrapped back into the fundamental domain and the edge
        shifts updated so every geometric edge vector is unchanged."""
        p = _as_points(new_positions, "new_positions")
        if p.shape != self.vertices.shape:
            raise ValueError("vertex array shape changed")
        shifts = self.tri_shifts
        if self.ambient.is_torus and rewrap:
            p, n = self.ambient.wrap(p)
            t = self.triangles
            # shift' = shift + n(head) - n(tail) keeps pos(w)+sL-pos(v) fixed
            shifts = self.tri_shifts + n[t[:, [1, 2, 0]]] - n[t]
        return TriSurfaceMesh(p, self.triangles, self.boundary_fixed,
                              shifts, self.ambient, validate=False)


# ---------- module-level operations ----------


def edge_vector(m: TriSurfaceMesh, v: int, w: int):
    """Geometric vector of mesh edge (v, w): pos(w) + shift * L - pos(v)."""
    t = m.triangles
    tails = t.ravel()
    heads = t[:, [1, 2, 0]].ravel()
    fwd = np.nonzero((tails == v) & (heads == w))[0]
    if fwd.size:
        k = fwd[0]
        ev = m.corner_edge_vectors().reshape(-1, 3)
        return ev[k].copy()
    rev = np.nonzero((tails == w) & (heads == v))[0]
    if rev.size:
        k = rev[0]
        ev = m.corner_edge_vectors().reshape(-1, 3)
        return -ev[k]
    raise ValueError("(%d, %d) is not a mesh edge" % (v, w))


def mesh_area(m: TriSurfaceMesh) -> float:
    """Total surface area: sum of 0.5 * |e1 x e2| over triangles."""
    return float(m.triangle_areas().sum())


def is_coherently_oriented(m: TriSurfaceMesh) -> bool:
    """True iff no directed edge is traversed twice in the same direction,
    i.e. every interior edge is run oppositely by its two triangles."""
    keys = m.directed_edge_keys()
    return np.unique(keys).size == keys.size


def euler_characteristic(m: TriSurfaceMesh) -> int:
    return m.euler_characteristic()


def boundary_loops(m: TriSurfaceMesh):
    """Chain the boundary edges into oriented closed polylines. Each boundary
    edge is used exactly once; orientation is the one induced by the
    triangles."""
    be = m.boundary_directed_edges()
    if be.size == 0:
        return []
    # shifts of boundary edges (torus)
    if m.ambient.is_torus:
        tails, heads = m._edge_arrays()
        nv = m.vertices.shape[0]
        keymap = {}
        flat_shifts = m.tri_shifts.reshape(-1, 3)
        keys = tails.astype(np.int64) * nv + heads
        rev = heads.astype(np.int64) * nv + tails
        has_rev = np.isin(rev, keys)
        for idx in np.nonzero(~has_rev)[0]:
            keymap[(int(tails[idx]), int(heads[idx]))] = flat_shifts[idx]
    out_map = {}
    for tail, head in be:
        out_map.setdefault(int(tail), []).append(int(head))
    for v in out_map:
        out_map[v].sort()
    loops = []
    used = set()
    for start_tail, start_head in sorted((int(a), int(b)) for a, b in be):
        if (start_tail, start_head) in used:
            continue
        verts = [start_tail]
        shifts = []
        cur = (start_tail, start_head)
        while True:
            used.add(cur)
            if m.ambient.is_torus:
                shifts.append(keymap[cur])
            else:
                shifts.append(np.zeros(3, dtype=np.int64))
            tail, head = cur
            if head == verts[0]:
                break
            verts.append(head)
            nxts = [h for h in out_map[head] if (head, h) not in used]
            if not nxts:
                raise ValueError("boundary chaining failed at vertex %d" % head)
            cur = (head, nxts[0])
        loops.append(ClosedPolyline(m.vertices[verts], np.array(shifts),
                                    m.ambient))
    return loops


def _point_segment_distances(points, seg_a, seg_vec):
    """Distances from each point to each segment (broadcast: np x ns)."""
    d = points[:, None, :] - seg_a[None, :, :]
    L2 = np.einsum("sk,sk->s", seg_vec, seg_vec)
    t = np.einsum("psk,sk->ps", d, seg_vec) / np.maximum(L2, 1e-300)
    t = np.clip(t, 0.0, 1.0)
    closest = seg_a[None, :, :] + t[:, :, None] * seg_vec[None, :, :]
    return np.linalg.norm(points[:, None, :] - closest, axis=2), t


def distance_to_polyline(points, target: ClosedPolyline):
    """Per-point distance to the trace of a closed polyline, plus the
    arclength parameter of the nearest point (shift-aware on the torus)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    lifted = target.lifted_vertices()
    seg_a = lifted[:-1]
    seg_vec = lifted[1:] - lifted[:-1]
    seg_len = np.linalg.norm(seg_vec, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    offsets = target.ambient.min_image_offsets()
    if target.ambient.is_torus:
        offsets = offsets * target.ambient.periods[None, :]
    else:
        offsets = offsets.astype(float)
    best_d = np.full(pts.shape[0], np.inf)
    best_s = np.zeros(pts.shape[0])
    for off in offsets:
        dmat, tmat = _point_segment_distances(pts + off, seg_a, seg_vec)
        j = np.argmin(dmat, axis=1)
        dj = dmat[np.arange(pts.shape[0]), j]
        better = dj < best_d
        best_d[better] = dj[better]
        best_s[better] = cum[j[better]] + tmat[better, j[better]] * seg_len[j[better]]
    return best_d, best_s, float(cum[-1])


def boundary_multiplicity(m: TriSurfaceMesh, target: ClosedPolyline,
                          tol: float) -> int:
    """Signed total winding of the mesh boundary over a target curve.

    Every boundary loop must stay within tol of the target trace (otherwise a
    ValueError names the offending loop); each loop's degree is the signed
    number of times it runs around the target, and the result is the sum.
    """
    loops = boundary_loops(m)
    if not loops:
        return 0
    total = 0
    for li, loop in enumerate(loops):
        d, s, total_len = distance_to_polyline(loop.vertices, target)
        if np.max(d) > tol:
            raise ValueError("boundary loop %d strays %.3g from the target "
                             "(tol %.3g)" % (li, float(np.max(d)), tol))
        ds = np.diff(np.concatenate([s, s[:1]]))
        ds = (ds + total_len / 2.0) % total_len - total_len / 2.0
        w = ds.sum() / total_len
        wi = int(round(w))
        if abs(w - wi) > 0.05:
            raise ValueError("boundary loop %d has non-integer winding %.4f"
                             % (li, w))
        total += wi
    return total
