"""Triangle-triangle intersection tests, a small AABB tree, mesh
self-intersection search, and surface-surface intersection curves.

All predicates treat triangles as closed sets with absolute tolerance
TAU_GEOM; coplanar overlaps count as intersections (the conservative choice
when the question is embeddedness).
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np

from .core import TAU_GEOM, ClosedPolyline, TriSurfaceMesh


# ---------------------------------------------------------------- AABB tree

class AABBTree:
    """Static axis-aligned bounding box tree over a set of boxes
    (median split along the widest axis, small numpy-backed nodes)."""

    def __init__(self, lo, hi, leaf_size=8):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        self.lo = lo
        self.hi = hi
        n = lo.shape[0]
        # nodes: (node_lo, node_hi, left, right, start, count); leaves use
        # start/count into self.order, internal nodes use left/right
        self.node_lo = []
        self.node_hi = []
        self.left = []
        self.right = []
        self.start = []
        self.count = []
        self.order = np.arange(n)
        self._build(0, n, leaf_size)

    def _build(self, s, e, leaf_size):
        idx = len(self.node_lo)
        sub = self.order[s:e]
        nlo = self.lo[sub].min(axis=0)
        nhi = self.hi[sub].max(axis=0)
        self.node_lo.append(nlo)
        self.node_hi.append(nhi)
        self.left.append(-1)
        self.right.append(-1)
        self.start.append(s)
        self.count.append(e - s)
        if e - s > leaf_size:
            axis = int(np.argmax(nhi - nlo))
            centers = 0.5 * (self.lo[sub, axis] + self.hi[sub, axis])
            half = (e - s) // 2
            part = np.argpartition(centers, half)
            self.order[s:e] = sub[part]
            mid = s + half
            self.left[idx] = len(self.node_lo)
            self._build(s, mid, leaf_size)
            self.right[idx] = len(self.node_lo)
            self._build(mid, e, leaf_size)
            self.count[idx] = -1  # internal
        return idx

    def finalize(self):
        self.node_lo = np.array(self.node_lo)
        self.node_hi = np.array(self.node_hi)
        return self

    def pair_candidates(self, other, tol=TAU_GEOM, offset=None):
        """Index pairs (i from self, j from other) whose boxes overlap after
        shifting the other tree's boxes by `offset`."""
        off = np.zeros(3) if offset is None else np.asarray(offset, dtype=float)
        out = []
        stack = [(0, 0)]
        while stack:
            a, b = stack.pop()
            if np.any(self.node_lo[a] - tol > other.node_hi[b] + off + tol) or \
               np.any(self.node_hi[a] + tol < other.node_lo[b] + off - tol):
                continue
            leaf_a = self.count[a] >= 0
            leaf_b = other.count[b] >= 0
            if leaf_a and leaf_b:
                ia = self.order[self.start[a]:self.start[a] + self.count[a]]
                jb = other.order[other.start[b]:other.start[b] + other.count[b]]
                for i in ia:
                    ok = np.all(self.hi[i] + tol >= other.lo[jb] + off,
                                axis=1)
                    ok &= np.all(self.lo[i] - tol <= other.hi[jb] + off,
                                 axis=1)
                    for j in jb[ok]:
                        out.append((int(i), int(j)))
            elif leaf_a:
                stack.append((a, other.left[b]))
                stack.append((a, other.right[b]))
            elif leaf_b:
                stack.append((self.left[a], b))
                stack.append((self.right[a], b))
            else:
                stack.append((self.left[a], other.left[b]))
                stack.append((self.left[a], other.right[b]))
                stack.append((self.right[a], other.left[b]))
                stack.append((self.right[a], other.right[b]))
        return out

    def self_candidates(self, tol=TAU_GEOM):
        """Unordered index pairs i < j with overlapping boxes."""
        pairs = self.pair_candidates(self, tol=tol)
        return sorted({(min(i, j), max(i, j)) for i, j in pairs if i != j})


def tri_boxes(tris):
    """(lo, hi) arrays for an (nt, 3, 3) triangle coordinate array."""
    return tris.min(axis=1), tris.max(axis=1)


# ------------------------------------------------------- triangle-triangle

def _plane_basis(n):
    e1 = np.cross(n, [0.0, 0.0, 1.0])
    if np.dot(e1, e1) < 1e-12:
        e1 = np.cross(n, [0.0, 1.0, 0.0])
    e1 = e1 / np.linalg.norm(e1)
    return e1, np.cross(n, e1)


def _clip_segment_2d(p, q, tri2d, tol):
    """Clip segment [p, q] against a 2D triangle (closed, any orientation).
    Returns (t0, t1) parameters or None."""
    a, b, c = tri2d
    area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if area2 < 0:
        tri2d = tri2d[::-1]
    t0, t1 = 0.0, 1.0
    d = q - p
    for k in range(3):
        e0 = tri2d[k]
        e1 = tri2d[(k + 1) % 3]
        ex, ey = e1[0] - e0[0], e1[1] - e0[1]
        f0 = ex * (p[1] - e0[1]) - ey * (p[0] - e0[0])
        fd = ex * d[1] - ey * d[0]
        # inside means f >= -tol; f(t) = f0 + t * fd
        if abs(fd) < 1e-300:
            if f0 < -tol:
                return None
            continue
        tc = (-tol - f0) / fd
        if fd > 0:
            t0 = max(t0, tc)
        else:
            t1 = min(t1, tc)
        if t0 > t1:
            return None
    return t0, t1


def _clip_polygon_2d(poly, tri2d, tol):
    """Sutherland-Hodgman clip of a polygon by a 2D triangle."""
    a, b, c = tri2d
    area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if area2 < 0:
        tri2d = tri2d[::-1]
    out = [np.asarray(p, dtype=float) for p in poly]
    for k in range(3):
        if not out:
            return []
        e0, e1 = tri2d[k], tri2d[(k + 1) % 3]
        ex, ey = e1[0] - e0[0], e1[1] - e0[1]
        nxt = []
        f = [ex * (p[1] - e0[1]) - ey * (p[0] - e0[0]) for p in out]
        m = len(out)
        for i in range(m):
            j = (i + 1) % m
            if f[i] >= -tol:
                nxt.append(out[i])
            if (f[i] >= -tol) != (f[j] >= -tol):
                t = f[i] / (f[i] - f[j])
                nxt.append(out[i] + t * (out[j] - out[i]))
        out = nxt
    return out


def tri_tri_intersection(T1, T2, tol=TAU_GEOM):
    """Geometric intersection of two closed triangles.

    Returns (kind, points): kind is None (disjoint), "segment" (points is a
    (2, 3) array, possibly degenerate), or "coplanar" (points is the overlap
    polygon, (m, 3)).
    """
    T1 = np.asarray(T1, dtype=float)
    T2 = np.asarray(T2, dtype=float)
    n2 = np.cross(T2[1] - T2[0], T2[2] - T2[0])
    nn2 = np.linalg.norm(n2)
    if nn2 < 1e-300:
        return None, None
    n2 = n2 / nn2
    d1 = (T1 - T2[0]) @ n2
    d1 = np.where(np.abs(d1) < tol, 0.0, d1)
    if np.all(d1 > 0) or np.all(d1 < 0):
        return None, None

    e1b, e2b = _plane_basis(n2)

    def to2d(pts):
        rel = np.atleast_2d(pts) - T2[0]
        return np.column_stack([rel @ e1b, rel @ e2b])

    tri2d = to2d(T2)

    if np.all(d1 == 0):  # coplanar
        poly = _clip_polygon_2d(to2d(T1), tri2d, tol)
        if len(poly) < 2:
            return None, None
        poly3 = np.array([T2[0] + p[0] * e1b + p[1] * e2b for p in poly])
        if len(poly) == 2:
            return "segment", poly3
        d = np.linalg.norm(poly3 - poly3.mean(axis=0), axis=1).max()
        if d <= tol:
            return None, None
        return "coplanar", poly3

    # quick reject against T1's plane as well
    n1 = np.cross(T1[1] - T1[0], T1[2] - T1[0])
    nn1 = np.linalg.norm(n1)
    if nn1 > 1e-300:
        d2 = (T2 - T1[0]) @ (n1 / nn1)
        d2 = np.where(np.abs(d2) < tol, 0.0, d2)
        if np.all(d2 > 0) or np.all(d2 < 0):
            return None, None

    # points of T1 on plane(T2): on-plane vertices plus crossing edge points
    pts = [T1[k] for k in range(3) if d1[k] == 0]
    for k in range(3):
        a, b = k, (k + 1) % 3
        if d1[a] * d1[b] < 0:
            t = d1[a] / (d1[a] - d1[b])
            pts.append(T1[a] + t * (T1[b] - T1[a]))
    if not pts:
        return None, None
    P = np.array(pts)
    if P.shape[0] == 1:
        p2 = to2d(P[0])[0]
        seg = _clip_segment_2d(p2, p2, tri2d, tol)
        if seg is None:
            return None, None
        return "segment", np.array([P[0], P[0]])
    # keep the two extreme points along the segment direction
    if P.shape[0] > 2:
        dvec = P[-1] - P[0]
        if np.dot(dvec, dvec) < 1e-300:
            dvec = P[1] - P[0]
        t = P @ dvec
        P = np.array([P[np.argmin(t)], P[np.argmax(t)]])
    p2d, q2d = to2d(P[0])[0], to2d(P[1])[0]
    clip = _clip_segment_2d(p2d, q2d, tri2d, tol)
    if clip is None:
        return None, None
    t0, t1 = clip
    seg = np.array([P[0] + t0 * (P[1] - P[0]), P[0] + t1 * (P[1] - P[0])])
    return "segment", seg


def _intersection_measure(kind, pts):
    if kind is None:
        return 0.0
    if kind == "segment":
        return float(np.linalg.norm(pts[1] - pts[0]))
    # coplanar polygon: diameter
    c = pts.mean(axis=0)
    return 2.0 * float(np.linalg.norm(pts - c, axis=1).max())


# --------------------------------------------------------- mesh level ops

def _mesh_tree(lifted):
    lo, hi = tri_boxes(lifted)
    return AABBTree(lo, hi).finalize()


def _lattice_offsets(ambient):
    if not ambient.is_torus:
        return [np.zeros(3)]
    offs = ambient.min_image_offsets().astype(float) * ambient.periods[None, :]
    return list(offs)


def self_intersections(m: TriSurfaceMesh, tol=TAU_GEOM):
    """All non-adjacent triangle pairs (sharing no vertex index) with a
    nonempty geometric intersection, as a sorted list of (i, j) with i < j.

    Torus meshes are tested on per-triangle lifts against the 27 nearest
    lattice images, so wrap-around contacts are found too.
    """
    lifted = m.lifted_triangles()
    tree = _mesh_tree(lifted)
    tris = m.triangles
    found = set()
    for off in _lattice_offsets(m.ambient):
        zero_off = np.all(off == 0)
        for i, j in tree.pair_candidates(tree, tol=tol, offset=off):
            if i == j and zero_off:
                continue
            a, b = (i, j) if i < j else (j, i)
            if (a, b) in found:
                continue
            if len(set(tris[a]) & set(tris[b])) > 0:
                continue
            kind, pts = tri_tri_intersection(lifted[i], lifted[j] + off, tol)
            if _intersection_measure(kind, pts) > tol:
                found.add((a, b))
    return sorted(found)


IntersectionCurve = namedtuple("IntersectionCurve", "points shifts closed")


def _cluster_points(pts, merge_tol, ambient):
    """Union-find clustering of near-coincident points (torus-aware).

    Returns (cluster id per point, representative position per cluster id);
    representatives are the lexicographically smallest member, so the result
    does not depend on input order.
    """
    from scipy.spatial import cKDTree

    n = pts.shape[0]
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if ambient.is_torus:
        L = ambient.periods
        # guard against wrapped coordinates sitting exactly on the period
        tree = cKDTree(np.mod(pts, L[None, :]), boxsize=L)
    else:
        tree = cKDTree(pts)
    for i, j in tree.query_pairs(merge_tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(n)])
    reps = {}
    for i in range(n):
        r = roots[i]
        key = tuple(pts[i])
        if r not in reps or key < reps[r]:
            reps[r] = key
    cid = {r: k for k, r in enumerate(sorted(reps))}
    rep_pos = np.array([reps[r] for r in sorted(reps)])
    return np.array([cid[r] for r in roots]), rep_pos


def surface_intersection(mA: TriSurfaceMesh, mB: TriSurfaceMesh,
                         tol=TAU_GEOM, merge_tol=1e-6):
    """Intersection curves of two meshes in the same ambient.

    Collects the segment of every intersecting triangle pair, merges
    endpoints that agree within merge_tol (clip tolerances leave gaps of a
    few times TAU_GEOM at triangle-edge crossings), and chains the result
    into polylines. Each returned curve is either closed or ends on a mesh
    boundary. Points are wrapped into the fundamental domain on the torus,
    with per-segment lattice shifts.
    """
    if not (mA.ambient == mB.ambient):
        raise ValueError("meshes live in different ambients")
    ambient = mA.ambient
    la = mA.lifted_triangles()
    lb = mB.lifted_triangles()
    ta = _mesh_tree(la)
    tb = _mesh_tree(lb)

    def wrap_point(p):
        if ambient.is_torus:
            w, n = ambient.wrap(p)
            return w[0] if w.ndim == 2 else w, (n[0] if n.ndim == 2 else n)
        return p, np.zeros(3, dtype=np.int64)

    raw = {}
    for off in _lattice_offsets(ambient):
        for i, j in ta.pair_candidates(tb, tol=tol, offset=off):
            kind, pts = tri_tri_intersection(la[i], lb[j] + off, tol)
            if kind is None:
                continue
            if kind == "segment":
                pieces = [pts]
            else:  # coplanar polygon boundary
                pieces = [np.array([pts[k], pts[(k + 1) % len(pts)]])
                          for k in range(len(pts))]
            for seg in pieces:
                if np.linalg.norm(seg[1] - seg[0]) <= tol:
                    continue
                (w0, n0) = wrap_point(seg[0])
                (w1, n1) = wrap_point(seg[1])
                k0 = tuple(np.round(w0, 9))
                k1 = tuple(np.round(w1, 9))
                if k0 == k1:
                    continue
                key = (min(k0, k1), max(k0, k1))
                if key not in raw:
                    shift = (n1 - n0).astype(np.int64)
                    raw[key] = (np.array(w0), np.array(w1), shift)

    if not raw:
        return []
    ends = np.array([w for w0, w1, _ in raw.values() for w in (w0, w1)])
    cids, rep_pos = _cluster_points(ends, merge_tol, ambient)
    L = ambient.periods

    # re-anchor every segment onto representative endpoints; the lattice
    # shift picks up the wrap difference between member and representative
    segs = {}
    for k, (w0, w1, sh) in enumerate(raw.values()):
        ca, cb = int(cids[2 * k]), int(cids[2 * k + 1])
        if ca == cb:
            continue
        if ambient.is_torus:
            sh = sh + np.rint((w1 - rep_pos[cb]) / L).astype(np.int64) \
                - np.rint((w0 - rep_pos[ca]) / L).astype(np.int64)
        if ca < cb:
            key = (ca, cb, tuple(sh))
            segs[key] = (ca, cb, sh)
        else:
            key = (cb, ca, tuple(-sh))
            segs[key] = (cb, ca, -sh)

    adj = {}
    for key in segs:
        ca, cb, _ = segs[key]
        adj.setdefault(ca, []).append(key)
        adj.setdefault(cb, []).append(key)
    for v in adj.values():
        v.sort()

    used = set()
    curves = []

    def emit(node):
        return rep_pos[node]

    def walk(start, first_seg):
        pts = []
        shs = []
        cur = start
        seg = first_seg
        while True:
            used.add(seg)
            ca, cb, sh = segs[seg]
            if cur == ca:
                pts.append(emit(ca))
                shs.append(sh)
                nxt = cb
            else:
                pts.append(emit(cb))
                shs.append(-sh)
                nxt = ca
            cands = [s for s in adj[nxt] if s not in used]
            if nxt == start:
                return pts, shs, True
            if not cands:
                pts.append(emit(nxt))
                return pts, shs, False
            cur = nxt
            seg = cands[0]

    # open chains first (odd-degree endpoints), then cycles
    keys_sorted = sorted(segs)
    for passno in (0, 1):
        for key in keys_sorted:
            if key in used:
                continue
            ca, cb, _ = segs[key]
            if passno == 0:
                if len(adj[ca]) == 1:
                    end = ca
                elif len(adj[cb]) == 1:
                    end = cb
                else:
                    continue
                pts, shs, closed = walk(end, key)
            else:
                pts, shs, closed = walk(ca, key)
            curves.append(IntersectionCurve(
                np.array(pts), np.array(shs, dtype=np.int64), closed))
    return curves


def curve_as_polyline(curve: IntersectionCurve, ambient) -> ClosedPolyline:
    if not curve.closed:
        raise ValueError("curve is not closed")
    return ClosedPolyline(curve.points, curve.shifts, ambient)
