"""Mesh construction utilities shared by the surface builders: station
generation with forced/avoided values, structured grid patches, piece
assembly with seam welding, periodic charts with lattice-shift bookkeeping,
annulus stitching between vertex rings, and orientation propagation.
"""

from __future__ import annotations

import math

import numpy as np

from .core import EUCLIDEAN, TriSurfaceMesh


def stations(lo, hi, target, forced=(), avoid=(), avoid_tol=1e-7):
    """Monotone station array from lo to hi with spacing <= target.

    Every value in `forced` (within [lo, hi]) becomes a station exactly; no
    interior station lands within avoid_tol of a value in `avoid` (the
    subdivision count of the offending gap is bumped until clear).
    """
    if hi <= lo:
        raise ValueError("need lo < hi")
    anchors = sorted({float(lo), float(hi), *(float(f) for f in forced
                                              if lo < f < hi)})
    out = [anchors[0]]
    for a, b in zip(anchors, anchors[1:]):
        n = max(1, math.ceil((b - a) / target - 1e-12))
        for _ in range(8):
            cand = [a + (b - a) * k / n for k in range(1, n)]
            if all(abs(c - av) > avoid_tol for c in cand for av in avoid):
                break
            n += 1
        out.extend(a + (b - a) * k / n for k in range(1, n))
        out.append(b)
    return np.array(out)


def grid_patch(embed, us, vs, hole=None):
    """Structured quad grid over us x vs split into triangles.

    embed(u, v) -> 3-point. hole(u0, u1, v0, v1) -> True skips that cell.
    Returns (verts, tris, uv) with unused vertices removed.
    """
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    nu, nv = len(us), len(vs)
    verts = np.array([[*embed(u, v)] for u in us for v in vs], dtype=float)
    uv = np.array([[u, v] for u in us for v in vs], dtype=float)
    idx = np.arange(nu * nv).reshape(nu, nv)
    tris = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            if hole is not None and hole(us[i], us[i + 1], vs[j], vs[j + 1]):
                continue
            a, b, c, d = idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]
            tris.append((a, b, c))
            tris.append((a, c, d))
    if not tris:
        raise ValueError("grid patch is entirely holed out")
    return compact(verts, np.array(tris, dtype=np.int64), uv)


def compact(verts, tris, *aux):
    """Drop vertices not referenced by any triangle, remapping indices."""
    used = np.zeros(verts.shape[0], dtype=bool)
    used[tris.ravel()] = True
    remap = -np.ones(verts.shape[0], dtype=np.int64)
    remap[used] = np.arange(used.sum())
    out = [verts[used], remap[tris]]
    out.extend(a[used] for a in aux)
    return tuple(out)


def assemble_pieces(pieces, weld_decimals=9):
    """Concatenate (verts, tris, weld_mask) pieces, fusing weld-flagged
    vertices that share a rounded position key.

    Only weld-flagged vertices ever merge, so interior vertices of different
    pieces may safely coincide in space (transversal crossings stay
    transversal instead of becoming accidental gluings).
    """
    all_verts = []
    all_tris = []
    weld_map = {}
    offset = 0
    for verts, tris, weld in pieces:
        verts = np.asarray(verts, dtype=float)
        tris = np.asarray(tris, dtype=np.int64)
        weld = np.asarray(weld, dtype=bool)
        local = np.empty(verts.shape[0], dtype=np.int64)
        for i, p in enumerate(verts):
            if weld[i]:
                key = tuple(np.round(p, weld_decimals))
                if key in weld_map:
                    local[i] = weld_map[key]
                    continue
                weld_map[key] = offset
            local[i] = offset
            all_verts.append(p)
            offset += 1
        all_tris.append(local[tris])
    return np.array(all_verts), np.vstack(all_tris)


def chart_torus_mesh(embed, us, vs, ambient, u_period=None, v_period=None,
                     hole=None, validate=True):
    """Triangulated chart into a flat torus with exact shift bookkeeping.

    embed(u, v) -> lift coordinates in R^3. When u_period (resp. v_period) is
    given, the chart closes up in that direction: embed(u + u_period, v) must
    equal embed(u, v) plus an integer combination of the torus periods, and
    `us` must then cover [u0, u0 + u_period) without the duplicate endpoint.
    """
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    nu, nv = len(us), len(vs)
    L = ambient.periods

    def u_at(i):
        return us[i] if i < nu else us[i - nu] + u_period

    def v_at(j):
        return vs[j] if j < nv else vs[j - nv] + v_period

    ncu = nu if u_period is not None else nu - 1
    ncv = nv if v_period is not None else nv - 1
    if ncu < 1 or ncv < 1:
        raise ValueError("chart needs at least one cell in each direction")

    lift = np.array([[*embed(u, v)] for u in us for v in vs], dtype=float)
    pos, _ = ambient.wrap(lift)
    idx = np.arange(nu * nv).reshape(nu, nv)

    tris = []
    corner_lift = []  # (nt, 3, 3) lift coordinates of each emitted corner
    for i in range(ncu):
        for j in range(ncv):
            uu = (u_at(i), u_at(i + 1))
            vv = (v_at(j), v_at(j + 1))
            if hole is not None and hole(uu[0], uu[1], vv[0], vv[1]):
                continue
            ii = (i, (i + 1) % nu)
            jj = (j, (j + 1) % nv)
            quad_idx = [idx[ii[0], jj[0]], idx[ii[1], jj[0]],
                        idx[ii[1], jj[1]], idx[ii[0], jj[1]]]
            quad_lift = [embed(uu[0], vv[0]), embed(uu[1], vv[0]),
                         embed(uu[1], vv[1]), embed(uu[0], vv[1])]
            for corners in ((0, 1, 2), (0, 2, 3)):
                tris.append([quad_idx[k] for k in corners])
                corner_lift.append([quad_lift[k] for k in corners])
    if not tris:
        raise ValueError("chart is entirely holed out")
    tris = np.array(tris, dtype=np.int64)
    corner_lift = np.array(corner_lift, dtype=float)

    lift_edges = corner_lift[:, [1, 2, 0], :] - corner_lift
    pos_edges = pos[tris[:, [1, 2, 0]]] - pos[tris]
    shifts_f = (lift_edges - pos_edges) / L[None, None, :]
    shifts = np.rint(shifts_f).astype(np.int64)
    if np.max(np.abs(shifts_f - shifts)) > 1e-6:
        raise ValueError("chart embedding is not lattice-periodic")

    verts, tris2, keep_pos = compact(pos, tris, pos)
    return TriSurfaceMesh(keep_pos, tris2, tri_shifts=shifts, ambient=ambient,
                          validate=validate)


def orient_coherently(tris, tri_shifts=None, root=0):
    """Flip triangles so every shared edge is traversed oppositely by its two
    triangles (BFS from `root` per connected component, root kept as-is).

    Returns (tris, tri_shifts, flipped_mask); raises if non-orientable.
    """
    tris = np.array(tris, dtype=np.int64)
    nt = tris.shape[0]
    edge_tris = {}
    for t in range(nt):
        for k in range(3):
            a, b = tris[t, k], tris[t, (k + 1) % 3]
            edge_tris.setdefault((min(a, b), max(a, b)), []).append(t)
    flipped = np.zeros(nt, dtype=bool)
    seen = np.zeros(nt, dtype=bool)
    order = [root] + [t for t in range(nt) if t != root]
    for start in order:
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        while stack:
            t = stack.pop()
            tt = tris[t][::-1] if flipped[t] else tris[t]
            dir_edges = {(tt[k], tt[(k + 1) % 3]) for k in range(3)}
            for k in range(3):
                a, b = tris[t, k], tris[t, (k + 1) % 3]
                for t2 in edge_tris[(min(a, b), max(a, b))]:
                    if t2 == t:
                        continue
                    tt2 = tris[t2][::-1] if flipped[t2] else tris[t2]
                    d2 = {(tt2[k2], tt2[(k2 + 1) % 3]) for k2 in range(3)}
                    shared_same = bool(dir_edges & d2)
                    if not seen[t2]:
                        seen[t2] = True
                        if shared_same:
                            flipped[t2] = True
                        stack.append(t2)
                    else:
                        tt2f = tris[t2][::-1] if flipped[t2] else tris[t2]
                        d2f = {(tt2f[k2], tt2f[(k2 + 1) % 3]) for k2 in range(3)}
                        if dir_edges & d2f:
                            raise ValueError("mesh is not orientable")
    out = tris.copy()
    out[flipped] = out[flipped][:, ::-1]
    if tri_shifts is not None:
        ts = np.array(tri_shifts, dtype=np.int64)
        # reversing (c0,c1,c2) -> (c2,c1,c0) turns the edge list
        # (e0,e1,e2) into (-e1,-e0,-e2)
        ts[flipped] = -ts[flipped][:, [1, 0, 2], :]
        return out, ts, flipped
    return out, None, flipped


def flip_mesh_orientation(m: TriSurfaceMesh) -> TriSurfaceMesh:
    """Reverse the orientation of every triangle."""
    tris = m.triangles[:, ::-1].copy()
    shifts = None
    if m.tri_shifts is not None:
        shifts = -m.tri_shifts[:, [1, 0, 2], :]
    return TriSurfaceMesh(m.vertices.copy(), tris, m.boundary_fixed.copy(),
                          shifts, m.ambient, validate=False)


def stitch_rings(points, ring_a, ring_b, center, normal):
    """Triangulate the annulus between two closed vertex rings that are
    star-shaped around `center` in the plane with the given normal.

    ring_a is the outer ring, ring_b the inner one; both are index lists into
    `points`. Triangles come out counterclockwise as seen from +normal.
    """
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    e1 = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(n, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)

    def angles(ring):
        rel = points[ring] - np.asarray(center, dtype=float)
        th = np.arctan2(rel @ e2, rel @ e1)
        return th

    def ccw_order(ring):
        th = angles(ring)
        d = np.diff(np.concatenate([th, th[:1]]))
        d = (d + np.pi) % (2 * np.pi) - np.pi
        if d.sum() < 0:
            return list(reversed(ring))
        return list(ring)

    def march_keys(th):
        # unwrapped cumulative angle, monotonized: jagged rings may step
        # backwards in angle locally, which must not derail the merge
        d = (np.diff(th) + np.pi) % (2 * np.pi) - np.pi
        unwrapped = np.concatenate([[th[0]], th[0] + np.cumsum(d)])
        return np.maximum.accumulate(unwrapped)

    A = ccw_order(list(ring_a))
    B = ccw_order(list(ring_b))
    tha = angles(A)
    ra = int(np.argmin(march_keys(tha)))
    A = A[ra:] + A[:ra]
    tha = march_keys(angles(A))
    thb = angles(B)
    rb = int(np.argmin((thb - tha[0]) % (2 * np.pi)))
    B = B[rb:] + B[:rb]
    thb = march_keys(angles(B))
    thb = thb - 2 * np.pi * np.floor((thb[0] - tha[0]) / (2 * np.pi))

    na, nb = len(A), len(B)
    tris = []
    i = j = 0
    while i < na or j < nb:
        adv_a = False
        if i < na and j < nb:
            next_a = tha[i + 1] if i + 1 < na else tha[0] + 2 * np.pi
            next_b = thb[j + 1] if j + 1 < nb else thb[0] + 2 * np.pi
            adv_a = next_a <= next_b
        elif i < na:
            adv_a = True
        if adv_a:
            tris.append((A[i], A[(i + 1) % na], B[j % nb]))
            i += 1
        else:
            tris.append((A[i % na], B[(j + 1) % nb], B[j % nb]))
            j += 1
    return np.array(tris, dtype=np.int64)
