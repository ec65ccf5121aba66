"""Discrete Plateau solver: minimize total triangle-mesh area over interior
vertex positions with the boundary pinned.

The descent direction is an inverse-mass preconditioned conjugate gradient
(Polak-Ribiere with automatic restarts) on the per-vertex area gradient;
Armijo backtracking plus a fold-over guard keep every accepted step a strict
area decrease, so the recorded area history never increases. Periodic
improvement passes interleave intrinsic edge flips (better triangles, same
surface) with guarded vertex averaging (better vertex distribution, never an
area increase). Flat-torus meshes re-wrap into the fundamental domain after
every accepted step and project any vertex that falls into the excluded
region back onto its boundary.
"""

from __future__ import annotations

import math

import numpy as np

from .geom.core import ClosedPolyline, EUCLIDEAN, TriSurfaceMesh


class SolveOptions:
    def __init__(self, max_iters=2000, grad_tol=1e-6, step_init=0.05,
                 min_step=1e-14, improve_every=25, seed=0):
        if max_iters <= 0 or grad_tol <= 0 or step_init <= 0 or min_step <= 0 \
                or improve_every <= 0:
            raise ValueError("solver options must be positive")
        self.max_iters = int(max_iters)
        self.grad_tol = float(grad_tol)
        self.step_init = float(step_init)
        self.min_step = float(min_step)
        self.improve_every = int(improve_every)
        self.seed = int(seed)

    def to_dict(self):
        return {"max_iters": self.max_iters, "grad_tol": self.grad_tol,
                "step_init": self.step_init, "min_step": self.min_step,
                "improve_every": self.improve_every, "seed": self.seed}


class SolveReport:
    def __init__(self, converged, iters, final_area, final_grad_norm,
                 area_history, notes=()):
        self.converged = bool(converged)
        self.iters = int(iters)
        self.final_area = float(final_area)
        self.final_grad_norm = float(final_grad_norm)
        self.area_history = [float(a) for a in area_history]
        self.notes = list(notes)

    def to_dict(self):
        return {"converged": self.converged, "iters": self.iters,
                "final_area": self.final_area,
                "final_grad_norm": self.final_grad_norm,
                "area_history": self.area_history, "notes": self.notes}


def area_gradient(m: TriSurfaceMesh):
    """Per-vertex gradient of total area.

    For each triangle with unit normal n, the corner at vertex v receives
    0.5 * n x (opposite edge vector); degenerate triangles contribute zero.
    Boundary-fixed vertices report a zero gradient.
    """
    nv = m.vertices.shape[0]
    ev = m.corner_edge_vectors()
    cr = np.cross(ev[:, 0], -ev[:, 2])
    nn = np.linalg.norm(cr, axis=1)
    nhat = np.zeros_like(cr)
    ok = nn > 1e-300
    nhat[ok] = cr[ok] / nn[ok, None]
    grad = np.zeros((nv, 3))
    tri = m.triangles
    for k in range(3):
        contrib = 0.5 * np.cross(nhat, ev[:, (k + 1) % 3])
        for d in range(3):
            grad[:, d] += np.bincount(tri[:, k], weights=contrib[:, d],
                                      minlength=nv)
    grad[m.boundary_fixed] = 0.0
    return grad


def _mean_edge_length(m):
    ev = m.corner_edge_vectors()
    return float(np.linalg.norm(ev, axis=2).mean())


# ----------------------------------------------------------- edge flipping

def _interior_edges(tris):
    """Map undirected interior edge -> [(tri, corner), (tri, corner)]."""
    emap = {}
    for t in range(tris.shape[0]):
        for k in range(3):
            a, b = tris[t, k], tris[t, (k + 1) % 3]
            emap.setdefault((min(a, b), max(a, b)), []).append((t, k))
    return {e: ts for e, ts in emap.items() if len(ts) == 2}


def _flip_pass(m: TriSurfaceMesh):
    """One deterministic pass of intrinsic-Delaunay edge flips.

    An interior edge flips when the opposite angles sum to more than pi, the
    two new triangles are non-degenerate, the new edge does not already
    exist, and the total area does not increase. Vertices never move, and
    each triangle is touched at most once per pass.
    """
    tris = m.triangles.copy()
    shifts = m.tri_shifts.copy() if m.tri_shifts is not None else None
    ev = m.corner_edge_vectors()
    areas = m.triangle_areas()
    L = m.ambient.periods if m.ambient.is_torus else None
    pos = m.vertices

    def corner_pos(t):
        """Lift of triangle t's corners (corner 0 anchored at its position)."""
        p0 = pos[tris[t, 0]]
        if shifts is None:
            return np.array([p0, pos[tris[t, 1]], pos[tris[t, 2]]])
        e0 = pos[tris[t, 1]] + shifts[t, 0] * L - p0
        e1 = pos[tris[t, 2]] + (shifts[t, 0] + shifts[t, 1]) * L - p0
        return np.array([p0, p0 + e0, p0 + e1])

    directed = {(tris[t, k], tris[t, (k + 1) % 3])
                for t in range(tris.shape[0]) for k in range(3)}

    # vectorized corner angles: angle at corner o, between edges o->o+1
    # and o->o+2
    nt = tris.shape[0]
    nv = pos.shape[0]
    ln = np.linalg.norm(ev, axis=2)
    angles = np.empty((nt, 3))
    for o in range(3):
        u = ev[:, o]
        w = -ev[:, (o + 2) % 3]
        den = np.maximum(ln[:, o] * ln[:, (o + 2) % 3], 1e-300)
        cosv = np.clip(np.einsum("ij,ij->i", u, w) / den, -1.0, 1.0)
        angles[:, o] = np.arccos(cosv)

    # pair the two half-edges of every interior edge
    tails = tris.ravel().astype(np.int64)
    heads = tris[:, [1, 2, 0]].ravel().astype(np.int64)
    und = np.minimum(tails, heads) * nv + np.maximum(tails, heads)
    order = np.argsort(und, kind="stable")
    su = und[order]
    pair_at = np.nonzero(su[:-1] == su[1:])[0]
    e1 = order[pair_at]
    e2 = order[pair_at + 1]
    t1s, k1s = e1 // 3, e1 % 3
    t2s, k2s = e2 // 3, e2 % 3
    score = angles[t1s, (k1s + 2) % 3] + angles[t2s, (k2s + 2) % 3]
    hot = score > math.pi + 1e-9

    # flip greedily, worst edges first, touching each triangle at most once
    cands = sorted(
        (-(float(score[i]) - math.pi), int(tails[e1[i]]), int(heads[e1[i]]),
         int(t1s[i]), int(k1s[i]), int(t2s[i]), int(k2s[i]))
        for i in np.nonzero(hot)[0])

    touched = set()
    nflips = 0
    for _, a, b, t1, k1, t2, k2 in cands:
        if t1 in touched or t2 in touched:
            continue
        # local picture: t1 = (u, v, c1off...) with edge (u, v) at corner k1
        u, v = tris[t1, k1], tris[t1, (k1 + 1) % 3]
        c1 = tris[t1, (k1 + 2) % 3]
        c2 = tris[t2, (k2 + 2) % 3]
        if c1 == c2:
            continue
        if (c1, c2) in directed or (c2, c1) in directed:
            continue  # flip would duplicate an existing edge
        T1 = corner_pos(t1)
        # lift t2 in t1's frame: shared edge (u, v)
        P = {int(tris[t1, (k1 + j) % 3]): T1[(k1 + j) % 3] for j in range(3)}
        T2 = corner_pos(t2)
        # align T2's copy of edge (v, u) with t1's frame
        vpos_t2 = T2[k2]
        delta = P[int(v)] - vpos_t2
        pc2 = T2[(k2 + 2) % 3] + delta
        pu, pv, pc1 = P[int(u)], P[int(v)], P[int(c1)]
        a1 = 0.5 * np.linalg.norm(np.cross(pc2 - pu, pc1 - pu))
        a2 = 0.5 * np.linalg.norm(np.cross(pc1 - pv, pc2 - pv))
        old = areas[t1] + areas[t2]
        scale = max(np.linalg.norm(pv - pu), 1e-300)
        if a1 < 1e-10 * scale * scale or a2 < 1e-10 * scale * scale:
            continue
        if a1 + a2 > old:
            continue  # strict: a flip may never increase the two-tri area
        if a1 + a2 >= old - 1e-9 * max(old, 1e-30):
            # area-neutral means the quad is essentially planar; flipping a
            # planar quad is only valid when the diagonals cross, otherwise
            # the new pair folds over itself at equal total area
            nrm = np.cross(pv - pu, pc1 - pu)
            nn = float(np.linalg.norm(nrm))
            if nn <= 1e-300:
                continue
            ex = (pv - pu) / scale
            ey = np.cross(nrm / nn, ex)
            x1, y1 = float((pc1 - pu) @ ex), float((pc1 - pu) @ ey)
            x2, y2 = float((pc2 - pu) @ ex), float((pc2 - pu) @ ey)
            if not y1 * y2 < 0.0:
                continue  # c1, c2 on the same side of edge u-v
            su = (x2 - x1) * (-y1) - (y2 - y1) * (-x1)
            sv = (x2 - x1) * (-y1) - (y2 - y1) * (scale - x1)
            if not su * sv < 0.0:
                continue  # u, v on the same side of the new diagonal
        # rebuild the two triangles: (u, c2, c1) and (v, c1, c2)
        newt1 = np.array([u, c2, c1])
        newt2 = np.array([v, c1, c2])
        if shifts is not None:
            s_uv = shifts[t1, k1]
            s_vc1 = shifts[t1, (k1 + 1) % 3]
            s_c1u = shifts[t1, (k1 + 2) % 3]
            s_vu = shifts[t2, k2]
            s_uc2 = shifts[t2, (k2 + 1) % 3]
            s_c2v = shifts[t2, (k2 + 2) % 3]
            ns1 = np.array([s_uc2, s_c2v + s_vc1, s_c1u])   # u->c2, c2->c1, c1->u
            ns2 = np.array([-s_vc1, -s_c1u - s_uc2, -s_c2v])  # v->c1, c1->c2, c2->v
            if np.any(ns1.sum(axis=0) != 0) or np.any(ns2.sum(axis=0) != 0):
                continue
            shifts[t1] = ns1
            shifts[t2] = ns2
        for k in range(3):
            directed.discard((tris[t1, k], tris[t1, (k + 1) % 3]))
            directed.discard((tris[t2, k], tris[t2, (k + 1) % 3]))
        tris[t1] = newt1
        tris[t2] = newt2
        for k in range(3):
            directed.add((tris[t1, k], tris[t1, (k + 1) % 3]))
            directed.add((tris[t2, k], tris[t2, (k + 1) % 3]))
        areas[t1] = a1
        areas[t2] = a2
        touched.add(t1)
        touched.add(t2)
        nflips += 1
    if nflips == 0:
        return m, 0
    out = TriSurfaceMesh(m.vertices.copy(), tris, m.boundary_fixed.copy(),
                         shifts, m.ambient, validate=False)
    return out, nflips


# ----------------------------------------------------------------- descent

def _area_and_cross(pos, tris, shifts, L):
    e01 = pos[tris[:, 1]] - pos[tris[:, 0]]
    e02 = pos[tris[:, 2]] - pos[tris[:, 0]]
    if shifts is not None:
        e01 = e01 + shifts[:, 0] * L
        e02 = e02 - shifts[:, 2] * L
    cr = np.cross(e01, e02)
    return 0.5 * np.linalg.norm(cr, axis=1).sum(), cr


def _total_area(pos, tris, shifts, L):
    return _area_and_cross(pos, tris, shifts, L)[0]


def _average_offsets(m: TriSurfaceMesh, free):
    """Offset of every free vertex toward the mean of its one-ring.

    Crumpled regions leave the vertices badly distributed even after edge
    flips; moving each vertex halfway to the average of its neighbours
    redistributes them (mostly tangentially on a smooth sheet, inward on a
    wrinkled one, so the move is typically area-decreasing there)."""
    ev = m.corner_edge_vectors()
    tri = m.triangles
    acc = np.zeros((m.vertices.shape[0], 3))
    cnt = np.zeros(m.vertices.shape[0])
    for k in range(3):
        # neighbours of corner k within this triangle, as offsets from it
        rel = ev[:, k] - ev[:, (k + 2) % 3]
        np.add.at(acc, tri[:, k], rel)
        np.add.at(cnt, tri[:, k], 2.0)
    off = 0.5 * acc / np.maximum(cnt, 1.0)[:, None]
    off[~free] = 0.0
    return off


def _minimize(m: TriSurfaceMesh, opts: SolveOptions, torus: bool):
    mesh = m
    free = ~mesh.boundary_fixed
    notes = []
    L = mesh.ambient.periods if torus else None
    excluded = mesh.ambient.excluded if torus else None

    def project(pos):
        """Wrap (torus) and push vertices out of the excluded region."""
        out = pos
        if excluded is not None:
            inside = excluded.contains(out[free])
            if np.any(inside):
                sub = out[free]
                out = out.copy()
                sub[inside] = excluded.project_outside(sub[inside])
                out[free] = sub
        return out

    def descent_dir(g, pos):
        """Inverse-mass preconditioned gradient (the discrete mean-curvature
        direction): dividing by the barycentric vertex area makes the speed
        of a vertex independent of how finely its star is triangulated."""
        tmp = mesh.replace_vertices(pos) if pos is not mesh.vertices else mesh
        ev = tmp.corner_edge_vectors()
        ta = 0.5 * np.linalg.norm(np.cross(ev[:, 0], -ev[:, 2]), axis=1)
        mass = np.zeros(pos.shape[0])
        np.add.at(mass, mesh.triangles.ravel(), np.repeat(ta / 3.0, 3))
        ref = np.median(mass[mass > 0.0]) if np.any(mass > 0.0) else 1.0
        # the floor bounds the preconditioner's dynamic range: a vertex
        # whose star collapses (mass -> 0, area kinked) must not blow up
        # the direction and throttle the global step size
        return g / np.maximum(mass, 0.1 * ref)[:, None]

    area, ref_cross = _area_and_cross(mesh.vertices, mesh.triangles,
                                      mesh.tri_shifts, L)
    history = [area]
    grad = area_gradient(mesh)
    gnorm = float(np.linalg.norm(grad, axis=1).max()) if grad.size else 0.0
    step = opts.step_init
    cg_dir = None
    pg_prev = None
    g_prev = None
    g2_prev = None
    converged = False
    iters = 0
    degen = int(np.sum(mesh.triangle_areas() < 1e-14))
    if degen:
        notes.append("degenerate triangles at start: %d" % degen)
    # a triangle above this area has its orientation locked to its last
    # accepted state: a candidate step that regrows it with the normal
    # reversed is a fold-over and is rejected by the line search; a triangle
    # that is small at an accepted state loses its lock (it may legitimately
    # pass through degeneracy and re-grow on the other side). The threshold
    # is a fraction of the mean triangle area: degenerate slivers churning
    # at a collapsing tip spin freely, sheet-scale triangles may not flip.
    nt = max(mesh.triangles.shape[0], 1)
    fold_area = 1e-2 * area / nt

    def lock(cross):
        big = 0.5 * np.linalg.norm(cross, axis=1) > fold_area
        return np.where(big[:, None], cross, 0.0)

    ref_cross = lock(ref_cross)

    for it in range(opts.max_iters):
        if gnorm <= opts.grad_tol:
            converged = True
            break
        iters = it + 1
        # preconditioned conjugate-gradient direction (Polak-Ribiere with
        # restarts); the line search below keeps every accepted step a
        # strict area decrease, so the recorded history stays monotone
        pg = descent_dir(grad, mesh.vertices)
        restart = cg_dir is None
        if not restart:
            denom = float((pg_prev[free] * g_prev[free]).sum())
            beta = 0.0
            if denom > 1e-300:
                beta = float((pg[free] * (grad - g_prev)[free]).sum()) / denom
            cg_dir = pg + max(0.0, beta) * cg_dir
            if float((grad[free] * cg_dir[free]).sum()) <= 0.0:
                cg_dir = pg
                restart = True
        else:
            cg_dir = pg
        dirn = cg_dir.copy()
        dirn[~free] = 0.0
        g2 = float((grad[free] * dirn[free]).sum())
        if g2 <= 0.0:
            cg_dir = pg
            dirn = cg_dir.copy()
            dirn[~free] = 0.0
            g2 = float((grad[free] * dirn[free]).sum())
            restart = True
        if restart or g2_prev is None:
            step = opts.step_init
        else:
            step = step * (g2_prev / g2) if g2 > 0 else opts.step_init
        pg_prev = pg
        g_prev = grad
        g2_prev = g2
        step = min(max(step, opts.min_step), 1e6)

        def try_step(t):
            trial = mesh.vertices - t * dirn
            trial[~free] = mesh.vertices[~free]
            if torus:
                trial = project(trial)
            cand = mesh.replace_vertices(trial, rewrap=torus)
            new_area, new_cross = _area_and_cross(cand.vertices,
                                                  cand.triangles,
                                                  cand.tri_shifts, L)
            if new_area <= area - 1e-4 * t * g2:
                big = 0.5 * np.linalg.norm(new_cross, axis=1) > fold_area
                dots = np.einsum("ij,ij->i", ref_cross[big], new_cross[big])
                if not np.any(dots < 0.0):
                    return cand, new_area, new_cross
            return None

        accepted = False
        t = step
        for _ in range(60):
            hit = try_step(t)
            if hit is not None:
                accepted = True
                break
            t *= 0.5
            if t < opts.min_step:
                break
        if accepted:
            cand, new_area, new_cross = hit
            # expand greedily: the trial step often collapses after a
            # rejection and would otherwise stay tiny for many iterations
            for _ in range(30):
                hit2 = try_step(2.0 * t)
                if hit2 is None or hit2[1] >= new_area:
                    break
                t *= 2.0
                cand, new_area, new_cross = hit2
        if not accepted:
            if not restart:
                # a stale conjugate direction can go numerically flat; fall
                # back to the preconditioned gradient before giving up
                cg_dir = None
                g2_prev = None
                continue
            notes.append("line search stalled at iteration %d (step %.3g)"
                         % (iters, t))
            break
        mesh = cand
        area = new_area
        ref_cross = lock(new_cross)
        history.append(area)
        grad = area_gradient(mesh)
        gnorm = float(np.linalg.norm(grad, axis=1).max())
        step = t
        if (it + 1) % opts.improve_every == 0:
            mesh2, nflips = _flip_pass(mesh)
            if nflips:
                new_area, new_cross = _area_and_cross(mesh2.vertices,
                                                      mesh2.triangles,
                                                      mesh2.tri_shifts, L)
                if new_area <= area:
                    mesh = mesh2
                    area = new_area
                    ref_cross = lock(new_cross)
                    history.append(area)
                    grad = area_gradient(mesh)
                    gnorm = float(np.linalg.norm(grad, axis=1).max())
                    cg_dir = None  # restart after a topology change
                    g2_prev = None
                else:
                    # roundoff drift across many flips; keep the old mesh so
                    # the recorded history stays non-increasing
                    notes.append("flip pass reverted at iteration %d "
                                 "(drift %.3g)" % (iters, new_area - area))
            off = _average_offsets(mesh, free)
            for _ in range(8):
                trial = mesh.vertices + off
                if torus:
                    trial = project(trial)
                cand = mesh.replace_vertices(trial, rewrap=torus)
                av_area, av_cross = _area_and_cross(cand.vertices,
                                                    cand.triangles,
                                                    cand.tri_shifts, L)
                big = 0.5 * np.linalg.norm(av_cross, axis=1) > fold_area
                dots = np.einsum("ij,ij->i", ref_cross[big], av_cross[big])
                if av_area <= area and not np.any(dots < 0.0):
                    mesh = cand
                    area = av_area
                    ref_cross = lock(av_cross)
                    history.append(area)
                    grad = area_gradient(mesh)
                    gnorm = float(np.linalg.norm(grad, axis=1).max())
                    # no CG restart here: the descent-direction test at the
                    # top of the loop already drops a direction the
                    # redistribution has invalidated
                    break
                off = 0.5 * off
    else:
        iters = opts.max_iters
    if gnorm <= opts.grad_tol:
        converged = True
    report = SolveReport(converged, iters, area, gnorm, history, notes)
    return mesh, report


def minimize_area(m: TriSurfaceMesh, opts: SolveOptions = None):
    """Minimize mesh area in Euclidean space with the boundary pinned."""
    if m.ambient.is_torus:
        raise ValueError("use minimize_area_torus for flat-torus meshes")
    return _minimize(m, opts or SolveOptions(), torus=False)


def minimize_area_torus(m: TriSurfaceMesh, opts: SolveOptions = None):
    """Minimize mesh area in a flat torus: edge vectors are shift-aware,
    vertices re-wrap into the fundamental domain after each accepted step,
    and vertices that enter the excluded region are projected back to its
    nearest face as part of the step."""
    if not m.ambient.is_torus:
        raise ValueError("mesh is not in a flat-torus ambient")
    return _minimize(m, opts or SolveOptions(), torus=True)


# ---------------------------------------------------------- disk meshing

def _resample_loop(pts, n):
    """n points spaced evenly by arc length along a closed polygon."""
    seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.arange(n) * (cum[-1] / n)
    j = np.clip(np.searchsorted(cum, s, side="right") - 1, 0,
                pts.shape[0] - 1)
    frac = (s - cum[j]) / np.maximum(seg[j], 1e-300)
    return pts[j] + frac[:, None] * (np.roll(pts, -1, axis=0)[j] - pts[j])


def _ring_ladder_disk(boundary_pts, apex, n_rings):
    """Triangulated disk from concentric rings interpolating the boundary
    loop toward an apex point; returns (verts, tris). The rings thin out as
    they shrink so the triangles stay near-isotropic all the way in (a ring
    that kept every boundary vertex would degenerate into slivers at the
    tip)."""
    n0 = boundary_pts.shape[0]
    rolled = np.roll(boundary_pts, -1, axis=0)
    normal = np.cross(boundary_pts, rolled).sum(axis=0)
    nn = float(np.linalg.norm(normal))
    if nn < 1e-300:
        normal = np.array([0.0, 0.0, 1.0])
    else:
        normal = normal / nn
    verts = [boundary_pts]
    rings = [list(range(n0))]
    count = n0
    prev_n = n0
    for k in range(1, n_rings):
        t = k / n_rings
        n_k = min(prev_n, max(min(6, prev_n), int(round(n0 * (1.0 - t)))))
        ring_pts = (1.0 - t) * _resample_loop(boundary_pts, n_k) \
            + t * apex[None, :]
        verts.append(ring_pts)
        rings.append(list(range(count, count + n_k)))
        count += n_k
        prev_n = n_k
    verts.append(apex[None, :])
    apex_idx = count
    pts = np.vstack(verts)
    tris = []
    from .geom.build import stitch_rings
    for k in range(len(rings) - 1):
        center = pts[rings[k] + rings[k + 1]].mean(axis=0)
        tris.append(stitch_rings(pts, rings[k], rings[k + 1], center, normal))
    # apex fan over the innermost ring, ordered the same way as the bands
    last = rings[-1]
    center = pts[last].mean(axis=0)
    e1 = np.cross(normal, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-6:
        e1 = np.cross(normal, [0.0, 1.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    rel = pts[last] - center
    order = np.argsort(np.arctan2(rel @ e2, rel @ e1))
    ring = [last[i] for i in order]
    fan = [(ring[i], ring[(i + 1) % len(ring)], apex_idx)
           for i in range(len(ring))]
    tris.append(np.array(fan, dtype=np.int64))
    return pts, np.vstack(tris)


def resample_polyline(c: ClosedPolyline, target_edge):
    """Insert evenly spaced points on each segment so no edge exceeds
    target_edge; original vertices are kept exactly."""
    if c.ambient.is_torus:
        raise ValueError("resampling expects a Euclidean polyline")
    pts = []
    v = c.vertices
    n = v.shape[0]
    for i in range(n):
        a = v[i]
        b = v[(i + 1) % n]
        k = max(1, int(math.ceil(np.linalg.norm(b - a) / target_edge - 1e-12)))
        for t in range(k):
            pts.append(a + (b - a) * (t / k))
    return np.array(pts)


def cone_over_polyline(boundary: ClosedPolyline, apex, target_edge):
    """Disk mesh coning a boundary loop to an explicit apex point (rings of
    shrinking copies of the boundary, apex fan at the tip)."""
    bp = resample_polyline(boundary, target_edge)
    apex = np.asarray(apex, dtype=float)
    radius = float(np.linalg.norm(bp - apex[None, :], axis=1).max())
    n_rings = max(2, int(math.ceil(radius / target_edge)))
    verts, tris = _ring_ladder_disk(bp, apex, n_rings)
    bf = np.zeros(verts.shape[0], dtype=bool)
    bf[:bp.shape[0]] = True
    return TriSurfaceMesh(verts, tris, bf)


def triangulate_disk(boundary: ClosedPolyline, target_edge) -> TriSurfaceMesh:
    """Disk-topology mesh spanning a boundary loop: the loop is resampled to
    target_edge, coned to its centroid, and the interior Laplacian-smoothed
    (boundary vertices stay exactly on the input polyline)."""
    bp = resample_polyline(boundary, target_edge)
    diam = np.linalg.norm(bp - bp.mean(axis=0), axis=1).max()
    if diam < 100 * 1e-9:
        raise ValueError("boundary is degenerate (near-zero diameter)")
    centroid = bp.mean(axis=0)
    mesh = cone_over_polyline(ClosedPolyline(bp) if bp.shape[0] >= 3 else boundary,
                              centroid, target_edge)
    # uniform Laplacian smoothing of the interior
    verts = mesh.vertices.copy()
    tris = mesh.triangles
    nv = verts.shape[0]
    free = ~mesh.boundary_fixed
    neigh = {}
    for t in range(tris.shape[0]):
        for k in range(3):
            a, b = int(tris[t, k]), int(tris[t, (k + 1) % 3])
            neigh.setdefault(a, set()).add(b)
            neigh.setdefault(b, set()).add(a)
    rows = []
    cols = []
    for a, bs in neigh.items():
        for b in bs:
            rows.append(a)
            cols.append(b)
    rows = np.array(rows)
    cols = np.array(cols)
    deg = np.bincount(rows, minlength=nv).astype(float)
    for _ in range(30):
        acc = np.zeros_like(verts)
        for d in range(3):
            acc[:, d] = np.bincount(rows, weights=verts[cols, d], minlength=nv)
        new = acc / deg[:, None]
        verts[free] = new[free]
    return mesh.replace_vertices(verts)
