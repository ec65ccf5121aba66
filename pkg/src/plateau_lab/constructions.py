"""Builders for the worked boundary curves and candidate spanning surfaces:
the bridged hexagon pair and its two competing spanning meshes, the sheared
box inside a flat 3-torus with its slice/cap surfaces and tube surgery, the
tilted torus slices, and the sphere-circle / catenoid meshes.
"""

from __future__ import annotations

import math

import numpy as np

from .geom.core import (
    ClosedPolyline,
    EUCLIDEAN,
    Parallelepiped,
    TriSurfaceMesh,
    boundary_loops,
    boundary_multiplicity,
    flat_torus,
    polyline_length,
)
from .geom.build import (
    assemble_pieces,
    chart_torus_mesh,
    grid_patch,
    orient_coherently,
    stations,
    stitch_rings,
)
from .geom.intersect import tri_tri_intersection, _intersection_measure
from .geom.distance import point_triangle_distances


# ------------------------------------------------------------ parameters

class ExampleIParams:
    """Bridged hexagon pair: strip half-width eps, tower height C, bridge
    width, and the arc length trimmed from each strip tip."""

    def __init__(self, eps, C, bridge_width, trim=None):
        self.eps = float(eps)
        self.C = float(C)
        self.bridge_width = float(bridge_width)
        self.trim = 0.5 * self.bridge_width if trim is None else float(trim)

    def validate(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not (0 < self.bridge_width <= self.eps):
            raise ValueError("bridge_width must lie in (0, eps]")
        if self.trim < 0:
            raise ValueError("trim must be nonnegative")
        return self

    def to_dict(self):
        return {"eps": self.eps, "C": self.C,
                "bridge_width": self.bridge_width, "trim": self.trim}


class ExampleIIParams:
    """Sheared box in a flat 3-torus of height h: margin delta, shear angle
    theta0, surgery disk radius eps, slice height c."""

    def __init__(self, h, delta, theta0, eps, c):
        self.h = float(h)
        self.delta = float(delta)
        self.theta0 = float(theta0)
        self.eps = float(eps)
        self.c = float(c)

    @property
    def sigma(self):
        return (self.h / 3.0) / math.tan(self.theta0)

    def validate(self):
        h, d, th = self.h, self.delta, self.theta0
        if not (h > 0 and 0 < d < 0.5 and 0 < th < math.pi / 2):
            raise ValueError("need h > 0, 0 < delta < 1/2, theta0 in (0, pi/2)")
        if not math.tan(th) < 1.0 / 6.0:
            raise ValueError("constraint failed: tan(theta0) < 1/6")
        sigma = self.sigma
        if not sigma < d:
            raise ValueError("constraint failed: sigma < delta")
        if not sigma > 2.0 * h:
            raise ValueError("constraint failed: sigma > 2h")
        if not (h / 3.0 < self.c < 2.0 * h / 3.0):
            raise ValueError("constraint failed: h/3 < c < 2h/3")
        if not (h < self.eps < sigma / 2.0):
            raise ValueError("constraint failed: h < eps < sigma/2")
        return self

    def to_dict(self):
        return {"h": self.h, "delta": self.delta, "theta0": self.theta0,
                "eps": self.eps, "c": self.c}


class ExampleIIIBParams:
    """Axis-aligned cube of margin delta in the unit 3-torus, a z-slice at
    height c, and a tilted {y+z=d} slice."""

    def __init__(self, delta, c, d):
        self.delta = float(delta)
        self.c = float(c)
        self.d = float(d)

    def validate(self):
        d, c, dd = self.delta, self.c, self.d
        if not (0 < d < (2.0 - math.sqrt(2.0)) / 4.0):
            raise ValueError("delta must lie in (0, (2-sqrt(2))/4)")
        if not (d < c < 1.0 - d):
            raise ValueError("c must lie in (delta, 1-delta)")
        if not (0.0 <= dd < 1.0):
            raise ValueError("d must lie in [0, 1)")
        for bad in (2.0 * d, 1.0 - 2.0 * d):
            if abs(dd - bad) < 1e-6:
                raise ValueError(
                    "d = %g is tangent to the cube edge (degenerate slice)"
                    % dd)
        return self

    def to_dict(self):
        return {"delta": self.delta, "c": self.c, "d": self.d}


# ------------------------------------------- bridged hexagon pair curves

def build_gamma1(p: ExampleIParams) -> ClosedPolyline:
    """Closed hexagon through (1,-1,0), (1,1,0), (eps,1,0), (eps,1,C),
    (eps,-1,-C), (eps,-1,0): a unit-ish square frame whose x=eps side grows
    two tall tower arms."""
    p.validate()
    e, C = p.eps, p.C
    pts = np.array([
        [1.0, -1.0, 0.0],
        [1.0, 1.0, 0.0],
        [e, 1.0, 0.0],
        [e, 1.0, C],
        [e, -1.0, -C],
        [e, -1.0, 0.0],
    ])
    return ClosedPolyline(pts)


_MIRROR_AXES = {"x=0": 0, "y=0": 1, "z=0": 2, "x": 0, "y": 1, "z": 2}


def mirror_curve(c: ClosedPolyline, plane) -> ClosedPolyline:
    """Reflect a Euclidean polyline in a coordinate plane, reversing the
    traversal so the mirrored surface's induced boundary orientation is
    consistent with it."""
    if c.ambient.is_torus:
        raise ValueError("mirror_curve expects a Euclidean polyline")
    try:
        axis = _MIRROR_AXES[plane]
    except KeyError:
        raise ValueError("plane must be one of x=0, y=0, z=0")
    v = c.vertices.copy()
    v[:, axis] = -v[:, axis]
    return ClosedPolyline(v[::-1])


def _segment_segment_distance(p1, q1, p2, q2):
    # Eberly's robust clamped closest-point scheme
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    if a <= 1e-300 and e <= 1e-300:
        return float(np.linalg.norm(r))
    if a <= 1e-300:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = float(d1 @ r)
        if e <= 1e-300:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = float(d1 @ d2)
            den = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / den)) if den > 0 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    closest1 = p1 + s * d1
    closest2 = p2 + t * d2
    return float(np.linalg.norm(closest1 - closest2))


def _cut_at_vertex(curve: ClosedPolyline, anchor, half_width):
    """Split the loop at the vertex nearest `anchor`: returns (walk, c_prev,
    c_next) where walk is the vertex chain from just after the anchor to
    just before it, and c_prev/c_next are the two cut points at arc
    distance half_width from the anchor on its incident segments."""
    v = curve.vertices
    n = v.shape[0]
    anchor = np.asarray(anchor, dtype=float)
    i = int(np.argmin(np.linalg.norm(v - anchor[None, :], axis=1)))
    if np.linalg.norm(v[i] - anchor) > 1e-9:
        raise ValueError("bridge anchor is not a vertex of the curve")
    prev_vec = v[i] - v[i - 1]
    next_vec = v[(i + 1) % n] - v[i]
    lp = np.linalg.norm(prev_vec)
    ln = np.linalg.norm(next_vec)
    if half_width >= lp or half_width >= ln:
        raise ValueError("width larger than adjacent segment lengths")
    c_prev = v[i] - prev_vec * (half_width / lp)
    c_next = v[i] + next_vec * (half_width / ln)
    walk = [v[(i + k) % n] for k in range(1, n)]
    return walk, c_prev, c_next


def bridge_curves(c1: ClosedPolyline, c2: ClosedPolyline, a1, a2,
                  width) -> ClosedPolyline:
    """Join two closed curves into one: remove an arc of length `width`
    centered at vertex a1 of c1 (and at a2 of c2) and connect the four cut
    points with two straight rails, traversing c1 then c2 forward."""
    width = float(width)
    if width <= 0:
        raise ValueError("width must be positive")
    walk1, prev1, next1 = _cut_at_vertex(c1, a1, 0.5 * width)
    walk2, prev2, next2 = _cut_at_vertex(c2, a2, 0.5 * width)
    loop = [next1] + walk1 + [prev1, next2] + walk2 + [prev2]
    out = ClosedPolyline(np.array(loop))

    # the rails must not cross either curve away from their endpoints
    rails = [(prev1, next2), (prev2, next1)]
    for ra, rb in rails:
        d = rb - ra
        ra_in = ra + 1e-6 * d
        rb_in = rb - 1e-6 * d
        for curve in (c1, c2):
            v = curve.vertices
            for k in range(v.shape[0]):
                if _segment_segment_distance(
                        ra_in, rb_in, v[k], v[(k + 1) % v.shape[0]]) < 1e-12:
                    raise ValueError("bridge rail crosses one of the curves")
    return out


def build_tau_and_E(res):
    """The square with corners (+-1, +-1, 0) and a flat grid disk spanning
    it (area exactly 4)."""
    res = float(res)
    if res <= 0:
        raise ValueError("res must be positive")
    tau = ClosedPolyline(np.array([
        [1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [-1.0, 1.0, 0.0],
        [-1.0, -1.0, 0.0]]))
    xs = stations(-1.0, 1.0, res)
    ys = stations(-1.0, 1.0, res)
    verts, tris, _ = grid_patch(lambda u, v: (u, v, 0.0), xs, ys)
    return tau, TriSurfaceMesh(verts, tris)


def _orient_to_target(verts, tris, target, tol=1e-6):
    tris2, _, _ = orient_coherently(tris)
    m = TriSurfaceMesh(verts, tris2)
    mult = boundary_multiplicity(m, target, tol)
    w = round(mult)
    if w == -1:
        m = TriSurfaceMesh(verts, tris2[:, ::-1].copy())
        mult = boundary_multiplicity(m, target, tol)
        w = round(mult)
    if w != 1:
        raise ValueError("mesh boundary does not trace the target curve "
                         "with multiplicity +-1 (got %g)" % mult)
    return m


def gamma_hat(p: ExampleIParams) -> ClosedPolyline:
    """The bridged hexagon pair: both hexagons joined by two rails across
    the gap between their deep corners."""
    g1 = build_gamma1(p)
    g2 = mirror_curve(g1, "x=0")
    p5 = np.array([p.eps, -1.0, -p.C])
    q5 = np.array([-p.eps, -1.0, -p.C])
    return bridge_curves(g1, g2, p5, q5, p.bridge_width)


def build_ehat_mesh(p: ExampleIParams, res) -> TriSurfaceMesh:
    """Flat square spanning mesh with three wall/graph strips attached: the
    square E = [-1,1]^2 at z=0, a vertical strip up the y=1 wall, the tilted
    graph strip z = C*y, and a vertical strip down the y=-1 wall, the two
    strip tips trimmed by `trim` so the boundary is the bridged hexagon
    pair. The graph strip crosses E transversally (it is built
    self-intersecting on purpose)."""
    p.validate()
    e, C, w = p.eps, p.C, p.bridge_width
    if abs(p.trim - 0.5 * w) > 1e-9:
        raise ValueError("incompatible trim: strip tips must be trimmed by "
                         "bridge_width/2 to meet the bridged boundary")
    hyp = math.sqrt(1.0 + C * C)
    dy = p.trim / hyp

    res = float(res)
    x_strip = stations(-e, e, min(res, e / 2.0))
    res_len = max(4.0 * res, 0.1)
    # E's x-stations must contain the strip stations exactly (conforming
    # seams at y = +-1), with no extra stations inside [-e, e]
    xs_E = np.unique(np.concatenate(
        [stations(-1.0, -e, res_len), x_strip, stations(e, 1.0, res_len)]))
    ys_E = stations(-1.0, 1.0, res_len, avoid=(0.0,))
    zs_up = stations(0.0, C, res_len)
    ys_graph = stations(-1.0 + dy, 1.0, res_len / hyp, avoid=(0.0,))
    zs_dn = stations(-C + p.trim, 0.0, res_len)

    tol = 1e-12

    def patch(embed, us, vs, weld_fn):
        verts, tris, uv = grid_patch(embed, us, vs)
        weld = weld_fn(uv)
        return verts, tris, weld

    pieces = [
        patch(lambda u, v: (u, v, 0.0), xs_E, ys_E,
              lambda uv: (np.abs(np.abs(uv[:, 1]) - 1.0) < tol)
              & (np.abs(uv[:, 0]) <= e + tol)),
        patch(lambda u, v: (u, 1.0, v), x_strip, zs_up,
              lambda uv: (np.abs(uv[:, 1]) < tol)
              | (np.abs(uv[:, 1] - C) < tol)),
        patch(lambda u, v: (u, v, C * v), x_strip, ys_graph,
              lambda uv: np.abs(uv[:, 1] - 1.0) < tol),
        patch(lambda u, v: (u, -1.0, v), x_strip, zs_dn,
              lambda uv: np.abs(uv[:, 1]) < tol),
    ]
    verts, tris = assemble_pieces(pieces)
    return _orient_to_target(verts, tris, gamma_hat(p))


def _refine_triangle(A, B, C, n):
    """Uniform order-n refinement of triangle ABC: returns (verts, tris, ij)
    where ij[k] = (i, j) lattice coordinates, vertex = A + (i/n)(B-A) +
    (j/n)(C-A), i + j <= n."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    C = np.asarray(C, dtype=float)
    verts = []
    ij = []
    index = {}
    for i in range(n + 1):
        for j in range(n + 1 - i):
            index[(i, j)] = len(verts)
            verts.append(A + (i / n) * (B - A) + (j / n) * (C - A))
            ij.append((i, j))
    tris = []
    for i in range(n):
        for j in range(n - i):
            tris.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
            if i + j <= n - 2:
                tris.append((index[(i + 1, j)], index[(i + 1, j + 1)],
                             index[(i, j + 1)]))
    return (np.array(verts), np.array(tris, dtype=np.int64),
            np.array(ij, dtype=np.int64))


def build_sigmahat_init(p: ExampleIParams, res=0.05) -> TriSurfaceMesh:
    """Embedded initial mesh near the bridged spanning pair: for each
    hexagon a flat floor rectangle plus two in-plane triangular wings
    meeting at a pinch vertex on the boundary, the deep wing corners
    chopped and joined across the gap by a planar bridge quad. Used as
    solver initialization for the embedded competitor."""
    p.validate()
    e, C, w = p.eps, p.C, p.bridge_width
    hyp = math.sqrt(1.0 + C * C)
    n = max(8, int(math.ceil(1.0 / max(float(res), 1e-3))))
    ys = np.linspace(-1.0, 1.0, 2 * n + 1)

    pinch = np.array([e, 0.0, 0.0])
    p3 = np.array([e, 1.0, 0.0])
    p4 = np.array([e, 1.0, C])
    p5 = np.array([e, -1.0, -C])
    p6 = np.array([e, -1.0, 0.0])
    cut4 = p5 + (0.5 * w / hyp) * np.array([0.0, 1.0, C])
    cut5 = p5 + np.array([0.0, 0.0, 0.5 * w])
    tt = (np.arange(n + 1) / n)[:, None]
    seam = pinch[None, :] + tt * (cut5 - pinch)[None, :]
    seam[-1] = cut5
    floor_col = np.column_stack(
        [np.full(ys.size, e), ys, np.zeros(ys.size)])

    xs_floor = stations(e, 1.0, max(float(res), 0.02))
    fverts, ftris, fuv = grid_patch(lambda u, v: (u, v, 0.0), xs_floor, ys)
    fweld = fuv[:, 0] == e

    def wing_plus():
        verts, tris, ij = _refine_triangle(pinch, p3, p4, n)
        base = ij[:, 1] == 0
        verts[base] = floor_col[n + ij[base, 0]]
        return verts, tris, base

    def wing_minus_a():
        # narrow trim band between the tilted boundary edge and the seam; a
        # plain n-by-1 strip with no interior vertices, so its very skinny
        # triangles cannot be folded by the solver
        g = pinch[None, :] + tt * (cut4 - pinch)[None, :]
        g[-1] = cut4
        verts = np.vstack([g, seam[1:]])
        tris = [(0, 1, n + 1)]
        for k in range(1, n):
            tris.append((k, k + 1, n + k + 1))
            tris.append((k, n + k + 1, n + k))
        weld = np.zeros(verts.shape[0], dtype=bool)
        weld[0] = True          # pinch
        weld[n] = True          # cut4 (bridge corner)
        weld[n + 1:] = True     # the seam shared with the lower wing
        return verts, np.array(tris, dtype=np.int64), weld

    def wing_minus_b():
        verts, tris, ij = _refine_triangle(pinch, cut5, p6, n)
        on_seam = ij[:, 1] == 0
        verts[on_seam] = seam[ij[on_seam, 0]]
        on_floor = ij[:, 0] == 0
        verts[on_floor] = floor_col[n - ij[on_floor, 1]]
        return verts, tris, on_seam | on_floor

    side_pieces = [(fverts, ftris, fweld), wing_plus(), wing_minus_a(),
                   wing_minus_b()]
    pieces = list(side_pieces)
    for verts, tris, weld in side_pieces:
        mv = verts.copy()
        mv[:, 0] = -mv[:, 0]
        pieces.append((mv, tris[:, ::-1].copy(), weld))

    xs_bridge = stations(-e, e, min(float(res), e / 2.0))
    bverts = []
    bweld = []
    for x in xs_bridge:
        for corner in (cut4, cut5):
            bverts.append([x, corner[1], corner[2]])
            bweld.append(abs(abs(x) - e) < 1e-15)
    bverts = np.array(bverts)
    # snap the weld columns to the exact corner floats of both wings
    for col, xval in ((0, -e), (len(xs_bridge) - 1, e)):
        sl = slice(2 * col, 2 * col + 2)
        bverts[sl, 1:] = np.array([cut4[1:], cut5[1:]])
        bverts[sl, 0] = xval
    btris = []
    for i in range(len(xs_bridge) - 1):
        a = 2 * i
        b = 2 * (i + 1)
        btris.append((a, b, b + 1))
        btris.append((a, b + 1, a + 1))
    pieces.append((bverts, np.array(btris, dtype=np.int64),
                   np.array(bweld, dtype=bool)))

    verts, tris = assemble_pieces(pieces)
    return _orient_to_target(verts, tris, gamma_hat(p))


# ------------------------------------------------ sheared box in a torus

def build_parallelepiped(p: ExampleIIParams) -> Parallelepiped:
    """The sheared box: base square [delta, 1-delta]^2 at z=h/3, top face
    the same square translated by (-sigma, 0, h/3)."""
    h, d = p.h, p.delta
    sigma = p.sigma
    if sigma >= d:
        raise ValueError("sigma >= delta: shear too strong for the margin")
    z0 = h / 3.0
    base = np.array([
        [d, d, z0], [1.0 - d, d, z0],
        [1.0 - d, 1.0 - d, z0], [d, 1.0 - d, z0]])
    return Parallelepiped(base, np.array([-sigma, 0.0, z0]))


def example_II_ambient(p: ExampleIIParams):
    return flat_torus((1.0, 1.0, p.h), excluded=build_parallelepiped(p))


def _shear_shift(p: ExampleIIParams, z):
    return (z - p.h / 3.0) / math.tan(p.theta0)


def build_gamma_c(p: ExampleIIParams) -> ClosedPolyline:
    """Level-c cross-section boundary of the sheared box: the square
    [delta-s, 1-delta-s] x [delta, 1-delta] at z=c with s=(c-h/3)cot(theta0)."""
    p.validate()
    h, d, c = p.h, p.delta, p.c
    if not (h / 3.0 < c < 2.0 * h / 3.0):
        raise ValueError("c must lie in (h/3, 2h/3)")
    s = _shear_shift(p, c)
    pts = np.array([
        [d - s, d, c], [1.0 - d - s, d, c],
        [1.0 - d - s, 1.0 - d, c], [d - s, 1.0 - d, c]])
    return ClosedPolyline(pts, shifts=np.zeros((4, 3), dtype=np.int64),
                          ambient=example_II_ambient(p))


def _with_windows(base_stations, windows):
    """Merge extra refinement windows (lo, hi, step) into a station list."""
    arrs = [np.asarray(base_stations, dtype=float)]
    for lo, hi, step in windows:
        k = max(2, int(math.ceil((hi - lo) / step)) + 1)
        arrs.append(np.linspace(lo, hi, k))
    return np.unique(np.concatenate(arrs))


def _orient_torus_to_target(mesh, target, tol=1e-6):
    from .geom.build import flip_mesh_orientation
    mult = boundary_multiplicity(mesh, target, tol)
    w = round(mult)
    if w == -1:
        mesh = flip_mesh_orientation(mesh)
        w = round(boundary_multiplicity(mesh, target, tol))
    if w != 1:
        raise ValueError("boundary does not trace the target with "
                         "multiplicity +-1")
    return mesh


def build_sigma_c_mesh(p: ExampleIIParams, res=0.02,
                       windows=()) -> TriSurfaceMesh:
    """The flat slice {z=c} of the torus with the box cross-section square
    removed; `windows` adds (lo, hi, step, axis) local grid refinements."""
    p.validate()
    d, c = p.delta, p.c
    s = _shear_shift(p, c)
    x_lo, x_hi = d - s, 1.0 - d - s
    ambient = example_II_ambient(p)
    wu = [w[:3] for w in windows if w[3] == 0]
    wv = [w[:3] for w in windows if w[3] == 1]
    us = _with_windows(stations(0.0, 1.0, res, forced=(x_lo, x_hi)), wu)
    vs = _with_windows(stations(0.0, 1.0, res, forced=(d, 1.0 - d)), wv)
    tol = 1e-12

    def hole(u0, u1, v0, v1):
        return (u0 >= x_lo - tol and u1 <= x_hi + tol
                and v0 >= d - tol and v1 <= 1.0 - d + tol)

    mesh = chart_torus_mesh(lambda u, v: (u, v, c), us[:-1], vs[:-1],
                            ambient, u_period=1.0, v_period=1.0, hole=hole)
    return _orient_torus_to_target(mesh, build_gamma_c(p))


def build_Dc_mesh(p: ExampleIIParams, res=0.02, windows=()) -> TriSurfaceMesh:
    """Cap disk for the level-c cross-section: the box's bottom square plus
    the four lateral wall strips from z=h/3 up to z=c (x-normal walls
    slanted, y-normal walls sheared in-plane)."""
    p.validate()
    h, d, c = p.h, p.delta, p.c
    z0 = h / 3.0
    ambient = example_II_ambient(p)
    wu = [w[:3] for w in windows if w[3] == 0]
    wv = [w[:3] for w in windows if w[3] == 1]
    xs = _with_windows(stations(d, 1.0 - d, res), wu)
    ys = _with_windows(stations(d, 1.0 - d, res), wv)
    zs = stations(z0, c, max((c - z0) / 3.0, 1e-6))
    tol = 1e-12

    def edge_mask(uv, us, vs):
        return (np.abs(uv[:, 0] - us[0]) < tol) | \
               (np.abs(uv[:, 0] - us[-1]) < tol) | \
               (np.abs(uv[:, 1] - vs[0]) < tol) | \
               (np.abs(uv[:, 1] - vs[-1]) < tol)

    pieces = []
    bverts, btris, buv = grid_patch(lambda u, v: (u, v, z0), xs, ys)
    pieces.append((bverts, btris, edge_mask(buv, xs, ys)))

    def wall(embed, uu, vv):
        verts, tris, uv = grid_patch(embed, uu, vv)
        # weld the side columns (corner seams) and the bottom row; the top
        # row (z = c) stays boundary except for its corner column endpoints
        cols = (np.abs(uv[:, 0] - uu[0]) < tol) \
            | (np.abs(uv[:, 0] - uu[-1]) < tol)
        bottom = np.abs(uv[:, 1] - z0) < tol
        return verts, tris, cols | bottom

    sh = lambda z: _shear_shift(p, z)
    pieces.append(wall(lambda u, v: (1.0 - d - sh(v), u, v), ys, zs))
    pieces.append(wall(lambda u, v: (d - sh(v), u, v), ys, zs))
    pieces.append(wall(lambda u, v: (u - sh(v), d, v), xs, zs))
    pieces.append(wall(lambda u, v: (u - sh(v), 1.0 - d, v), xs, zs))

    verts, tris = assemble_pieces(pieces)
    tris, _, _ = orient_coherently(tris)
    mesh = TriSurfaceMesh(verts, tris,
                          tri_shifts=np.zeros((tris.shape[0], 3, 3),
                                              dtype=np.int64),
                          ambient=ambient)
    return _orient_torus_to_target(mesh, build_gamma_c(p))


# ----------------------------------------------------------- tube surgery

def _cut_disk_hole(m: TriSurfaceMesh, center, r, rim_pts, r_cut=None):
    """Remove the triangles meeting the disk of radius r_cut about `center`
    and stitch the cavity to a polygonal rim with vertices `rim_pts` (radius
    r <= r_cut). Cutting slightly wide keeps the stitch band's cross edges
    nearly radial outside the rim polygon, so the band cannot graze a tube
    erected on the rim.

    The disk must lie on a flat, locally unwrapped part of the mesh, away
    from its boundary. Returns (verts, tris, shifts, rim_index_array,
    winding_normal)."""
    center = np.asarray(center, dtype=float)
    r_cut = float(r) if r_cut is None else float(r_cut)
    if r_cut < r:
        raise ValueError("removal radius r_cut must be >= rim radius r")
    tri_pts = m.lifted_triangles()
    dists = point_triangle_distances(center, tri_pts)
    near = dists < r_cut
    if not np.any(near):
        raise ValueError("surgery disk does not meet the mesh")
    t0 = int(np.argmin(dists))
    normal = np.cross(tri_pts[t0, 1] - tri_pts[t0, 0],
                      tri_pts[t0, 2] - tri_pts[t0, 0])
    normal /= np.linalg.norm(normal)
    sd = (tri_pts - center[None, None, :]) @ normal
    in_plane = np.abs(sd).max(axis=1) <= 1e-9
    removed = near & in_plane
    if m.tri_shifts is not None and np.any(m.tri_shifts[removed] != 0):
        raise ValueError("surgery disk too close to the wrap seam")
    # nearby sheets (e.g. a wall ramp grazing past the plate) may hover
    # within r without meeting the disk; only triangles whose slice through
    # the disk plane actually enters the disk make the cut ill-posed
    for t in np.nonzero(near & ~in_plane)[0]:
        s = sd[t]
        cross = []
        for k in range(3):
            k2 = (k + 1) % 3
            if abs(s[k]) <= 1e-9:
                cross.append(tri_pts[t, k])
            elif s[k] * s[k2] < 0 and abs(s[k2]) > 1e-9:
                w = s[k] / (s[k] - s[k2])
                cross.append(tri_pts[t, k]
                             + w * (tri_pts[t, k2] - tri_pts[t, k]))
        if not cross:
            continue
        a = cross[0]
        b = cross[1] if len(cross) > 1 else cross[0]
        ab = b - a
        denom = float(ab @ ab)
        w = 0.0 if denom == 0.0 else np.clip((center - a) @ ab / denom, 0, 1)
        if np.linalg.norm(a + w * ab - center) < r_cut - 1e-12:
            raise ValueError("surgery disk must lie on a flat region")

    kept_tris = m.triangles[~removed]
    kept_shifts = (m.tri_shifts[~removed]
                   if m.tri_shifts is not None else None)
    probe = TriSurfaceMesh(m.vertices, kept_tris, tri_shifts=kept_shifts,
                           ambient=m.ambient, validate=False)
    old_boundary = set()
    for a, b in m.boundary_directed_edges():
        old_boundary.add(int(a))
        old_boundary.add(int(b))
    cavity = None
    for loop_idx in _boundary_loop_indices(probe):
        pts = m.vertices[loop_idx]
        dmax = np.linalg.norm(pts - center[None, :], axis=1).max()
        if dmax < 3.0 * r_cut + 1e-9 and not (set(loop_idx) & old_boundary):
            if cavity is not None:
                raise ValueError("surgery disk cut out more than one cavity")
            cavity = loop_idx
    if cavity is None:
        raise ValueError("surgery disk touches the mesh boundary")

    nv = m.vertices.shape[0]
    verts = np.vstack([m.vertices, rim_pts])
    rim_idx = np.arange(nv, nv + rim_pts.shape[0])
    ring_tris = stitch_rings(verts, list(cavity), list(rim_idx), center,
                             normal)
    tris = np.vstack([kept_tris, ring_tris])
    if kept_shifts is not None:
        shifts = np.vstack([kept_shifts,
                            np.zeros((ring_tris.shape[0], 3, 3),
                                     dtype=np.int64)])
    else:
        shifts = None
    return verts, tris, shifts, rim_idx, normal


def _boundary_loop_indices(m: TriSurfaceMesh):
    """Vertex index loops of the mesh boundary (helper for surgery)."""
    edges = {}
    for a, b in m.boundary_directed_edges():
        edges.setdefault(int(a), []).append(int(b))
    loops = []
    while edges:
        start = min(edges)
        loop = [start]
        cur = start
        while True:
            nxts = edges.get(cur)
            if not nxts:
                raise ValueError("boundary chaining failed")
            nxt = sorted(nxts)[0]
            nxts.remove(nxt)
            if not nxts:
                del edges[cur]
            if nxt == start:
                break
            loop.append(nxt)
            cur = nxt
        loops.append(np.array(loop, dtype=np.int64))
    return loops


def _lifted_tris(verts, tris, shifts, L):
    pts = verts[tris].astype(float)
    if shifts is not None and L is not None:
        cum = np.cumsum(shifts, axis=1)
        pts[:, 1] += shifts[:, 0] * L
        pts[:, 2] += cum[:, 1] * L
    return pts


def _tube_collides(tube_pts, other_pts, other_tris, tube_ids, offsets):
    """True when some tube triangle meets a non-tube triangle with which it
    shares no vertex (vertex-sharing pairs touch by construction)."""
    t_lo = tube_pts.min(axis=1) - 1e-9
    t_hi = tube_pts.max(axis=1) + 1e-9
    g_lo = t_lo.min(axis=0)
    g_hi = t_hi.max(axis=0)
    o_lo = other_pts.min(axis=1)
    o_hi = other_pts.max(axis=1)
    id_sets = [frozenset(ids) for ids in tube_ids]
    for off in offsets:
        lo = o_lo + off[None, :]
        hi = o_hi + off[None, :]
        near = np.nonzero(np.all(hi >= g_lo, axis=1)
                          & np.all(lo <= g_hi, axis=1))[0]
        for j in near:
            cand = np.all(t_hi >= lo[j], axis=1) & np.all(t_lo <= hi[j],
                                                          axis=1)
            if not cand.any():
                continue
            T2 = other_pts[j] + off
            vset = set(int(v) for v in other_tris[j])
            for i in np.nonzero(cand)[0]:
                if vset & id_sets[i]:
                    continue
                kind, pts = tri_tri_intersection(tube_pts[i], T2)
                if kind is not None and _intersection_measure(kind, pts) > 1e-9:
                    return True
    return False


def mesh_surgery(mA: TriSurfaceMesh, mB: TriSurfaceMesh, centerA, centerB,
                 r, side="Correct", n_rim=256, collar=0.05) -> TriSurfaceMesh:
    """Remove a disk of radius r around each center and join the two rims
    with a straight circular tube, producing one connected, coherently
    oriented mesh.

    side="Correct" keeps mB's original orientation in the glued result (the
    two boundary windings add); side="Opposite" reverses the tube's rim
    identification so coherent orientation forces mB to flip (the windings
    cancel). In a flat torus the tube axis may pass through the wrap; among
    the straight axis candidates the shortest collision-free one is used.

    `collar` widens the removal radius to r*(1+collar) so the stitch band
    approaches the rim almost radially instead of chord-like; this needs
    r*(1+collar) plus one local mesh step of clearance around each center.
    """
    if side not in ("Correct", "Opposite"):
        raise ValueError("side must be 'Correct' or 'Opposite'")
    if mA.ambient != mB.ambient:
        raise ValueError("meshes live in different ambients")
    ambient = mA.ambient
    centerA = np.asarray(centerA, dtype=float)
    centerB = np.asarray(centerB, dtype=float)
    r = float(r)
    r_cut = r * (1.0 + float(collar))
    L = ambient.periods if ambient.is_torus else None

    # probe both disk regions for their plane normals first
    def plane_normal(m, center):
        tri_pts = m.vertices[m.triangles]
        d = point_triangle_distances(center, tri_pts)
        t0 = int(np.argmin(d))
        nrm = np.cross(tri_pts[t0, 1] - tri_pts[t0, 0],
                       tri_pts[t0, 2] - tri_pts[t0, 0])
        return nrm / np.linalg.norm(nrm)

    nA = plane_normal(mA, centerA)
    nB = plane_normal(mB, centerB)
    if np.linalg.norm(np.cross(nA, nB)) > 1e-9:
        raise ValueError("rim-matching failure: surgery disks not parallel")

    e1 = np.cross(nA, [0.0, 0.0, 1.0])
    if np.linalg.norm(e1) < 1e-9:
        e1 = np.cross(nA, [1.0, 0.0, 0.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(nA, e1)
    theta = 2.0 * np.pi * np.arange(n_rim) / n_rim
    circ = r * (np.cos(theta)[:, None] * e1[None, :]
                + np.sin(theta)[:, None] * e2[None, :])
    rimA_pts = centerA[None, :] + circ
    rimB_pts = centerB[None, :] + circ

    vA, tA, sA, rimA, nwA = _cut_disk_hole(mA, centerA, r, rimA_pts,
                                           r_cut=r_cut)
    vB, tB, sB, rimB, nwB = _cut_disk_hole(mB, centerB, r, rimB_pts,
                                           r_cut=r_cut)

    # candidate straight axes (through the wrap when the ambient is a torus)
    if ambient.is_torus:
        offsets = ambient.min_image_offsets() * L[None, :]
    else:
        offsets = np.zeros((1, 3))
    cands = []
    for off in offsets:
        dvec = centerB + off - centerA
        dlen = np.linalg.norm(dvec)
        if dlen < r * 1e-6:
            continue
        if np.linalg.norm(np.cross(dvec / dlen, nA)) > 1e-9:
            continue
        cands.append((dlen, dvec))
    if not cands:
        raise ValueError("rim-matching failure: no straight axis joins the "
                         "disk centers along their common normal")
    cands.sort(key=lambda t: t[0])

    nvA = vA.shape[0]
    base_other_pts = np.vstack([
        _lifted_tris(vA, tA, sA, L),
        _lifted_tris(vB, tB, sB, L) ])
    base_other_tris = np.vstack([tA, tB + nvA])
    check_offsets = (ambient.min_image_offsets() * L[None, :]
                     if ambient.is_torus else np.zeros((1, 3)))

    chosen = None
    for dlen, dvec in cands:
        n_rows = max(2, int(math.ceil(dlen / (2.0 * np.pi * r / n_rim))))
        n_rows = min(n_rows, 64)
        rows_lift = [rimA_pts + (k / n_rows) * dvec[None, :]
                     for k in range(1, n_rows)]
        tube_rows_lift = [rimA_pts] + rows_lift + [rimA_pts + dvec[None, :]]
        tube_tris_local = []
        for k in range(n_rows):
            for j in range(n_rim):
                j2 = (j + 1) % n_rim
                a = (k, j)
                b = (k, j2)
                c = (k + 1, j)
                d2 = (k + 1, j2)
                tube_tris_local.append((a, c, d2))
                tube_tris_local.append((a, d2, b))
        tube_pts = np.array([[tube_rows_lift[k][j] for (k, j) in tri]
                             for tri in tube_tris_local])
        # exclude rim-sharing pairs via sentinel global ids
        tube_ids = []
        for tri in tube_tris_local:
            ids = []
            for (k, j) in tri:
                if k == 0:
                    ids.append(int(rimA[j]))
                elif k == n_rows:
                    ids.append(int(rimB[j]) + nvA)
                else:
                    ids.append(-1 - (k * n_rim + j))
            tube_ids.append(ids)
        if not _tube_collides(tube_pts, base_other_pts, base_other_tris,
                              tube_ids, check_offsets):
            chosen = (dlen, dvec, n_rows, rows_lift, tube_tris_local)
            break
    if chosen is None:
        raise ValueError("tube collision: every straight tube between the "
                         "rims meets the surfaces away from its rims")
    dlen, dvec, n_rows, rows_lift, tube_tris_local = chosen

    def assemble(pairing):
        verts = [vA, vB]
        interior = []
        if rows_lift:
            interior = np.vstack(rows_lift)
            if ambient.is_torus:
                wrapped, _ = ambient.wrap(interior)
            else:
                wrapped = interior
            verts.append(wrapped)
        verts = np.vstack(verts)
        nvB = vB.shape[0]

        def gid(k, j):
            if k == 0:
                return int(rimA[j])
            if k == n_rows:
                return int(rimB[pairing[j]]) + nvA
            return nvA + nvB + (k - 1) * n_rim + j

        # lattice translation carrying mB's copy next to the tube's far end
        off_lat = dvec - (centerB - centerA)

        def glift(k, j):
            if k == n_rows:
                return rimB_pts[pairing[j]] + off_lat
            if k == 0:
                return rimA_pts[j]
            return rows_lift[k - 1][j]

        tris = []
        lifts = []
        for tri in tube_tris_local:
            tris.append([gid(k, j) for (k, j) in tri])
            lifts.append([glift(k, j) for (k, j) in tri])
        tris = np.array(tris, dtype=np.int64)
        lifts = np.array(lifts)
        if ambient.is_torus:
            pos_edges = verts[tris[:, [1, 2, 0]]] - verts[tris]
            lift_edges = lifts[:, [1, 2, 0]] - lifts
            sf = (lift_edges - pos_edges) / L[None, None, :]
            shifts = np.rint(sf).astype(np.int64)
            if np.max(np.abs(sf - shifts)) > 1e-6:
                raise ValueError("tube rows are not lattice-consistent")
        else:
            shifts = None
        all_tris = np.vstack([tA, tB + nvA, tris])
        if ambient.is_torus:
            all_shifts = np.vstack([sA, sB, shifts])
        else:
            all_shifts = None
        return verts, all_tris, all_shifts

    identity = np.arange(n_rim)
    reflected = (-identity) % n_rim
    ntA = tA.shape[0]
    ntB = tB.shape[0]
    for pairing in (identity, reflected):
        verts, tris, shifts = assemble(pairing)
        tris2, shifts2, flipped = orient_coherently(tris, shifts, root=0)
        b_flipped = bool(flipped[ntA:ntA + ntB].any())
        if flipped[ntA:ntA + ntB].any() != flipped[ntA:ntA + ntB].all():
            raise ValueError("surgery produced an incoherent cap")
        keep_B = not b_flipped
        if keep_B == (side == "Correct"):
            # drop the cut-out disk interiors (now unreferenced vertices)
            used = np.unique(tris2)
            remap = -np.ones(verts.shape[0], dtype=np.int64)
            remap[used] = np.arange(used.size)
            return TriSurfaceMesh(verts[used], remap[tris2],
                                  tri_shifts=shifts2, ambient=ambient)
    raise ValueError("rim-matching failure: neither rim pairing realizes "
                     "the requested side")


# -------------------------------------------------- tilted slices (IIIB)

def example_IIIB_ambient(p: ExampleIIIBParams):
    d = p.delta
    base = np.array([
        [d, d, d], [1.0 - d, d, d], [1.0 - d, 1.0 - d, d], [d, 1.0 - d, d]])
    cube = Parallelepiped(base, np.array([0.0, 0.0, 1.0 - 2.0 * d]))
    return flat_torus((1.0, 1.0, 1.0), excluded=cube)


def build_IIIB_gamma_c(p: ExampleIIIBParams) -> ClosedPolyline:
    d, c = p.delta, p.c
    pts = np.array([
        [d, d, c], [1.0 - d, d, c], [1.0 - d, 1.0 - d, c], [d, 1.0 - d, c]])
    return ClosedPolyline(pts, shifts=np.zeros((4, 3), dtype=np.int64),
                          ambient=example_IIIB_ambient(p))


def _iiib_hole_intervals(p: ExampleIIIBParams):
    """v-intervals of the cube shadow on the tilted {y+z=d} slice: v is in a
    hole when v lies in [delta, 1-delta] and (d-v) mod 1 does, too."""
    d, dd = p.delta, p.d

    def hit(v):
        return (d <= v <= 1.0 - d) and (d <= (dd - v) % 1.0 <= 1.0 - d)

    cuts = {d, 1.0 - d}
    for z_edge in (d, 1.0 - d):
        v = (dd - z_edge) % 1.0
        if d < v < 1.0 - d:
            cuts.add(v)
    cuts = sorted(cuts)
    intervals = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hit(0.5 * (lo + hi)):
            intervals.append((lo, hi))
    return intervals


def build_IIIB_surfaces(p: ExampleIIIBParams, res=0.025):
    """Returns (sigma_c mesh, s_d mesh, gamma_c curve, alpha_d loop list):
    the flat z=c slice minus the cube square, the tilted {y+z=d mod 1}
    slice minus its cube shadow, the cube's level-c square, and the
    boundary loops of the tilted slice."""
    p.validate()
    d, c, dd = p.delta, p.c, p.d
    ambient = example_IIIB_ambient(p)
    v_beta = (dd - c) % 1.0
    tol = 1e-12

    us = stations(0.0, 1.0, res, forced=(d, 1.0 - d))
    vs_sigma = stations(0.0, 1.0, res, forced=(d, 1.0 - d),
                        avoid=(v_beta,))

    def sigma_hole(u0, u1, v0, v1):
        return (u0 >= d - tol and u1 <= 1.0 - d + tol
                and v0 >= d - tol and v1 <= 1.0 - d + tol)

    sigma_mesh = chart_torus_mesh(
        lambda u, v: (u, v, c), us[:-1], vs_sigma[:-1], ambient,
        u_period=1.0, v_period=1.0, hole=sigma_hole)
    sigma_mesh = _orient_torus_to_target(sigma_mesh, build_IIIB_gamma_c(p))

    intervals = _iiib_hole_intervals(p)
    forced_v = tuple(x for lohi in intervals for x in lohi)
    vs_sd = stations(0.0, 1.0, res, forced=forced_v, avoid=(v_beta,))

    def sd_hole(u0, u1, v0, v1):
        if not (u0 >= d - tol and u1 <= 1.0 - d + tol):
            return False
        return any(v0 >= lo - tol and v1 <= hi + tol
                   for lo, hi in intervals)

    sd_mesh = chart_torus_mesh(
        lambda u, v: (u, v, dd - v), us[:-1], vs_sd[:-1], ambient,
        u_period=1.0, v_period=1.0, hole=sd_hole)
    alpha = boundary_loops(sd_mesh)
    return sigma_mesh, sd_mesh, build_IIIB_gamma_c(p), alpha


# ------------------------------------------- sphere circles and catenoids

def build_sphere_circles(n=256):
    """Polygonal circles on the unit sphere: (gamma1+, gamma1-, gamma2+,
    gamma2-) at heights (1/5, -1/10, 1/10, -1/5), radii sqrt(1-z^2); the
    second pair is the z-reflection of the first."""
    n = int(n)
    if n < 3:
        raise ValueError("need at least 3 segments")
    theta = 2.0 * np.pi * np.arange(n) / n
    out = []
    for z in (0.2, -0.1, 0.1, -0.2):
        rr = math.sqrt(1.0 - z * z)
        pts = np.column_stack([rr * np.cos(theta), rr * np.sin(theta),
                               np.full(n, z)])
        out.append(ClosedPolyline(pts))
    return tuple(out)


def catenoid_mesh(fit, target_edge=0.02, n_theta=None) -> TriSurfaceMesh:
    """Analytic catenoid r = a cosh((z-b)/a) meshed between its two rings;
    the z=0 ring is forced into the station list when the span crosses it."""
    z_lo, z_hi = sorted((fit.z1, fit.z2))
    forced = (0.0,) if z_lo < 0.0 < z_hi else ()
    zs = stations(z_lo, z_hi, target_edge, forced=forced)
    if n_theta is None:
        rmax = max(fit.radius_at(z_lo), fit.radius_at(z_hi))
        n_theta = max(16, int(math.ceil(2.0 * np.pi * rmax / target_edge)))
    return _ring_surface(zs, [fit.radius_at(z) for z in zs], n_theta)


def frustum_mesh(r1, z1, r2, z2, target_edge=0.02, n_theta=None):
    """Straight-sided annulus between two horizontal circles (solver
    initialization)."""
    zs = stations(min(z1, z2), max(z1, z2), target_edge)
    if n_theta is None:
        n_theta = max(16, int(math.ceil(2.0 * np.pi * max(r1, r2)
                                        / target_edge)))
    if z2 < z1:
        r1, r2, z1, z2 = r2, r1, z2, z1
    rs = [r1 + (r2 - r1) * (z - z1) / (z2 - z1) for z in zs]
    return _ring_surface(zs, rs, n_theta)


def _ring_surface(zs, radii, n_theta):
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ct, st = np.cos(theta), np.sin(theta)
    verts = []
    for z, rr in zip(zs, radii):
        verts.append(np.column_stack([rr * ct, rr * st,
                                      np.full(n_theta, z)]))
    verts = np.vstack(verts)
    tris = []
    for k in range(len(zs) - 1):
        base = k * n_theta
        for j in range(n_theta):
            j2 = (j + 1) % n_theta
            a, b = base + j, base + j2
            c, d = base + n_theta + j, base + n_theta + j2
            tris.append((a, c, d))
            tris.append((a, d, b))
    return TriSurfaceMesh(verts, np.array(tris, dtype=np.int64))
