"""Wavefront OBJ export/import for triangle meshes.

Plain ASCII "v x y z" / "f i j k" lines (1-based indices, LF endings).
Torus meshes additionally write a JSON sidecar (<path>.json) holding the
periods, per-triangle edge shifts, boundary flags, and the excluded region,
so a round trip reproduces the mesh exactly.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .core import Ambient, EUCLIDEAN, Parallelepiped, TriSurfaceMesh


def write_obj(m: TriSurfaceMesh, path):
    lines = []
    for p in m.vertices:
        lines.append("v %.17g %.17g %.17g" % (p[0], p[1], p[2]))
    for t in m.triangles:
        lines.append("f %d %d %d" % (t[0] + 1, t[1] + 1, t[2] + 1))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if m.ambient.is_torus:
        side = {
            "periods": list(map(float, m.ambient.periods)),
            "tri_shifts": m.tri_shifts.tolist(),
            "boundary_fixed": m.boundary_fixed.astype(int).tolist(),
        }
        if m.ambient.excluded is not None:
            side["excluded"] = {
                "base": m.ambient.excluded.base.tolist(),
                "lateral": m.ambient.excluded.lateral.tolist(),
            }
        with open(path + ".json", "w", newline="\n") as fh:
            json.dump(side, fh)


def read_obj(path) -> TriSurfaceMesh:
    verts = []
    tris = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) - 1 for tok in parts[1:4]]
                tris.append(idx)
    verts = np.array(verts)
    tris = np.array(tris, dtype=np.int64)
    sidecar = path + ".json"
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            side = json.load(fh)
        excluded = None
        if side.get("excluded"):
            excluded = Parallelepiped(side["excluded"]["base"],
                                      side["excluded"]["lateral"])
        ambient = Ambient("flat_torus", side["periods"], excluded)
        return TriSurfaceMesh(verts, tris,
                              np.array(side["boundary_fixed"], dtype=bool),
                              np.array(side["tri_shifts"], dtype=np.int64),
                              ambient)
    return TriSurfaceMesh(verts, tris, ambient=EUCLIDEAN)
