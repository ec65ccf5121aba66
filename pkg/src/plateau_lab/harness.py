"""End-to-end verification pipelines for the four worked examples, with
JSON-serializable reports and OBJ artifact output."""

from __future__ import annotations

import json
import math
import os

import numpy as np

from . import constructions as con
from . import ledger
from .geom.core import (boundary_multiplicity, euler_characteristic,
                        is_coherently_oriented, mesh_area, polyline_length)
from .geom.distance import hausdorff_distance, polyline_min_distance
from .geom.intersect import curve_as_polyline, self_intersections, \
    surface_intersection
from .geom.objio import write_obj
from .solver import SolveOptions, minimize_area


class ExampleReport:
    """Verification record for one example run: parameters, ledger values,
    solver runs, named checks, artifact paths, and free-form notes. Overall
    pass means every check passed."""

    def __init__(self, example_id, params, ledger_entries=(), solver_runs=(),
                 checks=(), artifacts=(), notes=()):
        if example_id not in ("I", "II", "IIIA", "IIIB"):
            raise ValueError("unknown example id %r" % (example_id,))
        self.example_id = example_id
        self.params = dict(params)
        self.ledger = list(ledger_entries)
        self.solver_runs = list(solver_runs)
        self.checks = list(checks)
        self.artifacts = list(artifacts)
        self.notes = list(notes)

    @property
    def overall_pass(self):
        return all(c["pass"] for c in self.checks)

    def to_dict(self):
        return {
            "example_id": self.example_id,
            "params": self.params,
            "ledger": self.ledger,
            "solver_runs": self.solver_runs,
            "checks": self.checks,
            "artifacts": self.artifacts,
            "notes": self.notes,
            "overall_pass": self.overall_pass,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        rep = cls(d["example_id"], d["params"], d.get("ledger", ()),
                  d.get("solver_runs", ()), d.get("checks", ()),
                  d.get("artifacts", ()), d.get("notes", ()))
        return rep


def _check(checks, name, expected, observed, tolerance, passed):
    checks.append({"name": str(name), "expected": expected,
                   "observed": observed, "tolerance": tolerance,
                   "pass": bool(passed)})


def _write_mesh(out_dir, artifacts, name, mesh):
    if out_dir is None:
        return
    path = os.path.join(out_dir, name)
    write_obj(mesh, path)
    artifacts.append(name)


def _finish(report, out_dir):
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "report.json")
        report.artifacts.append("report.json")
        with open(path, "w", newline="\n") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    return report


# --------------------------------------------------------------- Example I

def verify_example_I(p, eps_sequence, out_dir=None, res=0.05,
                     opts=None) -> ExampleReport:
    """Bridged hexagon pair: at each eps, solve from the flat-with-strips
    initialization and from the embedded pinched-sail initialization, then
    compare both minima against the closed-form areas and record the
    Hausdorff drift of the strip minimizer."""
    p.validate()
    C = p.C
    thr = ledger.eps_threshold(C)
    eps_sequence = [float(e) for e in eps_sequence]
    for e in eps_sequence:
        if not e < thr:
            raise ValueError("eps %g is not below eps_threshold(C)=%.9g"
                             % (e, thr))
    if opts is None:
        opts = SolveOptions(max_iters=2500, grad_tol=0.02)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)

    sh = ledger.sigma_hat_area(C)
    entries = [sh.to_dict(),
               ledger.LedgerEntry("eps_threshold", thr,
                                  "1 - 2/(C + sqrt(C^2 + 1))",
                                  {"C": C}).to_dict()]
    checks = []
    runs = []
    artifacts = []
    notes = []
    haus = []
    ratios = []

    for e in eps_sequence:
        tag = "eps=%g" % e
        scale = e / p.eps
        pe = con.ExampleIParams(e, C, p.bridge_width * scale, p.trim * scale)
        eh = ledger.ehat_area(e, C)
        entries.append(eh.to_dict())
        _check(checks, "ledger ehat < sigma_hat [%s]" % tag, True,
               bool(eh.value < sh.value), 0.0, eh.value < sh.value)

        ehat_mesh = con.build_ehat_mesh(pe, res)
        _write_mesh(out_dir, artifacts, "ehat_init_%s.obj" % tag, ehat_mesh)
        de, rep_d = minimize_area(ehat_mesh, opts)
        runs.append(dict(rep_d.to_dict(), context="D^eps solve [%s]" % tag))
        _write_mesh(out_dir, artifacts, "De_%s.obj" % tag, de)
        area_d = mesh_area(de)
        _check(checks, "D^eps area < ehat_area [%s]" % tag, eh.value,
               area_d, 0.0, area_d < eh.value)
        n_self = len(self_intersections(de))
        _check(checks, "D^eps self-intersecting [%s]" % tag, 1, n_self, 0,
               n_self >= 1)

        sail = con.build_sigmahat_init(pe, res)
        _write_mesh(out_dir, artifacts, "sigmahat_init_%s.obj" % tag, sail)
        se, rep_s = minimize_area(sail, opts)
        runs.append(dict(rep_s.to_dict(),
                         context="Sigma-hat solve [%s]" % tag))
        _write_mesh(out_dir, artifacts, "sigmahat_min_%s.obj" % tag, se)
        area_s = mesh_area(se)
        n_self_s = len(self_intersections(se))
        _check(checks, "sigma-hat minimizer embedded [%s]" % tag, 0,
               n_self_s, 0, n_self_s == 0)
        _check(checks, "sigma-hat minimizer within 10%% of sigma_hat [%s]"
               % tag, sh.value, area_s, 0.1,
               abs(area_s - sh.value) <= 0.1 * sh.value)
        _check(checks, "sigma-hat minimizer > D^eps area [%s]" % tag,
               area_d, area_s, 0.0, area_s > area_d)
        _check(checks, "both solves converged [%s]" % tag, True,
               bool(rep_d.converged and rep_s.converged), 0.0,
               rep_d.converged and rep_s.converged)
        haus.append(hausdorff_distance(de, ehat_mesh, 0.02))
        ratios.append(sh.value / eh.value)

    _check(checks, "hausdorff(D^eps, E-hat) non-increasing", "non-increasing",
           haus, 0.0,
           all(b <= a + 1e-12 for a, b in zip(haus, haus[1:])))
    _check(checks, "area ratio sigma_hat/ehat increases as eps decreases",
           "increasing", ratios, 0.0,
           all(b > a for a, b in zip(ratios, ratios[1:])))
    notes.append("hausdorff distances per eps: %s"
                 % ", ".join("%.6g" % h for h in haus))

    report = ExampleReport("I", dict(p.to_dict(),
                                     eps_sequence=eps_sequence, res=res,
                                     solver=opts.to_dict()),
                           entries, runs, checks, artifacts, notes)
    return _finish(report, out_dir)


# -------------------------------------------------------------- Example II

def verify_example_II(p, out_dir=None, res=0.02, fine_step=1.5e-4,
                      n_rim=256) -> ExampleReport:
    """Sheared box in a flat torus: compute the balance height, build the
    slice and cap at it, check their measured areas against the closed
    forms, and run the tube surgery on both sides of the orientation
    dichotomy."""
    p.validate()
    h, d, th, eps = p.h, p.delta, p.theta0, p.eps
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    checks = []
    entries = []
    artifacts = []
    notes = []

    sc = ledger.sigma_c_area(d)
    c0 = ledger.solve_c0(d, h, th, variant="Exact")
    c0p = ledger.solve_c0(d, h, th, variant="Paper")
    entries.append(sc.to_dict())
    entries.append(ledger.LedgerEntry(
        "balance_height_exact", c0, "solve_c0(delta, h, theta0, 'Exact')",
        {"delta": d, "h": h, "theta0": th}).to_dict())
    entries.append(ledger.LedgerEntry(
        "balance_height_paper", c0p, "solve_c0(delta, h, theta0, 'Paper')",
        {"delta": d, "h": h, "theta0": th}).to_dict())
    if min(c0 - h / 3.0, 2.0 * h / 3.0 - c0) < 1e-12 * h:
        notes.append("balance height sits on a face of the box "
                     "(degenerate slab)")
    gain = ledger.surgery_gain(eps, h, c0)
    dc_exact = ledger.disk_Dc_area(d, h, th, c0, variant="Exact")
    dc_paper = ledger.disk_Dc_area(d, h, th, c0p, variant="Paper")
    entries.extend([gain.to_dict(), dc_exact.to_dict(), dc_paper.to_dict()])
    _check(checks, "cap area equals slice area at the balance height",
           sc.value, dc_exact.value, 1e-9,
           abs(dc_exact.value - sc.value) <= 1e-9)

    pc = con.ExampleIIParams(h, d, th, eps, c0)
    s0 = (c0 - h / 3.0) / math.tan(th)
    if s0 < 2.0 * eps:
        raise ValueError(
            "surgery tube does not fit between the cross-section rim and "
            "the box corner (need (c0 - h/3) cot(theta0) >= 2 eps); "
            "decrease eps or theta0")
    xc = 1.0 - d - 0.5 * s0
    yc = 0.5
    pad = 8e-4
    win_x = (max(xc - eps - pad, d + 1e-9),
             min(xc + eps + pad, 1.0 - d), fine_step, 0)
    win_y = (yc - eps - pad, yc + eps + pad, fine_step, 1)

    sigma_c = con.build_sigma_c_mesh(pc, res, windows=(win_x, win_y))
    d_c = con.build_Dc_mesh(pc, res, windows=(win_x, win_y))
    _write_mesh(out_dir, artifacts, "sigma_c.obj", sigma_c)
    _write_mesh(out_dir, artifacts, "d_c.obj", d_c)
    a_sigma = mesh_area(sigma_c)
    a_cap = mesh_area(d_c)
    _check(checks, "slice mesh area matches ledger", sc.value, a_sigma,
           1e-6, abs(a_sigma - sc.value) <= 1e-6)
    _check(checks, "cap mesh area matches ledger", dc_exact.value, a_cap,
           1e-6, abs(a_cap - dc_exact.value) <= 1e-6)

    center_a = (xc, yc, c0)
    center_b = (xc, yc, h / 3.0)
    glued = con.mesh_surgery(sigma_c, d_c, center_a, center_b, eps,
                             side="Correct", n_rim=n_rim)
    _write_mesh(out_dir, artifacts, "sigma_prime_correct.obj", glued)
    _check(checks, "glued surface connected", 1,
           glued.connected_components(), 0,
           glued.connected_components() == 1)
    _check(checks, "glued surface coherently oriented", True,
           is_coherently_oriented(glued), 0.0,
           is_coherently_oriented(glued))
    gamma = con.build_gamma_c(pc)
    mult = boundary_multiplicity(glued, gamma, 1e-6)
    _check(checks, "boundary multiplicity (Correct side)", 2, int(mult), 0,
           int(mult) == 2)
    a_glued = mesh_area(glued)
    bound = 2.0 * sc.value - 0.9 * gain.value
    _check(checks, "glued area beats twice the slice by 0.9 gain", bound,
           a_glued, 0.0, a_glued < bound)
    _check(checks, "euler characteristic drops by 2",
           euler_characteristic(sigma_c) + euler_characteristic(d_c) - 2,
           euler_characteristic(glued), 0,
           euler_characteristic(glued)
           == euler_characteristic(sigma_c) + euler_characteristic(d_c) - 2)

    opposite = con.mesh_surgery(sigma_c, d_c, center_a, center_b, eps,
                                side="Opposite", n_rim=n_rim)
    _write_mesh(out_dir, artifacts, "sigma_prime_opposite.obj", opposite)
    mult0 = boundary_multiplicity(opposite, gamma, 1e-6)
    _check(checks, "boundary multiplicity (Opposite side)", 0, int(mult0),
           0, int(mult0) == 0)

    notes.append("the two-slice decomposition is strictly beaten: "
                 "area(glued) = %.12g < 2 x slice area = %.12g"
                 % (a_glued, 2.0 * sc.value))

    report = ExampleReport("II", dict(p.to_dict(), res=res,
                                      fine_step=fine_step, n_rim=n_rim),
                           entries, [], checks, artifacts, notes)
    return _finish(report, out_dir)


# ------------------------------------------------------------- Example IIIA

def verify_example_IIIA(out_dir=None, target_edge=0.02,
                        opts=None) -> ExampleReport:
    """Two circle pairs on the unit sphere: fit the catenoids, check the
    annulus-vs-two-disks comparison, reproduce the catenoid area with the
    solver, and intersect the two analytic annuli."""
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    if opts is None:
        opts = SolveOptions(max_iters=4000, grad_tol=1e-5)
    checks = []
    entries = []
    artifacts = []
    notes = []
    runs = []

    r_top = math.sqrt(24.0) / 5.0    # radius at z = +-1/5
    r_mid = math.sqrt(99.0) / 10.0   # radius at z = -+1/10
    fit1 = ledger.catenoid_fit(r_top, 0.2, r_mid, -0.1)
    fit2 = ledger.catenoid_fit(r_mid, 0.1, r_top, -0.2)
    entries.append(ledger.LedgerEntry(
        "catenoid_fit_gamma1", fit1.a,
        "largest-a root of a cosh((z-b)/a) through both circles",
        {"b": fit1.b, "residual": fit1.residual}).to_dict())
    entries.append(ledger.LedgerEntry(
        "catenoid_fit_gamma2", fit2.a,
        "largest-a root of a cosh((z-b)/a) through both circles",
        {"b": fit2.b, "residual": fit2.residual}).to_dict())
    _check(checks, "fit residual (gamma1 pair)", 0.0, fit1.residual, 1e-10,
           fit1.residual <= 1e-10)
    _check(checks, "fit residual (gamma2 pair)", 0.0, fit2.residual, 1e-10,
           fit2.residual <= 1e-10)
    _check(checks, "mirrored pair fits the mirrored catenoid",
           (fit1.a, -fit1.b), (fit2.a, fit2.b), 1e-9,
           abs(fit2.a - fit1.a) <= 1e-9 and abs(fit2.b + fit1.b) <= 1e-9)

    area1 = ledger.catenoid_area(fit1)
    disk_sum = math.pi * (24.0 / 25.0 + 99.0 / 100.0)
    entries.append(area1.to_dict())
    entries.append(ledger.LedgerEntry(
        "disk_sum", disk_sum, "pi (24/25) + pi (99/100)", {}).to_dict())
    _check(checks, "annulus beats the two flat disks", disk_sum,
           area1.value, 0.0, area1.value < disk_sum)

    frustum = con.frustum_mesh(r_top, 0.2, r_mid, -0.1, target_edge)
    solved, rep = minimize_area(frustum, opts)
    runs.append(dict(rep.to_dict(), context="catenoid solve (gamma1 pair)"))
    _write_mesh(out_dir, artifacts, "catenoid_solved.obj", solved)
    a_solved = mesh_area(solved)
    _check(checks, "solver annulus matches the closed form within 1%",
           area1.value, a_solved, 0.01,
           abs(a_solved - area1.value) <= 0.01 * area1.value)

    a1_mesh = con.catenoid_mesh(fit1, target_edge)
    fit2m = ledger.CatenoidFit(fit1.a, -fit1.b, -0.2, 0.1, r_top, r_mid,
                               fit2.residual)
    a2_mesh = con.catenoid_mesh(fit2m, target_edge)
    _write_mesh(out_dir, artifacts, "annulus_1.obj", a1_mesh)
    _write_mesh(out_dir, artifacts, "annulus_2.obj", a2_mesh)
    curves = surface_intersection(a1_mesh, a2_mesh)
    closed = [c for c in curves if c.closed]
    _check(checks, "the annuli intersect in one closed loop", 1,
           len(closed), 0, len(closed) == 1 and len(curves) == 1)
    if closed:
        pts = closed[0].points
        zmax = float(np.abs(pts[:, 2]).max())
        rho0 = fit1.a * math.cosh(fit1.b / fit1.a)
        rdev = float(np.abs(np.linalg.norm(pts[:, :2], axis=1) - rho0).max())
        _check(checks, "intersection loop lies on the symmetry plane", 0.0,
               zmax, 1e-6, zmax <= 1e-6)
        _check(checks, "intersection loop radius matches the waist circle",
               rho0, rho0 + rdev, 1e-3, rdev <= 1e-3)
        notes.append("waist circle radius %.12g, loop radial deviation %.3g"
                     % (rho0, rdev))

    report = ExampleReport("IIIA", {"target_edge": target_edge,
                                    "solver": opts.to_dict()},
                           entries, runs, checks, artifacts, notes)
    return _finish(report, out_dir)


# ------------------------------------------------------------- Example IIIB

def verify_example_IIIB(p, out_dir=None, res=0.025) -> ExampleReport:
    """Cube in the unit torus: flat z-slice against the tilted slice — the
    two spanning tori with disjoint boundaries that nevertheless cross in a
    closed curve."""
    p.validate()
    d, c, dd = p.delta, p.c, p.d
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    checks = []
    entries = []
    artifacts = []
    notes = []

    thr = ledger.iiib_threshold_check(d)
    entries.append(ledger.LedgerEntry(
        "iiib_threshold", thr["slice_area"],
        "slice area 1-(1-2 delta)^2 vs disk area (1-2 delta)^2",
        {"delta": d, "disk_area": thr["disk_area"]}).to_dict())
    _check(checks, "slice regime (slice beats the disk)", "slice",
           thr["winner"], 0.0, thr["winner"] == "slice")

    sigma_c, s_d, gamma_c, alpha = con.build_IIIB_surfaces(p, res)
    _write_mesh(out_dir, artifacts, "sigma_c.obj", sigma_c)
    _write_mesh(out_dir, artifacts, "s_d.obj", s_d)

    dmin = min(polyline_min_distance(gamma_c, a) for a in alpha)
    _check(checks, "boundary curves are disjoint", "> 0", dmin, 0.0,
           dmin > 1e-9)

    expect_two = 2.0 * d < dd < 1.0 - 2.0 * d
    _check(checks, "tilted slice boundary component count",
           2 if expect_two else 1, len(alpha), 0,
           len(alpha) == (2 if expect_two else 1))

    curves = surface_intersection(sigma_c, s_d)
    closed = [k for k in curves if k.closed]
    _check(checks, "slices intersect in one closed loop", 1, len(closed),
           0, len(closed) == 1 and len(curves) == 1)
    if closed:
        pts = closed[0].points
        y_beta = (dd - c) % 1.0
        dev = float(max(np.abs(pts[:, 1] - y_beta).max(),
                        np.abs(pts[:, 2] - c).max()))
        _check(checks, "crossing curve is the exact line y=%.6g, z=%.6g"
               % (y_beta, c), 0.0, dev, 1e-9, dev <= 1e-9)
        beta = curve_as_polyline(closed[0], sigma_c.ambient)
        notes.append("crossing curve length %.12g" % polyline_length(beta))

    report = ExampleReport("IIIB", dict(p.to_dict(), res=res),
                           entries, [], checks, artifacts, notes)
    return _finish(report, out_dir)
