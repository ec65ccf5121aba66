"""Command-line front end: build named meshes, evaluate closed-form areas,
run the minimizer on an OBJ file, and drive the four example pipelines."""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources

from . import constructions as con
from . import harness, ledger
from .geom.objio import read_obj, write_obj
from .solver import SolveOptions, cone_over_polyline, minimize_area


def _parse_params(pairs):
    out = {}
    for item in pairs or ():
        if "=" not in item:
            raise SystemExit("bad --param %r (expected key=value)" % item)
        k, v = item.split("=", 1)
        try:
            out[k] = float(v)
        except ValueError:
            out[k] = v
    return out


def _pop(params, key, default=None):
    if key in params:
        return params.pop(key)
    if default is None:
        raise SystemExit("missing required parameter %r" % key)
    return default


def _example_I_params(params):
    return con.ExampleIParams(
        _pop(params, "eps", 0.05), _pop(params, "C", 10.0),
        _pop(params, "bridge_width", 0.025), params.pop("trim", None))


def _example_II_params(params):
    return con.ExampleIIParams(
        _pop(params, "h", 0.0058), _pop(params, "delta", 0.15),
        _pop(params, "theta0", math.atan(1.0 / 15.0)),
        _pop(params, "eps", 0.006), _pop(params, "c", 0.0029))


def _example_IIIB_params(params):
    return con.ExampleIIIBParams(
        _pop(params, "delta", 0.1), _pop(params, "c", 0.15),
        _pop(params, "d", 0.1))


def cmd_build(args):
    params = _parse_params(args.param)
    name = args.name
    if name == "ehat":
        mesh = con.build_ehat_mesh(_example_I_params(params),
                                   params.pop("res", 0.05))
    elif name == "sigmahat_init":
        mesh = con.build_sigmahat_init(_example_I_params(params),
                                       params.pop("res", 0.05))
    elif name == "tau_cone":
        tau, _ = con.build_tau_and_E(params.pop("res", 0.05))
        apex = (0.0, 0.0, params.pop("apex_height", 1.0))
        mesh = cone_over_polyline(tau, apex, params.pop("target_edge", 0.05))
    elif name == "tau_disk":
        _, mesh = con.build_tau_and_E(params.pop("res", 0.05))
    elif name == "sigma_c":
        mesh = con.build_sigma_c_mesh(_example_II_params(params),
                                      params.pop("res", 0.02))
    elif name == "d_c":
        mesh = con.build_Dc_mesh(_example_II_params(params),
                                 params.pop("res", 0.02))
    elif name == "iiib_sigma_c":
        mesh = con.build_IIIB_surfaces(_example_IIIB_params(params),
                                       params.pop("res", 0.025))[0]
    elif name == "iiib_s_d":
        mesh = con.build_IIIB_surfaces(_example_IIIB_params(params),
                                       params.pop("res", 0.025))[1]
    elif name == "frustum":
        mesh = con.frustum_mesh(
            _pop(params, "r1"), _pop(params, "z1"), _pop(params, "r2"),
            _pop(params, "z2"), params.pop("target_edge", 0.02))
    elif name == "catenoid":
        fit = ledger.catenoid_fit(_pop(params, "r1"), _pop(params, "z1"),
                                  _pop(params, "r2"), _pop(params, "z2"))
        mesh = con.catenoid_mesh(fit, params.pop("target_edge", 0.02))
    else:
        raise SystemExit(
            "unknown construction %r (choose from: ehat, sigmahat_init, "
            "tau_cone, tau_disk, sigma_c, d_c, iiib_sigma_c, iiib_s_d, "
            "frustum, catenoid)" % name)
    if params:
        raise SystemExit("unused parameters: %s" % ", ".join(sorted(params)))
    write_obj(mesh, args.out)
    print("wrote %s (%d vertices, %d triangles)"
          % (args.out, mesh.vertices.shape[0], mesh.triangles.shape[0]))
    return 0


def cmd_ledger(args):
    params = _parse_params(args.param)
    name = args.entry
    if name == "sigma_hat_area":
        entry = ledger.sigma_hat_area(_pop(params, "C"))
    elif name == "ehat_area":
        entry = ledger.ehat_area(_pop(params, "eps"), _pop(params, "C"))
    elif name == "eps_threshold":
        C = _pop(params, "C")
        entry = ledger.LedgerEntry("eps_threshold",
                                   ledger.eps_threshold(C),
                                   "1 - 2/(C + sqrt(C^2 + 1))", {"C": C})
    elif name == "sigma_c_area":
        entry = ledger.sigma_c_area(_pop(params, "delta"))
    elif name == "disk_Dc_area":
        entry = ledger.disk_Dc_area(
            _pop(params, "delta"), _pop(params, "h"), _pop(params, "theta0"),
            _pop(params, "c"), params.pop("variant", "Exact"))
    elif name == "solve_c0":
        delta = _pop(params, "delta")
        h = _pop(params, "h")
        theta0 = _pop(params, "theta0")
        variant = params.pop("variant", "Exact")
        entry = ledger.LedgerEntry(
            "solve_c0", ledger.solve_c0(delta, h, theta0, variant),
            "h/3 + (1 - 2*x^2)/k, x = 1 - 2*delta",
            {"delta": delta, "h": h, "theta0": theta0, "variant": variant})
    elif name == "surgery_gain":
        entry = ledger.surgery_gain(_pop(params, "eps"), _pop(params, "h"),
                                    _pop(params, "c0"))
    elif name == "iiib_threshold":
        result = ledger.iiib_threshold_check(_pop(params, "delta"))
        print(json.dumps(result, indent=2, sort_keys=True))
        return 0
    elif name == "catenoid_area":
        fit = ledger.catenoid_fit(_pop(params, "r1"), _pop(params, "z1"),
                                  _pop(params, "r2"), _pop(params, "z2"))
        entry = ledger.catenoid_area(fit)
        print("fit: a=%.17g b=%.17g residual=%.3g"
              % (fit.a, fit.b, fit.residual))
    else:
        raise SystemExit(
            "unknown ledger entry %r (choose from: sigma_hat_area, "
            "ehat_area, eps_threshold, sigma_c_area, disk_Dc_area, "
            "solve_c0, surgery_gain, iiib_threshold, catenoid_area)" % name)
    if params:
        raise SystemExit("unused parameters: %s" % ", ".join(sorted(params)))
    print(json.dumps(entry.to_dict(), indent=2, sort_keys=True))
    return 0


def cmd_solve(args):
    mesh = read_obj(getattr(args, "in"))
    opts = SolveOptions()
    if args.opts:
        with open(args.opts) as fh:
            opts = SolveOptions(**json.load(fh))
    solved, report = minimize_area(mesh, opts)
    if args.out:
        write_obj(solved, args.out)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    print("converged=%s iters=%d area=%.12g grad=%.3g"
          % (report.converged, report.iters, report.final_area,
             report.final_grad_norm))
    return 0 if report.converged else 1


_CHECK_SUMMARIES = {
    "I": [
        "ledger ehat < sigma_hat [per eps]",
        "D^eps area < ehat_area [per eps]",
        "D^eps self-intersecting [per eps]",
        "sigma-hat minimizer embedded [per eps]",
        "sigma-hat minimizer within 10% of sigma_hat [per eps]",
        "sigma-hat minimizer > D^eps area [per eps]",
        "both solves converged [per eps]",
        "hausdorff(D^eps, E-hat) non-increasing",
        "area ratio sigma_hat/ehat increases as eps decreases",
    ],
    "II": [
        "cap area equals slice area at the balance height",
        "slice mesh area matches ledger",
        "cap mesh area matches ledger",
        "glued surface connected",
        "glued surface coherently oriented",
        "boundary multiplicity (Correct side)",
        "glued area beats twice the slice by 0.9 gain",
        "euler characteristic drops by 2",
        "boundary multiplicity (Opposite side)",
    ],
    "IIIA": [
        "fit residual (gamma1 pair)",
        "fit residual (gamma2 pair)",
        "mirrored pair fits the mirrored catenoid",
        "annulus beats the two flat disks",
        "solver annulus matches the closed form within 1%",
        "the annuli intersect in one closed loop",
        "intersection loop lies on the symmetry plane",
        "intersection loop radius matches the waist circle",
    ],
    "IIIB": [
        "slice regime (slice beats the disk)",
        "boundary curves are disjoint",
        "tilted slice boundary component count",
        "slices intersect in one closed loop",
        "crossing curve is the exact line",
    ],
}


def _load_config(example_id, path):
    if path:
        with open(path) as fh:
            return json.load(fh)
    ref = resources.files("plateau_lab").joinpath(
        "configs/example_%s.json" % example_id)
    return json.loads(ref.read_text())


def cmd_verify(args):
    ex = args.example
    if args.list_checks:
        for name in _CHECK_SUMMARIES[ex]:
            print(name)
        return 0
    cfg = _load_config(ex, args.config)
    if ex == "I":
        p = con.ExampleIParams(**cfg["params"])
        opts = SolveOptions(**cfg.get("solver", {}))
        report = harness.verify_example_I(
            p, cfg["eps_sequence"], out_dir=args.out_dir,
            res=cfg.get("res", 0.05), opts=opts)
    elif ex == "II":
        p = con.ExampleIIParams(**cfg["params"])
        report = harness.verify_example_II(
            p, out_dir=args.out_dir, res=cfg.get("res", 0.02),
            fine_step=cfg.get("fine_step", 1.5e-4),
            n_rim=int(cfg.get("n_rim", 256)))
    elif ex == "IIIA":
        opts = SolveOptions(**cfg.get("solver", {}))
        report = harness.verify_example_IIIA(
            out_dir=args.out_dir, target_edge=cfg.get("target_edge", 0.02),
            opts=opts)
    else:
        p = con.ExampleIIIBParams(**cfg["params"])
        report = harness.verify_example_IIIB(
            p, out_dir=args.out_dir, res=cfg.get("res", 0.025))
    for c in report.checks:
        print("[%s] %s: expected %s, observed %s (tol %s)"
              % ("PASS" if c["pass"] else "FAIL", c["name"], c["expected"],
                 c["observed"], c["tolerance"]))
    for note in report.notes:
        print("note: %s" % note)
    print("overall: %s" % ("PASS" if report.overall_pass else "FAIL"))
    return 0 if report.overall_pass else 1


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="plateau-lab",
        description="Area-minimizing surface constructions, closed-form "
                    "area accounting, and a discrete Plateau solver.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a named mesh and write an OBJ")
    b.add_argument("name")
    b.add_argument("--param", action="append", metavar="K=V")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    led = sub.add_parser("ledger", help="evaluate a closed-form area entry")
    led.add_argument("entry")
    led.add_argument("--param", action="append", metavar="K=V")
    led.set_defaults(func=cmd_ledger)

    s = sub.add_parser("solve", help="minimize area of an OBJ mesh")
    s.add_argument("--in", required=True)
    s.add_argument("--opts")
    s.add_argument("--out")
    s.add_argument("--report")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run an example pipeline")
    v.add_argument("example", choices=("I", "II", "IIIA", "IIIB"))
    v.add_argument("--config")
    v.add_argument("--out-dir")
    v.add_argument("--list-checks", action="store_true")
    v.set_defaults(func=cmd_verify)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
