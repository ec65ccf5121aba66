"""Closed-form area bookkeeping for the worked configurations.

Every quantity here is an exact formula (or a deterministic root-find
against one) evaluated in floats — no meshes involved. The mesh experiments
in `constructions` and `harness` are checked against these numbers.
"""

from __future__ import annotations

import math


class LedgerEntry:
    """A named scalar with the formula it came from and its inputs."""

    def __init__(self, name, value, formula_source, inputs):
        self.name = str(name)
        self.value = float(value)
        self.formula_source = str(formula_source)
        self.inputs = dict(inputs)
        if not math.isfinite(self.value):
            raise ValueError("ledger value must be finite")
        if not self.formula_source:
            raise ValueError("formula_source must be nonempty")

    def to_dict(self):
        return {"name": self.name, "value": self.value,
                "formula_source": self.formula_source,
                "inputs": {k: float(v) for k, v in self.inputs.items()}}

    def __repr__(self):
        return ("LedgerEntry(name=%r, value=%r, formula_source=%r, inputs=%r)"
                % (self.name, self.value, self.formula_source, self.inputs))


# --------------------------------------------------- hexagon-pair ledger

def sigma_hat_area(C) -> LedgerEntry:
    """Limit area 2*(C + sqrt(C^2 + 1)) of the tall embedded spanning
    surface as the hexagon width eps goes to zero."""
    C = float(C)
    if C <= 0:
        raise ValueError("C must be positive")
    value = 2.0 * (C + math.sqrt(C * C + 1.0))
    return LedgerEntry("sigma_hat_area", value,
                       "2*(C + sqrt(C^2 + 1))", {"C": C})


def ehat_area(eps, C) -> LedgerEntry:
    """Area 4 + 2*eps*(C + sqrt(C^2 + 1)) of the flat square spanning
    surface together with its two narrow side flaps of width eps."""
    eps = float(eps)
    C = float(C)
    if eps <= 0 or C <= 0:
        raise ValueError("eps and C must be positive")
    value = 4.0 + 2.0 * eps * (C + math.sqrt(C * C + 1.0))
    return LedgerEntry("ehat_area", value,
                       "4 + 2*eps*(C + sqrt(C^2 + 1))", {"eps": eps, "C": C})


def eps_threshold(C) -> float:
    """The eps at which ehat_area equals sigma_hat_area, in closed form
    1 - 2/(C + sqrt(C^2 + 1)); below it the flat-square solution is
    strictly cheaper. Errors when the crossover is nonpositive."""
    C = float(C)
    if C <= 0:
        raise ValueError("C must be positive")
    s = C + math.sqrt(C * C + 1.0)
    value = 1.0 - 2.0 / s
    if value <= 0:
        raise ValueError("C too small")
    return value


# -------------------------------------------------- box-and-slab ledger

def sigma_c_area(delta) -> LedgerEntry:
    """Area 1 - (1 - 2*delta)^2 of the flat torus slice at height c with
    the box cross-section square removed (independent of c)."""
    delta = float(delta)
    if not (0 < delta < 0.5):
        raise ValueError("delta must lie in (0, 1/2)")
    x = 1.0 - 2.0 * delta
    value = 1.0 - x * x
    return LedgerEntry("sigma_c_area", value, "1 - (1 - 2*delta)^2",
                       {"delta": delta})


def _check_II_scalars(delta, h, theta0):
    if not (0 < delta < 0.5):
        raise ValueError("delta must lie in (0, 1/2)")
    if h <= 0:
        raise ValueError("h must be positive")
    if not (0 < theta0 < math.pi / 2):
        raise ValueError("theta0 must lie in (0, pi/2)")


def disk_Dc_area(delta, h, theta0, c, variant="Exact") -> LedgerEntry:
    """Area of the competitor disk capping the sheared box at height c,
    with x = 1 - 2*delta the cross-section side.

    Two conventions for the lateral wall strips between z = h/3 and z = c:

    - "Paper": x^2 + 4*x*(c - h/3)/sin(theta0) — all four walls charged
      with the slant factor.
    - "Exact": x^2 + 2*x*(c - h/3)/sin(theta0) + 2*x*(c - h/3) — only the
      two x-normal walls are slanted; the y-normal walls are sheared
      in-plane and stay at unit slant.
    """
    delta = float(delta)
    h = float(h)
    theta0 = float(theta0)
    c = float(c)
    _check_II_scalars(delta, h, theta0)
    if not (h / 3.0 <= c <= 2.0 * h / 3.0 + 1e-15 * h):
        raise ValueError("c must lie in [h/3, 2h/3]")
    x = 1.0 - 2.0 * delta
    rise = c - h / 3.0
    if variant == "Paper":
        value = x * x + 4.0 * x * rise / math.sin(theta0)
        formula = "x^2 + 4*x*(c - h/3)/sin(theta0), x = 1 - 2*delta"
    elif variant == "Exact":
        value = x * x + 2.0 * x * rise / math.sin(theta0) + 2.0 * x * rise
        formula = ("x^2 + 2*x*(c - h/3)/sin(theta0) + 2*x*(c - h/3), "
                   "x = 1 - 2*delta")
    else:
        raise ValueError("variant must be 'Paper' or 'Exact'")
    return LedgerEntry("disk_Dc_area", value, formula,
                       {"delta": delta, "h": h, "theta0": theta0, "c": c})


def solve_c0(delta, h, theta0, variant="Exact") -> float:
    """Height c0 where the capping disk's area equals the slice area:
    disk_Dc_area(..., c0) = 1 - x^2, solved in closed form (the disk area
    is affine in c). Errors when c0 leaves [h/3, 2h/3]."""
    delta = float(delta)
    h = float(h)
    theta0 = float(theta0)
    _check_II_scalars(delta, h, theta0)
    x = 1.0 - 2.0 * delta
    if variant == "Paper":
        k = 4.0 * x / math.sin(theta0)
    elif variant == "Exact":
        k = 2.0 * x / math.sin(theta0) + 2.0 * x
    else:
        raise ValueError("variant must be 'Paper' or 'Exact'")
    c0 = h / 3.0 + (1.0 - 2.0 * x * x) / k
    if not (h / 3.0 <= c0 <= 2.0 * h / 3.0):
        raise ValueError("no balance point; adjust h or delta")
    return c0


def surgery_gain(eps, h, c0) -> LedgerEntry:
    """Net area change 2*pi*eps^2 - 2*pi*eps*(4*h/3 - c0) from removing two
    disks of radius eps and installing the connecting tube of length
    4*h/3 - c0; positive means the surgery saves area."""
    eps = float(eps)
    h = float(h)
    c0 = float(c0)
    if not (0 < h < eps):
        raise ValueError("requires 0 < h < eps")
    tube_len = 4.0 * h / 3.0 - c0
    if tube_len <= 0:
        raise ValueError("tube length must be positive")
    value = 2.0 * math.pi * eps * eps - 2.0 * math.pi * eps * tube_len
    return LedgerEntry("surgery_gain", value,
                       "2*pi*eps^2 - 2*pi*eps*(4*h/3 - c0)",
                       {"eps": eps, "h": h, "c0": c0})


def iiib_threshold_check(delta) -> dict:
    """Compare the flat disk area (1-2*delta)^2 against the slice area
    1-(1-2*delta)^2 and report which spanning surface is cheaper."""
    delta = float(delta)
    if not (0 < delta < 0.5):
        raise ValueError("delta must lie in (0, 1/2)")
    x = 1.0 - 2.0 * delta
    disk = x * x
    slab = 1.0 - x * x
    if disk < slab:
        winner = "disk"
    elif slab < disk:
        winner = "slice"
    else:
        winner = "tie"
    return {"disk_area": disk, "slice_area": slab, "winner": winner,
            "delta": delta}


# --------------------------------------------------------- catenoid ledger

class CatenoidFit:
    """Parameters of the catenoid x^2 + y^2 = a^2 cosh^2((z - b)/a) through
    two horizontal circles; residual is the max constraint violation."""

    def __init__(self, a, b, z1, z2, r1, r2, residual):
        self.a = float(a)
        self.b = float(b)
        self.z1 = float(z1)
        self.z2 = float(z2)
        self.r1 = float(r1)
        self.r2 = float(r2)
        self.residual = float(residual)
        if self.a <= 0:
            raise ValueError("waist radius a must be positive")

    def to_dict(self):
        return {"a": self.a, "b": self.b, "z1": self.z1, "z2": self.z2,
                "r1": self.r1, "r2": self.r2, "residual": self.residual}

    def radius_at(self, z):
        return self.a * math.cosh((z - self.b) / self.a)


class NoCatenoid(ValueError):
    """No catenoid spans the two circles (they are too far apart)."""


def _safe_cosh(u):
    return math.cosh(u) if abs(u) < 650 else math.inf


def _safe_sinh(u):
    if abs(u) < 650:
        return math.sinh(u)
    return math.inf if u > 0 else -math.inf


def catenoid_fit(r1, z1, r2, z2) -> CatenoidFit:
    """Fit a catenoid through the circles (radius r1 at height z1) and
    (r2 at z2), returning the largest-a (stable) solution when several
    exist. Multi-start damped Newton on the two residuals; deterministic
    seed grid. Raises NoCatenoid when no catenoid exists."""
    r1 = float(r1)
    z1 = float(z1)
    r2 = float(r2)
    z2 = float(z2)
    if r1 <= 0 or r2 <= 0:
        raise ValueError("radii must be positive")
    if z1 == z2:
        raise ValueError("circles must lie at distinct heights")
    scale = max(1.0, r1, r2)

    def resid(a, b):
        f1 = a * _safe_cosh((z1 - b) / a) - r1
        f2 = a * _safe_cosh((z2 - b) / a) - r2
        return f1, f2

    best = None
    a_hi = max(r1, r2)
    a_seeds = [a_hi * t for t in (0.999, 0.99, 0.95, 0.9, 0.8, 0.6, 0.4,
                                  0.25, 0.15, 0.08, 0.04, 0.02, 0.01)]
    b_seeds = (z1, 0.5 * (z1 + z2), z2)
    for a0 in a_seeds:
        for b0 in b_seeds:
            a, b = a0, b0
            ok = True
            for _ in range(120):
                f1, f2 = resid(a, b)
                if not (math.isfinite(f1) and math.isfinite(f2)):
                    ok = False
                    break
                if max(abs(f1), abs(f2)) < 1e-13 * scale:
                    break
                u1 = (z1 - b) / a
                u2 = (z2 - b) / a
                j11 = _safe_cosh(u1) - u1 * _safe_sinh(u1)
                j12 = -_safe_sinh(u1)
                j21 = _safe_cosh(u2) - u2 * _safe_sinh(u2)
                j22 = -_safe_sinh(u2)
                det = j11 * j22 - j12 * j21
                if not math.isfinite(det) or abs(det) < 1e-300:
                    ok = False
                    break
                da = (f1 * j22 - f2 * j12) / det
                db = (j11 * f2 - j21 * f1) / det
                damp = 1.0
                while damp > 1e-6:
                    an = a - damp * da
                    bn = b - damp * db
                    if an > 1e-12:
                        g1, g2 = resid(an, bn)
                        if (math.isfinite(g1) and math.isfinite(g2) and
                                g1 * g1 + g2 * g2 <= f1 * f1 + f2 * f2):
                            break
                    damp *= 0.5
                a, b = a - damp * da, b - damp * db
                if not math.isfinite(a) or a <= 1e-12:
                    ok = False
                    break
            if not ok or not math.isfinite(a) or a <= 0:
                continue
            f1, f2 = resid(a, b)
            res = max(abs(f1), abs(f2))
            if res <= 1e-10 * scale and (best is None or a > best[0] + 1e-12):
                best = (a, b, res)
    if best is None:
        raise NoCatenoid(
            "no catenoid spans circles r=%g at z=%g and r=%g at z=%g"
            % (r1, z1, r2, z2))
    a, b, res = best
    return CatenoidFit(a, b, z1, z2, r1, r2, res)


def catenoid_area(fit: CatenoidFit) -> LedgerEntry:
    """Lateral area pi*a^2*[u + sinh(u)*cosh(u)] between u1 = (z1-b)/a and
    u2 = (z2-b)/a, the closed-form integral of 2*pi*r*sqrt(1+r'^2) for
    r(z) = a*cosh((z-b)/a)."""
    a = fit.a
    u1 = (fit.z1 - fit.b) / a
    u2 = (fit.z2 - fit.b) / a
    if u2 < u1:
        u1, u2 = u2, u1

    def F(u):
        return u + math.sinh(u) * math.cosh(u)

    value = math.pi * a * a * (F(u2) - F(u1))
    return LedgerEntry("catenoid_area", value,
                       "pi*a^2*[u + sinh(u)*cosh(u)] from u1 to u2",
                       {"a": a, "b": fit.b, "z1": fit.z1, "z2": fit.z2})
