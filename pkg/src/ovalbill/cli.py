"""Command-line front end.

    ovalbill validate  --config oval.txt
    ovalbill portrait  --config oval.txt --grid 12x8 --iters 2000 --out portrait.csv
    ovalbill families  --config oval.txt
    ovalbill twist     --config oval.txt --m 1 [--oracle]
    ovalbill manifolds --config oval.txt --out manifolds.csv
    ovalbill gutkin    --n 5 --a1 0.3

Exit codes: 0 ok, 1 input error, 2 validation failure, 3 analysis error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import report
from .curvefile import describe_curve, load_curve
from .dynamics import GRAZING_CUTOFF, step_batch
from .errors import BilliardError, CurveFileError, InvalidCurve
from .geometry import TWO_PI, Oval, validate
from .hyperbolic import TANGENCY_TOL, eigen_directions, find_crossings, grow_manifold
from .invariant import check_horizontal_invariance, gutkin_alpha, gutkin_oval
from .orbits import (
    PARABOLIC_TOL,
    RESONANCE_TOL,
    classify,
    find_families,
    resonance_check,
    rotation_number_oracle,
    tau_zero_m,
    tau_zero_sin2,
    twist_coefficient,
)

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_ANALYSIS = 0, 1, 2, 3

DEFAULT_TOLERANCES = {
    "families": {"closure": 1e-8, "parabolic": PARABOLIC_TOL, "resonance": RESONANCE_TOL},
    "twist": {"parabolic": PARABOLIC_TOL, "resonance": RESONANCE_TOL},
    "manifolds": {"tangency": TANGENCY_TOL, "parabolic": PARABOLIC_TOL},
    "gutkin": {"invariance": 1e-6},
    "portrait": {"grazing": 1.0 - GRAZING_CUTOFF},
    "validate": {},
}

# seeds are integrated in fixed blocks so batch composition never depends on
# the worker count
BLOCK = 64


class InputError(Exception):
    pass


@dataclass
class PortraitConfig:
    n_phi: int
    n_p: int
    p_range: tuple
    iters: int
    phi_range: tuple = (0.0, TWO_PI)
    out_path: str | None = None

    def __post_init__(self):
        if self.n_phi < 1 or self.n_p < 1:
            raise InputError("grid counts must be >= 1")
        lo, hi = self.p_range
        if not -1.0 < lo <= hi < 1.0:
            raise InputError(f"p range must lie strictly inside (-1, 1), got {self.p_range}")
        if self.iters < 1:
            raise InputError("iters must be >= 1")

    def seeds(self):
        a, b = self.phi_range
        phi = a + (b - a) * np.arange(self.n_phi) / self.n_phi
        lo, hi = self.p_range
        p = np.array([0.5 * (lo + hi)]) if self.n_p == 1 else np.linspace(lo, hi, self.n_p)
        P, F = np.meshgrid(p, phi)
        return F.ravel(), P.ravel()


# ---------------------------------------------------------------------------
# Portrait engine

_OVALS = {}


def _oval(curve):
    if curve not in _OVALS:
        _OVALS[curve] = Oval(curve)
    return _OVALS[curve]


def _run_block(args):
    curve, phi0, p0, iters = args
    oval = _oval(curve)
    k = len(phi0)
    phi = np.full((k, iters + 1), np.nan)
    p = np.full((k, iters + 1), np.nan)
    phi[:, 0] = np.mod(phi0, TWO_PI)
    p[:, 0] = p0
    status = ["ok"] * k
    steps = np.full(k, iters)
    active = np.arange(k)
    cur_phi, cur_p = phi[:, 0].copy(), p0.astype(float).copy()
    for it in range(1, iters + 1):
        grazing = np.abs(cur_p[active]) >= GRAZING_CUTOFF
        for i in active[grazing]:
            status[i] = "grazing"
            steps[i] = it - 1
        active = active[~grazing]
        if not active.size:
            break
        try:
            nphi, np_ = step_batch(oval, cur_phi[active], cur_p[active])
            ok = np.ones(active.size, dtype=bool)
        except BilliardError:
            # isolate the failing seeds one at a time
            nphi = np.empty(active.size)
            np_ = np.empty(active.size)
            ok = np.ones(active.size, dtype=bool)
            for j, i in enumerate(active):
                try:
                    a, b = step_batch(oval, cur_phi[i : i + 1], cur_p[i : i + 1])
                    nphi[j], np_[j] = a[0], b[0]
                except BilliardError as exc:
                    ok[j] = False
                    status[i] = type(exc).__name__
                    steps[i] = it - 1
        active = active[ok]
        nphi = np.mod(nphi[ok], TWO_PI)
        np_ = np_[ok]
        cur_phi[active] = nphi
        cur_p[active] = np_
        phi[active, it] = nphi
        p[active, it] = np_
    return phi, p, status, steps


def portrait(curve, phi0, p0, iters, workers=1):
    """Orbits of the seeds ``(phi0[i], p0[i])``.

    Returns ``(phi, p, status, steps)`` with ``phi`` and ``p`` of shape
    ``(seeds, iters + 1)`` (NaN after a truncation), a status string per
    seed and the number of completed steps.
    """
    phi0 = np.asarray(phi0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    jobs = [(curve, phi0[i : i + BLOCK], p0[i : i + BLOCK], iters) for i in range(0, len(phi0), BLOCK)]
    if workers <= 1 or len(jobs) == 1:
        results = [_run_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_block, jobs))
    phi = np.concatenate([r[0] for r in results])
    p = np.concatenate([r[1] for r in results])
    status = [s for r in results for s in r[2]]
    steps = np.concatenate([r[3] for r in results])
    return phi, p, status, steps


def write_portrait(fh, phi, p, steps):
    fh.write("seedIndex,iter,phi,p\n")
    for i in range(phi.shape[0]):
        for k in range(int(steps[i]) + 1):
            fh.write(report.csv_row(i, k, phi[i, k], p[i, k]))


# ---------------------------------------------------------------------------
# Argument handling


def _grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}") from None


def _pair(text):
    try:
        a, b = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a,b, got {text!r}") from None
    return a, b


def _tolerances(command, overrides):
    tol = dict(DEFAULT_TOLERANCES[command])
    for item in overrides or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--tolerance expects NAME=VAL, got {item!r}")
        if name not in tol:
            known = ", ".join(sorted(tol)) or "none"
            raise InputError(f"unknown tolerance {name!r} for {command} (known: {known})")
        try:
            tol[name] = float(value)
        except ValueError:
            raise InputError(f"tolerance {name} is not a number: {value!r}") from None
    return tol


def _load(args):
    if not args.config:
        raise InputError("--config is required")
    return load_curve(args.config)


def _require_valid(curve):
    rep = validate(curve)
    if not rep.passed:
        raise ValidationFailed(rep)
    return rep


class ValidationFailed(Exception):
    def __init__(self, rep):
        super().__init__(
            f"not an oval: min g = {rep.min_g:.6g} at phi = {rep.phi_min_g:.6g}, "
            f"min R = {rep.min_R:.6g} at phi = {rep.phi_min_R:.6g}"
        )
        self.report = rep


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _members(n, m):
    if m is None:
        return list(range(1, n))
    if not 1 <= m <= n - 1:
        raise InputError(f"--m must be in 1..{n - 1}")
    return [m]


# ---------------------------------------------------------------------------
# Commands


def cmd_validate(args):
    curve = _load(args)
    rep = validate(curve)
    body = {
        "passed": rep.passed,
        "minG": rep.min_g,
        "phiMinG": rep.phi_min_g,
        "minR": rep.min_R,
        "phiMinR": rep.phi_min_R,
        "samples": rep.samples,
    }
    _emit(args, report.dumps(report.document("validate", body, describe_curve(curve))))
    if not rep.passed:
        raise ValidationFailed(rep)
    return EXIT_OK


def cmd_portrait(args):
    curve = _load(args)
    tol = _tolerances("portrait", args.tolerance)
    _require_valid(curve)
    n_phi, n_p = args.grid
    cfg = PortraitConfig(n_phi, n_p, args.p_range, args.iters, args.phi_range, args.out)
    phi0, p0 = cfg.seeds()
    phi, p, status, steps = portrait(curve, phi0, p0, cfg.iters, args.workers)
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            write_portrait(fh, phi, p, steps)
        meta = report.document(
            "portrait",
            {
                "grid": [n_phi, n_p],
                "pRange": list(cfg.p_range),
                "phiRange": list(cfg.phi_range),
                "iters": cfg.iters,
                "seeds": [
                    {"seedIndex": i, "phi0": phi0[i], "p0": p0[i], "status": status[i], "steps": int(steps[i])}
                    for i in range(len(phi0))
                ],
            },
            describe_curve(curve),
            tol,
        )
        with open(cfg.out_path + ".status.json", "w", encoding="utf-8") as fh:
            fh.write(report.dumps(meta))
    else:
        write_portrait(sys.stdout, phi, p, steps)
    return EXIT_OK


def cmd_families(args):
    curve = _load(args)
    tol = _tolerances("families", args.tolerance)
    _require_valid(curve)
    oval = Oval(curve)
    members = _members(oval.n, args.m)
    out = []
    for fam in find_families(oval, closure_tol=tol["closure"], parabolic_tol=tol["parabolic"]):
        fam.members = [mem for mem in fam.members if mem.m in members]
        stab = {mem.m: classify(oval, fam, mem.m, numeric_check=False, parabolic_tol=tol["parabolic"]) for mem in fam.members}
        res = resonance_check(curve, fam.phi0, tol["resonance"])
        taus, zero_m = {}, None
        if fam.kind == "elliptic":
            if not any(res):
                taus = {mem.m: twist_coefficient(oval, fam.phi0, mem.m, tol["resonance"]) for mem in fam.members}
            zero_m = tau_zero_m(oval, fam.phi0)
        out.append(report.family_record(fam, stab, res, taus, zero_m))
    _emit(args, report.dumps(report.document("families", {"families": out}, describe_curve(curve), tol)))
    return EXIT_OK


def cmd_twist(args):
    curve = _load(args)
    tol = _tolerances("twist", args.tolerance)
    _require_valid(curve)
    oval = Oval(curve)
    members = _members(oval.n, args.m)
    out = []
    for fam in find_families(oval, verify=False, parabolic_tol=tol["parabolic"]):
        if fam.kind != "elliptic":
            continue
        zeta = math.acos(2.0 * fam.g_value / fam.R_value - 1.0)
        recs = []
        for m in members:
            rec = {"m": m, "alpha": m * math.pi / oval.n, "tau": twist_coefficient(oval, fam.phi0, m, tol["resonance"])}
            if args.oracle:
                fit = rotation_number_oracle(oval, fam.phi0, m, iters=args.iters)
                rec["tauFit"] = fit.tau_fit
                rec["zetaFit"] = fit.zeta_fit
            recs.append(rec)
        out.append(
            {
                "phi0": fam.phi0,
                "gValue": fam.g_value,
                "RValue": fam.R_value,
                "zeta": zeta,
                "members": recs,
                "tauZeroSin2": tau_zero_sin2(oval, fam.phi0),
                "tauZeroM": tau_zero_m(oval, fam.phi0),
            }
        )
    if not out:
        raise BilliardError("no elliptic family")
    body = {"oracle": {"iters": args.iters} if args.oracle else None, "families": out}
    _emit(args, report.dumps(report.document("twist", body, describe_curve(curve), tol)))
    return EXIT_OK


def cmd_manifolds(args):
    curve = _load(args)
    tol = _tolerances("manifolds", args.tolerance)
    _require_valid(curve)
    oval = Oval(curve)
    m = args.m or 1
    _members(oval.n, m)
    hyper = [f for f in find_families(oval, verify=False, parabolic_tol=tol["parabolic"]) if f.kind == "hyperbolic"]
    if not hyper:
        raise BilliardError("no hyperbolic family")
    fam = hyper[0]
    if args.phi0 is not None:
        fam = min(hyper, key=lambda f: abs(float(np.mod(f.phi0 - args.phi0 + math.pi, TWO_PI) - math.pi)))
    eig = eigen_directions(oval, fam.phi0, m)
    segs = {}
    for branch in ("unstable", "stable"):
        for side in (1, -1):
            segs[branch, side] = grow_manifold(oval, fam.phi0, m, branch, side, max_arc=args.max_arc)
    lines = ["branch,side,index,phi,p\n"]
    for (branch, side), seg in segs.items():
        for i in range(len(seg.u)):
            lines.append(report.csv_row(branch, side, i, seg.phi[i], seg.p[i]))
    crossings = []
    for su in (1, -1):
        for ss in (1, -1):
            for c in find_crossings(segs["unstable", su], segs["stable", ss], tol=tol["tangency"]):
                crossings.append(report.crossing_record(c, unstableSide=su, stableSide=ss))
    body = {
        "phi0": fam.phi0,
        "m": m,
        "lambdaU": eig.lambda_u,
        "lambdaS": eig.lambda_s,
        "maxArc": args.max_arc,
        "truncated": {f"{b}{'+' if s > 0 else '-'}": seg.truncated for (b, s), seg in segs.items()},
        "crossings": crossings,
    }
    doc = report.dumps(report.document("manifolds", body, describe_curve(curve), tol))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(lines)
        with open(args.crossings or args.out + ".crossings.json", "w", encoding="utf-8") as fh:
            fh.write(doc)
    else:
        sys.stdout.writelines(lines)
        if args.crossings:
            with open(args.crossings, "w", encoding="utf-8") as fh:
                fh.write(doc)
    return EXIT_OK


def cmd_gutkin(args):
    tol = _tolerances("gutkin", args.tolerance)
    if args.n is None or args.a1 is None:
        raise InputError("gutkin needs --n and --a1")
    curve = gutkin_oval(args.n, args.a1)
    oval = Oval(curve)
    roots = []
    ok = True
    for alpha in gutkin_alpha(args.n):
        p0 = math.cos(alpha)
        dev = check_horizontal_invariance(oval, p0, args.seeds, args.iters)
        ok &= dev < tol["invariance"]
        roots.append({"alpha0": alpha, "p0": p0, "maxDeviation": dev, "invariant": dev < tol["invariance"]})
    body = {"n": args.n, "a1": args.a1, "seeds": args.seeds, "iters": args.iters, "roots": roots}
    _emit(args, report.dumps(report.document("gutkin", body, describe_curve(curve), tol)))
    if not roots:
        raise BilliardError(f"tan(n a) = n tan(a) has no root in (0, pi/2] for n={args.n}")
    return EXIT_OK if ok else EXIT_INVALID


COMMANDS = {
    "validate": cmd_validate,
    "portrait": cmd_portrait,
    "families": cmd_families,
    "twist": cmd_twist,
    "manifolds": cmd_manifolds,
    "gutkin": cmd_gutkin,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="ovalbill", description="Billiards in n-symmetric ovals.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, iters=None):
        p.add_argument("--config", help="curve definition file")
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--tolerance", action="append", metavar="NAME=VAL", help="override a tolerance")
        p.add_argument("--workers", type=int, default=1)
        if iters is not None:
            p.add_argument("--iters", type=int, default=iters)
        return p

    common(sub.add_parser("validate", help="check that the curve is an oval"))
    p = common(sub.add_parser("portrait", help="phase portrait CSV"), iters=1000)
    p.add_argument("--grid", type=_grid, default=(10, 10), metavar="NxM", help="seeds in phi x p")
    p.add_argument("--p-range", type=_pair, default=(-0.95, 0.95), metavar="a,b")
    p.add_argument("--phi-range", type=_pair, default=(0.0, TWO_PI), metavar="a,b")
    p = common(sub.add_parser("families", help="symmetric orbit families (JSON)"))
    p.add_argument("--m", type=int)
    p = common(sub.add_parser("twist", help="twist coefficients of elliptic families (JSON)"), iters=10_000)
    p.add_argument("--m", type=int)
    p.add_argument("--oracle", action="store_true", help="also fit tau from rotation numbers")
    p = common(sub.add_parser("manifolds", help="invariant manifolds of a hyperbolic family"))
    p.add_argument("--m", type=int)
    p.add_argument("--phi0", type=float, help="anchor near this angle (default: first hyperbolic family)")
    p.add_argument("--max-arc", type=float, default=3.0)
    p.add_argument("--crossings", help="crossing report path (default: OUT.crossings.json)")
    p = common(sub.add_parser("gutkin", help="invariant line check on R = 1 + a1 cos(n phi)"), iters=10_000)
    p.add_argument("--n", type=int)
    p.add_argument("--a1", type=float)
    p.add_argument("--seeds", type=int, default=10)
    return ap


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exitCode": code}) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationFailed as exc:
        return _fail(EXIT_INVALID, exc)
    except (InputError, CurveFileError, InvalidCurve, OSError, ValueError) as exc:
        return _fail(EXIT_INPUT, exc)
    except BilliardError as exc:
        return _fail(EXIT_ANALYSIS, exc)


if __name__ == "__main__":
    sys.exit(main())
