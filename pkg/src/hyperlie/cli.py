"""Command-line front end.

    hyperlie verify   --suite NAME [--samples N] [--seed S] [--tol NAME=VALUE ...]
    hyperlie flow     --init "a1,a2,a3;b1,b2,b3;c1,c2,c3" --t0 0 --t1 -10 [--out traj.csv]
    hyperlie classify --init ...
    hyperlie project  --init ...

Settings come from flags, then ``--config`` (``key = value`` lines, ``#``
comments), then built-in defaults.  Exit status: 0 success, 1 suite failure,
2 usage error.
"""
import argparse
import sys

import numpy as np

from . import flow, poisson, projection, suites
from .errors import HyperLieError
from .report import dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "seed": 0,
    "samples": 50,
    "region": "both",
    "phi_floor": poisson.PHI_FLOOR,
    "jobs": 1,
    "t0": 0.0,
    "t1": -10.0,
    "rel_tol": 1e-10,
    "abs_tol": 1e-12,
    "max_steps": 200000,
    "record_every": 0.0,
    "eps_crit": flow.EPS_CRIT,
    "f_max_factor": flow.F_MAX_FACTOR,
    "horizon": flow.CLASSIFY_T1,
}
_INT_KEYS = {"seed", "samples", "jobs", "max_steps"}
_STR_KEYS = {"region"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_point(text):
    """Parse ``"a1,a2,a3;b1,b2,b3;c1,c2,c3"`` into a (3, 3) array."""
    rows = text.strip().split(";")
    if len(rows) != 3:
        raise UsageError(f"init needs three ';'-separated groups, got {len(rows)}")
    out = []
    for row in rows:
        parts = row.split(",")
        if len(parts) != 3:
            raise UsageError(f"init group {row!r} needs three ','-separated numbers")
        try:
            vals = [float(v) for v in parts]
        except ValueError as exc:
            raise UsageError(f"bad number in init: {exc}") from None
        if not all(np.isfinite(vals)):
            raise UsageError("init values must be finite")
        out.append(vals)
    return np.array(out)


def _convert(key, value):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _STR_KEYS:
            return str(value)
        return float(value)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None


def _parse_tol(items):
    out = {}
    for item in items:
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise UsageError(f"bad tolerance value {val!r}") from None
    return out


def read_config(path):
    """``key = value`` lines; ``tol.NAME = value`` sets a tolerance."""
    settings, tols = {}, {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep:
            raise UsageError(f"{path}:{n}: expected key = value")
        if key.startswith("tol."):
            tols.update(_parse_tol([f"{key[4:]}={value}"]))
        elif key in DEFAULTS:
            settings[key] = _convert(key, value)
        else:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
    return settings, tols


def resolve(args):
    """Merge flags over the config file over defaults."""
    settings = dict(DEFAULTS)
    tols = {}
    if args.config:
        cfg_settings, cfg_tols = read_config(args.config)
        settings.update(cfg_settings)
        tols.update(cfg_tols)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    tols.update(_parse_tol(args.tol or []))
    return settings, tols


def _build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE")
    common.add_argument("--region", choices=("plus", "minus", "both"))
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--phi-floor", dest="phi_floor", type=float)

    p = _Parser(prog="hyperlie", description="Hyper-Lie Poisson structure on su(2)^3.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", choices=suites.SUITES + ("all",))
    v.add_argument("--jobs", type=int, help="worker processes (output does not depend on it)")

    flow_common = _Parser(add_help=False)
    flow_common.add_argument("--rel-tol", dest="rel_tol", type=float)
    flow_common.add_argument("--abs-tol", dest="abs_tol", type=float)
    flow_common.add_argument("--max-steps", dest="max_steps", type=int)
    flow_common.add_argument("--eps-crit", dest="eps_crit", type=float)
    flow_common.add_argument("--f-max-factor", dest="f_max_factor", type=float)
    flow_common.add_argument("--horizon", type=float, help="end time of the backward classification run")

    f = sub.add_parser("flow", parents=[common, flow_common], help="integrate Nahm's equations")
    f.add_argument("--init", required=True)
    f.add_argument("--t0", type=float)
    f.add_argument("--t1", type=float)
    f.add_argument("--record-every", dest="record_every", type=float)

    c = sub.add_parser("classify", parents=[common], help="S membership, casimirs, Gram spectrum")
    c.add_argument("--init", required=True)

    pr = sub.add_parser("project", parents=[common], help="pr12 image and orbit data")
    pr.add_argument("--init", required=True)
    return p


def _emit(text, out):
    sys.stdout.write(text)
    if out:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_verify(settings, tols, out=None, suite="all"):
    try:
        cfg = suites.RunConfig(seed=settings["seed"], samples=settings["samples"],
                               tol_overrides=tols, region=settings["region"],
                               phi_floor=settings["phi_floor"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if settings["jobs"] < 1:
        raise UsageError("jobs must be >= 1")
    report = suites.run_suite(suite, cfg, jobs=settings["jobs"])
    _emit(report.to_json(), out)
    return EXIT_OK if report.passed else EXIT_FAIL


def _flow_config(settings, t0, t1):
    try:
        return flow.FlowConfig(t0=t0, t1=t1, rel_tol=settings["rel_tol"],
                               abs_tol=settings["abs_tol"], max_steps=settings["max_steps"],
                               record_every=settings["record_every"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_flow(p0, settings, out=None):
    t0, t1 = settings["t0"], settings["t1"]
    traj_cfg = _flow_config(settings, t0, t1)
    traj = flow.integrate(p0, traj_cfg, f_max=settings["f_max_factor"] * poisson.F(p0))
    if out:
        traj.write_csv(out)
    horizon = settings["horizon"]
    if not horizon < t0:
        raise UsageError("horizon must be earlier than t0")
    rep = flow.classify_limit(p0, _flow_config(settings, t0, horizon),
                              eps_crit=settings["eps_crit"],
                              f_max_factor=settings["f_max_factor"])
    body = rep.to_dict()
    body["trajectory"] = {"t0": t0, "t1": t1, "t_end": float(traj.times[-1]),
                          "samples": len(traj), "status": traj.status_name,
                          "casimir_drift": traj.casimir_drift(), "backend": traj.backend,
                          "csv": out}
    sys.stdout.write(dumps(body) + "\n")
    return EXIT_OK


def cmd_classify(p0, settings, out=None):
    cls = poisson.classify_S(p0)
    G = poisson.gram(p0)
    body = {
        "gram_eigenvalues": np.sort(np.linalg.eigvalsh(G))[::-1].tolist(),
        "casimirs": poisson.casimirs(p0).tolist(),
        "phi": poisson.phi(p0),
        "membership": cls.kind,
        "r": cls.r,
        "lambda": cls.lam,
        "thresholds": {"gram_rtol": poisson.GRAM_RTOL, "phi_floor": settings["phi_floor"]},
    }
    _emit(dumps(body) + "\n", out)
    return EXIT_OK


def cmd_project(p0, settings, out=None):
    fl = settings["phi_floor"]
    z = projection.pr12(p0)
    oc = projection.orbit_classify(z)
    body = {
        "z": {"re": z.real.tolist(), "im": z.imag.tolist()},
        "casimir": {"re": oc.casimir.real, "im": oc.casimir.imag},
        "kind": oc.kind.value,
        "thresholds": {"orbit_tol": projection.ORBIT_TOL, "rank_rtol": projection.RANK_RTOL,
                       "phi_floor": fl},
    }
    in_M_o = poisson.in_M_o(p0, fl)
    body["projection_rank"] = projection.projection_rank(p0, floor=fl) if in_M_o else None
    membership = poisson.classify_S(p0).kind
    body["membership"] = membership
    if membership in ("S_O", "S_0") and in_M_o:
        try:
            res, sign = projection.kks_pullback_residual(p0, floor=fl)
            body["kks_residual"], body["kks_sign"] = res, sign
        except HyperLieError as exc:
            body["kks_residual"], body["kks_error"] = None, str(exc)
    _emit(dumps(body) + "\n", out)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        settings, tols = resolve(args)
        if args.command == "verify":
            return cmd_verify(settings, tols, args.out, args.suite)
        p0 = parse_point(args.init)
        if args.command == "flow":
            return cmd_flow(p0, settings, args.out)
        if args.command == "classify":
            return cmd_classify(p0, settings, args.out)
        return cmd_project(p0, settings, args.out)
    except UsageError as exc:
        sys.stderr.write(f"hyperlie: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
