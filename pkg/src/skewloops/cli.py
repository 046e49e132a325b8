"""Command-line front end: ``skewloops <group> <command> ...``.

Exit codes: 0 on success (a NotSkew finding is a success), 1 when
verification is inconclusive, 2 on input errors.

Every tuning flag can also be set through an environment variable named
``SKEWLOOPS_<FLAG>`` (for instance ``SKEWLOOPS_BUDGET=200000``); explicit
flags win.
"""

import argparse
import sys

import numpy as np

from . import io
from .construct import build_cylinder_loop, construct_height, curvature_bound, cylinder_margin
from .errors import NotEmbedded, SkewLoopError, TangentPlane
from .export import export
from .io import InputError
from .oval import curvature_extremes, make_support_oval, oval_center, radius_of_curvature, symmetry_analysis
from .quadric import (
    QuadricModel,
    arclength_reparametrize,
    bisection_defect,
    homotopy_min_speed,
    noperiod_residual,
    planar_section,
    project_loop,
    sphere_connection_residual,
)
from .report import Report, RunConfig, env_default
from .trigpoly import inf_bound
from .verify import Status, find_parallel_pair, verify_skew

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2

# which tolerance --tol sets for each command
TOL_TARGET = {
    "oval analyze": "symmetry_tol",
    "skew construct": "symmetry_tol",
    "skew verify": "refute_tol",
    "quadric demo": "quadrature_tol",
    "quadric section": "symmetry_tol",
    "export": "quadrature_tol",
}


def config_from(args, environ=None):
    """Resolve a :class:`RunConfig` from flags, then ``SKEWLOOPS_*`` variables, then defaults."""
    base = RunConfig()

    def pick(attr, cast, default):
        value = getattr(args, attr, None)
        if value is not None:
            return value
        return env_default(attr, cast, default, environ)

    kw = {
        "refute_tol": pick("refute_tol", float, base.refute_tol),
        "quadrature_tol": pick("quadrature_tol", float, base.quadrature_tol),
        "symmetry_tol": pick("symmetry_tol", float, base.symmetry_tol),
        "box_budget": pick("budget", int, base.box_budget),
        "projection_degree_cap": pick("degree_cap", int, base.projection_degree_cap),
        "workers": pick("workers", int, base.workers),
        "seed": pick("seed", int, base.seed),
        "out": getattr(args, "out", None) or env_default("out", str, None, environ),
        "format": getattr(args, "format", None) or env_default("format", str, base.format, environ),
    }
    tol = pick("tol", float, None)
    target = TOL_TARGET.get(args.command_name)
    if tol is not None and target and getattr(args, target, None) is None:
        kw[target] = tol
    if args.command_name in ("skew construct", "export"):
        # --out and --format name the product file there, not the report
        kw["out"], kw["format"] = None, env_default("format", str, base.format, environ)
    if kw["format"] not in ("json", "text"):
        raise InputError(f"report format must be json or text, got {kw['format']!r}")
    return RunConfig(**kw)


# -- commands ----------------------------------------------------------------


def cmd_oval_analyze(args, cfg, rep):
    h = io.load_trigpoly(args.path)
    v = radius_of_curvature(h)
    conv = inf_bound(v, tol=1e-12)
    rep.results["h"] = h.to_dict()
    rep.results["v"] = v.to_dict()
    rep.results["convexity"] = conv.to_dict()
    rep.results["strictly_convex"] = conv.lower > 0.0
    if conv.lower > 0.0:
        s = make_support_oval(h)
        lo, hi = curvature_extremes(s)
        rep.results["radius_of_curvature"] = {"min": lo.to_dict(), "max": hi.to_dict()}
        rep.results["symmetry"] = symmetry_analysis(s, cfg.symmetry_tol).to_dict()
        rep.results["center"] = oval_center(s).tolist()
    return EXIT_OK


def cmd_skew_construct(args, cfg, rep):
    h = io.load_trigpoly(args.support)
    with rep.timed("construct"):
        s = make_support_oval(h)
        hf = construct_height(s.v, degree_cap=cfg.projection_degree_cap)
        loop = build_cylinder_loop(s, hf)
    margin = cylinder_margin(s.v, hf.z)
    rep.results.update(
        tau=hf.tau,
        projection_degree=hf.projection_degree,
        mu=hf.mu.to_dict(),
        z=hf.z.to_dict(),
        margin=margin.to_dict(),
        curvature=curvature_bound(loop).to_dict(),
        loop=str(args.out),
    )
    io.save_json(loop.to_dict(), args.out)
    if args.margin_report:
        io.save_json({"height": hf.to_dict(), "margin": margin.to_dict()}, args.margin_report)
    return EXIT_OK


def cmd_skew_verify(args, cfg, rep):
    c = io.load_curve(args.path)
    with rep.timed("verify"):
        cert = verify_skew(c, refute_tol=cfg.refute_tol, budget=cfg.box_budget, workers=cfg.workers)
    rep.results["certificate"] = cert.to_dict()
    if args.report:
        io.save_json(cert.to_dict(), args.report)
    return EXIT_INCONCLUSIVE if cert.status is Status.INCONCLUSIVE else EXIT_OK


def parse_surface(tokens):
    name, params = tokens[0], tokens[1:]
    try:
        values = tuple(float(p) for p in params)
    except ValueError as exc:
        raise InputError(f"surface parameters must be numbers: {params}") from exc
    if name == "sphere" and not values:
        return QuadricModel.sphere()
    if name == "sigma" and not values:
        return QuadricModel("sigma")
    if name == "paraboloid" and not values:
        return QuadricModel("paraboloid")
    if name == "ellipsoid" and len(values) == 3:
        return QuadricModel("ellipsoid", values)
    if name == "approx_ellipsoid" and len(values) == 1:
        return QuadricModel("approx_ellipsoid", values)
    raise InputError(f"unknown surface specification {' '.join(tokens)!r}")


def _is_sphere(model):
    return model.kind == "ellipsoid" and model.params == (1.0, 1.0, 1.0) and np.allclose(model.A, np.eye(3))


def cmd_quadric_demo(args, cfg, rep):
    model = parse_surface(args.surface)
    loop = project_loop(model, io.load_curve(args.loop))
    rep.results["surface"] = model.to_dict()
    for check in args.check:
        with rep.timed(check):
            rep.results[check] = _run_check(check, model, loop, cfg)
    return EXIT_OK


def _run_check(check, model, loop, cfg):
    if check == "noperiod":
        if model.kind != "sigma":
            raise InputError("the noperiod check runs on --surface sigma")
        return noperiod_residual(loop, tol=cfg.quadrature_tol).to_dict()
    if check == "witness":
        found = find_parallel_pair(loop, refute_tol=cfg.refute_tol)
        return {"count": len(found), "witnesses": [w.to_dict() for w in found]}
    if not _is_sphere(model):
        raise InputError(f"the {check} check runs on --surface sphere")
    if check == "bisection":
        try:
            value, extra = bisection_defect(loop, tol=cfg.quadrature_tol, return_report=True)
        except NotEmbedded as exc:
            return {"embedded": False, "message": str(exc)}
        return {"embedded": True, "defect": value, **extra}
    if check == "connection":
        return sphere_connection_residual(loop, rotate=True).to_dict()
    unit = arclength_reparametrize(loop)
    return {"length": unit.period, "min_speed": homotopy_min_speed(unit)}


def cmd_quadric_section(args, cfg, rep):
    model = parse_surface(args.surface)
    nx, ny, nz, d = args.plane
    if np.linalg.norm([nx, ny, nz]) == 0:
        raise InputError("plane normal must be nonzero")
    rep.results["surface"] = model.to_dict()
    try:
        sec = planar_section(model, np.array([nx, ny, nz]), d)
    except TangentPlane as exc:
        rep.results["section"] = {"kind": "tangent", "message": str(exc)}
        return EXIT_OK
    rep.results["section"] = sec.to_dict()
    if not sec.empty:
        rep.results["symmetric"] = sec.symmetry.asymmetry <= cfg.symmetry_tol
    return EXIT_OK


def cmd_export(args, cfg, rep):
    obj = io.load_any(args.path)
    fmt = args.format or ("svg" if str(args.out).endswith(".svg") else "csv")
    text = export(obj, fmt, args.samples)
    with open(args.out, "w") as fh:
        fh.write(text)
    rep.results.update(format=fmt, out=str(args.out), bytes=len(text))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _tuning():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("tuning (also SKEWLOOPS_<FLAG>)")
    g.add_argument("--tol", type=float, help="primary tolerance of the command")
    g.add_argument("--budget", type=int, help="branch-and-bound box budget")
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    return p


def _report_output():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"))
    return p


def build_parser():
    tuning, output = _tuning(), _report_output()
    parser = argparse.ArgumentParser(prog="skewloops", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    oval = groups.add_parser("oval", help="support-function ovals").add_subparsers(dest="cmd", required=True)
    p = oval.add_parser("analyze", parents=[tuning, output], help="convexity, curvature and symmetry")
    p.add_argument("path")
    p.set_defaults(handler=cmd_oval_analyze, command_name="oval analyze")

    skew = groups.add_parser("skew", help="construct and verify skew loops").add_subparsers(dest="cmd", required=True)
    p = skew.add_parser("construct", parents=[tuning], help="skew loop on the cylinder over an oval")
    p.add_argument("--support", required=True, help="trigpoly JSON of the support function")
    p.add_argument("--out", required=True, help="where to write the loop")
    p.add_argument("--margin-report")
    p.add_argument("--degree-cap", type=int)
    p.set_defaults(handler=cmd_skew_construct, command_name="skew construct")

    p = skew.add_parser("verify", parents=[tuning, output], help="certify or refute skewness")
    p.add_argument("path")
    p.add_argument("--refute-tol", type=float)
    p.add_argument("--report", help="also write the certificate here")
    p.set_defaults(handler=cmd_skew_verify, command_name="skew verify")

    quad = groups.add_parser("quadric", help="checks on quadric surfaces").add_subparsers(dest="cmd", required=True)
    p = quad.add_parser("demo", parents=[tuning, output], help="invariants of a loop projected onto a quadric")
    p.add_argument("--surface", nargs="+", required=True, metavar="SPEC")
    p.add_argument("--loop", required=True)
    p.add_argument(
        "--check",
        nargs="+",
        required=True,
        choices=("noperiod", "bisection", "witness", "homotopy", "connection"),
    )
    p.add_argument("--refute-tol", type=float)
    p.set_defaults(handler=cmd_quadric_demo, command_name="quadric demo")

    p = quad.add_parser("section", parents=[tuning, output], help="planar section and its symmetry")
    p.add_argument("--surface", nargs="+", required=True, metavar="SPEC")
    p.add_argument("--plane", nargs=4, type=float, required=True, metavar=("NX", "NY", "NZ", "D"))
    p.set_defaults(handler=cmd_quadric_section, command_name="quadric section")

    p = groups.add_parser("export", parents=[tuning], help="CSV table or SVG plot")
    p.add_argument("path")
    p.add_argument("--format", choices=("csv", "svg"))
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=512)
    p.set_defaults(handler=cmd_export, command_name="export")
    return parser


def _command_echo(args):
    skip = {"handler", "command_name", "group", "cmd"}
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return [args.command_name] + [f"{k}={v}" for k, v in opts.items()]


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from(args)
        rep = Report(_command_echo(args), cfg.to_dict())
        code = args.handler(args, cfg, rep)
    except (SkewLoopError, ValueError, OSError) as exc:
        print(f"skewloops: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = rep.to_json() if cfg.format == "json" else rep.to_text()
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
