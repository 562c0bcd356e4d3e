"""Command-line interface: mesh tooling, reports, simulation, experiments.

All outputs are plain CSV/JSON with a schema-version field and the full
invocation recorded, so every experiment is reproducible from its artifact.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .analytic import FormError, parse_form
from .cochains import Cochain, CochainError
from .complexes import (MeshError, build_flat_torus, load_complex, save_complex,
                        subdivide)
from .experiments import (converge_cup, converge_weak_flow, converge_wr,
                          steady_state_scan)
from .flow import FlowBlowupError, FlowParams, default_dt, run
from .hodge import InnerProductModel, SolverError, harmonic_basis
from .whitney import QuadratureError, de_rham_map

SCHEMA_VERSION = 1


def _fmt(v):
    return repr(float(v))


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_json(path, payload, argv):
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    payload["tool_version"] = __version__
    payload["invocation"] = ["cochain-flow"] + list(argv)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_mesh(args):
    if getattr(args, "torus", None):
        return build_flat_torus(args.torus, args.dim)
    if getattr(args, "in_path", None):
        return load_complex(args.in_path)
    raise MeshError("no mesh given: use --torus N or --in FILE")


def _resolutions(text):
    try:
        res = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise FormError(f"bad resolution list: {text!r}") from exc
    if len(res) < 3:
        raise FormError("need at least 3 resolutions")
    return res


# ------------------------------------------------------------------- commands

def cmd_mesh(args, argv):
    if args.subdivide and not args.in_path:
        raise MeshError("--subdivide requires --in")
    K = _load_mesh(args)
    for _ in range(args.subdivide or 0):
        K = subdivide(K)
    if args.info:
        q = K.mesh_quality() if K.embedded else None
        info = {"dim": K.dim, "counts": list(K.counts()),
                "closed": bool(K.is_closed())}
        if q is not None:
            info.update(eta=q.eta, fullness=q.fullness)
        print(json.dumps(info, sort_keys=True))
    if args.out:
        save_complex(K, args.out)
    return 0


def cmd_hodge(args, argv):
    K = _load_mesh(args)
    model = InnerProductModel(K, args.metric)
    rep = harmonic_basis(model, zero_tol=args.tolerance if args.tolerance else 1e-9)
    residuals = []
    d1 = K.coboundary_matrix(1)
    for h in rep.basis:
        dh = Cochain(K, 2, d1 @ h.values)
        dsh = model.adjoint_coboundary_apply(0, h.values)
        residuals.append({
            "closed": float(np.sqrt(max(dh.values @ (model.mass(2) @ dh.values), 0)))
            ,
            "coclosed": float(np.sqrt(max(dsh @ (model.mass(0) @ dsh), 0)))})
    gap = rep.spectral_gap if np.isfinite(rep.spectral_gap) else None
    _write_json(args.report, {
        "metric": args.metric,
        "harmonic_dimension": len(rep.basis),
        "spectral_gap": gap,
        "threshold": rep.threshold,
        "orthogonality_residuals": residuals,
    }, argv)
    return 0


def _initial_cochain(init_text, K, model, seed):
    if init_text in ("taylor-green", "taylor_green"):
        from .analytic import taylor_green_form
        return de_rham_map(taylor_green_form(), K)
    if init_text.startswith("random"):
        s = seed
        if ":" in init_text:
            s = int(init_text.split(":", 1)[1])
        rng = np.random.RandomState(s if s is not None else 0)
        return Cochain(K, 1, rng.standard_normal(K.n_simplices(1)))
    if init_text.startswith("harmonic"):
        idx = int(init_text.split(":", 1)[1]) if ":" in init_text else 0
        basis = harmonic_basis(model).basis
        if not 0 <= idx < len(basis):
            raise FormError(f"harmonic index {idx} out of range "
                            f"(dimension {len(basis)})")
        return basis[idx]
    raise FormError(f"unknown initial condition: {init_text!r}")


def cmd_simulate(args, argv):
    K = _load_mesh(args)
    K.require_closed()
    model = InnerProductModel(K, args.metric)
    initial = _initial_cochain(args.init, K, model, args.seed)
    dt = args.dt if args.dt else default_dt(K, args.nu)
    params = FlowParams(nu=args.nu, dt=dt, t_final=args.t_final,
                        integrator=args.integrator, stride=args.stride)
    out = run(model, initial, params, record_states=bool(args.state_out))
    if args.state_out:
        _state, diags, states = out
        _write_json(args.state_out,
                    {"states": [[t, list(map(float, v))] for t, v in states]},
                    argv)
    else:
        _state, diags = out
    rows = list(zip(diags.times, diags.energy, diags.vorticity_sq,
                    diags.steady_residual, diags.coclosed_residual))
    _write_csv(args.out, ["t", "energy", "vorticity_sq", "steady_residual",
                          "coclosed_residual"], rows)
    return 0


def cmd_steady(args, argv):
    omega = parse_form(args.form)
    tests = [parse_form(t) for t in args.tests.split(";")] if args.tests else []
    rep = steady_state_scan(omega, args.nu, _resolutions(args.resolutions),
                            test_forms=tests,
                            quadrature_degree=args.quadrature_degree)
    rows = [(r, rep.residuals[i], rep.euler_defects[i])
            for i, r in enumerate(rep.resolutions)]
    _write_csv(args.out, ["resolution", "steady_residual", "euler_defect"], rows)
    if args.summary:
        _write_json(args.summary, {
            "residuals": dict(zip(map(str, rep.resolutions), rep.residuals)),
            "pairings": {f"{r}:{tid}": v for (r, tid), v in rep.pairings.items()},
        }, argv)
    return 0


def cmd_converge_wr(args, argv):
    study = converge_wr(parse_form(args.form), _resolutions(args.resolutions),
                        quadrature_degree=args.quadrature_degree)
    _write_csv(args.out, ["resolution", "eta", "error"],
               list(zip(study.resolutions, study.etas, study.errors)))
    if args.summary:
        _write_json(args.summary, {"kind": study.kind, "slope": study.slope,
                                   "intercept": study.intercept}, argv)
    return 0


def cmd_converge_cup(args, argv):
    study = converge_cup(parse_form(args.form1), parse_form(args.form2),
                         _resolutions(args.resolutions),
                         quadrature_degree=args.quadrature_degree)
    _write_csv(args.out, ["resolution", "eta", "error"],
               list(zip(study.resolutions, study.etas, study.errors)))
    if args.summary:
        _write_json(args.summary, {"kind": study.kind, "slope": study.slope,
                                   "intercept": study.intercept}, argv)
    return 0


def cmd_converge_weak(args, argv):
    tests = [parse_form(t) for t in args.tests.split(";")]
    rep = converge_weak_flow(parse_form(args.form), args.nu, tests,
                             _resolutions(args.resolutions),
                             quadrature_degree=args.quadrature_degree)
    rows = []
    for r in rep.resolutions:
        for tid in rep.test_form_ids:
            rows.append((r, tid, rep.discrete[(r, tid)], rep.reference[tid],
                         rep.gaps[(r, tid)]))
    _write_csv(args.out, ["resolution", "test_form_id", "discrete_pairing",
                          "reference_pairing", "gap"], rows)
    if args.summary:
        _write_json(args.summary, {
            "reference": rep.reference,
            "gaps": {f"{r}:{tid}": rep.gaps[(r, tid)]
                     for r in rep.resolutions for tid in rep.test_form_ids},
        }, argv)
    return 0


# --------------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="cochain-flow",
                                description=__doc__.splitlines()[0])

    def add_common(sp):
        sp.add_argument("--metric", choices=["toy", "whitney"], default="whitney")
        sp.add_argument("--quadrature-degree", type=int, default=8)
        sp.add_argument("--tolerance", type=float, default=None)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=None)

    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("mesh", help="build, subdivide, or inspect meshes")
    sp.add_argument("--torus", type=int)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--in", dest="in_path")
    sp.add_argument("--out")
    sp.add_argument("--subdivide", type=int, default=0)
    sp.add_argument("--info", action="store_true")
    add_common(sp)
    sp.set_defaults(fn=cmd_mesh)

    sp = sub.add_parser("hodge", help="harmonic subspace report")
    sp.add_argument("--in", dest="in_path")
    sp.add_argument("--torus", type=int)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--report", required=True)
    add_common(sp)
    sp.set_defaults(fn=cmd_hodge)

    sp = sub.add_parser("simulate", help="run the projected cochain flow")
    sp.add_argument("--in", dest="in_path")
    sp.add_argument("--torus", type=int)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--nu", type=float, default=0.0)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--t-final", type=float, default=1.0)
    sp.add_argument("--init", default="taylor-green")
    sp.add_argument("--integrator", choices=["rk4", "euler"], default="rk4")
    sp.add_argument("--out", required=True)
    sp.add_argument("--state-out", dest="state_out")
    sp.add_argument("--stride", type=int, default=10)
    add_common(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("steady", help="steady-residual scan over refinements")
    sp.add_argument("--form", required=True)
    sp.add_argument("--nu", type=float, default=0.0)
    sp.add_argument("--resolutions", default="4,8,16,32")
    sp.add_argument("--tests", default="")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary")
    add_common(sp)
    sp.set_defaults(fn=cmd_steady)

    sp = sub.add_parser("converge-wr", help="Whitney interpolation convergence")
    sp.add_argument("--form", required=True)
    sp.add_argument("--resolutions", default="4,8,16,32")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary")
    add_common(sp)
    sp.set_defaults(fn=cmd_converge_wr)

    sp = sub.add_parser("converge-cup", help="cup-vs-wedge convergence")
    sp.add_argument("--form1", required=True)
    sp.add_argument("--form2", required=True)
    sp.add_argument("--resolutions", default="4,8,16,32")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary")
    add_common(sp)
    sp.set_defaults(fn=cmd_converge_cup)

    sp = sub.add_parser("converge-weak", help="weak drift convergence")
    sp.add_argument("--form", required=True)
    sp.add_argument("--nu", type=float, default=0.01)
    sp.add_argument("--tests", required=True)
    sp.add_argument("--resolutions", default="4,8,16,32")
    sp.add_argument("--out", required=True)
    sp.add_argument("--summary")
    add_common(sp)
    sp.set_defaults(fn=cmd_converge_weak)

    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args, argv)
    except (MeshError, FormError, CochainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, SolverError, FlowBlowupError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
