"""Command-line front end.

Subcommands: ``approx`` builds an input-output set for a named function,
``estimate`` runs a scenario file through the estimator, ``leaves`` /
``bounds`` / ``contains`` query a stored set.  All JSON artifacts are
deterministic for a fixed configuration; wall-clock measurements go to a
separate ``timing.json`` so rerunning a command reproduces every other
file byte for byte.

Exit codes: 0 success, 2 model/measurement inconsistency, 3 resource cap
exceeded, 4 bad input.
"""

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import solver
from .approx import (build_m1, build_m3, load_ioset, load_relu,
                     optimize_breakpoints, save_ioset, save_relu, save_sos,
                     sos_to_ioset)
from .errors import (DimensionError, HybZonoError, InconsistencyError,
                     InvalidInputError, LeafCapError, UncertifiedError)
from .estimation import load_scenario, run_estimator
from .functions import builtin_handle
from .sets import HybridZonotope

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONSISTENT = 2
EXIT_RESOURCE = 3
EXIT_BAD_INPUT = 4


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _parse_floats(text, what):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as err:
        raise InvalidInputError(f"cannot parse {what} '{text}'") from err


def _parse_domain(text, arity):
    vals = _parse_floats(text, "domain")
    if len(vals) != 2 * arity:
        raise InvalidInputError(
            f"domain needs {2 * arity} numbers (lo,hi per axis), got {len(vals)}")
    lo = np.array(vals[0::2])
    hi = np.array(vals[1::2])
    return lo, hi


def _parse_grid(text):
    try:
        parts = text.lower().split("x")
        counts = tuple(int(p) for p in parts)
        if len(counts) == 1:
            counts = (counts[0], counts[0])
        return counts
    except ValueError as err:
        raise InvalidInputError(f"cannot parse grid '{text}'") from err


def _function_for(name):
    if name.startswith("net:"):
        net = load_relu(name[4:])
        return None, net
    return builtin_handle(name), None


def cmd_approx(args):
    os.makedirs(args.out, exist_ok=True)
    f, preloaded_net = _function_for(args.function)
    report = {"method": args.method, "function": args.function}
    t0 = time.perf_counter()
    if args.method in ("m1", "m2"):
        if f is None:
            raise InvalidInputError("m1/m2 need an evaluable builtin function")
        domain = _parse_domain(args.domain, f.arity)
        if args.method == "m2":
            if f.arity != 1:
                raise InvalidInputError("m2 optimizes 1-D breakpoints only")
            s = optimize_breakpoints(f, domain, args.breakpoints,
                                     restarts=args.restarts, seed=args.seed)
        elif f.arity == 1:
            s = build_m1(f, domain, args.breakpoints)
        else:
            counts = _parse_grid(args.grid) if args.grid else (args.breakpoints,
                                                               args.breakpoints)
            s = build_m1(f, domain, counts)
        io = sos_to_ioset(s)
        pre = (2 * s.union.nv, s.union.num_polys, s.union.nv + 2)
        report.update({
            "eps": s.eps,
            "certified": s.certified,
            "breakpoints_per_axis": [a.tolist() for a in s.axes],
            "num_vertices": s.union.nv,
            "num_polytopes": s.union.num_polys,
            "counts_before_inflation": {"ng": pre[0], "nb": pre[1], "nc": pre[2]},
        })
        save_sos(s, os.path.join(args.out, "sos.json"))
    elif args.method == "m3":
        if preloaded_net is not None:
            net = preloaded_net
            arity = net.n_in
            domain = _parse_domain(args.domain, arity)
            f = None
        else:
            arity = f.arity
            domain = _parse_domain(args.domain, arity)
            net = None
        layout = [int(tok) for tok in args.layers.split(",")] if args.layers else [4]
        if f is not None:
            io, net, eps = build_m3(f, domain, layout, args.seed,
                                    iters=args.iters, lr=args.lr, net=net)
            certified = f.lipschitz is not None
        else:
            from .approx import relu_to_ioset
            io = relu_to_ioset(net, domain)
            eps = 0.0
            certified = True
        X = _sample_grid(domain, 40)
        train_max_err = (float(np.max(np.abs(net.eval(X) - f(X))))
                         if f is not None else 0.0)
        report.update({
            "eps": eps,
            "certified": certified,
            "layers": [w.shape[0] for w, _ in net.layers[:-1]],
            "seed": args.seed,
            "sampled_max_err": train_max_err,
        })
        save_relu(net, os.path.join(args.out, "net.json"))
    else:
        raise InvalidInputError(f"unknown method '{args.method}'")
    if not report["certified"] and not args.allow_uncertified:
        raise UncertifiedError(
            "error bound is sampled, not certified (no Lipschitz constant); "
            "pass --allow-uncertified to write it anyway")
    report["counts"] = {"ng": io.set.ng, "nb": io.set.nb, "nc": io.set.nc}
    save_ioset(io, os.path.join(args.out, "ioset.json"))
    _write_json(os.path.join(args.out, "report.json"), report)
    _write_json(os.path.join(args.out, "timing.json"),
                {"build_s": time.perf_counter() - t0})
    print(f"wrote {args.out}/ioset.json  eps={report['eps']:.6g} "
          f"counts={report['counts']}")
    return EXIT_OK


def _sample_grid(domain, per_axis):
    lo, hi = domain
    if lo.size == 1:
        return np.linspace(lo[0], hi[0], per_axis * per_axis).reshape(-1, 1)
    gx = np.linspace(lo[0], hi[0], per_axis)
    gy = np.linspace(lo[1], hi[1], per_axis)
    xs, ys = np.meshgrid(gx, gy, indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel()])


def cmd_estimate(args):
    os.makedirs(args.out, exist_ok=True)
    plant, meas, X0, inputs, true_x0, options = load_scenario(args.scenario)
    if args.tol is not None:
        options["tol"] = args.tol
    if args.leaf_cap is not None:
        options["leaf_cap"] = args.leaf_cap
    if args.allow_uncertified:
        options["allow_uncertified"] = True
    if args.count_regions:
        options["count_regions"] = True
    state = run_estimator(plant, meas, X0, inputs, true_x0,
                          tol=options["tol"], leaf_cap=options["leaf_cap"],
                          count_regions=options["count_regions"],
                          allow_uncertified=options["allow_uncertified"],
                          true_states=options.get("true_states"))
    steps = []
    timing = {"per_step": []}
    for rec in state.log:
        prior_file = f"step_{rec.k:02d}_prior.json"
        post_file = f"step_{rec.k:02d}_posterior.json"
        rec.prior.save(os.path.join(args.out, prior_file))
        rec.posterior.save(os.path.join(args.out, post_file))
        steps.append({
            "k": rec.k,
            "y": rec.y.tolist(),
            "true_state": rec.true_state.tolist(),
            "bounds_lo": None if rec.bounds_lo is None else rec.bounds_lo.tolist(),
            "bounds_hi": None if rec.bounds_hi is None else rec.bounds_hi.tolist(),
            "region_count": rec.region_count,
            "prior_file": prior_file,
            "posterior_file": post_file,
            "contained": True,
        })
        timing["per_step"].append({"k": rec.k, "update_s": rec.t_update,
                                   "bounds_s": rec.t_bounds,
                                   "regions_s": rec.t_regions})
    timing["total_update_s"] = state.total_update_time
    timing["total_bounds_s"] = state.total_bounds_time
    _write_json(os.path.join(args.out, "steps.json"), steps)
    _write_json(os.path.join(args.out, "summary.json"), {
        "num_steps": len(steps),
        "containment": "PASS",
        "final_bounds_lo": steps[-1]["bounds_lo"],
        "final_bounds_hi": steps[-1]["bounds_hi"],
        "region_counts": [s["region_count"] for s in steps],
    })
    _write_json(os.path.join(args.out, "timing.json"), timing)
    print(f"estimation complete: {len(steps)} steps, containment PASS, "
          f"update {timing['total_update_s']:.2f}s "
          f"bounds {timing['total_bounds_s']:.2f}s")
    return EXIT_OK


def _load_set_file(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"invalid JSON in {path}: {err}") from err
    if "set" in d:  # an input-output set file; query its stacked set
        return HybridZonotope.from_dict(d["set"])
    return HybridZonotope.from_dict(d)


def cmd_leaves(args):
    os.makedirs(args.out, exist_ok=True)
    Z = _load_set_file(args.set)
    t0 = time.perf_counter()
    cap = args.leaf_cap if args.leaf_cap is not None else solver.DEFAULT_LEAF_CAP
    regions, leaves = solver.count_regions(Z, cap=cap)
    polys = []
    assignments = []
    for leaf in leaves:
        poly = solver.leaf_polygon_2d(leaf, args.angular_res)
        polys.append(poly.tolist())
        assignments.append(leaf.assignment.tolist())
    _write_json(os.path.join(args.out, "polygons.json"), {
        "num_leaves": len(leaves),
        "num_regions": regions,
        "angular_resolution_deg": args.angular_res,
        "assignments": assignments,
        "polygons": polys,
    })
    _write_json(os.path.join(args.out, "timing.json"),
                {"leaves_s": time.perf_counter() - t0})
    if args.svg:
        _write_svg(os.path.join(args.out, "polygons.svg"), polys)
    print(f"{len(leaves)} leaves in {regions} region(s) -> {args.out}/polygons.json")
    return EXIT_OK


def _write_svg(path, polys, width=640, height=640):
    pts = [p for poly in polys for p in poly]
    if not pts:
        lo = np.zeros(2)
        hi = np.ones(2)
    else:
        arr = np.array(pts)
        lo = arr.min(axis=0)
        hi = arr.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.05 * float(span.max())
    lo = lo - pad
    span = span + 2 * pad

    def sx(x):
        return (x - lo[0]) / span[0] * width

    def sy(y):
        return height - (y - lo[1]) / span[1] * height

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">']
    for poly in polys:
        if len(poly) < 2:
            continue
        path_d = "M " + " L ".join(f"{sx(x):.2f} {sy(y):.2f}" for x, y in poly) + " Z"
        parts.append(f'<path d="{path_d}" fill="#4878CF" fill-opacity="0.35" '
                     f'stroke="#20406f" stroke-width="1"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


def cmd_bounds(args):
    os.makedirs(args.out, exist_ok=True)
    rows = []
    t0 = time.perf_counter()
    if args.run:
        with open(os.path.join(args.run, "steps.json")) as fh:
            steps = json.load(fh)
        for step in steps:
            Z = HybridZonotope.load(os.path.join(args.run, step["posterior_file"]))
            lo, hi = solver.bounds(Z)
            rows.append((step["k"], lo, hi))
    else:
        Z = _load_set_file(args.set)
        lo, hi = solver.bounds(Z)
        rows.append((0, lo, hi))
    out_path = os.path.join(args.out, "bounds.csv")
    n = rows[0][1].size
    header = ["k"]
    for i in range(n):
        header += [f"lo{i + 1}", f"hi{i + 1}"]
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, lo, hi in rows:
            row = [k]
            for i in range(n):
                row += [repr(float(lo[i])), repr(float(hi[i]))]
            writer.writerow(row)
    _write_json(os.path.join(args.out, "timing.json"),
                {"bounds_s": time.perf_counter() - t0})
    print(f"wrote {out_path} ({len(rows)} row(s))")
    return EXIT_OK


def cmd_contains(args):
    Z = _load_set_file(args.set)
    x = np.array(_parse_floats(args.point, "point"))
    tol = args.tol if args.tol is not None else 1e-6
    witness = solver.containment_witness(Z, x, tol=tol)
    verdict = {
        "point": x.tolist(),
        "tol": tol,
        "contains": witness is not None,
        "witness_xc": None if witness is None else witness[0].tolist(),
        "witness_xb": None if witness is None else witness[1].tolist(),
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "contains.json"), verdict)
    print(json.dumps(verdict, sort_keys=True))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hybzono",
        description="Set-valued state estimation with hybrid zonotopes")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--tol", type=float, default=None,
                        help="membership tolerance")
    common.add_argument("--angular-res", type=float, default=1.0,
                        help="polygon support sampling resolution (degrees)")
    common.add_argument("--leaf-cap", type=int, default=None,
                        help="max binary factors for leaf enumeration")
    common.add_argument("--allow-uncertified", action="store_true",
                        help="accept error bounds without a Lipschitz constant")

    p = sub.add_parser("approx", parents=[common],
                       help="build an input-output set for a function")
    p.add_argument("--method", required=True, choices=["m1", "m2", "m3"])
    p.add_argument("--function", required=True,
                   help="inv | square | sources | net:<path>")
    p.add_argument("--domain", required=True,
                   help="lo,hi per axis, e.g. '1,10' or '-5,5,-5,5'")
    p.add_argument("--breakpoints", type=int, default=5)
    p.add_argument("--grid", default=None, help="2-D grid, e.g. '10x10'")
    p.add_argument("--layers", default=None, help="hidden widths, e.g. '20,20'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("estimate", parents=[common],
                       help="run a scenario through the estimator")
    p.add_argument("--scenario", required=True)
    p.add_argument("--count-regions", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("leaves", parents=[common],
                       help="export leaf polygons of a stored 2-D set")
    p.add_argument("--set", required=True)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_leaves)

    p = sub.add_parser("bounds", parents=[common],
                       help="axis-aligned bounds of a set or run directory")
    p.add_argument("--set", default=None)
    p.add_argument("--run", default=None)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("contains", parents=[common],
                       help="point membership with certificate factors")
    p.add_argument("--set", required=True)
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_contains)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bounds" and not (args.set or args.run):
        print("error: bounds needs --set or --run", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        return args.func(args)
    except InconsistencyError as err:
        print(f"inconsistency: {err}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except LeafCapError as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InvalidInputError, DimensionError, UncertifiedError,
            FileNotFoundError, KeyError) as err:
        print(f"bad input: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except HybZonoError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
