"""Command line front end: ``redqmc <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io as rio
from .errors import InvalidParameterError, ReducedQMCError

SUBSET_HELP = "comma separated 1-based coordinates, e.g. 1,3"


def _out(path):
    # bare relative paths land in $REDQMC_OUTPUT_DIR when it is set
    p = Path(path)
    return p if p.is_absolute() else rio.output_dir() / p


def _subset(text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise InvalidParameterError(f"bad subset {text!r}; expected {SUBSET_HELP}") from None


def _seed(args):
    # a subcommand's own --seed wins over the global one
    own = getattr(args, "sub_seed", None)
    return own if own is not None else args.seed


def _cmd_cbc(args):
    from .cbc import KorobovParams, reduced_cbc, reduced_lattice_error_bound, sq_worst_case_error

    weights = rio.parse_weight_spec(args.weights, args.s)
    ind = rio.parse_w_spec(args.w, args.b, args.m, args.s, weights)
    params = KorobovParams(args.alpha, weights)
    g = reduced_cbc(ind, params)
    err = sq_worst_case_error(g, params)
    bound = reduced_lattice_error_bound(ind, params, form="exact")
    if args.out:
        rio.write_genvec(_out(args.out), g)
    print(f"z = {' '.join(map(str, g.z))}")
    print(f"w = {' '.join(map(str, ind.w))}")
    print(f"squared_error = {err:.17g}")
    print(f"bound = {bound:.17g}")


def _cmd_matprod(args):
    from .fastprod import OpCounter, ProductPlan, complexity_report
    from .pointset import random_generating_vector
    from .transforms import ComponentTransform, transformed_product

    seed = _seed(args)
    rng = np.random.default_rng(seed)
    if args.genvec:
        g = rio.read_genvec(args.genvec)
    else:
        ind = rio.parse_w_spec(args.w, args.b, args.m, args.s)
        g = random_generating_vector(ind, rng)
    A = rio.read_matrix(args.matrix) if args.matrix else rng.uniform(-1, 1, (g.s, args.tau))
    plan = ProductPlan(A, g, OpCounter())
    shifts = rio.parse_shift_spec(args.shift, g.s)
    kind = {"none": "identity", "tent": "tent", "normal": "normal"}[args.transform]
    if shifts is None and kind == "identity":
        transforms = None
    else:
        shifts = np.zeros(g.s) if shifts is None else shifts
        transforms = [ComponentTransform(kind, float(d)) for d in shifts]
    t0 = time.perf_counter_ns()
    if transforms is None:
        from .fastprod import (fast_reduced_product, naive_product,
                               optimized_fast_reduced_product)
        from .pointset import full_point_set
        if args.algo == "naive":
            P = naive_product(full_point_set(g), plan.A, plan.counter)
            plan.last_algo = "naive"
        elif args.algo == "alg1":
            P = fast_reduced_product(plan)
        else:
            P = optimized_fast_reduced_product(plan)
    else:
        P = transformed_product(plan, transforms, args.algo)
    wall = time.perf_counter_ns() - t0
    if args.out:
        rio.write_matrix(_out(args.out), P)
    if args.report:
        with open(_out(args.report), "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(("algo", "b", "m", "s", "tau", "multiplies", "adds", "wall_ns"))
            wr.writerow((args.algo, g.b, g.m, g.s, plan.tau, plan.counter.multiplies,
                         plan.counter.adds, wall))
    print(f"algo = {args.algo}")
    print(f"shape = {P.shape[0]} {P.shape[1]}")
    print(f"multiplies = {plan.counter.multiplies}")
    print(f"adds = {plan.counter.adds}")
    if args.algo != "naive":
        print(f"predicted_multiplies = {complexity_report(plan).predicted_multiplies}")
    print(f"wall_ns = {wall}")
    if shifts is not None:
        print(f"shifts = {' '.join(f'{d:.17g}' for d in shifts)}")


def _net_inputs(args):
    from .digitalnet import identity_matrices, random_matrices, reduce_matrices

    if args.genmat:
        C = rio.read_genmat(args.genmat)
    elif args.random:
        C = random_matrices(args.b, args.m, args.s, _seed(args))
    else:
        C = identity_matrices(args.b, args.m, args.s)
    ind = rio.parse_w_spec(args.w, C.b, C.m, C.s, rio.parse_weight_spec(args.weights, C.s))
    return C, ind, reduce_matrices(C, ind)


def _cmd_net(args):
    from .digitalnet import (discrepancy_bound_terms, dual_net, r_w, reduced_net,
                             verify_t_value)

    C, ind, Chat = _net_inputs(args)
    print(f"w = {' '.join(map(str, ind.w))}")
    if args.net_cmd == "reduce":
        if args.out:
            rio.write_genmat(_out(args.out), Chat)
        for j, mat in enumerate(Chat.mats):
            print(f"# C{j + 1}")
            for row in mat:
                print(" ".join(map(str, row)))
    elif args.net_cmd == "points":
        pts = reduced_net(Chat)
        if args.out:
            rio.write_matrix(_out(args.out), pts)
        else:
            for row in pts:
                print(" ".join(f"{v:.17g}" for v in row))
    elif args.net_cmd == "dual":
        u = _subset(args.u)
        ks = dual_net(Chat, u, ind, starred=args.starred)
        print(f"elements = {len(ks)}")
        print(f"R_w = {r_w(Chat, u, ind):.17g}")
        if args.out:
            np.savetxt(_out(args.out), ks, fmt="%d")
    elif args.net_cmd == "bound":
        weights = rio.parse_weight_spec(args.weights, C.s)
        first, second = discrepancy_bound_terms(
            Chat, ind, weights, args.t, single_inner_t=args.single_inner_t)
        print(f"first_term = {first:.17g}")
        print(f"second_term = {second:.17g}")
        print(f"bound = {first + second:.17g}")
    elif args.net_cmd == "tvalue":
        u = _subset(args.u)
        src = C if args.unreduced else Chat
        print(f"t = {verify_t_value(src, u)}")


def _cmd_rmc(args):
    from .fastprod import OpCounter
    from .reducedmc import ReducedMCLayout, draw_bank, reduced_mc_product

    if args.reps < 1:
        raise InvalidParameterError(f"reps must be >= 1, got {args.reps}")
    ind = rio.parse_w_spec(args.w, args.b, args.m, args.s)
    layout = ReducedMCLayout(ind)
    seed = _seed(args)
    if args.matrix:
        A = rio.read_matrix(args.matrix)
    else:
        A = np.eye(args.s)
    counter = OpCounter()
    rows = []
    for r in range(args.reps):
        bank = draw_bank(layout, args.dist, [seed, r])
        t0 = time.perf_counter_ns()
        P = reduced_mc_product(bank, layout, A, counter)
        vals = P if args.integrand == "linear" else P * P
        est = float(vals.mean())
        rows.append((r, est, time.perf_counter_ns() - t0, counter.multiplies))
    out = _out(args.out) if args.out else None
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        wr = csv.writer(fh)
        wr.writerow(("rep", "estimate", "wall_ns", "multiplies"))
        for r, est, ns, mult in rows:
            wr.writerow((r, f"{est:.17g}", ns, mult))
    finally:
        if out:
            fh.close()


def _cmd_bench(args):
    from . import bench

    cfg = rio.read_config(args.config) if args.config else {}
    if args.bench_cmd == "timing":
        if "seed" not in cfg and args.seed is not None:
            cfg["seed"] = str(args.seed)
        bc = bench.BenchConfig.from_mapping(cfg)
        rows = bench.run_timing_sweep(bc)
        from .fastprod import predicted_multiplies
        bad = []
        for row in rows:
            m, s, tau = bc.point(row.sweep)
            ind = rio.parse_w_spec(bc.w, bc.b, m, s)
            want = s * bc.b**m * tau if row.algo == "naive" else predicted_multiplies(ind, tau)
            if row.multiplies != want:
                bad.append((row.sweep, row.algo, row.multiplies, want))
        path = bench.emit_plot_data(rows, _out(args.out), "timing")
        print(f"wrote {path}")
        if bad:
            for sweep, algo, got, want in bad:
                print(f"counter mismatch at {sweep} {algo}: {got} != {want}", file=sys.stderr)
            return 1
    else:
        keys = {"m_values": "8 9 10 11 12 13 14", "c_values": "0 0.5 1",
                "reps": "16", "seed": str(args.seed if args.seed is not None else 0)}
        unknown = set(cfg) - set(keys)
        if unknown:
            raise InvalidParameterError(f"unknown config keys {sorted(unknown)}")
        keys.update(cfg)
        ms = [int(v) for v in keys["m_values"].replace(",", " ").split()]
        cs = [float(v) for v in keys["c_values"].replace(",", " ").split()]
        ref = bench.load_reference()
        rows = bench.run_option_study(bench.OptionModel.tridiagonal(), ms, cs,
                                      int(keys["reps"]), ref["price"], seed=int(keys["seed"]))
        path = bench.emit_plot_data(rows, _out(args.out), "pricing")
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="redqmc", description=__doc__)
    p.add_argument("--version", action="version", version=f"redqmc {__version__}")
    p.add_argument("--seed", type=int, default=0, help="default seed for random choices")
    sub = p.add_subparsers(dest="cmd", required=True)

    def dims(sp, s_default=4):
        sp.add_argument("--b", type=int, default=2)
        sp.add_argument("--m", type=int, default=6)
        sp.add_argument("--s", type=int, default=s_default)
        sp.add_argument("--w", default="zero", help="zero | log:<c> | file:<path> | wchoice:<kappa>")

    sp = sub.add_parser("cbc", help="reduced CBC construction")
    dims(sp)
    sp.add_argument("--weights", default="geo:0.7", help="geo:<c> | file:<path>")
    sp.add_argument("--alpha", type=int, default=1)
    sp.add_argument("--out", help="write the generating vector here")
    sp.set_defaults(func=_cmd_cbc)

    sp = sub.add_parser("matprod", help="reduced lattice matrix product")
    dims(sp)
    sp.add_argument("--genvec", help="generating vector file (else random z)")
    sp.add_argument("--matrix", help="matrix A file (else random with --tau columns)")
    sp.add_argument("--tau", type=int, default=4)
    sp.add_argument("--algo", choices=("naive", "alg1", "alg2"), default="alg1")
    sp.add_argument("--transform", choices=("none", "tent", "normal"), default="none")
    sp.add_argument("--shift", default="none", help="none | seed:<int> | file:<path>")
    sp.add_argument("--out")
    sp.add_argument("--report", help="one-row CSV with operation counts and wall time")
    sp.set_defaults(func=_cmd_matprod)

    sp = sub.add_parser("net", help="reduced digital nets")
    net = sp.add_subparsers(dest="net_cmd", required=True)
    for name in ("reduce", "points", "dual", "bound", "tvalue"):
        q = net.add_parser(name)
        dims(q, s_default=2)
        q.add_argument("--genmat", help="generating matrix file (else identity matrices)")
        q.add_argument("--random", action="store_true", help="random matrices from --seed")
        q.add_argument("--weights", default="geo:0.7")
        if name in ("dual", "tvalue"):
            q.add_argument("--u", required=True, help=SUBSET_HELP)
        if name == "dual":
            q.add_argument("--starred", action="store_true", help="exclude zero components")
        if name == "bound":
            q.add_argument("--t", type=int, help="uniform t-value (else computed)")
            q.add_argument("--single-inner-t", action="store_true",
                           help="use one global t inside the inner maximum")
        if name == "tvalue":
            q.add_argument("--unreduced", action="store_true")
        if name in ("reduce", "points", "dual"):
            q.add_argument("--out")
    sp.set_defaults(func=_cmd_net)

    sp = sub.add_parser("rmc", help="reduced Monte Carlo products")
    dims(sp)
    sp.add_argument("--dist", choices=("uniform", "normal"), default="uniform")
    sp.add_argument("--matrix", help="matrix A file (else identity)")
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--integrand", choices=("linear", "square"), default="linear",
                    help="estimate the mean of the entries of XA or of their squares")
    sp.add_argument("--seed", dest="sub_seed", type=int, help="overrides the global --seed")
    sp.add_argument("--out", help="CSV output (else stdout)")
    sp.set_defaults(func=_cmd_rmc)

    sp = sub.add_parser("bench", help="timing sweeps and the option study")
    bsub = sp.add_subparsers(dest="bench_cmd", required=True)
    for name, default in (("timing", "timing.csv"), ("option", "option.csv")):
        q = bsub.add_parser(name)
        q.add_argument("--config", help="key = value file")
        q.add_argument("--out", default=default)
    sp.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except ReducedQMCError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    return int(code or 0)


if __name__ == "__main__":
    sys.exit(main())
