"""Command-line interface.

Exit codes: 0 success, 1 parse/domain error, 2 non-symmetric input,
3 infeasible moments, 4 capacity exceeded.
"""
import argparse
import json
import math
import sys

from .car import build_context, matrix_unit
from .definetti import (battery_deviation, classify_type, decompose_state,
                        eigenvalue_ratio_spectrum, reconstruct_state)
from .exceptions import CapacityError, CarError, DomainError
from .gns import build_gns, ep_odd_compression, fixed_space_basis
from .io import read_measure, read_state, write_measure
from .perms import intersecting_fraction
from .states import anticommutator_average, product_state, strong_clustering_check
from .validation import check_mode_count, check_unit_interval
from .verify import run_suite


def _dump(report, path=None):
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_decompose(args):
    phi = read_state(args.state)
    ctx = build_context(phi.n)
    measure, report = decompose_state(ctx, phi, args.grid, args.tol, seed=args.seed)
    report["seed"] = args.seed
    report["atoms"] = [list(a) for a in measure.atoms]
    if args.out:
        write_measure(args.out, measure)
    _dump(report, args.report)
    return 0


def cmd_compare(args):
    phi = read_state(args.state)
    measure = read_measure(args.measure)
    ctx = build_context(phi.n)
    battery = battery_deviation(ctx, phi, reconstruct_state(measure, phi.n), seed=args.seed)
    _dump({"seed": args.seed, "battery": battery, "battery_deviation": battery["max"]})
    return 0


def cmd_verify(args):
    report = run_suite(args.n, args.seed)
    _dump(report, args.out)
    return 0 if report["passed"] else 1


def cmd_count(args):
    exact, estimate = intersecting_fraction(args.m, args.k, args.N)
    print("m,k,N,exact,estimate,abs_error")
    print(f"{args.m},{args.k},{args.N},{exact:.6f},{estimate:.6f},{abs(exact - estimate):.3e}")
    return 0


def cmd_cluster(args):
    if args.state:
        phi = read_state(args.state)
    else:
        if args.mu is None or args.n is None:
            raise DomainError("cluster needs --state, or --mu together with --n")
        phi = product_state(args.mu, args.n)
    ctx = build_context(phi.n)
    if (1 << args.stages) > phi.n:
        raise CapacityError(f"stage {args.stages} needs 2^{args.stages} <= n = {phi.n}")
    e11 = matrix_unit(ctx, 1, 1, 1)
    print("stage,defect")
    for m in range(1, args.stages + 1):
        defect = strong_clustering_check(ctx, phi, e11, e11, m)
        print(f"{m},{abs(defect):.6e}")
    return 0


def cmd_classify(args):
    mu = check_unit_interval(args.mu)
    ft = classify_type(mu)
    line = str(ft)
    if ft.tag == "III_lambda":
        _, ratios = eigenvalue_ratio_spectrum(mu, args.n)
        line += f" witness_n={args.n} ratios=[{', '.join(f'{r:.12g}' for r in ratios)}]"
    print(line)
    return 0


def _parse_n_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"--n-list must be comma-separated integers: {exc}") from exc


def cmd_oddness(args):
    ns = _parse_n_list(args.n_list)
    print("n,anticommutator_average,odd_compression,sqrt_bound")
    for n in ns:
        check_mode_count(n)
        ctx = build_context(n)
        phi = product_state(args.mu, n)
        avg = anticommutator_average(ctx, phi, ctx.a(1)).real
        gns = build_gns(ctx, phi)
        comp = ep_odd_compression(gns, ctx.a(1), fixed_space_basis(gns))
        print(f"{n},{avg:.12g},{comp:.12g},{math.sqrt(1 / n):.12g}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="cardefinetti",
                                     description="Symmetric states on finite CAR algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="recover the mixing measure of a symmetric state")
    p.add_argument("--state", required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="measure CSV output path")
    p.add_argument("--report", help="JSON report path (default: stdout)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compare", help="battery deviation between a state and a measure")
    p.add_argument("--state", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="intersecting-permutation fraction")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("cluster", help="strong clustering defects along g_m")
    p.add_argument("--mu", type=float)
    p.add_argument("--state")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("classify", help="factor type of the product state phi_mu")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n", type=int, default=6, help="size of the eigenvalue-ratio witness")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("oddness", help="finite-size decay of odd expectations")
    p.add_argument("--n-list", default="3,4,5,6,7,8")
    p.add_argument("--mu", type=float, default=0.5)
    p.set_defaults(func=cmd_oddness)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
