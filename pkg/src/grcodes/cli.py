"""Command-line harness: bound tables, repair simulations, degree sweeps.

Output is CSV with a header row plus a JSON metadata sidecar (version,
seed, config hash), or a single JSON document with --format json.  The
same configuration and seed always produce byte-identical files.

Exit codes: 0 success, 1 parameter/validation error, 2 reproduction
failure (a built-in example did not hit its expected numbers).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from . import adversarial as adv
from . import bounds, degreeopt, graphrepair, selftest
from .codes import GpmCode, PmCode
from .errors import GrcError, ParameterError
from .graphs import graph_from_spec
from .stacking import StackedCode, build_stack

EXIT_OK, EXIT_VALIDATION, EXIT_REPRODUCTION = 0, 1, 2

EXAMPLES = {
    "fig3": "7-node tree; product-matrix [7,4,6,3,1,12]; relay 9 vs processing 8",
    "fig4": "7-node binary tree; generalized PM [7,5,6,6,3,30] over GF(16); 30 vs 24",
    "fig5": "10-node tree; 9 helpers at 5 symbols: relay 95 vs processing 85",
    "petersen": "Petersen graph; optimal relay degree is 9 for k >= 3",
}


def _fr(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _config_hash(args: dict) -> str:
    blob = json.dumps(args, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _emit(rows, header, args, out=None, fmt="csv"):
    meta = {
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "config": _config_hash(vars(args)),
    }
    if fmt == "json":
        doc = json.dumps({"meta": meta, "rows": [dict(zip(header, r)) for r in rows]}, indent=2)
        if out:
            with open(out, "w") as fh:
                fh.write(doc + "\n")
        else:
            print(doc)
        return
    lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        with open(out + ".meta.json", "w") as fh:
            json.dump(meta, fh, sort_keys=True)
            fh.write("\n")
    else:
        print(text, end="")


def _parse_beta_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad beta list {s!r}") from exc


def cmd_bounds(args) -> int:
    B = _parse_beta_list(args.beta_list)
    M = args.M if args.M is not None else args.k * args.l
    p = bounds.CodeParams(args.n, args.k, args.d, args.l, B, M)
    l_msr, l_mbr = bounds.msr_mbr_points(args.n, args.k, args.d, B)
    rows = [
        ("delta_{d-k+1}", bounds.delta_r(B, args.d - args.k + 1)),
        ("omega_t", bounds.omega_r(B, args.t_adversary)),
        ("l_msr", l_msr),
        ("l_mbr", l_mbr),
        ("cutset_rhs", bounds.cutset_bound(p)),
        ("file_size", p.M),
        ("within_cutset", bounds.is_within_cutset(p)),
        ("is_msr", p.is_msr()),
        ("ip_lower_bound", bounds.ip_lower_bound(p)),
        ("functional_ip_lower_bound", bounds.functional_ip_lower_bound(p)),
        ("adversarial_cut_bound", bounds.adversarial_cut_bound(p, args.t_adversary)),
    ]
    if args.stack_spec:
        spec = build_stack(args.n, args.k, args.d, B, realize=False)
        rows.append(("stack_spec", spec.to_json().replace("\n", " ").replace(",", ";")))
    _emit(rows, ("quantity", "value"), args, args.out, args.format)
    return EXIT_OK


def _example_rows(name: str, seed: int, baseline: bool):
    rows = []
    if name == "fig3":
        g = graph_from_spec("fig3")
        code = PmCode(7, 4)
        helpers = list(range(1, 7))
        expect = {"af-u": 9, "ip-u": 8}
        rng = np.random.default_rng(seed)
        for scheme, want in expect.items():
            _, meas, form = graphrepair.simulate_repair(g, code, 0, helpers, scheme, rng=rng)
            ok = meas.total == want and meas.per_edge == form.per_edge
            rows.append(("fig3", 0, len(helpers), scheme, _fr(meas.total), ok))
    elif name == "fig4":
        g = graph_from_spec("fig4")
        code = GpmCode(7, 5, 3)
        helpers = list(range(1, 7))
        rng = np.random.default_rng(seed)
        for scheme, want in {"af-u": 30, "ip-u": 24}.items():
            _, meas, form = graphrepair.simulate_repair(g, code, 0, helpers, scheme, rng=rng)
            ok = meas.total == want and meas.per_edge == form.per_edge
            rows.append(("fig4", 0, len(helpers), scheme, _fr(meas.total), ok))
    elif name == "fig5":
        g = graph_from_spec("fig5")
        base = adv.af_with_extra_helpers_baseline(g, 0, 7, 1, 5)
        tree = graphrepair.RepairTree(g, 0, range(1, 10))
        ip = graphrepair.lambda_ip_uniform(tree, 25, 9, 5)
        rows.append(("fig5", 0, 9, "ip-u", _fr(ip.total), ip.total == 85))
        if baseline:
            rows.append(("fig5", 0, 9, "af-baseline", _fr(base.total), base.total == 95))
    elif name == "petersen":
        g = graph_from_spec("petersen")
        for f in range(g.n):
            d_star, lam, _ = degreeopt.optimal_degree_af(g, f, 3)
            rows.append(("petersen", f, d_star, "af-u", _fr(lam), d_star == 9))
    else:
        raise ParameterError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}")
    return rows


def cmd_simulate(args) -> int:
    header = ("graph", "f", "d", "scheme", "total", "verified")
    if args.example:
        rows = _example_rows(args.example, args.seed, args.baseline)
        print(f"# {args.example}: {EXAMPLES[args.example]}", file=sys.stderr)
        _emit(rows, header, args, args.out, args.format)
        return EXIT_OK if all(r[-1] for r in rows) else EXIT_REPRODUCTION
    if not args.graph or not args.code:
        raise ParameterError("need --example, or --graph with --code")
    g = graph_from_spec(args.graph)
    rng = np.random.default_rng(args.seed)
    if args.code == "pm":
        if args.k is None:
            raise ParameterError("--code pm needs --k")
        code = PmCode(g.n, args.k)
    elif args.code == "gpm":
        if args.k is None or args.t is None:
            raise ParameterError("--code gpm needs --k and --t")
        code = GpmCode(g.n, args.k, args.t)
    elif args.code == "stacked":
        if args.k is None or args.d is None or not args.beta_list:
            raise ParameterError("--code stacked needs --k, --d, --beta-list")
        code = StackedCode(build_stack(g.n, args.k, args.d, _parse_beta_list(args.beta_list)))
    else:
        raise ParameterError(f"unknown code {args.code!r}")
    f = args.f
    order = [v for layer in g.layers_from(f) for v in sorted(layer)]
    helpers = order[: code.d]
    plan = None
    if args.scheme.endswith("-nu"):
        tree = graphrepair.RepairTree(g, f, helpers)
        plan = graphrepair.NonuniformPlan.uniform(tree, code.l, code.d, code.k)
    rows = []
    for _ in range(args.trials):
        _, meas, form = graphrepair.simulate_repair(
            g, code, f, helpers, args.scheme, plan=plan, rng=rng
        )
        rows.append(
            (args.graph, f, code.d, args.scheme, _fr(meas.total), meas.per_edge == form.per_edge)
        )
    _emit(rows, header, args, args.out, args.format)
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_REPRODUCTION


def cmd_optimize(args) -> int:
    if args.n_list:
        ns = [int(x) for x in args.n_list.split(",")]
        res = degreeopt.mc_random_graph_experiment(ns, args.trials, args.seed)
        rows = [
            (n, f"{r['p']:.6f}", r["k"], r["trials"], r["hits"], f"{r['frequency']:.3f}")
            for n, r in res.items()
        ]
        _emit(rows, ("n", "p", "k", "trials", "hits", "frequency"), args, args.out, args.format)
        return EXIT_OK
    if not args.graph:
        raise ParameterError("need --graph or --n-list")
    g = graph_from_spec(args.graph)
    if args.k is None:
        raise ParameterError("--k is required")
    rows = []
    nodes = [args.f] if args.f is not None else list(range(g.n))
    for f in nodes:
        d_star, lam, helpers = degreeopt.optimal_degree_af(g, f, args.k, args.l)
        thr, kmin = degreeopt.threshold_k_general(g, f)
        rows.append((args.graph, f, args.k, args.l, d_star, _fr(lam), _fr(thr), kmin))
    _emit(
        rows,
        ("graph", "f", "k", "l", "d_star", "lambda", "threshold", "k_min_full_degree"),
        args,
        args.out,
        args.format,
    )
    return EXIT_OK


def cmd_adversarial_demo(args) -> int:
    g = graph_from_spec("fig5")
    base = adv.af_with_extra_helpers_baseline(g, 0, 7, args.t_adversary, 5)
    tree = graphrepair.RepairTree(g, 0, range(1, 10))
    ip = graphrepair.lambda_ip_uniform(tree, 25, 9, 5)
    code = adv.fig5_realizable_concat()
    helpers = [1, 2, 3, 4, 5, 6, 8, 9]
    rng = np.random.default_rng(args.seed)
    rows = [
        ("accounting", "af-baseline", _fr(base.total), "", base.total == 95),
        ("accounting", "ip-u", _fr(ip.total), "", ip.total == 85),
    ]
    ok = base.total == 95 and ip.total == 85
    for trial in range(args.trials):
        file = code.field.random_elements(rng, (code.file_size,))
        cw = code.encode(file)
        bad = int(helpers[rng.integers(0, len(helpers))])
        res = adv.adversarial_repair(
            code, cw, 0, g, helpers, adv.AdversaryModel(args.t_adversary, (bad,)), rng=rng
        )
        rows.append(
            (f"trial{trial}", f"corrupted={bad}", _fr(res.report.total),
             f"rank={res.error_rank}<={res.rank_bound}", res.success)
        )
        ok = ok and res.success and res.error_rank <= res.rank_bound
    _emit(rows, ("stage", "detail", "total", "rank", "verified"), args, args.out, args.format)
    return EXIT_OK if ok else EXIT_REPRODUCTION


def cmd_selftest(args) -> int:
    results = selftest.run_all(args.seed)
    if args.json:
        doc = [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)}
            for r in results
        ]
        print(json.dumps(doc, indent=2))
    else:
        for r in results:
            print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_REPRODUCTION


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="grcodes", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (CSV + JSON sidecar)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    b = sub.add_parser("bounds", parents=[common], help="bound calculators")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--l", type=int, required=True)
    b.add_argument("--beta-list", required=True, help="comma-separated downloads")
    b.add_argument("--M", type=int)
    b.add_argument("--t-adversary", type=int, default=0)
    b.add_argument("--stack-spec", action="store_true", help="include the stacking decomposition")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", parents=[common], help="symbol-level repair runs")
    s.add_argument("--example", choices=sorted(EXAMPLES))
    s.add_argument("--baseline", action="store_true")
    s.add_argument("--graph", help="graph spec (named family, family:args, or JSON path)")
    s.add_argument("--code", choices=("pm", "gpm", "stacked"))
    s.add_argument("--scheme", choices=graphrepair.SCHEMES, default="ip-u")
    s.add_argument("--f", type=int, default=0)
    s.add_argument("--k", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--t", type=int, help="symmetric-power order for gpm")
    s.add_argument("--beta-list")
    s.add_argument("--trials", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("optimize", parents=[common], help="repair-degree optimization")
    o.add_argument("--graph")
    o.add_argument("--f", type=int)
    o.add_argument("--k", type=int)
    o.add_argument("--l", type=int, default=1)
    o.add_argument("--n-list", help="Monte-Carlo sweep sizes, e.g. 50,100,200")
    o.add_argument("--trials", type=int, default=200)
    o.set_defaults(func=cmd_optimize)

    a = sub.add_parser("adversarial-demo", parents=[common], help="corrupted-helper repair demo")
    a.add_argument("--t-adversary", type=int, default=1)
    a.add_argument("--trials", type=int, default=5)
    a.set_defaults(func=cmd_adversarial_demo)

    t = sub.add_parser("selftest", help="reproduce all built-in examples")
    t.add_argument("--json", action="store_true")
    t.add_argument("--seed", type=int, default=selftest.DEFAULT_SEED)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except GrcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REPRODUCTION


if __name__ == "__main__":
    sys.exit(main())
