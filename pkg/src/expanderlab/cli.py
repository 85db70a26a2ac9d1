"""Command-line front end.

Exit codes: 0 when every check in the run passes, 2 when a check fails, and 1
for usage, input, or I/O problems.  All artifacts are written atomically and
are byte-deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import distributions as dist
from .config import ExperimentConfig
from .errors import ExpanderlabError, InvalidArgumentError
from .graphs import (LabeledChain, GraphSequence, complete_graph, load_chain,
                     mix_with_permutation, random_permutation, random_regular,
                     restart_matrix, sticky_chain)
from .normal_family import StickyFamily, check_axioms, default_theta_grid
from .svgplot import emit_plot, write_text_atomic
from .variance import asymptotic_variance_series
from .verify import (CheckReport, CheckRow, fit_decay_rate, verify_difftail,
                     verify_difftailJ, verify_main_bound, verify_smooth)
from .walks import brute_force_walk_sum, walk_sum_distribution

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise UsageError(message)


def _sanitize(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "Infinity" if obj > 0 else "-Infinity"
        if math.isnan(obj):
            return "NaN"
        return obj
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def json_dumps(obj) -> str:
    return json.dumps(_sanitize(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_graph_spec(spec: str) -> LabeledChain:
    """Build a chain from the mini-language.

    Forms: ``sticky:LAMBDA,P0,P1``, ``complete:N``, ``permmix:MU,N,SEED``,
    ``regular:N,D,SEED``, ``file:PATH``.
    """
    kind, sep, rest = spec.partition(":")
    if not sep:
        raise InvalidArgumentError(f"graph spec {spec!r} is missing ':'")
    try:
        if kind == "sticky":
            lam, p0, p1 = (float(x) for x in rest.split(","))
            return sticky_chain(lam, (p0, p1))
        if kind == "complete":
            return complete_graph(int(rest))
        if kind == "permmix":
            mu_s, n_s, seed_s = rest.split(",")
            n = int(n_s)
            return mix_with_permutation(float(mu_s), random_permutation(n, int(seed_s)))
        if kind == "regular":
            n_s, d_s, seed_s = rest.split(",")
            return random_regular(int(n_s), int(d_s), int(seed_s))
        if kind == "file":
            return load_chain(rest)
    except ValueError as exc:
        raise InvalidArgumentError(f"bad graph spec {spec!r}: {exc}") from exc
    raise InvalidArgumentError(
        f"unknown graph kind {kind!r}; expected sticky, complete, permmix, regular, or file"
    )


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _float_pair(text: str) -> list[float]:
    vals = _float_list(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated floats, got {text!r}")
    return vals


def _merge_config(args) -> None:
    if not getattr(args, "config", None):
        return
    cfg = ExperimentConfig.from_toml(args.config).to_dict()
    for key, value in cfg.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _report_exit(report, path, label) -> int:
    if path:
        write_text_atomic(path, json_dumps(report.to_jsonable()))
    total = len(report.rows if hasattr(report, "rows") else report.checks)
    passed = sum(1 for r in (report.rows if hasattr(report, "rows") else report.checks)
                 if r.passed)
    note = ""
    if hasattr(report, "hypothesis_satisfied") and not report.hypothesis_satisfied:
        note = " (informational: expansion hypothesis not satisfied)"
    print(f"{label}: {passed}/{total} rows pass{note}"
          + (f"; report -> {path}" if path else ""))
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


# --------------------------------------------------------------------- handlers

def _cmd_dist(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t", "out")
    chain = parse_graph_spec(args.graph)
    d = walk_sum_distribution(chain, args.t, t_cap=args.t_cap, n_cap=args.n_cap)
    write_text_atomic(args.out, dist.to_csv(d))
    mean, var = dist.mean_variance(d)
    print(f"walk-sum distribution: t={args.t}, mean={mean:.12g}, variance={var:.12g}; "
          f"csv -> {args.out}")
    return EXIT_OK


def _cmd_tv(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t")
    chain = parse_graph_spec(args.graph)
    d = walk_sum_distribution(chain, args.t)
    if args.graph_b:
        other = walk_sum_distribution(parse_graph_spec(args.graph_b), args.t)
        ref_name = args.graph_b
    else:
        other = dist.binomial(args.t, chain.p1)
        ref_name = f"binomial({args.t}, {chain.p1:.12g})"
    value = dist.tv_distance(d, other)
    if args.out:
        write_text_atomic(args.out, json_dumps(
            {"graph": args.graph, "reference": ref_name, "t": args.t, "tv": value}))
    print(f"tv({args.graph}, {ref_name}) at t={args.t}: {value:.17g}")
    return EXIT_OK


def _cmd_sigma2(args) -> int:
    _merge_config(args)
    _require(args, "graph")
    chain = parse_graph_spec(args.graph)
    tol = args.tol if args.tol is not None else 1e-12
    sigma2, bound = asymptotic_variance_series(chain, tol)
    if args.out:
        write_text_atomic(args.out, json_dumps(
            {"graph": args.graph, "sigma2": sigma2, "error_bound": bound, "tol": tol}))
    print(f"sigma2 = {sigma2:.17g} (series error bound {bound:.3g})")
    return EXIT_OK


def _cmd_axioms(args) -> int:
    _merge_config(args)
    _require(args, "p", "sigma2", "t_list")
    family = StickyFamily.from_sigma2(tuple(args.p), args.sigma2)
    partitions = None
    if args.partitions:
        by_t = {}
        for parts in args.partitions:
            by_t.setdefault(sum(int(x) for x in parts), []).append(tuple(int(x) for x in parts))
        partitions = by_t
    theta = default_theta_grid(args.theta_points) if args.theta_points else None
    report = check_axioms(family, args.t_list, partitions=partitions,
                          a_grid=args.a_grid, theta_grid=theta)
    if args.out:
        write_text_atomic(args.out, json_dumps(report.to_jsonable()))
    passed = sum(1 for c in report.checks if c.passed)
    print(f"axioms for {family.describe()}: {passed}/{len(report.checks)} rows pass"
          + (f"; report -> {args.out}" if args.out else ""))
    if not report.all_pass:
        worst = min(report.failures(), key=lambda c: c.margin)
        print(f"  worst failure: condition {worst.condition} at t={worst.t}, "
              f"lhs={worst.lhs:.6g} rhs={worst.rhs:.6g}")
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def _cmd_difftail(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t", "c_list")
    chain = parse_graph_spec(args.graph)
    if args.u is not None:
        seq = GraphSequence.constant(chain, args.t)
        seq_prime = seq.replace_step(args.u, restart_matrix(chain))
        report = verify_difftail(seq, seq_prime, args.u, args.c_list,
                                 instance=f"{args.graph} with restart at step {args.u}")
        return _report_exit(report, args.out, "difftail")
    report = verify_difftailJ(chain, args.t, args.c_list, instance=args.graph)
    return _report_exit(report, args.out, "difftailJ")


def _cmd_smooth(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t")
    chain = parse_graph_spec(args.graph)
    theta = default_theta_grid(args.theta_points if args.theta_points else 129)
    report = verify_smooth(chain, args.t, theta, instance=args.graph)
    if args.cf_out:
        d = walk_sum_distribution(chain, args.t)
        values = dist.centered_char_fn_grid(d, chain.p1 * args.t, theta)
        write_text_atomic(args.cf_out, dist.char_grid_to_csv(theta, values))
    return _report_exit(report, args.out, "smooth")


def _cmd_main_bound(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t_list")
    chain = parse_graph_spec(args.graph)
    report = verify_main_bound(chain, args.t_list, instance=args.graph)
    code = _report_exit(report, args.out, "main-bound")
    if args.plot:
        lam = report.meta["lambda"]
        tv_pts = [(float(r.params["t"]), r.lhs) for r in report.rows if r.lhs > 0.0]
        series = []
        if tv_pts:
            series.append(("tv", tv_pts))
        if lam > 0.0:
            series.append(("lambda/sqrt(t)",
                           [(float(r.params["t"]), lam / math.sqrt(r.params["t"]))
                            for r in report.rows]))
        if series:
            emit_plot(series, args.plot, title="walk sum vs discrete normal",
                      xlabel="t", ylabel="distance", loglog=True)
            print(f"plot -> {args.plot}")
        else:
            emit_plot([("tv", [(float(r.params["t"]), r.lhs) for r in report.rows])],
                      args.plot, title="walk sum vs discrete normal",
                      xlabel="t", ylabel="distance", loglog=False)
            print(f"plot -> {args.plot}")
    return code


def _cmd_rate(args) -> int:
    _merge_config(args)
    _require(args, "graph", "t_list")
    chain = parse_graph_spec(args.graph)
    if args.family_sigma2 is not None:
        family = StickyFamily.from_sigma2((chain.p0, chain.p1), args.family_sigma2)
    else:
        sigma2, _ = asymptotic_variance_series(chain, 1e-14)
        family = StickyFamily.from_sigma2((chain.p0, chain.p1), sigma2)
    from .normal_family import dn_distribution
    points = []
    for t in args.t_list:
        value = dist.tv_distance(walk_sum_distribution(chain, t),
                                 dn_distribution(family, t))
        if value > 0.0:
            points.append((float(t), value))
    if len(points) < 3:
        raise UsageError(
            f"only {len(points)} of {len(args.t_list)} t values gave positive tv; "
            "need at least 3 to fit a rate"
        )
    fit = fit_decay_rate(points)
    if args.out:
        write_text_atomic(args.out, json_dumps(fit.to_jsonable()))
    if args.plot:
        line = [(t, math.exp(fit.intercept) * t ** fit.slope) for t, _ in points]
        emit_plot([("tv", points), (f"fit slope {fit.slope:.3f}", line)], args.plot,
                  title="tv decay rate", xlabel="t", ylabel="tv", loglog=True)
        print(f"plot -> {args.plot}")
    print(f"decay rate: slope={fit.slope:.6g}, intercept={fit.intercept:.6g}, "
          f"residual={fit.residual:.3g}"
          + (f"; fit -> {args.out}" if args.out else ""))
    return EXIT_OK


_ORACLE_STICKY = ((-0.3, (0.5, 0.5)), (0.0, (0.5, 0.5)), (0.3, (0.5, 0.5)), (0.9, (0.5, 0.5)),
                  (-0.3, (0.25, 0.75)), (0.0, (0.25, 0.75)), (0.3, (0.25, 0.75)),
                  (0.9, (0.25, 0.75)))


def _cmd_oracle_check(args) -> int:
    _merge_config(args)
    t_max = args.t_max if args.t_max is not None else 5
    seeds = args.seeds if args.seeds is not None else [0, 1, 2, 3, 4]
    tol = 1e-12
    instances = [(f"sticky:{lam},{p[0]},{p[1]}", sticky_chain(lam, p))
                 for lam, p in _ORACLE_STICKY]
    instances += [(f"regular:4,3,{s}", random_regular(4, 3, s)) for s in seeds]
    rows = []
    for name, chain in instances:
        for t in range(1, t_max + 1):
            got = walk_sum_distribution(chain, t)
            want = brute_force_walk_sum(chain, t)
            l1 = dist.lp_distances(got, want)[0]
            rows.append(CheckRow({"graph": name, "t": t}, l1, tol, tol - l1, l1 <= tol))
    report = CheckReport("oracle-check", f"DP vs path enumeration, t <= {t_max}",
                         tuple(rows), {"log_base": "e", "tolerance": tol})
    return _report_exit(report, args.out, "oracle-check")


# ----------------------------------------------------------------------- parser

def build_parser() -> _Parser:
    parser = _Parser(prog="expanderlab",
                     description="Exact walk-sum distributions and certified bounds "
                                 "on expander chains.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML file with defaults; flags override it")
    common.add_argument("--out", help="write the JSON/CSV artifact here")

    def add(name, fn, help_text, **kwargs):
        p = sub.add_parser(name, parents=[common], help=help_text, **kwargs)
        p.set_defaults(handler=fn)
        return p

    p = add("dist", _cmd_dist, "exact walk-sum distribution as CSV")
    p.add_argument("--graph")
    p.add_argument("--t", type=int)
    p.add_argument("--t-cap", type=int, default=4096)
    p.add_argument("--n-cap", type=int, default=512)

    p = add("tv", _cmd_tv, "total variation between walk sums (or against the binomial)")
    p.add_argument("--graph")
    p.add_argument("--graph-b")
    p.add_argument("--t", type=int)

    p = add("sigma2", _cmd_sigma2, "asymptotic variance via the covariance series")
    p.add_argument("--graph")
    p.add_argument("--tol", type=float)

    p = add("axioms", _cmd_axioms, "check all six discrete-normal conditions")
    p.add_argument("--p", type=_float_pair)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--t", dest="t_list", type=_int_list)
    p.add_argument("--a-grid", type=_float_list)
    p.add_argument("--theta-points", type=int)
    p.set_defaults(partitions=None)

    p = add("difftail", _cmd_difftail, "tail l1 bounds (single substitution or vs binomial)")
    p.add_argument("--graph")
    p.add_argument("--t", type=int)
    p.add_argument("--c", dest="c_list", type=_float_list)
    p.add_argument("--u", type=int, help="replace 1-based step u with a restart step")

    p = add("smooth", _cmd_smooth, "character-function decay bound")
    p.add_argument("--graph")
    p.add_argument("--t", type=int)
    p.add_argument("--theta-points", type=int)
    p.add_argument("--cf-out", help="also write the theta,re,im,abs grid as CSV")

    p = add("main-bound", _cmd_main_bound, "walk sum vs matched discrete normal in tv")
    p.add_argument("--graph")
    p.add_argument("--t", dest="t_list", type=_int_list)
    p.add_argument("--plot", help="log-log SVG of tv against t")

    p = add("rate", _cmd_rate, "fit the tv decay exponent over t")
    p.add_argument("--graph")
    p.add_argument("--t", dest="t_list", type=_int_list)
    p.add_argument("--family-sigma2", type=float,
                   help="compare against a family with this variance instead of the chain's")
    p.add_argument("--plot", help="log-log SVG with the fitted line")

    p = add("oracle-check", _cmd_oracle_check, "DP against brute-force path enumeration")
    p.add_argument("--t-max", type=int)
    p.add_argument("--seeds", type=_int_list)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required; see --help")
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpanderlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
