"""Command-line front end.

Exit status: 0 on success, 1 when a checked property fails (bound
violation, Monte Carlo disagreement), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import bounds as bnd
from .circuits import build_aqft, build_qft, inverse, run
from .experiments import (
    Dyadic,
    Explicit,
    Fixed,
    LogRule,
    SweepConfig,
    WorstCase,
    fmt_prob,
    gate_count_table,
    monte_carlo_estimate,
    parse_config,
    summary_line,
    sweep_exact,
    sweep_to_csv,
    sweep_to_json,
)
from .phase import Phase, default_precision
from .semiclassical import (
    FULL_DISTRIBUTION_MAX_QUBITS,
    Criterion,
    TrialSpec,
    candidate_probabilities,
    distribution_vector,
    per_bit_table,
)
from .statevector import MAX_QUBITS, prepare_phase_register

FORMAT_ENV = "AQFTLAB_FORMAT"
FORMATS = ("csv", "json", "text")


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _threshold(args, n: int) -> int:
    if getattr(args, "m", None) is not None:
        if args.m < 2 or args.m > n:
            raise UsageError(f"--m must satisfy 2 <= m <= n (got m={args.m}, n={n})")
        return args.m
    return bnd.log_rule(n, args.log_rule)


def _parse_phi(text: str, n: int) -> Phase:
    try:
        return Phase.parse(text, default_precision(n))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse --phi {text!r}: {exc}")


def _check_n(n: int, cap: int = MAX_QUBITS) -> None:
    if not 1 <= n <= cap:
        raise UsageError(f"--n must be between 1 and {cap}, got {n}")


def _write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _phase_fields(phi: Phase) -> dict:
    return {"phi": fmt_prob(float(phi)), "phi_dyadic": phi.dyadic_str(),
            "phi_rounded": phi.rounded}


# subcommands

def cmd_emit_circuit(args, out) -> int:
    _check_n(args.n)
    if args.m is not None and not 2 <= args.m <= args.n:
        raise UsageError(f"--m must satisfy 2 <= m <= n (got m={args.m}, n={args.n})")
    plan = build_qft(args.n) if args.m is None else build_aqft(args.n, args.m)
    if args.inverse:
        plan = inverse(plan)
    out.write(plan.to_text())
    return 0


def cmd_trial(args, out) -> int:
    _check_n(args.n, 4096)
    m = _threshold(args, args.n)
    phi = _parse_phi(args.phi, args.n)
    spec = TrialSpec(args.n, m, phi, Criterion(args.criterion))
    x_hat, delta = spec.nearest
    rows = per_bit_table(spec)
    cands = candidate_probabilities(spec)
    total = sum(cands.values())
    fmt = args.format or "text"
    if fmt == "json":
        doc = {"n": spec.n, "m": spec.m, "criterion": spec.criterion.value,
               **_phase_fields(phi), "estimate": str(x_hat), "delta": str(delta),
               "bits": [{"p": r.p, "x": r.bit, "chi": str(r.chi.to_fraction()),
                         "delta": str(r.delta), "delta_float": fmt_prob(float(r.delta)),
                         "cos2": fmt_prob(r.probability)} for r in rows],
               "product": fmt_prob(float(np.prod([r.probability for r in rows]))),
               "qualifying": {str(k): fmt_prob(v) for k, v in cands.items()},
               "p_exact": fmt_prob(total)}
        out.write(json.dumps(doc) + "\n")
    elif fmt == "csv":
        out.write(_write_csv(
            ("p", "x", "chi", "delta", "delta_float", "cos2"),
            [(r.p, r.bit, str(r.chi.to_fraction()), str(r.delta), fmt_prob(float(r.delta)),
              fmt_prob(r.probability)) for r in rows]))
    else:
        note = " (rounded from decimal input)" if phi.rounded else ""
        out.write(f"phi = {phi.decimal_str()} = {phi.dyadic_str()}{note}\n")
        out.write(f"n = {spec.n}  m = {spec.m}  criterion = {spec.criterion.value}\n")
        out.write(f"nearest estimate = {x_hat}  delta = {delta} ({fmt_prob(float(delta))})\n")
        out.write("p\tx_p\tchi_p\tdelta_p\tdelta_p_float\tcos2(pi*delta_p)\n")
        for r in rows:
            out.write(f"{r.p}\t{r.bit}\t{r.chi.to_fraction()}\t{r.delta}\t"
                      f"{fmt_prob(float(r.delta))}\t{fmt_prob(r.probability)}\n")
        out.write(f"product = {fmt_prob(float(np.prod([r.probability for r in rows])))}\n")
        for k, v in cands.items():
            out.write(f"qualifying {k}: {fmt_prob(v)}\n")
        out.write(f"P = {fmt_prob(total)}\n")
    return 0


def cmd_bounds(args, out) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    m = _threshold(args, args.n)
    report = bnd.bounds_report(args.n, m)
    if args.n < 4:
        print(f"warning: fixed-bound columns not applicable for n={args.n} < 4",
              file=sys.stderr)
    fmt = args.format or "csv"
    values = [fmt_prob(v) if isinstance(v, float) or v is None else v for v in report.row()]
    if fmt == "json":
        out.write(json.dumps(dict(zip(bnd.CSV_COLUMNS, values))) + "\n")
    elif fmt == "csv":
        out.write(_write_csv(bnd.CSV_COLUMNS, [values]))
    else:
        for k, v in zip(bnd.CSV_COLUMNS, values):
            out.write(f"{k}: {v}\n")
    return 0


def cmd_sweep(args, out) -> int:
    if args.config:
        try:
            with open(args.config) as fh:
                config = parse_config(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}")
    else:
        if not args.n:
            raise UsageError("sweep needs --n or --config")
        grids = []
        if args.grid:
            grids.append(Dyadic(args.grid))
        if args.worst_case:
            grids.append(WorstCase())
        if args.phi:
            p = max(args.n)
            grids.append(Explicit(tuple(_parse_phi(t, p) for t in args.phi.split(","))))
        rule = Fixed(args.m) if args.m is not None else LogRule(args.log_rule)
        config = SweepConfig(tuple(args.n), rule, tuple(grids) or (Dyadic(257),),
                             Criterion(args.criterion))
    for n in config.n_values:
        _check_n(n, 4096)
    result = sweep_exact(config, workers=args.workers)
    fmt = args.format or "csv"
    if fmt == "json":
        out.write(sweep_to_json(result))
    elif fmt == "csv":
        out.write(sweep_to_csv(result))
        print(summary_line(result.summary), file=sys.stderr)
    else:
        out.write(summary_line(result.summary) + "\n")
    return 1 if result.summary.violations else 0


MC_COLUMNS = ("n", "m", "phi", "phi_dyadic", "criterion", "samples", "seed",
              "p_hat", "standard_error", "exact_p")


def cmd_montecarlo(args, out) -> int:
    _check_n(args.n, 4096)
    m = _threshold(args, args.n)
    phi = _parse_phi(args.phi, args.n)
    if args.samples < 100:
        raise UsageError("--samples must be at least 100")
    spec = TrialSpec(args.n, m, phi, Criterion(args.criterion))
    res = monte_carlo_estimate(spec, args.samples, args.seed, workers=args.workers)
    exact = sum(candidate_probabilities(spec).values())
    row = (spec.n, spec.m, fmt_prob(float(phi)), phi.dyadic_str(), spec.criterion.value,
           res.samples, res.seed, fmt_prob(res.p_hat), fmt_prob(res.standard_error),
           fmt_prob(exact))
    fmt = args.format or "csv"
    if fmt == "json":
        out.write(json.dumps(dict(zip(MC_COLUMNS, row))) + "\n")
    elif fmt == "csv":
        out.write(_write_csv(MC_COLUMNS, [row]))
    else:
        for k, v in zip(MC_COLUMNS, row):
            out.write(f"{k}: {v}\n")
    tolerance = 4 * res.standard_error if res.standard_error > 0 else 1.0 / res.samples
    return 0 if abs(res.p_hat - exact) <= tolerance else 1


GATE_COLUMNS = ("n", "m", "hadamards", "qft_rotations", "aqft_rotations", "ratio")


def cmd_gatecount(args, out) -> int:
    for n in args.n:
        if n < 1:
            raise UsageError("--n values must be >= 1")
    rule = Fixed(args.m) if args.m is not None else LogRule(args.log_rule)
    rows = [(r.n, r.m, r.hadamards, r.qft_rotations, r.aqft_rotations, fmt_prob(r.ratio))
            for r in gate_count_table(args.n, rule)]
    fmt = args.format or "csv"
    if fmt == "json":
        out.write(json.dumps([dict(zip(GATE_COLUMNS, r)) for r in rows]) + "\n")
    elif fmt == "csv":
        out.write(_write_csv(GATE_COLUMNS, rows))
    else:
        for r in rows:
            out.write("  ".join(f"{k}={v}" for k, v in zip(GATE_COLUMNS, r)) + "\n")
    return 0


def cmd_simulate(args, out) -> int:
    _check_n(args.n, FULL_DISTRIBUTION_MAX_QUBITS)
    m = _threshold(args, args.n)
    phi = _parse_phi(args.phi, args.n)
    state = run(inverse(build_aqft(args.n, m)), prepare_phase_register(phi, args.n))
    sv = state.probabilities()
    sc = distribution_vector(TrialSpec(args.n, m, phi))
    tv = 0.5 * float(np.abs(sv - sc).sum())
    order = sorted(range(len(sv)), key=lambda i: (-sc[i], i))[:args.top]
    rows = [(format(i, f"0{args.n}b"), fmt_prob(float(sv[i])), fmt_prob(float(sc[i])))
            for i in order]
    fmt = args.format or "csv"
    if fmt == "json":
        out.write(json.dumps({"n": args.n, "m": m, **_phase_fields(phi),
                              "tv_distance": fmt_prob(tv),
                              "outcomes": [dict(zip(("bits", "p_statevector", "p_semiclassical"), r))
                                           for r in rows]}) + "\n")
    else:
        out.write(_write_csv(("bits", "p_statevector", "p_semiclassical"), rows))
        print(f"tv_distance={fmt_prob(tv)}", file=sys.stderr)
    return 0 if tv <= 1e-10 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aqftlab",
                                     description="QFT / AQFT phase-estimation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True, m=True):
        if m:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--m", type=int, help="rotation threshold")
            g.add_argument("--log-rule", type=int, default=2, metavar="K",
                           help="m = ceil(log2 n) + K, clamped to [2, n] (default 2)")
        if fmt:
            p.add_argument("--format", choices=FORMATS, default=os.environ.get(FORMAT_ENV))

    p = sub.add_parser("emit-circuit", help="print a QFT / AQFT gate list")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_emit_circuit)

    p = sub.add_parser("trial", help="exact per-bit analysis of one phase")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default="nearest")
    common(p)
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("bounds", help="evaluate the success-probability bounds")
    p.add_argument("--n", type=_positive, required=True)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="exact success probability over a phase grid")
    p.add_argument("--n", type=_int_list)
    p.add_argument("--grid", type=_positive, help="dyadic grid with this many points")
    p.add_argument("--worst-case", action="store_true")
    p.add_argument("--phi", help="comma-separated explicit phases")
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default="nearest")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--workers", type=_positive, default=1)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("montecarlo", help="seeded sampling of the semiclassical chain")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--criterion", choices=[c.value for c in Criterion], default="nearest")
    common(p)
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("gatecount", help="QFT vs AQFT rotation counts")
    p.add_argument("--n", type=_int_list, required=True)
    common(p)
    p.set_defaults(func=cmd_gatecount)

    p = sub.add_parser("simulate", help="statevector inverse AQFT vs semiclassical distribution")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--top", type=_positive, default=16)
    common(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    env_fmt = os.environ.get(FORMAT_ENV)
    if env_fmt is not None and env_fmt not in FORMATS:
        print(f"aqftlab: {FORMAT_ENV} must be one of {', '.join(FORMATS)}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"aqftlab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
