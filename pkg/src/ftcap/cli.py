"""Command-line driver: ``ftcap <subcommand> [flags]``.

Every subcommand prints one table (CSV or JSON) and ships defaults that
reproduce the corresponding figure setting with no flags at all.

Exit codes: 0 success, 1 invalid arguments, 2 numerical failure,
3 check-suite failure.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from ftcap import capacity, covariance_mi, mercer
from ftcap.errors import NumericalError
from ftcap.kernels import AWGN, ExponentialKernel, SincKernel

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3
LN2 = math.log(2.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(cast):
    def conv(text):
        try:
            value = cast(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return value

    conv.__name__ = cast.__name__
    return conv


pos_float = _positive(float)
pos_int = _positive(int)


def _shared_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared")
    g.add_argument("--P", type=pos_float, nargs="+", help="signal power(s)")
    g.add_argument("--alpha", type=pos_float, nargs="+", help="exponential decay rate(s), 1/s")
    g.add_argument("--n0", type=pos_float, help="AWGN level (two-sided PSD n0/2)")
    g.add_argument("--T", type=pos_float, nargs="+", help="observation window(s), s")
    g.add_argument("--T-max", type=pos_float, dest="T_max")
    g.add_argument("--T-steps", type=pos_int, dest="T_steps")
    g.add_argument("--n", type=pos_int, nargs="+", help="grid sizes, ascending")
    g.add_argument("--K", type=pos_int, help="number of eigenpairs (cap for adaptive sums)")
    g.add_argument("--tail-tol", type=pos_float, dest="tail_tol")
    g.add_argument("--unit", choices=("nats", "bits"), default="nats")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", metavar="PATH")
    return p


def build_parser():
    shared = _shared_flags()
    parser = _Parser(prog="ftcap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fig1", parents=[shared], help="sampled rate vs n (sinc signal, exponential noise)")
    p.add_argument("--W", type=pos_float, default=5.0, help="signal bandwidth, Hz")
    p.add_argument("--psd-level", type=pos_float, default=0.1, dest="psd_level")
    p.add_argument("--noise-power", type=pos_float, default=1.0, dest="noise_power")

    sub.add_parser("fig3", parents=[shared], help="I(T) vs T*C_sh for several powers")

    p = sub.add_parser("fig45", parents=[shared], help="C(T) vs C_sh starting near T=0+")
    p.add_argument("--T-min", type=pos_float, default=1e-3, dest="T_min")

    sub.add_parser("spectrum", parents=[shared], help="eigenfrequencies and eigenvalues")
    sub.add_parser("capacity", parents=[shared], help="finite-time capacity report")
    sub.add_parser("shannon", parents=[shared], help="Shannon capacity: closed form and quadrature")
    sub.add_parser("mi", parents=[shared], help="sampled MI over AWGN next to the Mercer series")

    p = sub.add_parser("check", parents=[shared], help="run the invariant suite")
    p.add_argument("--json", action="store_true", help="same as --format json")
    p.add_argument("--inject-omega-error", action="store_true", dest="inject_omega_error",
                   help="perturb omega_1 by 0.1 (negative control)")
    return parser


def _one(values, default, name):
    if values is None:
        return default
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value for this subcommand")
    return values[0]


def _ascending(values, name):
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"--{name} values must be strictly ascending")
    return list(values)


def _T_sweep(args, T_min=None, default_max=8.0, default_steps=16):
    if args.T is not None:
        return _ascending(args.T, "T")
    T_max = args.T_max if args.T_max is not None else default_max
    steps = args.T_steps if args.T_steps is not None else default_steps
    if T_min is None:
        return [T_max * i / steps for i in range(1, steps + 1)]
    if T_min >= T_max:
        raise UsageError("--T-min must be below --T-max")
    if steps == 1:
        return [T_min]
    return [float(x) for x in np.linspace(T_min, T_max, steps)]


# Each command returns (columns, rows, info_columns); info_columns hold
# nats or nats/s values that --unit bits rescales.

def cmd_fig1(args):
    Ts = _ascending(args.T or [1.0, 2.0, 8.0], "T")
    ns = _ascending(args.n or [2**j for j in range(1, 11)], "n")
    signal = SincKernel(args.W, args.psd_level)
    noise = ExponentialKernel(args.noise_power, _one(args.alpha, 1.0, "alpha"))
    shannon = capacity.shannon_capacity_quadrature(signal, noise)
    rows = []
    for T in Ts:
        for pt in covariance_mi.mi_vs_n(signal, noise, T, ns):
            rows.append(dict(n=pt.n, T=T, rate=pt.rate, shannon_rate=shannon))
    rows.sort(key=lambda r: (r["T"], r["n"]))
    return ["n", "T", "rate", "shannon_rate"], rows, {"rate", "shannon_rate"}


def _tail(args):
    return args.tail_tol if args.tail_tol is not None else capacity.DEFAULT_TAIL_TOL


def _max_K(args):
    return args.K if args.K is not None else mercer.MAX_PAIRS


def cmd_fig3(args):
    Ps = args.P or [1.0, 2.0, 4.0]
    alphas = args.alpha or [1.0]
    n0 = args.n0 or 1.0
    Ts = _T_sweep(args)
    rows = []
    for P in Ps:
        for alpha in alphas:
            for T in Ts:
                r = capacity.exceed_shannon_report(P, alpha, n0, T, _tail(args), _max_K(args))
                line = T * r.C_sh
                rows.append(dict(P=P, alpha=alpha, T=T, I_T=r.I_T, T_times_Csh=line, delta_I=r.I_T - line))
    rows.sort(key=lambda r: (r["P"], r["alpha"], r["T"]))
    return ["P", "alpha", "T", "I_T", "T_times_Csh", "delta_I"], rows, {"I_T", "T_times_Csh", "delta_I"}


def cmd_fig45(args):
    Ps = args.P or [1.0, 2.0, 4.0]
    alphas = args.alpha or [1.0, 2.0]
    n0 = args.n0 or 1.0
    Ts = _T_sweep(args, T_min=args.T_min, default_steps=33)
    rows = []
    for P in Ps:
        for alpha in alphas:
            for T in Ts:
                r = capacity.exceed_shannon_report(P, alpha, n0, T, _tail(args), _max_K(args))
                rows.append(dict(P=P, alpha=alpha, T=T, C_T=r.C_T, C_sh=r.C_sh))
    rows.sort(key=lambda r: (r["P"], r["alpha"], r["T"]))
    return ["P", "alpha", "T", "C_T", "C_sh"], rows, {"C_T", "C_sh"}


def _running_sum(values):
    # compensated so the last entry agrees with math.fsum to rounding
    total, comp, out = 0.0, 0.0, []
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out.append(total + comp)
    return out


def cmd_spectrum(args):
    P = _one(args.P, 1.0, "P")
    alpha = _one(args.alpha, 1.0, "alpha")
    T = _one(args.T, 2.0, "T")
    if args.K is None and args.tail_tol is not None:
        spec = mercer.exponential_spectrum(P, alpha, T, tail_tol=args.tail_tol)
    else:
        spec = mercer.exponential_spectrum(P, alpha, T, K=args.K or 32)
    partial = _running_sum(spec.lam.tolist())
    rows = [
        dict(k=k, omega_k=float(w), lambda_k=float(lam), trace_partial=s)
        for k, (w, lam, s) in enumerate(zip(spec.omega, spec.lam, partial), start=1)
    ]
    return ["k", "omega_k", "lambda_k", "trace_partial"], rows, set()


def cmd_capacity(args):
    P = _one(args.P, 1.0, "P")
    alpha = _one(args.alpha, 1.0, "alpha")
    n0 = args.n0 or 1.0
    Ts = _ascending(args.T or [2.0], "T")
    cols = ["P", "alpha", "n0", "T", "I_T", "C_T", "C_sh", "margin", "K_used", "tail_bound", "delta", "below_delta"]
    rows = []
    for T in Ts:
        r = capacity.exceed_shannon_report(P, alpha, n0, T, _tail(args), _max_K(args))
        rows.append({c: getattr(r, c) for c in cols})
    return cols, rows, {"I_T", "C_T", "C_sh", "margin", "tail_bound"}


def cmd_shannon(args):
    Ps = args.P or [1.0]
    alphas = args.alpha or [1.0]
    n0 = args.n0 or 1.0
    rows = []
    for P in Ps:
        for alpha in alphas:
            quad = capacity.shannon_capacity_quadrature(ExponentialKernel(P, alpha), AWGN(n0))
            closed = capacity.shannon_capacity_exponential(P, alpha, n0)
            rows.append(dict(P=P, alpha=alpha, n0=n0, C_sh_closed=closed, C_sh_quadrature=quad))
    rows.sort(key=lambda r: (r["P"], r["alpha"]))
    return ["P", "alpha", "n0", "C_sh_closed", "C_sh_quadrature"], rows, {"C_sh_closed", "C_sh_quadrature"}


def cmd_mi(args):
    P = _one(args.P, 1.0, "P")
    alpha = _one(args.alpha, 1.0, "alpha")
    n0 = args.n0 or 1.0
    Ts = _ascending(args.T or [2.0], "T")
    ns = _ascending(args.n or [64, 128, 256, 512, 1024], "n")
    signal = ExponentialKernel(P, alpha)
    rows = []
    for T in Ts:
        series = capacity.mercer_mi(P, alpha, T, n0, _tail(args), _max_K(args)).value
        for pt in covariance_mi.mi_vs_n(signal, AWGN(n0), T, ns):
            rows.append(dict(T=T, n=pt.n, I_discrete=pt.mi, rate=pt.rate, I_series=series))
    rows.sort(key=lambda r: (r["T"], r["n"]))
    return ["T", "n", "I_discrete", "rate", "I_series"], rows, {"I_discrete", "rate", "I_series"}


def run_checks(P=1.0, alpha=1.0, T=2.0, n0=1.0, inject_omega_error=False):
    """Invariant suite; returns rows of (check, value, tolerance, passed)."""
    rows = []

    def record(name, value, tol, passed):
        rows.append(dict(check=name, value=float(value), tolerance=float(tol), passed=bool(passed)))

    spec = mercer.exponential_spectrum(P, alpha, T, K=mercer.MAX_PAIRS)
    # slack covers the eigenvalue error left by the bisection width
    bound = spec.tail_bound + 1e-11 * P * T
    record("trace_deficit_within_tail_bound", spec.trace_deficit, bound, spec.trace_deficit <= bound)

    deep = mercer.exponential_spectrum(P, alpha, T, K=2000)
    closed = mercer.trace_square_closed(P, alpha, T)
    rel = abs(math.fsum(deep.lam**2) - closed) / closed
    record("trace_square_identity", rel, 1e-6, rel <= 1e-6)

    pairs = deep.pairs[:10]
    G = mercer.gram_matrix(pairs)
    dev = float(np.max(np.abs(G - np.eye(len(pairs)))))
    record("orthonormality", dev, 1e-7, dev <= 1e-7)

    if inject_omega_error:
        first = pairs[0]
        pairs[0] = mercer.make_pair(1, first.omega + 0.1, P, alpha, T)
    worst = max(mercer.integral_equation_residual(p, P, alpha, T) / p.lam for p in pairs)
    record("integral_equation_residual", worst, 1e-8, worst <= 1e-8)

    ny = mercer.nystrom_spectrum(ExponentialKernel(P, alpha), T, 2048, 10)
    err = float(np.max(np.abs(ny / deep.lam[:10] - 1.0)))
    record("nystrom_oracle", err, 1e-2, err <= 1e-2)

    series = capacity.mercer_mi(P, alpha, T, n0).value
    discrete = covariance_mi.mi_vs_n(ExponentialKernel(P, alpha), AWGN(n0), T, [4096])[0].mi
    rel = abs(discrete - series) / series
    record("cross_path_mi", rel, 1e-2, rel <= 1e-2)

    quad = capacity.shannon_capacity_quadrature(ExponentialKernel(P, alpha), AWGN(n0))
    closed = capacity.shannon_capacity_exponential(P, alpha, n0)
    rel = abs(quad - closed) / closed
    record("shannon_closed_form", rel, 1e-8, rel <= 1e-8)

    delta = capacity.exceed_delta(n0, alpha, T)
    try:
        margin = min(capacity.exceed_shannon_report(f * delta, alpha, n0, T).margin for f in (0.01, 0.5, 0.99))
    except NumericalError:
        margin = -math.inf
    record("theorem2_margin_below_delta", margin, 0.0, margin > 0)

    small = capacity.exceed_shannon_report(P, alpha, n0, 1e-3)
    dev = abs(small.C_T / capacity.instant_rate(P, n0) - 1.0)
    record("instant_rate", dev, 2e-3, dev <= 2e-3)

    gap = min(
        capacity.exceed_shannon_report(p, alpha, n0, t).margin * t
        for p in (1.0, 2.0, 4.0) for t in (1.0, 2.0, 4.0, 8.0)
    )
    record("exceed_shannon_grid", gap, 0.0, gap > 0)
    return rows


def cmd_check(args):
    rows = run_checks(
        P=_one(args.P, 1.0, "P"),
        alpha=_one(args.alpha, 1.0, "alpha"),
        T=_one(args.T, 2.0, "T"),
        n0=args.n0 or 1.0,
        inject_omega_error=args.inject_omega_error,
    )
    return ["check", "value", "tolerance", "passed"], rows, set()


COMMANDS = {
    "fig1": cmd_fig1,
    "fig3": cmd_fig3,
    "fig45": cmd_fig45,
    "spectrum": cmd_spectrum,
    "capacity": cmd_capacity,
    "shannon": cmd_shannon,
    "mi": cmd_mi,
    "check": cmd_check,
}


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float):
        return float(format(value, ".12g")) if math.isfinite(value) else format(value, ".12g")
    return value


def render(columns, rows, fmt):
    if fmt == "json":
        data = [{c: _json_value(r[c]) for c in columns} for r in rows]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "json", False):
        args.format = "json"
    try:
        columns, rows, info = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"ftcap {args.command}: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"ftcap {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.unit == "bits":
        for r in rows:
            for c in info:
                r[c] = r[c] / LN2
    text = render(columns, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "check":
        failed = [r["check"] for r in rows if not r["passed"]]
        if failed:
            print("failed checks: " + ", ".join(failed), file=sys.stderr)
            return EXIT_CHECK
    return EXIT_OK
