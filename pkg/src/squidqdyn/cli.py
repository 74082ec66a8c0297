"""Command-line sweeps writing one CSV schema for every scenario.

Exit status: 0 success, 1 usage error, 2 a built-in threshold failed.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from . import experiments as ex
from .coupled import InductiveCoupling, ho_effective
from .dynamics import fit_loglog_slope
from .numerics import eigh

SCENARIOS = ("single-qubit-error", "capacitive-cnot", "inductive-eigs", "inductive-error", "fidelity-scan")
COLUMNS = (
    "scenario", "e_ch", "e_j1", "e_j2", "e_l", "n_x1", "n_x2", "flux1", "flux2", "trunc",
    "effective_mode", "t", "max_trace_distance", "max_leakage", "fidelity", "notes",
)
SEED_ENV = "SQUIDQDYN_SEED"

CORRECTED_SLOPE_MIN = 3.5
FIRST_ORDER_SLOPE = (1.5, 2.5)
GATE_TOL = 1e-10
LEAK_TOL = 1e-12
EIG_TOL = 1e-12
FIDELITY_MIN = 1.0 - 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"need a nonempty list of finite numbers, got {text!r}")
    return vals


def _trunc(text: str) -> int:
    v = int(text)
    if v < 5:
        raise argparse.ArgumentTypeError("trunc must be >= 5")
    return v


def _steps(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("t-steps must be >= 2")
    return v


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return ex.DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    common.add_argument("--out", default=None, help="CSV path ('-' for stdout); default <scenario>.csv")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--trunc", type=_trunc, default=ex.DEFAULT_HALF_WIDTH,
                        help="charge window half-width: window is [-trunc, trunc + 1]")
    common.add_argument("--e-ch", type=float, default=1.0)
    common.add_argument("--t-max-periods", type=float, default=ex.DEFAULT_PERIODS)
    common.add_argument("--t-steps", type=_steps, default=ex.DEFAULT_STEPS)
    common.add_argument("--n-random-probes", type=int, default=ex.DEFAULT_RANDOM_PROBES)
    common.add_argument("--metric", choices=("subspace", "projected"), default="subspace")

    parser = _Parser(prog="squidqdyn", description=__doc__)
    sub = parser.add_subparsers(dest="scenario", required=True, parser_class=_Parser)

    p = sub.add_parser("single-qubit-error", parents=[common])
    p.add_argument("--ej-over-ech", type=_floats, default=[0.01, 0.02, 0.04, 0.08])
    p.add_argument("--nx", type=_floats, default=[0.5])
    p.add_argument("--flux", type=float, default=0.0)
    p.add_argument("--effective", choices=ex.EFFECTIVE_MODES, default="corrected-generic")

    p = sub.add_parser("capacitive-cnot", parents=[common])
    p.add_argument("--delta", type=float, default=1.0)

    p = sub.add_parser("inductive-eigs", parents=[common])
    p.add_argument("--ej1", type=float, default=1.0)
    p.add_argument("--ej2", type=float, default=1.0)
    p.add_argument("--el", type=float, default=1.0)

    p = sub.add_parser("inductive-error", parents=[common])
    p.add_argument("--ej-over-ech", type=_floats, default=[0.01, 0.02, 0.04, 0.08])
    p.add_argument("--el-over-ej", type=float, default=1.0)
    p.add_argument("--effective", choices=ex.EFFECTIVE_MODES, default="corrected-generic")

    p = sub.add_parser("fidelity-scan", parents=[common])
    p.add_argument("--system", choices=("capacitive", "inductive"), default="capacitive")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--ej-over-ech", type=_floats, default=[0.02])
    p.add_argument("--el-over-ej", type=float, default=1.0)
    return parser


def read_config(path: str) -> dict[str, str]:
    """Parse flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        values.pop("config", None)
        sub = parser._subparsers._group_actions[0].choices[args.scenario]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.n_random_probes < 0:
        raise UsageError("--n-random-probes must be >= 0")
    return args


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    x = float(v)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in CSV output")
    return format(x, ".17g")


def _row(**fields) -> dict[str, str]:
    return {c: _fmt(fields.get(c)) for c in COLUMNS}


def _map(fn, items, jobs):
    items = list(items)
    if jobs == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _slope_check(effective, slope):
    if slope is None:
        return True, "no slope (fewer than 3 points)"
    if effective == "first-order":
        lo, hi = FIRST_ORDER_SLOPE
        return lo <= slope <= hi, f"slope {slope:.4f} in [{lo}, {hi}]"
    if effective == "corrected-generic":
        return slope >= CORRECTED_SLOPE_MIN, f"slope {slope:.4f} >= {CORRECTED_SLOPE_MIN}"
    return True, f"slope {slope:.4f} (no threshold)"


def _single_point(args, item):
    ratio, n_x = item
    return ex.single_qubit_error(
        ratio * math.cos(math.pi * args.flux), n_x, args.effective, e_ch=args.e_ch,
        half_width=args.trunc, periods=args.t_max_periods, steps=args.t_steps,
        n_random=args.n_random_probes, seed=args.seed, metric=args.metric,
    )


def run_single_qubit_error(args):
    items = [(r, nx) for nx in args.nx for r in args.ej_over_ech]
    reports = _map(partial(_single_point, args), items, args.jobs)
    rows, lines, ok = [], [], True
    for nx in args.nx:
        sel = [(r, rep) for (r, n), rep in zip(items, reports) if n == nx]
        ratios = [r for r, _ in sel]
        dists = [rep.max_distance for _, rep in sel]
        slope = None
        if len(set(ratios)) >= 3 and all(d > 0 for d in dists):
            slope = fit_loglog_slope([abs(r) for r in ratios], dists)
        passed, why = _slope_check(args.effective, slope)
        ok &= passed
        for r, rep in sel:
            rows.append(_row(
                scenario=args.scenario, e_ch=args.e_ch, e_j1=r * args.e_ch * math.cos(math.pi * args.flux),
                n_x1=nx, flux1=args.flux, trunc=args.trunc, effective_mode=args.effective,
                t=rep.t_at_max, max_trace_distance=rep.max_distance, max_leakage=rep.max_leakage,
                notes=f"metric={args.metric};slope={_fmt(slope)}",
            ))
        lines.append(
            f"single-qubit-error n_x={nx:g} effective={args.effective} "
            f"max_distance=[{', '.join(f'{d:.3e}' for d in dists)}] {why} {'PASS' if passed else 'FAIL'}"
        )
    return rows, lines, ok


def run_capacitive_cnot(args):
    gate, (dev0, dev1) = ex.capacitive_gate(args.delta, args.e_ch, half_width=args.trunc)
    ok = dev0 <= GATE_TOL and dev1 <= GATE_TOL and gate.leakage <= LEAK_TOL
    p1, p2, c, _, _ = ex.capacitive_settings(args.delta, args.e_ch, half_width=args.trunc)
    row = _row(
        scenario=args.scenario, e_ch=args.e_ch, e_j1=p1.e_j, e_j2=p2.e_j, n_x1=p1.n_x, n_x2=p2.n_x,
        flux1=p1.flux_ratio, flux2=p2.flux_ratio, trunc=args.trunc, t=gate.gate_time,
        max_leakage=gate.leakage,
        notes=f"delta={_fmt(args.delta)};dev_identity={_fmt(dev0)};dev_phase={_fmt(dev1)}",
    )
    line = (
        f"capacitive-cnot gate_time={gate.gate_time:.12g} dev_identity={dev0:.2e} "
        f"dev_phase={dev1:.2e} leakage={gate.leakage:.2e} {'PASS' if ok else 'FAIL'}"
    )
    return [row], [line], ok


def run_inductive_eigs(args):
    model = ho_effective(args.ej1, args.ej2, InductiveCoupling(args.el))
    numeric = eigh(model.matrix).eigenvalues
    dev = float(np.max(np.abs(np.sort(model.eigenvalues) - numeric)))
    ok = dev <= EIG_TOL
    rows = []
    for label, val in zip(("psi00", "psi01", "psi10", "psi11"), model.eigenvalues):
        rows.append(_row(
            scenario=args.scenario, e_j1=args.ej1, e_j2=args.ej2, e_l=args.el,
            notes=f"{label};eigenvalue={_fmt(val)}",
        ))
    unit = abs(args.ej1) if args.ej1 else 1.0
    line = (
        "inductive-eigs eigenvalues/E_J1=["
        + ", ".join(f"{v / unit:.12g}" for v in model.eigenvalues)
        + f"] analytic-vs-numeric={dev:.2e} {'PASS' if ok else 'FAIL'}"
    )
    return rows, [line], ok


def _inductive_point(args, ratio):
    return ex.inductive_error(
        ratio, args.effective, el_over_ej=args.el_over_ej, e_ch=args.e_ch, half_width=args.trunc,
        periods=args.t_max_periods, steps=args.t_steps, n_random=args.n_random_probes,
        seed=args.seed, metric=args.metric,
    )


def run_inductive_error(args):
    ratios = list(args.ej_over_ech)
    reports = _map(partial(_inductive_point, args), ratios, args.jobs)
    dists = [r.max_distance for r in reports]
    slope = None
    if len(set(ratios)) >= 3 and all(d > 0 for d in dists):
        slope = fit_loglog_slope(ratios, dists)
    ok, why = _slope_check(args.effective, slope)
    rows = [
        _row(
            scenario=args.scenario, e_ch=args.e_ch, e_j1=r * args.e_ch, e_j2=r * args.e_ch,
            e_l=args.el_over_ej * r * args.e_ch, n_x1=0.5, n_x2=0.5, flux1=0.0, flux2=0.0,
            trunc=args.trunc, effective_mode=args.effective, t=rep.t_at_max,
            max_trace_distance=rep.max_distance, max_leakage=rep.max_leakage,
            notes=f"metric={args.metric};slope={_fmt(slope)}",
        )
        for r, rep in zip(ratios, reports)
    ]
    line = (
        f"inductive-error effective={args.effective} "
        f"max_distance=[{', '.join(f'{d:.3e}' for d in dists)}] {why} {'PASS' if ok else 'FAIL'}"
    )
    return rows, [line], ok


def run_fidelity_scan(args):
    if args.system == "capacitive":
        scan, _ = ex.capacitive_fidelity(args.delta, args.e_ch, steps=args.t_steps, half_width=args.trunc)
        ok = scan.f_star >= FIDELITY_MIN
        row = _row(scenario=args.scenario, e_ch=args.e_ch, n_x1=0.0, n_x2=0.5, flux1=0.5, flux2=0.5,
                   trunc=args.trunc, t=scan.t_star, fidelity=scan.f_star,
                   notes=f"system=capacitive;delta={_fmt(args.delta)};target=conditional-phase")
        line = (f"fidelity-scan capacitive t_star={scan.t_star:.12g} (pi/delta={math.pi / args.delta:.12g}) "
                f"f_star={scan.f_star:.12f} {'PASS' if ok else 'FAIL'}")
        return [row], [line], ok
    rows, lines = [], []
    for r in args.ej_over_ech:
        scan, _, _ = ex.inductive_fidelity(r, args.el_over_ej, args.e_ch, periods=args.t_max_periods,
                                           steps=args.t_steps, half_width=args.trunc)
        rows.append(_row(scenario=args.scenario, e_ch=args.e_ch, e_j1=r * args.e_ch, e_j2=r * args.e_ch,
                         e_l=args.el_over_ej * r * args.e_ch, n_x1=0.5, n_x2=0.5, flux1=0.0, flux2=0.0,
                         trunc=args.trunc, t=scan.t_star, fidelity=scan.f_star,
                         notes="system=inductive;target=cnot"))
        lines.append(f"fidelity-scan inductive ej/ech={r:g} t_star={scan.t_star:.12g} f_star={scan.f_star:.9f}")
    return rows, lines, True


RUNNERS = {
    "single-qubit-error": run_single_qubit_error,
    "capacitive-cnot": run_capacitive_cnot,
    "inductive-eigs": run_inductive_eigs,
    "inductive-error": run_inductive_error,
    "fidelity-scan": run_fidelity_scan,
}


def write_csv(rows, out):
    if out == "-":
        w = csv.DictWriter(sys.stdout, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    with open(out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse: --help or bad flags
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"squidqdyn: error: {exc}", file=sys.stderr)
        return 1
    try:
        rows, lines, ok = RUNNERS[args.scenario](args)
        write_csv(rows, args.out or f"{args.scenario}.csv")
    except (ValueError, ZeroDivisionError, OSError) as exc:
        print(f"squidqdyn: error: {exc}", file=sys.stderr)
        return 1
    for line in lines:
        print(line)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
