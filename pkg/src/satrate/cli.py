"""Command-line front end.

Subcommands:

* ``sweep``         - SNR sweep over the selected strategies -> CSV + PNG
* ``cutoff``        - locate the interferer-rate cutoff SNR
* ``gaussian``      - closed-form two-user Gaussian bound -> CSV + PNG
* ``phases``        - phase-shift grid search at one SNR -> CSV + PNG
* ``dump-scenario`` - print a resolved scenario

Exit codes: 0 success, 2 configuration error, 3 numerical/bracketing error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from fractions import Fraction

import numpy as np

from . import plotting, strategy2
from .channel import first_draws, residual_interference_power
from .errors import BracketingError, ConfigurationError, NumericsError
from .gaussian import branch_values, gaussian_rate, mc_gaussian_quad, regime_boundaries
from .rate_theory import find_cutoff_snr, theorem1_rate
from .scenario import Scenario, builtin_case, interferer_rate_bits, load_scenario
from .sweep import SweepConfig, derive_seed, run_sweep

DEFAULT_SNR_START = -10.0
DEFAULT_SNR_STOP = 20.0


def _add_scenario_args(p: argparse.ArgumentParser):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--case", type=int, choices=(1, 2, 3), help="builtin power profile")
    group.add_argument("--scenario", metavar="FILE", help="scenario file path")


def _load_scenario(args) -> Scenario:
    if args.case is not None:
        s = builtin_case(args.case)
    else:
        s = load_scenario(args.scenario)
    alpha = getattr(args, "alpha", None)
    if alpha is not None:
        s = s.with_alpha(alpha)
    return s


def _add_grid_args(p: argparse.ArgumentParser, start=DEFAULT_SNR_START, stop=DEFAULT_SNR_STOP, points=31):
    p.add_argument("--snr-start", type=float, default=start, help="grid start, dB")
    p.add_argument("--snr-stop", type=float, default=stop, help="grid stop, dB")
    p.add_argument("--snr-points", type=int, default=points, help="number of grid points")
    p.add_argument("--snr-grid", metavar="DB,DB,...", help="explicit grid, overrides start/stop/points")


def _grid_from_args(args):
    if args.snr_grid:
        try:
            return tuple(float(tok) for tok in args.snr_grid.split(","))
        except ValueError:
            raise ConfigurationError(f"field 'snr_grid': cannot parse {args.snr_grid!r}") from None
    if args.snr_points < 1:
        raise ConfigurationError("field 'snr_points': must be >= 1")
    return tuple(np.linspace(args.snr_start, args.snr_stop, args.snr_points))


def _parse_rates(raw: str):
    try:
        return tuple(Fraction(tok.strip()) for tok in raw.split(","))
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"field 'r2': cannot parse {raw!r}") from None


def _fig_path(args, csv_path) -> str | None:
    if args.no_fig:
        return None
    if args.fig:
        return args.fig
    stem = str(csv_path)
    return (stem[:-4] if stem.endswith(".csv") else stem) + ".png"


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args)
    cfg = SweepConfig(
        scenario=scenario,
        snr_grid_db=_grid_from_args(args),
        strategies=tuple(tok.strip() for tok in args.strategies.split(",")),
        r2_code_rates=_parse_rates(args.r2),
        n_samples=args.samples,
        master_seed=args.seed,
        phase_count=args.phases,
    )
    if args.dump_draws:
        _dump_draws(cfg, args.dump_draws)
    run_sweep(cfg, workers=args.workers, out_csv=args.out)
    print(f"wrote {args.out}")
    fig = _fig_path(args, args.out)
    if fig:
        plotting.render_sweep_figure(args.out, fig)
        print(f"wrote {fig}")
    if args.plot_script:
        plotting.emit_plot_script(args.out, "sweep", args.plot_script)
        print(f"wrote {args.plot_script}")
    return 0


def _dump_draws(cfg: SweepConfig, path, n: int = 100):
    snr_db = cfg.snr_grid_db[0]
    n_thermal = cfg.scenario.p / 10.0 ** (snr_db / 10.0)
    draws = first_draws(cfg.scenario, n_thermal, n, derive_seed(cfg.master_seed, "draws", snr_db))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["draw", "y_re", "y_im"] + [f"x{i + 1}_idx" for i in range(cfg.scenario.k)])
        for t, d in enumerate(draws):
            writer.writerow([t, _fmt(d.y.real), _fmt(d.y.imag)] + list(d.x_indices))
    print(f"wrote {path}")


def cmd_cutoff(args) -> int:
    scenario = _load_scenario(args)
    if args.r2_bits is not None:
        r2_bits = args.r2_bits
    else:
        r2_bits = interferer_rate_bits(scenario.with_r2(Fraction(args.r2)))
    try:
        result = find_cutoff_snr(
            scenario,
            r2_bits,
            bracket=(args.bracket[0], args.bracket[1]),
            n_samples=args.samples,
            seed=args.seed,
            tol_bits=args.tol_bits,
        )
    except BracketingError as exc:
        if exc.side == "floor":
            print(f"no finite cutoff above bracket floor: {exc}")
            return 0
        raise
    print(
        f"cutoff: snr_c = {result.snr_c_db:.4f} dB  "
        f"(residual {result.residual_bits:.2e} bits, {result.iterations} iterations)"
    )
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["r2_bits", "snr_c_db", "residual_bits", "iterations"])
            writer.writerow([_fmt(r2_bits), _fmt(result.snr_c_db), _fmt(result.residual_bits), result.iterations])
        print(f"wrote {args.out}")
    return 0


def cmd_gaussian(args) -> int:
    grid = _grid_from_args(args)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigurationError("field 'snr_grid': grid must be strictly ascending")
    header = ["snr_db", "r1_bound", "regime", "branch_full", "branch_sumrate", "branch_interference"]
    mc = args.mc_samples is not None
    if mc:
        header += ["mc_rate", "mc_se"]
    rows = []
    for snr_db in grid:
        snr = 10.0 ** (snr_db / 10.0)
        res = gaussian_rate(snr, args.gamma_abs, args.r2_bits)
        branches = branch_values(snr, args.gamma_abs, args.r2_bits)
        row = [
            _fmt(snr_db),
            _fmt(res.r1_bound),
            res.regime.value,
            _fmt(branches["full"]),
            _fmt(branches["sumrate_limited"]),
            _fmt(branches["interference_limited"]),
        ]
        if mc:
            est = mc_gaussian_quad(
                snr, args.gamma_abs, args.mc_samples, derive_seed(args.seed, "gauss-mc", snr_db)
            )
            rate = theorem1_rate(est.quad, est.i_s, args.r2_bits)
            row += [_fmt(rate), _fmt(max(est.ij.std_err, est.i_s.std_err))]
        rows.append(row)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {args.out}")
    enter_sumrate, enter_full = regime_boundaries(args.gamma_abs, args.r2_bits)
    for name, snr in (("sum-rate-limited", enter_sumrate), ("full-rate", enter_full)):
        if snr is None:
            print(f"boundary into {name} regime: none at finite SNR")
        elif snr <= 0:
            print(f"boundary into {name} regime: at or below 0 (always active)")
        else:
            print(f"boundary into {name} regime: {10 * np.log10(snr):.4f} dB (snr {snr:.6g})")
    fig = _fig_path(args, args.out)
    if fig:
        plotting.render_gaussian_figure(args.out, fig)
        print(f"wrote {fig}")
    if args.plot_script:
        plotting.emit_plot_script(args.out, "gaussian", args.plot_script)
        print(f"wrote {args.plot_script}")
    return 0


def cmd_phases(args) -> int:
    scenario = _load_scenario(args)
    n_thermal = scenario.p / 10.0 ** (args.snr_db / 10.0)
    result = strategy2.optimize_phase(
        scenario,
        n_thermal,
        phase_count=args.count,
        n_samples=args.samples,
        seed=derive_seed(args.seed, "s2", args.snr_db),
    )
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["phase_rad", "ij", "ij_se", "best"])
        for phase, rate, err in result.grid:
            writer.writerow([_fmt(phase), _fmt(rate), _fmt(err), int(phase == result.best_phase_rad)])
    print(f"wrote {args.out}")
    print(
        f"best phase {result.best_phase_rad:.6f} rad -> sum-rate "
        f"{result.best_sum_rate:.4f} bits (alpha x rate = {scenario.alpha * result.best_sum_rate:.4f})"
    )
    fig = _fig_path(args, args.out)
    if fig:
        plotting.render_phases_figure(args.out, fig)
        print(f"wrote {fig}")
    return 0


def cmd_dump_scenario(args) -> int:
    s = _load_scenario(args)
    print(f"k = {s.k}")
    print(f"p = {_fmt(s.p)}")
    print(f"r2 = {s.r2}")
    print(f"alpha = {_fmt(s.alpha)}")
    lambdas = s.lambdas_db
    for i in range(s.k):
        gain = s.gains[i]
        lam = "-" if i == 0 else _fmt(lambdas[i - 1])
        print(
            f"user {i + 1}: modulation={s.modulations[i].value} lambda_db={lam} "
            f"gain={gain.real:+.6f}{gain.imag:+.6f}j |gain|={abs(gain):.6f}"
        )
    if s.k >= 2:
        c2 = s.constellation(1)
        if c2.is_discrete or s.r2_bits_override is not None:
            print(f"interferer rate = {_fmt(interferer_rate_bits(s))} bits/symbol")
        print(f"residual power (sud)  = {_fmt(residual_interference_power(s, 2))}")
        print(f"residual power (mud2) = {_fmt(residual_interference_power(s, 3))}")
    if s.phases_random:
        print("phases: random (resolved from the master seed at run time)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satrate",
        description="Achievable information rates for a multibeam satellite forward link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="SNR sweep over detection strategies")
    _add_scenario_args(p)
    _add_grid_args(p)
    p.add_argument("--strategies", default="sud,mud2,s2", help="comma list from: sud,mud2,s2,gauss")
    p.add_argument("--r2", default="3/5,5/6,8/9", help="interferer code rates (comma list)")
    p.add_argument("--samples", type=int, default=10**6, help="Monte-Carlo draws per estimate")
    p.add_argument("--seed", type=int, default=1, help="master seed")
    p.add_argument("--alpha", type=float, default=None, help="time-division fraction override")
    p.add_argument("--phases", type=int, default=strategy2.DEFAULT_PHASE_COUNT, help="phase grid size")
    p.add_argument("--workers", type=int, default=1, help="parallel workers over grid points")
    p.add_argument("--out", default="sweep.csv", help="output CSV path")
    p.add_argument("--fig", default=None, help="figure path (default: CSV stem + .png)")
    p.add_argument("--no-fig", action="store_true", help="skip figure rendering")
    p.add_argument("--plot-script", default=None, help="also emit a standalone plot script here")
    p.add_argument("--dump-draws", default=None, metavar="CSV", help="debug: dump the first 100 channel draws")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cutoff", help="find the interferer-rate cutoff SNR")
    _add_scenario_args(p)
    p.add_argument("--r2", default="3/5", help="interferer code rate (fraction)")
    p.add_argument("--r2-bits", type=float, default=None, help="interferer rate in bits (overrides --r2)")
    p.add_argument("--bracket", type=float, nargs=2, default=(DEFAULT_SNR_START, DEFAULT_SNR_STOP),
                   metavar=("LO", "HI"), help="search bracket in dB")
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tol-bits", type=float, default=1e-3)
    p.add_argument("--alpha", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--out", default=None, help="optional CSV for the result row")
    p.set_defaults(func=cmd_cutoff)

    p = sub.add_parser("gaussian", help="closed-form Gaussian-input bound (two users)")
    p.add_argument("--gamma-abs", type=float, default=0.79, help="|gamma| of the modeled interferer")
    p.add_argument("--r2-bits", type=float, default=0.5, help="interferer rate in bits/symbol")
    _add_grid_args(p, start=-10.0, stop=15.0, points=51)
    p.add_argument("--mc-samples", type=int, default=None,
                   help="also run the Monte-Carlo Gaussian estimator with this many draws")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="gaussian.csv", help="output CSV path")
    p.add_argument("--fig", default=None)
    p.add_argument("--no-fig", action="store_true")
    p.add_argument("--plot-script", default=None)
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("phases", help="phase-shift grid search at one SNR")
    _add_scenario_args(p)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--count", type=int, default=strategy2.DEFAULT_PHASE_COUNT)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out", default="phases.csv")
    p.add_argument("--fig", default=None)
    p.add_argument("--no-fig", action="store_true")
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("dump-scenario", help="print a resolved scenario")
    _add_scenario_args(p)
    p.add_argument("--alpha", type=float, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_dump_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
