"""Command-line driver: profiles, experiment runs, convergence study, dispersion tables.

Exit codes: 0 success, 2 configuration error, 3 non-convergence (time stepper
or profile iteration), 4 inadmissible wave parameters.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, config_from_items, config_items, load_config, parse_keyvalue
from .dispersion import DispersionParams, report_csv
from .experiments import build_initial
from .fileio import checksum, fmt, snapshot_name, write_keyvalue, write_series, write_snapshot
from .grid import ComplexField, ModelParams, NonlinearEvaluator, SpectralGrid, Spectrum, from_spectrum, to_spectrum
from .integrator import STABILITY_LIMIT, CompositionCoefficients, NonConvergence, Stepper, StepperConfig, stability_ratio
from .observables import NoPeak, PeakTracker, spectrum_invariants
from .waves import (
    DecayFitError,
    Inadmissible,
    LinearPhase,
    QuadraticPhase,
    Stagnation,
    WaveParams,
    decay_fit,
    exact_nls_soliton,
    solve_profile,
    traveling_solution,
)

log = logging.getLogger("fracnls")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_INADMISSIBLE = 4

TABLE1_DT = (2.5e-2, 1.25e-2, 6.25e-3, 3.125e-3)
# speed column: least-squares slope over this many consecutive series rows
SPEED_WINDOW = 11


def _coefficient_items() -> list[tuple[str, str]]:
    b = CompositionCoefficients.fourth_order().b
    return [(f"coefficients.b{i}", format(v, ".17g")) for i, v in enumerate(b, start=1)]


def _steps_of(t: float, dt: float, what: str) -> int:
    n = round(t / dt)
    if abs(n * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ConfigError(f"{what} = {t!r} is not a multiple of run.dt = {dt!r}")
    return n


@dataclass
class RunResult:
    output_dir: Path
    status: str
    steps: int
    wall_time: float
    rows: list[tuple[float, ...]] = field(default_factory=list)
    snapshots: list[Path] = field(default_factory=list)


class _SeriesObserver:
    """Collects series rows and writes snapshots as the run passes their times."""

    def __init__(self, cfg: RunConfig, model: ModelParams, grid: SpectralGrid):
        run = cfg.experiment.run
        self.cfg = cfg
        self.dt = run.dt
        self.T = run.T
        self.model = model
        self.evaluator = NonlinearEvaluator(grid, model.sigma)
        self.tracker = PeakTracker(grid.half_length)
        self.every = _steps_of(cfg.cadence, run.dt, "series cadence")
        self.snap_steps = {}
        for ts in cfg.snapshot_times:
            n = math.inf if ts == run.T else _steps_of(ts, run.dt, "snapshot time")
            self.snap_steps.setdefault(n, ts)
        self.values: list[tuple[float, ...]] = []
        self.snapshots: list[Path] = []
        self.last_state: Spectrum | None = None

    def __call__(self, t: float, c: Spectrum) -> None:
        n = round(t / self.dt)
        final = abs(t - self.T) <= 1e-12 * max(1.0, self.T)
        self.last_state = c
        ts = self.snap_steps.get(math.inf if final else n, self.snap_steps.get(n))
        u = None
        if ts is not None:
            u = from_spectrum(c)
            path = self.cfg.output_dir / snapshot_name(ts)
            write_snapshot(path, u)
            self.snapshots.append(path)
        if n % self.every == 0 or final:
            if u is None:
                u = from_spectrum(c)
            inv = spectrum_invariants(c, self.model, self.evaluator)
            try:
                x, amp = self.tracker.observe(t, u)
            except NoPeak:
                if np.any(u.samples):
                    x, amp = math.nan, float(u.rho.max())
                else:
                    # the zero field reports its peak at the origin
                    x, amp = 0.0, 0.0
                tr = self.tracker.track
                tr.times.append(float(t))
                tr.positions.append(x)
                tr.amplitudes.append(amp)
            self.values.append((t, inv.I1, inv.I2, inv.H))

    def rows(self) -> list[tuple[float, ...]]:
        track = self.tracker.track
        speeds = track.speeds(SPEED_WINDOW) if len(track) > 1 else np.zeros(len(track))
        return [v + (x, a, sp) for v, x, a, sp in
                zip(self.values, track.positions, track.amplitudes, speeds)]


def cmd_run(cfg: RunConfig) -> RunResult:
    """Run one experiment, writing series.csv, snapshots and manifest.txt to ``cfg.output_dir``.

    On non-convergence the rows computed so far are written, the manifest is
    marked ``status = nonconvergence`` and the exception is re-raised.
    """
    spec = cfg.experiment
    run = spec.run
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t_wall = time.perf_counter()
    init = build_initial(spec)
    model = init.model
    grid = init.field.grid
    c0 = to_spectrum(init.field)
    stepper = Stepper(grid, model, StepperConfig(run.dt, run.stage_tol, run.stage_max_iter))
    observer = _SeriesObserver(cfg, model, grid)
    status, failure, final = "ok", None, None
    log.info("run: %s, N = %d, L = %g, dt = %g, T = %g", type(spec.kind).__name__,
             run.N, run.L, run.dt, run.T)
    try:
        final = stepper.advance(c0, run.T, [observer])
    except NonConvergence as exc:
        status, failure = "nonconvergence", exc
        raise
    finally:
        wall = time.perf_counter() - t_wall
        rows = observer.rows()
        write_series(out / "series.csv", rows)
        last = final if final is not None else observer.last_state
        items = config_items(cfg) + _coefficient_items() + [
            ("status", status),
            ("steps", str(round(observer.values[-1][0] / run.dt) if observer.values else 0)),
            ("stage_iterations", str(stepper.iterations)),
            ("substeps", str(stepper.substeps)),
            ("stability.N_dt", fmt(stability_ratio(run.N, run.dt))),
            ("stability.limit", fmt(STABILITY_LIMIT)),
            ("integration.s", fmt(model.s)),
            ("integration.sigma", fmt(model.sigma)),
            ("projection_loss", fmt(init.projection_loss)),
            ("checksum.initial", checksum(c0.coefficients)),
            ("checksum.final", checksum(last.coefficients) if last is not None else "none"),
        ]
        items += [(f"note.{k}", fmt(v)) for k, v in init.notes.items()]
        if failure is not None:
            items += [("failure.step", str(failure.step)), ("failure.time", fmt(failure.time)),
                      ("failure.residual", fmt(failure.residual))]
        items += [("version", __version__), ("started", started), ("wall_time", f"{wall:.3f}")]
        write_keyvalue(out / "manifest.txt", items)
    log.info("run finished in %.1f s", wall)
    return RunResult(out, status, round(run.T / run.dt), wall, rows, observer.snapshots)


@dataclass
class ProfileResult:
    profile_path: Path
    report_path: Path
    residual: float
    amplitude: float
    decay: object | None


def cmd_profile(params: WaveParams, grid: SpectralGrid, out_dir, tol: float = 1e-10,
                window: tuple[float, float] = (50.0, 300.0)) -> ProfileResult:
    """Solve (or evaluate, for ``s = 1``) the profile; write profile.csv and profile.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params.check_admissible()
    if params.model.s == 1.0:
        prof = exact_nls_soliton(params, grid)
        iterations = 0
    else:
        prof = solve_profile(params, grid, tol)
        iterations = prof.iterations
    items = [("s", fmt(params.model.s)), ("sigma", fmt(params.model.sigma)),
             ("lambda1", fmt(params.lambda1)), ("lambda2", fmt(params.lambda2)),
             ("x0", fmt(params.x0)), ("theta0", fmt(params.theta0)),
             ("phase", params.phase.name), ("L", fmt(grid.half_length)), ("N", str(grid.modes)),
             ("points", str(grid.points)), ("tol", fmt(tol)),
             ("residual", fmt(prof.residual)), ("iterations", str(iterations)),
             ("rho_max", fmt(prof.amplitude)), ("center", fmt(prof.center)),
             ("c_lambda1", fmt(params.bound()))]
    fit = None
    try:
        fit = decay_fit(prof, window)
        items += [("decay.window", f"{fmt(window[0])}, {fmt(window[1])}"),
                  ("decay.exponent", fmt(fit.exponent)), ("decay.prefactor", fmt(fit.prefactor)),
                  ("decay.rms", fmt(fit.rms)), ("decay.algebraic", fmt(fit.algebraic))]
    except DecayFitError as exc:
        items.append(("decay.status", f"unavailable: {exc}"))
    profile_path, report_path = out / "profile.csv", out / "profile.txt"
    write_snapshot(profile_path, prof.u0)
    write_keyvalue(report_path, items)
    return ProfileResult(profile_path, report_path, prof.residual, prof.amplitude, fit)


@dataclass
class ConvergenceReport:
    """L2 errors at the final time and observed orders between successive halvings.

    ``rates[i]`` compares ``dt_values[i]`` with ``dt_values[i+1]`` and is NaN when
    the second is not half the first.
    """

    dt_values: list[float]
    v_errors: list[float]
    w_errors: list[float]
    rates: list[float]
    w_rates: list[float]
    linear_only: bool = False
    invariants: dict = field(default_factory=dict)
    mode_errors: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)

    def rows(self) -> list[tuple]:
        out = []
        for i, dt in enumerate(self.dt_values):
            r = (self.rates[i - 1], self.w_rates[i - 1]) if i else (math.nan, math.nan)
            out.append((dt, self.v_errors[i], self.w_errors[i]) + r)
        return out


def _rates(dts, errors) -> list[float]:
    out = []
    for i in range(len(dts) - 1):
        halving = abs(dts[i + 1] * 2.0 - dts[i]) <= 1e-12 * dts[i]
        out.append(math.log2(errors[i] / errors[i + 1]) if halving and errors[i + 1] > 0 else math.nan)
    return out


def _soliton_case(args):
    dt, N, T, L, s, sigma, lambda1, lambda2, linear_only, cadence = args
    grid = SpectralGrid(L, N)
    model = ModelParams(s, sigma)
    # the datum is the classical soliton shape; only the reference depends on s
    prof = exact_nls_soliton(WaveParams(ModelParams(1.0, sigma), lambda1, lambda2), grid)
    c0 = prof.spectrum
    stepper = Stepper(grid, model, StepperConfig(dt), nonlinear=not linear_only)
    history = []
    evaluator = NonlinearEvaluator(grid, sigma)

    def record(t, c):
        inv = spectrum_invariants(c, model, evaluator)
        history.append((t, inv.I1, inv.I2, inv.H))

    final = stepper.advance(c0, T, [record] if cadence else [], cadence)
    if linear_only:
        exact = Spectrum(grid, c0.coefficients * np.exp(-1j * grid.symbol(2.0 * s) * T))
    else:
        exact = to_spectrum(traveling_solution(prof, T))
    diff = final - exact
    v_err = diff.real_part().l2_norm()
    w_err = diff.imag_part().l2_norm()
    modes = np.abs(diff.coefficients) if linear_only else None
    per_substep = stepper.iterations / max(stepper.substeps, 1)
    return v_err, w_err, np.array(history), modes, per_substep


def cmd_convergence(dt_list: Sequence[float] = TABLE1_DT, N: int = 4096, T: float = 100.0,
                    L: float = 64.0, linear_only: bool = False, threads: int = 1,
                    s: float = 1.0, sigma: float = 1.0, lambda1: float = 1.0,
                    lambda2: float = 0.25, invariant_cadence: float | None = None) -> ConvergenceReport:
    """Exact-soliton temporal convergence study.

    Each ``dt`` integrates the closed-form soliton to ``T`` and measures the L2
    errors of ``v`` and ``w`` against the translated, phase-rotated profile.  With
    ``linear_only`` the nonlinearity is switched off and the reference is the
    exact linear evolution of every mode.
    """
    if not linear_only and s != 1.0:
        raise ConfigError("the exact-soliton reference needs s = 1 (use linear_only for other s)")
    dts = [float(dt) for dt in dt_list]
    if not dts or any(dt <= 0 for dt in dts):
        raise ConfigError("dt list must be non-empty and positive")
    cases = [(dt, N, T, L, s, sigma, lambda1, lambda2, linear_only, invariant_cadence) for dt in dts]
    if threads > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_soliton_case, cases))
    else:
        results = []
        for case in cases:
            log.info("convergence: dt = %g", case[0])
            results.append(_soliton_case(case))
    v = [r[0] for r in results]
    w = [r[1] for r in results]
    report = ConvergenceReport(dts, v, w, _rates(dts, v), _rates(dts, w), linear_only)
    for dt, r in zip(dts, results):
        if invariant_cadence:
            report.invariants[dt] = r[2]
        if linear_only:
            report.mode_errors[dt] = r[3]
        report.iterations[dt] = r[4]
    return report


def write_convergence(report: ConvergenceReport, path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("dt", "v_error", "w_error", "v_rate", "w_rate"))
        for i, row in enumerate(report.rows()):
            cells = [fmt(x) for x in row]
            if i == 0:
                cells[3] = cells[4] = ""
            writer.writerow(cells)


def cmd_dispersion(cs: float, s: float, k_grid) -> str:
    return report_csv(DispersionParams(cs, s), k_grid)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _global_flags(parser, suppress: bool) -> None:
    kw = {"default": argparse.SUPPRESS} if suppress else {}
    parser.add_argument("--out", metavar="DIR", help="output directory", **kw)
    parser.add_argument("--threads", type=int, metavar="n",
                        help="worker processes for parameter sweeps", **kw)
    parser.add_argument("--quiet", action="store_true", help="log warnings and errors only", **kw)


def _wave_flags(parser, s_default: float) -> None:
    parser.add_argument("--s", type=float, default=s_default)
    parser.add_argument("--sigma", type=float, default=1.0)
    parser.add_argument("--lambda1", type=float, default=1.0)
    parser.add_argument("--lambda2", type=float, default=0.25)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracnls", description=__doc__.splitlines()[0])
    _global_flags(parser, suppress=False)
    parser.set_defaults(out=None, threads=1, quiet=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="solitary-wave profile and decay report")
    _global_flags(p, suppress=True)
    _wave_flags(p, 0.8)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--phase", choices=("linear", "quadratic"), default="linear")
    p.add_argument("--L", type=float, default=1024.0)
    p.add_argument("--N", type=int, default=16384)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--window", type=_floats, default=[50.0, 300.0])

    r = sub.add_parser("run", help="run experiments from config files or a preset")
    _global_flags(r, suppress=True)
    r.add_argument("configs", nargs="*", type=Path)
    r.add_argument("--preset")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")

    c = sub.add_parser("convergence", help="exact-soliton temporal convergence table")
    _global_flags(c, suppress=True)
    _wave_flags(c, 1.0)
    c.add_argument("--dt", type=_floats, default=list(TABLE1_DT))
    c.add_argument("--N", type=int, default=4096)
    c.add_argument("--T", type=float, default=100.0)
    c.add_argument("--L", type=float, default=64.0)
    c.add_argument("--linear-only", action="store_true")

    d = sub.add_parser("dispersion", help="dispersion relation and tail-direction table")
    _global_flags(d, suppress=True)
    d.add_argument("--cs", type=float, default=0.25)
    d.add_argument("--s", type=float, default=0.8)
    d.add_argument("--k", type=_floats, help="explicit wavenumbers")
    d.add_argument("--k-max", type=float, default=2.0)
    d.add_argument("--k-step", type=float, default=0.05)
    return parser


def _run_configs(args) -> list[RunConfig]:
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    if args.preset:
        if args.configs:
            raise ConfigError("give either config files or --preset, not both")
        items = {"preset": args.preset, **overrides}
        cfgs = [(args.preset, config_from_items(items))]
    elif args.configs:
        cfgs = []
        for path in args.configs:
            try:
                items = parse_keyvalue(path.read_text())
            except OSError as exc:
                raise ConfigError(f"cannot read {path}: {exc}") from None
            items.update(overrides)
            cfgs.append((path.stem, config_from_items(items)))
    else:
        raise ConfigError("run needs config files or --preset")
    if args.out is not None:
        if len(cfgs) == 1:
            cfgs = [(n, replace(c, output_dir=Path(args.out))) for n, c in cfgs]
        else:
            cfgs = [(n, replace(c, output_dir=Path(args.out) / n)) for n, c in cfgs]
    return [c for _, c in cfgs]


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, Inadmissible):
        return EXIT_INADMISSIBLE
    if isinstance(exc, (NonConvergence, Stagnation)):
        return EXIT_NONCONVERGENCE
    if isinstance(exc, ValueError):
        return EXIT_CONFIG
    raise exc


def _run_one(cfg: RunConfig) -> tuple[int, str]:
    try:
        result = cmd_run(cfg)
        return EXIT_OK, f"{result.output_dir}: ok ({result.steps} steps, {result.wall_time:.1f} s)"
    except (ValueError, NonConvergence, Stagnation) as exc:
        return _exit_code(exc), f"{cfg.output_dir}: {type(exc).__name__}: {exc}"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    out = Path(args.out) if args.out is not None else Path("out")
    try:
        if args.command == "profile":
            phase = QuadraticPhase() if args.phase == "quadratic" else LinearPhase()
            try:
                params = WaveParams(ModelParams(args.s, args.sigma), args.lambda1, args.lambda2,
                                    args.x0, args.theta0, phase)
                grid = SpectralGrid(args.L, args.N)
            except Inadmissible:
                raise
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if len(args.window) != 2:
                raise ConfigError("--window expects two numbers a,b")
            res = cmd_profile(params, grid, out, args.tol, tuple(args.window))
            if not args.quiet:
                print(f"residual {res.residual:.3e}  rho_max {res.amplitude!r}  -> {res.profile_path}")
            return EXIT_OK
        if args.command == "run":
            cfgs = _run_configs(args)
            if args.threads > 1 and len(cfgs) > 1:
                with ProcessPoolExecutor(max_workers=args.threads) as pool:
                    outcomes = list(pool.map(_run_one, cfgs))
            else:
                outcomes = [_run_one(c) for c in cfgs]
            for code, message in outcomes:
                if code or not args.quiet:
                    print(message, file=sys.stderr if code else sys.stdout)
            return next((code for code, _ in outcomes if code), EXIT_OK)
        if args.command == "convergence":
            try:
                report = cmd_convergence(args.dt, args.N, args.T, args.L, args.linear_only,
                                         args.threads, args.s, args.sigma, args.lambda1, args.lambda2)
            except ValueError as exc:
                if isinstance(exc, Inadmissible):
                    raise
                raise ConfigError(str(exc)) from None
            out.mkdir(parents=True, exist_ok=True)
            write_convergence(report, out / "convergence.csv")
            if not args.quiet:
                print((out / "convergence.csv").read_text(), end="")
            return EXIT_OK
        if args.command == "dispersion":
            if args.k is not None:
                k = np.asarray(args.k, dtype=float)
            else:
                if not (args.k_max > 0 and args.k_step > 0):
                    raise ConfigError("--k-max and --k-step must be positive")
                n = int(round(args.k_max / args.k_step))
                k = np.arange(-n, n + 1) * args.k_step
            try:
                text = cmd_dispersion(args.cs, args.s, k)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            out.mkdir(parents=True, exist_ok=True)
            (out / "dispersion.csv").write_text(text)
            if not args.quiet:
                print(text, end="")
            return EXIT_OK
    except (ConfigError, Inadmissible, NonConvergence, Stagnation) as exc:
        print(f"fracnls: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
