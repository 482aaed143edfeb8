"""Flat ``key = value`` run configuration.

One key per line, sections by dotted prefix, ``#`` starts a comment::

    preset = small_amplitude        # optional starting point
    experiment.kind = amplitude_scale
    experiment.A1 = 1.1
    base.s = 0.8
    base.lambda2 = 0.25
    base.phase = quadratic
    run.dt = 0.01
    run.T = 400
    output.snapshot_times = 0, 100, 400

Superpositions list their waves as ``wave1.*``, ``wave2.*`` with the same
keys as ``base.*``.  :func:`config_items` writes the fully resolved form, which
parses back to an equal configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .experiments import (
    PRESETS,
    AmplitudeScale,
    ExperimentSpec,
    Gaussian,
    Noise,
    Nonsymmetric,
    RunSettings,
    SPerturb,
    Superposition,
)
from .fileio import fmt
from .grid import ModelParams
from .waves import LinearPhase, QuadraticPhase, WaveParams

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_keyvalue",
    "load_config",
    "config_from_items",
    "config_items",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentSpec
    output_dir: Path = Path("out")
    snapshot_times: tuple[float, ...] = ()
    series_cadence: float | None = None
    seedless: bool = True

    def __post_init__(self):
        T = self.experiment.run.T
        if any(t < 0 or t > T for t in self.snapshot_times):
            raise ConfigError(f"snapshot times must lie in [0, T = {T}]")
        if self.cadence <= 0:
            raise ConfigError("series cadence must be positive")

    @property
    def cadence(self) -> float:
        if self.series_cadence is None:
            return self.experiment.run.cadence
        return self.series_cadence


def parse_keyvalue(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines, rejecting malformed or repeated keys."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


_KINDS = {
    "amplitude_scale": AmplitudeScale,
    "noise": Noise,
    "nonsymmetric": Nonsymmetric,
    "gaussian": Gaussian,
    "superposition": Superposition,
    "s_perturb": SPerturb,
}
_KIND_NAMES = {cls: name for name, cls in _KINDS.items()}


class _Reader:
    """Typed access to the item dict that remembers which keys were used."""

    def __init__(self, items: dict[str, str]):
        self.items = items
        self.used: set[str] = set()

    def has(self, key):
        return key in self.items

    def raw(self, key, default=None):
        if key not in self.items:
            if default is None:
                raise ConfigError(f"missing key {key!r}")
            return default
        self.used.add(key)
        return self.items[key]

    def real(self, key, default=None) -> float:
        value = self.raw(key, None if default is None else repr(float(default)))
        try:
            out = float(value)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {value!r}") from None
        if not math.isfinite(out):
            raise ConfigError(f"{key}: must be finite")
        return out

    def integer(self, key, default=None) -> int:
        value = self.raw(key, None if default is None else str(default))
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from None

    def reals(self, key) -> tuple[float, ...]:
        value = self.raw(key, "")
        if not value:
            return ()
        try:
            return tuple(float(v) for v in value.split(","))
        except ValueError:
            raise ConfigError(f"{key}: expected a comma-separated list of numbers") from None

    def choice(self, key, options, default=None) -> str:
        value = self.raw(key, default)
        if value not in options:
            raise ConfigError(f"{key}: expected one of {sorted(options)}, got {value!r}")
        return value


def _phase(r: _Reader, prefix: str):
    name = r.choice(f"{prefix}.phase", ("linear", "quadratic"), "linear")
    if name == "quadratic":
        return QuadraticPhase()
    slope = r.raw(f"{prefix}.A", "auto")
    return LinearPhase(None if slope == "auto" else r.real(f"{prefix}.A"))


def _wave(r: _Reader, prefix: str, fallback: WaveParams | None = None) -> WaveParams:
    fb = fallback or WaveParams(ModelParams(0.8, 1.0), 1.0, 0.0)
    try:
        model = ModelParams(r.real(f"{prefix}.s", fb.model.s), r.real(f"{prefix}.sigma", fb.model.sigma))
    except ValueError as exc:
        raise ConfigError(f"{prefix}: {exc}") from None
    return WaveParams(model, r.real(f"{prefix}.lambda1", fb.lambda1),
                      r.real(f"{prefix}.lambda2", fb.lambda2), r.real(f"{prefix}.x0", fb.x0),
                      r.real(f"{prefix}.theta0", fb.theta0), _phase(r, prefix))


def _kind(r: _Reader, base: WaveParams | None):
    name = r.choice("experiment.kind", _KINDS)
    e = "experiment"
    try:
        if name == "amplitude_scale":
            return AmplitudeScale(r.real(f"{e}.A1", 1.0), r.real(f"{e}.A2", 1.0))
        if name == "noise":
            return Noise(r.choice(f"{e}.target", ("v", "w"), "v"), r.real(f"{e}.m", 1e5))
        if name == "nonsymmetric":
            return Nonsymmetric(r.choice(f"{e}.target", ("v", "w"), "v"), r.real(f"{e}.alpha", 0.0))
        if name == "gaussian":
            return Gaussian(r.real(f"{e}.A1", 1.0), r.real(f"{e}.A2", 0.01), _phase(r, e),
                            r.real(f"{e}.lambda2", 0.25), r.real(f"{e}.s", 0.8),
                            r.real(f"{e}.x0", 0.0), r.real(f"{e}.theta0", 0.0))
        if name == "superposition":
            count = r.integer(f"{e}.waves")
            return Superposition(tuple(_wave(r, f"wave{i}", base) for i in range(1, count + 1)))
        return SPerturb(r.real(f"{e}.sbar", 0.8), r.real(f"{e}.eps", 0.05))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"experiment: {exc}") from None


def config_from_items(items: dict[str, str]) -> RunConfig:
    """Build a :class:`RunConfig`; a ``preset`` key supplies defaults for all other keys."""
    items = dict(items)
    if "preset" in items:
        name = items.pop("preset")
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        merged = dict(config_items(RunConfig(PRESETS[name])))
        if "experiment.kind" in items and items["experiment.kind"] != merged["experiment.kind"]:
            merged = {k: v for k, v in merged.items() if not k.startswith(("experiment.", "wave"))}
        merged.update(items)
        items = merged
    r = _Reader(items)
    base = _wave(r, "base") if any(k.startswith("base.") for k in items) else None
    kind = _kind(r, base)
    model = None
    if r.has("model.s") or r.has("model.sigma"):
        try:
            model = ModelParams(r.real("model.s"), r.real("model.sigma", 1.0))
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from None
    d = RunSettings()
    try:
        run = RunSettings(
            dt=r.real("run.dt", d.dt), T=r.real("run.T", d.T),
            cadence=r.real("run.cadence", d.cadence), N=r.integer("run.N", d.N),
            L=r.real("run.L", d.L),
            points=int(r.raw("run.points")) if r.raw("run.points", "auto") != "auto" else None,
            stage_tol=r.real("run.stage_tol", d.stage_tol),
            stage_max_iter=r.integer("run.stage_max_iter", d.stage_max_iter))
        run.grid()
    except ValueError as exc:
        raise ConfigError(f"run: {exc}") from None
    if not (run.dt > 0 and run.T >= 0 and run.stage_tol > 0):
        raise ConfigError("run: dt and stage_tol must be positive, T non-negative")
    spec = ExperimentSpec(kind, base, run, model, r.real("experiment.profile_tol", 1e-10))
    if not isinstance(kind, (Superposition, Gaussian)) and base is None:
        raise ConfigError(f"experiment.kind = {_KIND_NAMES[type(kind)]} needs base.* keys")
    cadence = r.raw("output.series_cadence", "auto")
    cfg = RunConfig(spec, Path(r.raw("output.dir", "out")), r.reals("output.snapshot_times"),
                    None if cadence == "auto" else r.real("output.series_cadence"),
                    r.choice("seedless", ("true",), "true") == "true")
    unused = set(items) - r.used
    if unused:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unused))}")
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_items(parse_keyvalue(text))


def _phase_items(prefix, phase):
    if isinstance(phase, QuadraticPhase):
        return [(f"{prefix}.phase", "quadratic")]
    return [(f"{prefix}.phase", "linear"), (f"{prefix}.A", "auto" if phase.A is None else fmt(phase.A))]


def _wave_items(prefix: str, w: WaveParams):
    return [(f"{prefix}.s", fmt(w.model.s)), (f"{prefix}.sigma", fmt(w.model.sigma)),
            (f"{prefix}.lambda1", fmt(w.lambda1)), (f"{prefix}.lambda2", fmt(w.lambda2)),
            (f"{prefix}.x0", fmt(w.x0)), (f"{prefix}.theta0", fmt(w.theta0))] + _phase_items(prefix, w.phase)


def config_items(cfg: RunConfig) -> list[tuple[str, str]]:
    """Fully resolved key-value pairs; parsing them reproduces ``cfg``."""
    spec = cfg.experiment
    kind = spec.kind
    items = [("experiment.kind", _KIND_NAMES[type(kind)])]
    if isinstance(kind, Superposition):
        items.append(("experiment.waves", str(len(kind.waves))))
        for i, w in enumerate(kind.waves, start=1):
            items += _wave_items(f"wave{i}", w)
    elif isinstance(kind, Gaussian):
        items += [("experiment.A1", fmt(kind.A1)), ("experiment.A2", fmt(kind.A2)),
                  ("experiment.lambda2", fmt(kind.lambda2)), ("experiment.s", fmt(kind.s)),
                  ("experiment.x0", fmt(kind.x0)), ("experiment.theta0", fmt(kind.theta0))]
        items += _phase_items("experiment", kind.phase)
    else:
        for f in fields(kind):
            value = getattr(kind, f.name)
            items.append((f"experiment.{f.name}", value if isinstance(value, str) else fmt(value)))
    items.append(("experiment.profile_tol", fmt(spec.profile_tol)))
    if spec.base is not None:
        items += _wave_items("base", spec.base)
    if spec.model is not None:
        items += [("model.s", fmt(spec.model.s)), ("model.sigma", fmt(spec.model.sigma))]
    run = spec.run
    items += [("run.dt", fmt(run.dt)), ("run.T", fmt(run.T)), ("run.cadence", fmt(run.cadence)),
              ("run.N", str(run.N)), ("run.L", fmt(run.L)),
              ("run.points", "auto" if run.points is None else str(run.points)),
              ("run.stage_tol", fmt(run.stage_tol)), ("run.stage_max_iter", str(run.stage_max_iter))]
    items += [("output.dir", str(cfg.output_dir)),
              ("output.snapshot_times", ", ".join(fmt(t) for t in cfg.snapshot_times)),
              ("output.series_cadence", "auto" if cfg.series_cadence is None else fmt(cfg.series_cadence)),
              ("seedless", "true" if cfg.seedless else "false")]
    return items


def with_output(cfg: RunConfig, output_dir) -> RunConfig:
    return replace(cfg, output_dir=Path(output_dir))
