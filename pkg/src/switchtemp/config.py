"""INI run configuration: [model], [numerics], [sim] and an optional [run] section.

Every key is optional; missing keys fall back to the desk parameter set and
the library defaults. Unknown sections or keys are rejected so typos do not
silently fall back to defaults.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .model import EvalContext, ModelParams, desk_params
from .noise import NoiseSpec, SubordinatorKind, SubordinatorSpec
from .mc_oracle import SimConfig
from .numerics import QuadratureConfig
from .regimes import CountTruncation, RegimeRates
from .specfun import SeriesControl

__all__ = ["RunConfig", "load_config", "parse_config", "DEFAULT_CONFIG_TEXT"]

_MODEL_KEYS = {
    "alpha", "sigma", "beta0", "beta1", "beta2", "beta3", "r", "T0", "lambda12", "lambda21",
    "noise1_kind", "noise1_a", "noise1_b", "noise1_mu1",
    "noise2_kind", "noise2_a", "noise2_b", "noise2_mu1",
}
_NUMERICS = {
    "max_switches": (CountTruncation, int), "series_terms": (CountTruncation, int),
    "nodes_per_unit": (QuadratureConfig, int), "min_nodes": (QuadratureConfig, int),
    "halfline_envelope_tol": (QuadratureConfig, float), "max_halfline_nodes": (QuadratureConfig, int),
    "max_terms": (SeriesControl, int), "rel_tol": (SeriesControl, float), "abs_tol": (SeriesControl, float),
}
_SIM_KEYS = {"paths": int, "steps_per_unit": int, "seed": int, "horizon": float}
_RUN_KEYS = {"output_dir": str, "t": float, "theta": float, "u_min": float, "u_max": float, "u_points": int}

DEFAULT_CONFIG_TEXT = """\
# desk parameter set; only the switching rates are empirical
[model]
alpha = 2.0
sigma = 1.0
beta0 = 15.0
beta1 = 0.0
beta2 = 5.0
beta3 = 2.0
r = 0.02
T0 = 16.0
lambda12 = 10.0
lambda21 = 20.0
noise1_kind = gamma
noise1_a = 4.0
noise1_b = 4.0
noise1_mu1 = 0.1
noise2_kind = gamma
noise2_a = 8.0
noise2_b = 4.0
noise2_mu1 = -0.1

[numerics]
max_switches = 40
series_terms = 40
nodes_per_unit = 256
min_nodes = 64
halfline_envelope_tol = 1e-12

[sim]
paths = 100000
steps_per_unit = 100
seed = 20240917
horizon = 0.25

[run]
output_dir = out
t = 0.25
theta = 0.0
u_min = -10
u_max = 10
u_points = 201
"""


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    trunc: CountTruncation = field(default_factory=CountTruncation)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    series: SeriesControl = field(default_factory=SeriesControl)
    sim: SimConfig = field(default_factory=lambda: SimConfig(100_000, 100, 20240917, 0.25))
    output_dir: Path = Path("out")
    t: float = 0.25
    theta: float = 0.0
    u_min: float = -10.0
    u_max: float = 10.0
    u_points: int = 201

    def context(self, t: float | None = None, theta: float | None = None) -> EvalContext:
        return EvalContext(self.t if t is None else t, self.theta if theta is None else theta,
                           self.trunc, self.quad, self.series)


def _convert(section: str, key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot read {raw!r} as {kind.__name__}") from None


def _check_keys(section: configparser.SectionProxy, allowed) -> None:
    extra = set(section) - set(allowed)
    if extra:
        raise ConfigError(f"[{section.name}] unknown keys: {', '.join(sorted(extra))}")


def _model(section) -> ModelParams:
    base = desk_params()
    if section is None:
        return base
    _check_keys(section, _MODEL_KEYS)

    def num(key, default):
        return _convert("model", key, section[key], float) if key in section else default

    def noise(j: int, default: NoiseSpec) -> NoiseSpec:
        sub = default.subordinator
        kind = SubordinatorKind.parse(section[f"noise{j}_kind"]) if f"noise{j}_kind" in section else sub.kind
        return NoiseSpec(SubordinatorSpec(kind, num(f"noise{j}_a", sub.a), num(f"noise{j}_b", sub.b)),
                         num(f"noise{j}_mu1", default.mu1))

    beta = tuple(num(f"beta{i}", base.beta[i]) for i in range(4))
    return ModelParams(
        alpha=num("alpha", base.alpha), sigma=num("sigma", base.sigma), beta=beta,
        noise1=noise(1, base.noise1), noise2=noise(2, base.noise2),
        rates=RegimeRates(num("lambda12", base.rates.lambda12), num("lambda21", base.rates.lambda21)),
        r=num("r", base.r), T0=num("T0", base.T0))


def _numerics(section):
    groups = {CountTruncation: {}, QuadratureConfig: {}, SeriesControl: {}}
    if section is not None:
        _check_keys(section, _NUMERICS)
        for key, raw in section.items():
            cls, kind = _NUMERICS[key]
            groups[cls][key] = _convert("numerics", key, raw, kind)
    return tuple(cls(**kw) for cls, kw in groups.items())


def parse_config(text: str, base_dir: Path | None = None) -> RunConfig:
    """Build a RunConfig from INI text; DomainError escapes for invalid model values."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    unknown = set(parser.sections()) - {"model", "numerics", "sim", "run"}
    if unknown:
        raise ConfigError(f"unknown sections: {', '.join(sorted(unknown))}")

    get = lambda name: parser[name] if parser.has_section(name) else None  # noqa: E731
    model = _model(get("model"))
    trunc, quad, series = _numerics(get("numerics"))

    defaults = RunConfig(model)
    sim_kw = {f.name: getattr(defaults.sim, f.name) for f in fields(SimConfig)}
    if get("sim") is not None:
        _check_keys(get("sim"), _SIM_KEYS)
        for key, raw in get("sim").items():
            sim_kw[key] = _convert("sim", key, raw, _SIM_KEYS[key])

    run_kw = {}
    if get("run") is not None:
        _check_keys(get("run"), _RUN_KEYS)
        for key, raw in get("run").items():
            run_kw[key] = _convert("run", key, raw, _RUN_KEYS[key])
    out = Path(run_kw.pop("output_dir", "out"))
    if base_dir is not None and not out.is_absolute():
        out = base_dir / out
    if run_kw.get("u_points", 201) < 1:
        raise ConfigError("[run] u_points must be >= 1")
    return RunConfig(model, trunc, quad, series, SimConfig(**sim_kw), out, **run_kw)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path.parent)
