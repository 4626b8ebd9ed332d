"""Flat ``key = value`` run configuration."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .dynsys import LorenzParams, LorenzState
from .experiment import StudyConfig
from .reservoir import EsnParams


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.key = key
        self.line = line


def _float(text: str) -> float:
    # Accepts plain decimals and simple ratios such as 8/3.
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _int_list(text: str) -> tuple[int, ...]:
    """Comma-separated ints; an item ``a:step:b`` expands to an inclusive range."""
    out: list[int] = []
    for item in text.split(","):
        item = item.strip()
        if ":" in item:
            start, step, stop = (int(p) for p in item.split(":"))
            if step <= 0:
                raise ValueError("range step must be positive")
            out.extend(range(start, stop + 1, step))
        else:
            out.append(int(item))
    if not out:
        raise ValueError("empty list")
    return tuple(out)


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*allowed: str):
    def parse(text: str) -> str:
        if text not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}")
        return text
    return parse


@dataclass(frozen=True)
class RunConfig:
    # Lorenz system and integration
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    xi0: float = 0.0
    upsilon0: float = 1.0
    zeta0: float = 1.05
    tau: float = 0.01
    n_steps: int = 4000
    # reservoir
    reservoir_size: int = 300
    input_dim: int = 1
    spectral_radius: float = 1.0
    input_scale: float = 0.05
    seed: int = 0
    # readout training and studies
    lam: float = 1e-9
    lambda_convention: str = "raw"
    washout: int = 100
    ell: int = 4000
    ell_grid: tuple[int, ...] = tuple(range(300, 4001, 100))
    eval_length: int = 20_000
    ref_length: int = 20_000
    seeds: tuple[int, ...] = tuple(range(10))
    guides: bool = False
    # forecast
    forecast_steps: int = 500
    forecast_truth_steps: int = 500
    # pca
    pca_components: int = 3
    pca_length: int = 4000
    # central-limit probe
    clt_ell_grid: tuple[int, ...] = (100, 1000, 10_000)
    clt_trials: int = 200
    clt_seed: int = 0
    clt_observable: str = "identity"
    clt_burn_in: int = 1000

    def study(self) -> StudyConfig:
        return StudyConfig(
            lorenz=LorenzParams(self.sigma, self.rho, self.beta),
            initial_state=LorenzState(self.xi0, self.upsilon0, self.zeta0),
            tau=self.tau,
            esn=EsnParams(
                reservoir_size=self.reservoir_size,
                input_dim=self.input_dim,
                spectral_radius_target=self.spectral_radius,
                input_scale=self.input_scale,
                master_seed=self.seed,
            ),
            lam=self.lam,
            lambda_convention=self.lambda_convention,
            washout=self.washout,
            ell_grid=self.ell_grid,
            eval_length=self.eval_length,
            ref_length=self.ref_length,
            seeds=self.seeds,
        )


# Config-file key -> (RunConfig attribute, parser)
KEYS = {
    "sigma": ("sigma", _float),
    "rho": ("rho", _float),
    "beta": ("beta", _float),
    "xi0": ("xi0", _float),
    "upsilon0": ("upsilon0", _float),
    "zeta0": ("zeta0", _float),
    "tau": ("tau", _float),
    "n_steps": ("n_steps", int),
    "reservoir_size": ("reservoir_size", int),
    "input_dim": ("input_dim", int),
    "spectral_radius": ("spectral_radius", _float),
    "input_scale": ("input_scale", _float),
    "seed": ("seed", int),
    "lambda": ("lam", _float),
    "lambda_convention": ("lambda_convention", _choice("raw", "averaged")),
    "washout": ("washout", int),
    "ell": ("ell", int),
    "ell_grid": ("ell_grid", _int_list),
    "eval_length": ("eval_length", int),
    "ref_length": ("ref_length", int),
    "seeds": ("seeds", _int_list),
    "guides": ("guides", _bool),
    "forecast_steps": ("forecast_steps", int),
    "forecast_truth_steps": ("forecast_truth_steps", int),
    "pca_components": ("pca_components", int),
    "pca_length": ("pca_length", int),
    "clt_ell_grid": ("clt_ell_grid", _int_list),
    "clt_trials": ("clt_trials", int),
    "clt_seed": ("clt_seed", int),
    "clt_observable": ("clt_observable", _choice("identity", "square", "sin2pi", "constant")),
    "clt_burn_in": ("clt_burn_in", int),
}

assert {attr for attr, _ in KEYS.values()} == {f.name for f in fields(RunConfig)}

_POSITIVE = {
    "tau", "reservoir_size", "input_dim", "spectral_radius", "input_scale", "ell",
    "eval_length", "ref_length", "pca_components", "pca_length", "clt_trials",
}
_NON_NEGATIVE = {"n_steps", "washout", "forecast_steps", "forecast_truth_steps", "clt_burn_in"}


def _parse_value(key: str, text: str, line: int | None):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}", key, line)
    attr, parser = KEYS[key]
    try:
        value = parser(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse {key} = {text.strip()!r}: {exc}", key, line) from None
    if key in _POSITIVE and not value > 0:
        raise ConfigError(f"{key} must be > 0, got {value!r}", key, line)
    if key in _NON_NEGATIVE and value < 0:
        raise ConfigError(f"{key} must be >= 0, got {value!r}", key, line)
    if key == "lambda" and value < 0:
        raise ConfigError(f"lambda must be >= 0, got {value!r}", key, line)
    return attr, value


def read_config_text(text: str) -> dict[str, object]:
    """Parse config-file text into RunConfig attribute values."""
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", None, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", key, lineno)
        if not value:
            raise ConfigError(f"missing value for {key!r}", key, lineno)
        seen[key] = lineno
        attr, parsed = _parse_value(key, value, lineno)
        values[attr] = parsed
    return values


def parse_config(path: str | Path | None = None, overrides: Mapping[str, str] | None = None) -> RunConfig:
    """Load ``path`` (if given) and apply ``overrides``, which win over file values."""
    values: dict[str, object] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(read_config_text(text))
    for key, text in (overrides or {}).items():
        attr, parsed = _parse_value(key, text, None)
        values[attr] = parsed
    cfg = replace(RunConfig(), **values)
    try:
        cfg.study()
    except ValueError as exc:
        raise ConfigError(f"inconsistent configuration: {exc}") from None
    return cfg
