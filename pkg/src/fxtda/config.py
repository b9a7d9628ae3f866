"""Pipeline configuration: a nested YAML file mapped onto one flat,
validated dataclass.  Defaults reproduce the reference study setup
(13 currencies against EUR, window 4 / delay 1, k = 3, equal H0/H1
weights, 2-Wasserstein with Euclidean ground metric).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date, datetime
from pathlib import Path

import yaml

__all__ = ["PipelineConfig", "SensitivityCase", "ConfigError", "DEFAULT_CURRENCIES"]

DEFAULT_CURRENCIES = (
    "AUD", "BRL", "CHF", "CNY", "GBP", "INR", "JPY",
    "KRW", "RUB", "THB", "TRY", "USD", "ZAR",
)


class ConfigError(ValueError):
    """Invalid or inconsistent pipeline configuration."""


@dataclass(frozen=True)
class SensitivityCase:
    """One sensitivity-grid row; may override only the embedding window,
    delay, and filtration ceiling."""

    name: str
    window: int | None = None
    delay: int | None = None
    eps_max: float | None = None
    eps_scale: float = 1.0


@dataclass(frozen=True)
class PipelineConfig:
    # data
    data_path: Path = Path("data")
    currencies: tuple[str, ...] = DEFAULT_CURRENCIES
    start: date | None = None
    end: date | None = None
    delimiter: str = ","
    date_column: str = "date"
    rate_column: str = "rate"
    wide_date_column: str = "Date"
    date_format: str = "%Y-%m-%d"
    monthly_rule: str = "last"
    # statistical branch
    max_lag: int = 1
    stl_period: int = 12
    # embedding / filtration
    embed_window: int = 4
    embed_delay: int = 1
    eps_max: float | str = "auto"
    # diagram distances and summaries
    wasserstein_p: float = 2.0
    wasserstein_q: float = 2.0
    dim_weights: tuple[float, float] = (1.0, 1.0)
    landscape_layers: int = 3
    grid_size: int = 200
    # clustering
    k: int = 3
    k_max_elbow: int = 10
    mds_dim: int = 5
    seed: int = 7
    # execution
    output_dir: Path = Path("out")
    threads: int = 1
    sensitivity_grid: tuple[SensitivityCase, ...] = (
        SensitivityCase("d=3, tau=1", window=3, delay=1),
        SensitivityCase("d=5, tau=1", window=5, delay=1),
        SensitivityCase("d=4, tau=2", window=4, delay=2),
        SensitivityCase("d=6, tau=1", window=6, delay=1),
        SensitivityCase("eps_max +25%", eps_scale=1.25),
        SensitivityCase("eps_max -25%", eps_scale=0.75),
    )

    def validate(self) -> None:
        if self.embed_window < 1 or self.embed_delay < 1:
            raise ConfigError("embed window and delay must be >= 1")
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.wasserstein_p < 1.0 or self.wasserstein_q < 1.0:
            raise ConfigError("wasserstein p and ground exponent q must be >= 1")
        if self.monthly_rule not in ("last", "mean"):
            raise ConfigError(f"monthly_rule must be 'last' or 'mean', got {self.monthly_rule!r}")
        if isinstance(self.eps_max, str):
            if self.eps_max != "auto":
                raise ConfigError(f"eps_max must be a positive number or 'auto', got {self.eps_max!r}")
        elif self.eps_max <= 0:
            raise ConfigError("eps_max must be positive")
        if len(self.currencies) < 2:
            raise ConfigError("need at least two currencies")
        if len(set(self.currencies)) != len(self.currencies):
            raise ConfigError("duplicate currency codes")
        if "EUR" in self.currencies:
            raise ConfigError("EUR is the numeraire and must not be a feature column")
        if self.max_lag < 0:
            raise ConfigError("max_lag must be >= 0")
        if self.k_max_elbow < 1:
            raise ConfigError("k_max_elbow must be >= 1")
        if self.mds_dim < 1:
            raise ConfigError("mds_dim must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if len(self.dim_weights) != 2 or any(w < 0 for w in self.dim_weights):
            raise ConfigError("dim_weights must be two nonnegative numbers")
        if self.start is not None and self.end is not None and self.start > self.end:
            raise ConfigError("start date after end date")
        for case in self.sensitivity_grid:
            if case.window is not None and case.window < 1:
                raise ConfigError(f"sensitivity case {case.name!r}: window must be >= 1")
            if case.delay is not None and case.delay < 1:
                raise ConfigError(f"sensitivity case {case.name!r}: delay must be >= 1")
            if case.eps_max is not None and case.eps_max <= 0:
                raise ConfigError(f"sensitivity case {case.name!r}: eps_max must be positive")
            if case.eps_scale <= 0:
                raise ConfigError(f"sensitivity case {case.name!r}: eps_scale must be positive")

    def with_overrides(self, **kwargs) -> "PipelineConfig":
        return replace(self, **kwargs)

    @classmethod
    def from_yaml(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return cls.from_dict(raw, base_dir=Path(path).parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "PipelineConfig":
        known_sections = {"data", "analysis", "embed", "tda", "cluster", "run", "sensitivity"}
        unknown = set(raw) - known_sections
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")

        def section(name) -> dict:
            part = raw.get(name) or {}
            if not isinstance(part, dict) and name != "sensitivity":
                raise ConfigError(f"section {name!r} must be a mapping")
            return part

        def pick(part: dict, allowed: dict) -> dict:
            bad = set(part) - set(allowed)
            if bad:
                raise ConfigError(f"unknown key(s) {sorted(bad)}; expected {sorted(allowed)}")
            return {allowed[k]: v for k, v in part.items()}

        kwargs: dict = {}
        kwargs.update(
            pick(
                section("data"),
                {
                    "path": "data_path",
                    "currencies": "currencies",
                    "start": "start",
                    "end": "end",
                    "delimiter": "delimiter",
                    "date_column": "date_column",
                    "rate_column": "rate_column",
                    "wide_date_column": "wide_date_column",
                    "date_format": "date_format",
                    "monthly_rule": "monthly_rule",
                },
            )
        )
        kwargs.update(pick(section("analysis"), {"max_lag": "max_lag", "stl_period": "stl_period"}))
        kwargs.update(pick(section("embed"), {"window": "embed_window", "delay": "embed_delay"}))
        kwargs.update(
            pick(
                section("tda"),
                {
                    "eps_max": "eps_max",
                    "wasserstein_p": "wasserstein_p",
                    "wasserstein_q": "wasserstein_q",
                    "dim_weights": "dim_weights",
                    "landscape_layers": "landscape_layers",
                    "grid_size": "grid_size",
                },
            )
        )
        kwargs.update(
            pick(
                section("cluster"),
                {"k": "k", "k_max_elbow": "k_max_elbow", "mds_dim": "mds_dim", "seed": "seed"},
            )
        )
        kwargs.update(pick(section("run"), {"output_dir": "output_dir", "threads": "threads"}))

        grid_raw = raw.get("sensitivity")
        if grid_raw is not None:
            if not isinstance(grid_raw, list):
                raise ConfigError("section 'sensitivity' must be a list of cases")
            cases = []
            for i, entry in enumerate(grid_raw):
                if not isinstance(entry, dict):
                    raise ConfigError(f"sensitivity case {i} must be a mapping")
                bad = set(entry) - {"name", "window", "delay", "eps_max", "eps_scale"}
                if bad:
                    raise ConfigError(
                        f"sensitivity case {i}: only window/delay/eps_max/eps_scale may vary, got {sorted(bad)}"
                    )
                cases.append(
                    SensitivityCase(
                        name=str(entry.get("name", f"case {i + 1}")),
                        window=entry.get("window"),
                        delay=entry.get("delay"),
                        eps_max=entry.get("eps_max"),
                        eps_scale=float(entry.get("eps_scale", 1.0)),
                    )
                )
            kwargs["sensitivity_grid"] = tuple(cases)

        for key in ("start", "end"):
            if key in kwargs and kwargs[key] is not None and not isinstance(kwargs[key], date):
                kwargs[key] = datetime.strptime(str(kwargs[key]), "%Y-%m-%d").date()
        if "currencies" in kwargs:
            kwargs["currencies"] = tuple(str(c) for c in kwargs["currencies"])
        if "dim_weights" in kwargs:
            kwargs["dim_weights"] = tuple(float(w) for w in kwargs["dim_weights"])
        for key in ("data_path", "output_dir"):
            if key in kwargs:
                p = Path(kwargs[key])
                if base_dir is not None and not p.is_absolute():
                    p = base_dir / p
                kwargs[key] = p

        config = cls(**kwargs)
        config.validate()
        return config


def write_default_config(path) -> None:
    """Emit a commented YAML template with the study defaults."""
    cfg = PipelineConfig()
    doc = {
        "data": {
            "path": str(cfg.data_path),
            "currencies": list(cfg.currencies),
            "date_format": cfg.date_format,
            "monthly_rule": cfg.monthly_rule,
        },
        "analysis": {"max_lag": cfg.max_lag, "stl_period": cfg.stl_period},
        "embed": {"window": cfg.embed_window, "delay": cfg.embed_delay},
        "tda": {
            "eps_max": cfg.eps_max,
            "wasserstein_p": cfg.wasserstein_p,
            "wasserstein_q": cfg.wasserstein_q,
            "dim_weights": list(cfg.dim_weights),
            "landscape_layers": cfg.landscape_layers,
            "grid_size": cfg.grid_size,
        },
        "cluster": {
            "k": cfg.k,
            "k_max_elbow": cfg.k_max_elbow,
            "mds_dim": cfg.mds_dim,
            "seed": cfg.seed,
        },
        "run": {"output_dir": str(cfg.output_dir), "threads": cfg.threads},
        "sensitivity": [
            {
                k: v
                for k, v in {
                    "name": c.name,
                    "window": c.window,
                    "delay": c.delay,
                    "eps_max": c.eps_max,
                    "eps_scale": c.eps_scale if c.eps_scale != 1.0 else None,
                }.items()
                if v is not None
            }
            for c in cfg.sensitivity_grid
        ],
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)
