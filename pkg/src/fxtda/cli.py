"""Command-line front end: run the pipeline, the sensitivity grid, or
re-render plots from an existing report directory."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import ConfigError, PipelineConfig
from .pipeline import PipelineError, run_pipeline, run_sensitivity


def _load_config(config_path, output, seed, threads) -> PipelineConfig:
    config = PipelineConfig.from_yaml(config_path)
    overrides = {}
    if output is not None:
        overrides["output_dir"] = Path(output)
    if seed is not None:
        overrides["seed"] = seed
    if threads is not None:
        overrides["threads"] = threads
    if overrides:
        config = config.with_overrides(**overrides)
        config.validate()
    return config


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main() -> None:
    """Statistical vs. topological clustering of FX reference rates."""


_shared = [
    click.option("--config", "config_path", required=True, type=click.Path(exists=True), help="YAML config file."),
    click.option("--output", type=click.Path(), default=None, help="Override the output directory."),
    click.option("--seed", type=int, default=None, help="Override the clustering seed."),
    click.option("--threads", type=int, default=None, help="Worker threads for per-currency jobs."),
]


def _with_shared(cmd):
    for opt in reversed(_shared):
        cmd = opt(cmd)
    return cmd


@main.command()
@_with_shared
def run(config_path, output, seed, threads) -> None:
    """Run the full pipeline and write the report tree."""
    try:
        config = _load_config(config_path, output, seed, threads)
        result = run_pipeline(config)
    except (ConfigError, PipelineError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"report written to {result.output_dir}")
    for row in result.report.rows:
        click.echo(
            f"  {row.method:12s} {row.feature_space:12s} "
            f"silhouette={row.silhouette:.3f} ch={row.calinski_harabasz:.3f}"
        )


@main.command()
@_with_shared
def sensitivity(config_path, output, seed, threads) -> None:
    """Run the (d, tau, eps_max) sensitivity grid against the baseline."""
    try:
        config = _load_config(config_path, output, seed, threads)
        report = run_sensitivity(config)
        out_dir = Path(config.output_dir) / "eval"
        out_dir.mkdir(parents=True, exist_ok=True)
        report.to_csv(out_dir / "sensitivity_report.csv")
    except (ConfigError, PipelineError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"sensitivity report written to {out_dir / 'sensitivity_report.csv'}")
    for row in report.rows:
        if row.error:
            click.echo(f"  {row.param_change}: ERROR {row.error}")
        else:
            click.echo(
                f"  {row.param_change}: mantel={row.mantel:.3f} ari={row.ari:.3f} nmi={row.nmi:.3f}"
            )


@main.command()
@click.option("--output", "report_dir", required=True, type=click.Path(exists=True), help="Existing report directory.")
def plot(report_dir) -> None:
    """Re-render every SVG from the CSVs in a report directory."""
    from .plots import render_plots

    try:
        written = render_plots(report_dir)
    except FileNotFoundError as exc:
        _fail(str(exc))
    click.echo(f"rendered {len(written)} SVG file(s)")


@main.command("validate-config")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True), help="YAML config file.")
def validate_config(config_path) -> None:
    """Parse and validate a config file, printing the resolved values."""
    try:
        config = PipelineConfig.from_yaml(config_path)
    except (ConfigError, OSError) as exc:
        _fail(str(exc))
    click.echo("config OK")
    click.echo(f"  currencies: {', '.join(config.currencies)}")
    click.echo(f"  embed: window={config.embed_window} delay={config.embed_delay} eps_max={config.eps_max}")
    click.echo(
        f"  wasserstein: p={config.wasserstein_p} q={config.wasserstein_q} weights={config.dim_weights}"
    )
    click.echo(f"  clustering: k={config.k} seed={config.seed} mds_dim={config.mds_dim}")
    click.echo(f"  sensitivity rows: {len(config.sensitivity_grid)}")


if __name__ == "__main__":
    main()
