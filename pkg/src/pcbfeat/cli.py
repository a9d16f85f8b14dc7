"""Command-line entry points: synth, extract, rank, report."""

import json
import logging
import sys

import click

from .pipeline import (ConfigError, PipelineConfig, run_extract, run_rank,
                       run_report, EXIT_CONFIG)
from .synth import SyntheticBoardSpec, write_dataset


def _load_config(config_path, overrides):
    data = {}
    if config_path:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return PipelineConfig.from_dict(data)


def _run(stage, config_path, overrides):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        config = _load_config(config_path, overrides)
        result = stage(config)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    sys.exit(result.exit_code)


def _split_csv(_ctx, _param, value):
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


@click.group()
def main():
    """Region-windowed PCB feature extraction and importance ranking."""


@main.command()
@click.option("--config", "-c", "config_path", type=click.Path(), default=None,
              help="JSON config file; flags override its values.")
@click.option("--manifest", type=click.Path(), default=None,
              help="Dataset manifest JSON listing image/mask pairs.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory.")
@click.option("--ksizes", callback=_split_csv, default=None,
              help="Comma-separated region sizes, e.g. 5,10,25.")
@click.option("--families", callback=_split_csv, default=None,
              help="Comma-separated subset of color,shape,texture.")
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
def extract(config_path, manifest, out_dir, ksizes, families, seed, jobs):
    """Extract per-region features into one CSV per (image, ksize)."""
    _run(run_extract, config_path, {
        "manifest": manifest, "out_dir": out_dir, "ksizes": ksizes,
        "families": families, "seed": seed, "jobs": jobs,
    })


@main.command()
@click.option("--config", "-c", "config_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--trees", type=int, default=None, help="Forest size override.")
def rank(config_path, out_dir, seed, jobs, trees):
    """Fit forests on extracted features and write importance reports."""
    overrides = {"out_dir": out_dir, "seed": seed, "jobs": jobs}
    if trees is not None:
        overrides["forest"] = {"n_trees": trees}
    _run(run_rank, config_path, overrides)


@main.command()
@click.option("--config", "-c", "config_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
def report(config_path, out_dir):
    """Rebuild grouped summaries and the top-feature list from importance.csv."""
    _run(run_report, config_path, {"out_dir": out_dir})


@main.command()
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--boards", type=int, default=10, show_default=True)
@click.option("--size", type=int, default=150, show_default=True,
              help="Board edge length in pixels.")
@click.option("--components", type=int, default=10, show_default=True)
@click.option("--min-size", type=int, default=12, show_default=True)
@click.option("--max-size", type=int, default=40, show_default=True)
@click.option("--striped", is_flag=True, default=False,
              help="Give components a striped texture.")
@click.option("--noise-sigma", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def synth(out_dir, boards, size, components, min_size, max_size, striped,
          noise_sigma, seed):
    """Generate a synthetic board dataset with pixel-exact masks."""
    spec = SyntheticBoardSpec(
        width=size, height=size, n_components=components,
        size_range=(min_size, max_size), striped=striped,
        noise_sigma=noise_sigma,
    )
    manifest = write_dataset(out_dir, boards, base_spec=spec, seed=seed)
    click.echo(f"wrote {boards} boards; manifest at {manifest}")


if __name__ == "__main__":
    main()
