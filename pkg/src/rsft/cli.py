"""Command-line driver.

Exit codes: 0 success, 2 configuration error, 3 infeasible design
(``K * eta_m >= B``), 4 no count threshold meets both targets.
"""

from __future__ import annotations

import functools
import sys

import click

from .config import ConfigError, load_config
from .experiments import run_experiment
from .optimizer import Infeasible, NoSolution

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NO_SOLUTION = 0, 2, 3, 4


def _common(fn):
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), help="TOML experiment file.")
    @click.option("--seed", type=int, default=None, help="Override the config seed.")
    @click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Override the output directory.")
    @functools.wraps(fn)
    def wrapper(config_path, seed, out_dir):
        return fn(config_path, seed, out_dir)

    return wrapper


def _execute(config_path, seed, out_dir, kind=None):
    try:
        cfg = load_config(config_path, seed=seed, out_dir=out_dir, kind=kind)
    except ConfigError as err:
        click.echo(f"config error:\n{err}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        paths = run_experiment(cfg)
    except Infeasible as err:
        click.echo(f"infeasible: {err}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except NoSolution as err:
        click.echo(f"no solution: {err}", err=True)
        sys.exit(EXIT_NO_SOLUTION)
    for p in paths:
        click.echo(str(p))


@click.group()
def main():
    """Realistic sparse FFT experiments."""


@main.command()
@_common
def run(config_path, seed, out_dir):
    """Run whatever experiment the config's ``kind`` names."""
    _execute(config_path, seed, out_dir)


def _fixed(kind: str, help_text: str):
    @_common
    def cmd(config_path, seed, out_dir):
        _execute(config_path, seed, out_dir, kind=kind)

    cmd.__doc__ = help_text
    main.command(name=kind)(cmd)


_fixed("optimize", "Joint threshold design and the per-mu SNR table.")
_fixed("roc", "RSFT and Bartlett ROC curves.")
_fixed("complexity", "Operation counts over B and K, plus the SNR/complexity frontier.")
_fixed("freq-sweep", "Worst-case SNR across design frequencies.")
_fixed("variance-check", "Tightness of the count-variance bound over T.")
_fixed("bartlett", "Averaged periodogram spectrum and detections.")
_fixed("radar-sim", "Radar scene through RSFT and conventional 3-D processing.")


if __name__ == "__main__":
    main()
