"""Experiment runners behind the CLI. Each returns named tables ready for CSV."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import complexity as cx
from .bartlett import bartlett_roc, bartlett_run, bartlett_snr_min, bartlett_stats, bartlett_threshold
from .config import ExperimentConfig
from .optimizer import (
    NoSolution,
    OperatingPoint,
    Infeasible,
    average_alpha_beta,
    optimize,
    rsft_roc,
    variance_gap,
)
from .pipeline import RsftConfig, rsft_run
from .radar import (
    RadarParams,
    conventional_threshold,
    conventional_window,
    cube_stream,
    design_rsft,
    process_conventional,
    process_rsft,
    score_reconstruction,
    scene_targets,
)
from .signal_model import SignalConfig, SinusoidSpec, gen_segments
from .windows import design_pair, dolph_chebyshev, pipeline_pair

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, tuple):
        return " ".join(str(int(x)) for x in v)
    return str(v)


def render_csv(table: Table, digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_sha256={digest}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_tables(tables: dict[str, Table], cfg: ExperimentConfig) -> list[Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    paths = []
    for name, table in tables.items():
        path = out / f"{name}.csv"
        path.write_text(render_csv(table, digest))
        paths.append(path)
    return paths


# -- helpers -------------------------------------------------------------------


def _windows(cfg: ExperimentConfig, n: int, b: int):
    return pipeline_pair(*design_pair(n, b, cfg.windows.pre_db, cfg.windows.flat_db))


def _eta_m(cfg: ExperimentConfig) -> float:
    d = cfg.design
    return d.eta_m if d.eta_m is not None else dolph_chebyshev(d.n, cfg.windows.pre_db).eta_m


def design_point(cfg: ExperimentConfig) -> OperatingPoint:
    d = cfg.design
    omega = (d.omega_bins % d.n) * TWO_PI / d.n
    return optimize(
        d.pd, d.pfa, d.n, d.b, d.t, d.k, _eta_m(cfg), d.eta_p, omega,
        _windows(cfg, d.n, d.b), d.noise_var, variance_bound=d.variance_bound,
    )


def _op_table(op: OperatingPoint) -> Table:
    return Table(
        ("snr_min_db", "gamma", "mu", "mu_over_t", "pfa_bar", "pd_bar", "eta_p", "feasible"),
        [(op.snr_min_db, op.gamma, op.mu, op.mu / op.t, op.pfa_bar, op.pd_bar, op.eta_p, op.feasible)],
    )


def _signal(cfg: ExperimentConfig) -> SignalConfig:
    s = cfg.signal
    sins = [SinusoidSpec.at_bin(e.bin, s.n, e.snr_db, s.noise_var or 1.0) for e in s.sinusoids]
    return SignalConfig(s.n, s.t, s.noise_var, tuple(sins), cfg.seed)


# -- experiments ---------------------------------------------------------------


def run_optimize(cfg: ExperimentConfig) -> dict[str, Table]:
    op = design_point(cfg)
    mu_table = Table(("mu", "snr_min_db", "pfa_bar", "pd_bar"), list(op.table))
    return {"operating_point": _op_table(op), "mu_table": mu_table}


def run_rsft(cfg: ExperimentConfig) -> dict[str, Table]:
    d = cfg.design
    gamma, mu = cfg.rsft.gamma, cfg.rsft.mu
    tables = {}
    if gamma is None or mu is None:
        op = design_point(cfg)
        tables["operating_point"] = _op_table(op)
        gamma = op.gamma if gamma is None else gamma
        mu = op.mu if mu is None else mu
    rcfg = RsftConfig.build((d.n,), (d.b,), d.t, gamma, mu, cfg.windows.pre_db, cfg.windows.flat_db, cfg.seed)
    report = rsft_run(gen_segments(_signal(cfg)), rcfg)
    tables["accumulator"] = Table(("index", "count", "fraction"), report.rows())
    tables["detections"] = Table(("index", "count"), [(k, report.accumulator[k]) for k in report.detections])
    tables["first_stage"] = Table(
        ("segment", "sigma", "marked"),
        [(s, int(report.sigmas[s, 0]), int(m)) for s, m in enumerate(report.marked_per_segment())],
    )
    return tables


def run_roc(cfg: ExperimentConfig) -> dict[str, Table]:
    d, r = cfg.design, cfg.roc
    rows = []
    eta_m = _eta_m(cfg)
    omega = (d.omega_bins % d.n) * TWO_PI / d.n
    for b in r.b_values:
        stats = average_alpha_beta(omega, _windows(cfg, d.n, b), d.n, b)
        for k in r.k_values:
            for eta_p in r.eta_p_values:
                for snr_db in r.snr_db_values:
                    try:
                        pds = rsft_roc(snr_db, r.pfa_values, d.t, k, eta_m, eta_p, b, stats)
                    except Infeasible:
                        continue
                    rows += [("rsft", b, k, str(eta_p), snr_db, pfa, pd) for pfa, pd in zip(r.pfa_values, pds)]
    if r.bartlett:
        w = dolph_chebyshev(d.n, cfg.windows.pre_db).unit_energy()
        bstats = bartlett_stats(omega, w, d.t)
        for snr_db in r.snr_db_values:
            pds = bartlett_roc(10 ** (snr_db / 10), bstats, np.array(r.pfa_values))
            rows += [("bartlett", d.n, "", "", snr_db, pfa, pd) for pfa, pd in zip(r.pfa_values, pds)]
    return {"roc": Table(("method", "b", "k", "eta_p", "snr_db", "pfa", "pd"), rows)}


def run_complexity(cfg: ExperimentConfig) -> dict[str, Table]:
    c = cfg.complexity
    rows = []
    bart_rows, bart_model = cx.complexity_bartlett(c.n, c.t), cx.complexity_bartlett_model(c.n, c.t)
    for k in c.k_values:
        for b in c.b_values:
            rows.append((
                k, b,
                cx.complexity_rsft(c.n, b, c.t, k, c.eta_m, c.eta_p),
                cx.complexity_rsft_model(c.n, b, c.t, k, c.eta_m, c.eta_p),
                bart_rows, bart_model, k * c.eta_m < b,
            ))
    tables = {"complexity": Table(
        ("k", "b", "rsft_ops", "rsft_model", "bartlett_ops", "bartlett_model", "feasible"), rows)}
    if c.frontier:
        tables["frontier"] = _frontier(cfg)
    return tables


def _frontier(cfg: ExperimentConfig) -> Table:
    c, d = cfg.complexity, cfg.design
    omega = c.frontier_omega_bins * TWO_PI / c.n
    rows = []
    for b in c.b_values:
        windows = _windows(cfg, c.n, b)
        stats = average_alpha_beta(omega, windows, c.n, b)
        for k in c.k_values:
            try:
                op = optimize(d.pd, d.pfa, c.n, b, c.t, k, c.eta_m, c.eta_p, omega, stats=stats)
            except (Infeasible, NoSolution):
                continue
            rows.append(("rsft", k, b, cx.complexity_rsft_model(c.n, b, c.t, k, c.eta_m, c.eta_p), op.snr_min_db))
    w = dolph_chebyshev(c.n, cfg.windows.pre_db).unit_energy()
    snr_b = bartlett_snr_min(d.pd, d.pfa, bartlett_stats(omega, w, c.t))
    rows.append(("bartlett", "", c.n, cx.complexity_bartlett_model(c.n, c.t), snr_b))
    return Table(("method", "k", "b", "complexity", "snr_min_db"), rows)


def run_freq_sweep(cfg: ExperimentConfig) -> dict[str, Table]:
    d, s = cfg.design, cfg.sweep
    windows = _windows(cfg, d.n, d.b)
    rows = []
    for bins in np.linspace(s.start_bins, s.stop_bins, s.points):
        omega = (bins % d.n) * TWO_PI / d.n
        op = optimize(d.pd, d.pfa, d.n, d.b, d.t, d.k, _eta_m(cfg), d.eta_p, omega, windows,
                      d.noise_var, variance_bound=d.variance_bound)
        rows.append((float(bins), op.snr_min_db, op.gamma, op.mu))
    return {"freq_sweep": Table(("omega_bins", "snr_min_db", "gamma", "mu"), rows)}


def run_variance_check(cfg: ExperimentConfig) -> dict[str, Table]:
    d, v = cfg.design, cfg.variance
    op = design_point(cfg)
    omega = (d.omega_bins % d.n) * TWO_PI / d.n
    stats = average_alpha_beta(omega, _windows(cfg, d.n, d.b), d.n, d.b)
    rows = []
    for t in v.t_values:
        gaps = variance_gap(stats, op.gamma / d.noise_var, op.snr_min, t, v.runs, cfg.seed)
        rows.append((t, float(gaps.mean()), float(gaps.std()), float(gaps.min()), float(gaps.max())))
    return {"variance_gap": Table(("t", "mean_gap", "std_gap", "min_gap", "max_gap"), rows)}


def run_bartlett(cfg: ExperimentConfig) -> dict[str, Table]:
    s = cfg.signal
    w = dolph_chebyshev(s.n, cfg.windows.pre_db).unit_energy()
    thr = bartlett_threshold(cfg.bartlett.pfa, float(np.sum(w**2)), s.t, s.noise_var or 1.0)
    spectrum, dets = bartlett_run(gen_segments(_signal(cfg)), w, thr)
    return {
        "spectrum": Table(("bin", "value", "threshold"), [(k, float(v), thr) for k, v in enumerate(spectrum)]),
        "detections": Table(("index",), [(d,) for d in dets]),
    }


def run_radar(cfg: ExperimentConfig) -> dict[str, Table]:
    r = cfg.radar
    params = RadarParams() if r.scale == "full" else RadarParams.desk()
    targets = scene_targets(r.snr_db)
    rcfg, op = design_rsft(params, r.reduced_dims(), r.t, r.k, r.pd, r.pfa,
                           cfg.windows.pre_db, cfg.seed, r.design_snr_db, r.tail)
    report = process_rsft(cube_stream(params, targets, r.t, cfg.seed), rcfg)
    score = score_reconstruction(report.detections, targets, params)
    tables = {
        "operating_point": _op_table(op),
        "detections_rsft": Table(
            ("range_bin", "angle_bin", "doppler_bin", "count"),
            [(*k, report.accumulator[k]) for k in report.detections],
        ),
    }
    score_rows = [("rsft", i, hit, score.n_false) for i, hit in enumerate(score.hits)]
    if r.conventional:
        win = conventional_window(params, cfg.windows.pre_db)
        thr = conventional_threshold(win, r.t, r.pfa)
        power, dets = process_conventional(cube_stream(params, targets, r.t, cfg.seed), win, thr)
        tables["detections_conventional"] = Table(
            ("range_bin", "angle_bin", "doppler_bin", "power"), [(*k, float(power[k])) for k in dets]
        )
        cscore = score_reconstruction(dets, targets, params)
        score_rows += [("conventional", i, hit, cscore.n_false) for i, hit in enumerate(cscore.hits)]
    tables["score"] = Table(("method", "target", "hit", "false_detections"), score_rows)
    return tables


RUNNERS = {
    "rsft-run": run_rsft,
    "optimize": run_optimize,
    "roc": run_roc,
    "complexity": run_complexity,
    "freq-sweep": run_freq_sweep,
    "variance-check": run_variance_check,
    "bartlett": run_bartlett,
    "radar-sim": run_radar,
}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run the configured experiment and write its CSVs; returns the paths."""
    tables = RUNNERS[cfg.kind](cfg)
    return write_tables(tables, cfg)
