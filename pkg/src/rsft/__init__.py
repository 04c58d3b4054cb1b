"""Realistic sparse FFT: two-stage Neyman-Pearson detection on a reduced grid."""

from .bartlett import BartlettStats, bartlett_roc, bartlett_run, bartlett_stats, bartlett_threshold
from .optimizer import (
    Infeasible,
    NoSolution,
    OperatingPoint,
    SecondStageDists,
    StageOneStats,
    average_alpha_beta,
    compute_alpha_beta,
    optimize,
    stage1_roc,
    stage2_dists,
)
from .pipeline import DetectionReport, RsftConfig, accumulate, first_stage, rsft_run, second_stage
from .sft_core import AliasShape, NonInvertible, PermutationParam, alias, map_index, mod_inverse, permute, reverse_map
from .signal_model import SignalConfig, SinusoidSpec, gen_segment, gen_segments, steering_vector
from .windows import FlatWindowSpec, WindowSpec, compound_window, dolph_chebyshev, flat_window, measure_6db_bandwidth

__version__ = "0.1.0"

__all__ = [
    "AliasShape",
    "BartlettStats",
    "DetectionReport",
    "FlatWindowSpec",
    "Infeasible",
    "NoSolution",
    "NonInvertible",
    "OperatingPoint",
    "PermutationParam",
    "RsftConfig",
    "SecondStageDists",
    "SignalConfig",
    "SinusoidSpec",
    "StageOneStats",
    "WindowSpec",
    "accumulate",
    "alias",
    "average_alpha_beta",
    "bartlett_roc",
    "bartlett_run",
    "bartlett_stats",
    "bartlett_threshold",
    "compound_window",
    "compute_alpha_beta",
    "dolph_chebyshev",
    "first_stage",
    "flat_window",
    "gen_segment",
    "gen_segments",
    "map_index",
    "measure_6db_bandwidth",
    "mod_inverse",
    "optimize",
    "permute",
    "reverse_map",
    "rsft_run",
    "second_stage",
    "stage1_roc",
    "stage2_dists",
    "steering_vector",
]
