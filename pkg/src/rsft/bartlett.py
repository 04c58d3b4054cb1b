"""Windowed averaged periodogram with a Neyman-Pearson threshold, in any dimension."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.stats import gamma as gamma_dist

from .optimizer import qfunc, qinv
from .sft_core import nearest_bin


@dataclass(frozen=True)
class BartlettStats:
    alpha_prime: float
    beta_prime: float
    t: int

    def __post_init__(self):
        if not (self.alpha_prime > 0 and self.beta_prime > 0):
            raise ValueError("alpha_prime and beta_prime must be positive")


def bartlett_stats(omega: float, window: np.ndarray, t: int) -> BartlettStats:
    """Peak-bin signal gain and noise gain of a 1-D window."""
    w = np.asarray(window)
    n = len(w)
    k = nearest_bin(omega, n)
    steer = np.exp(1j * omega * np.arange(n))
    proj = np.sum(w * steer * np.exp(-2j * np.pi * k * np.arange(n) / n))
    return BartlettStats(float(abs(proj) ** 2), float(np.sum(np.abs(w) ** 2)), t)


def bartlett_spectrum(segments: Iterable[np.ndarray], window: np.ndarray) -> tuple[np.ndarray, int]:
    """Average of ``|FFT(w * r_s)|^2`` over segments; returns ``(spectrum, T)``."""
    w = np.asarray(window)
    total = np.zeros(w.shape)
    count = 0
    for seg in segments:
        seg = np.asarray(seg)
        if seg.shape != w.shape:
            raise ValueError(f"segment shape {seg.shape} does not match window {w.shape}")
        spec = np.fft.fftn(w * seg)
        total += spec.real**2 + spec.imag**2
        count += 1
    if count == 0:
        raise ValueError("need at least one segment")
    return total / count, count


def bartlett_run(segments, window, threshold: float):
    """``(spectrum, detections)``; detections are sorted index tuples above ``threshold``."""
    spectrum, _ = bartlett_spectrum(segments, window)
    detections = [tuple(int(v) for v in row) for row in np.argwhere(spectrum > threshold)]
    return spectrum, detections


def bartlett_threshold(pfa: float, beta_prime: float, t: int, noise_var: float = 1.0, exact: bool = False) -> float:
    """Per-cell threshold on the averaged noise power.

    Default is the Normal approximation. ``exact`` uses the Gamma(T) law the
    average of T exponential cells actually follows, which matters at small T.
    """
    if not 0 < pfa < 1:
        raise ValueError("pfa must lie in (0, 1)")
    if exact:
        return noise_var * beta_prime / t * float(gamma_dist.isf(pfa, t))
    return noise_var * beta_prime * (1 + float(qinv(pfa)) / math.sqrt(t))


def bartlett_roc(snr: float, stats: BartlettStats, pfa):
    """Detection probability at linear SNR ``snr`` (Normal approximation, large ``T``)."""
    pfa = np.asarray(pfa, dtype=float)
    if np.any((pfa <= 0) | (pfa >= 1)):
        raise ValueError("pfa must lie in (0, 1)")
    if snr <= 0:
        return 0.0 if pfa.ndim == 0 else np.zeros_like(pfa)
    sa = snr * stats.alpha_prime
    b = stats.beta_prime
    arg = (b * qinv(pfa) + math.sqrt(stats.t) * (b - sa)) / sa
    out = qfunc(arg)
    return float(out) if out.ndim == 0 else out


def bartlett_snr_min(pd: float, pfa: float, stats: BartlettStats) -> float:
    """Smallest SNR (dB) reaching ``pd`` at ``pfa``."""
    return brentq(lambda db: bartlett_roc(10 ** (db / 10), stats, pfa) - pd, -80.0, 40.0, xtol=1e-10)
