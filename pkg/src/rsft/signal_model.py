"""Segmented multi-sinusoid signal model.

Each segment ``s`` holds ``x_s = sum_k b_{k,s} v(omega_k) + noise`` where the
amplitudes are circular complex Gaussian, redrawn per segment, and the noise
is white circular complex Gaussian. Segment ``s`` is generated from its own
random stream derived from ``(seed, s)``, so any segment can be rebuilt alone.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * np.pi


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class SinusoidSpec:
    omega: float
    amp_var: float

    def __post_init__(self):
        if not 0 <= self.omega < TWO_PI:
            raise ValueError(f"omega must lie in [0, 2pi), got {self.omega}")
        if self.amp_var < 0:
            raise ValueError(f"amp_var must be >= 0, got {self.amp_var}")

    @classmethod
    def at_bin(cls, bins: float, n: int, snr_db: float, noise_var: float = 1.0) -> "SinusoidSpec":
        """Sinusoid at fractional DFT bin ``bins`` with per-sample SNR ``snr_db``."""
        omega = (bins % n) * TWO_PI / n
        return cls(omega, noise_var * 10 ** (snr_db / 10))


@dataclass(frozen=True)
class SignalConfig:
    n: int
    t: int
    noise_var: float
    sinusoids: tuple[SinusoidSpec, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sinusoids", tuple(self.sinusoids))
        if not _is_pow2(self.n):
            raise ValueError(f"n must be a power of two, got {self.n}")
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.noise_var < 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        if self.noise_var == 0 and not self.sinusoids:
            raise ValueError("noise_var must be > 0 when there are no sinusoids")
        if len(self.sinusoids) >= self.n:
            raise ValueError(f"need fewer than n={self.n} sinusoids")

    @property
    def k(self) -> int:
        return len(self.sinusoids)

    def min_spacing(self) -> float:
        """Smallest circular distance between two sinusoid frequencies (rad)."""
        om = np.sort([s.omega for s in self.sinusoids])
        if len(om) < 2:
            return math.inf
        gaps = np.diff(np.append(om, om[0] + TWO_PI))
        return float(gaps.min())

    def check_resolvable(self, eta_m: float) -> bool:
        """Warn (and return False) if two frequencies share a main lobe."""
        ok = self.min_spacing() >= eta_m * TWO_PI / self.n
        if not ok:
            warnings.warn(
                f"sinusoids closer than {eta_m} bins; main lobes overlap",
                stacklevel=2,
            )
        return ok


def steering_vector(omega: float, n: int) -> np.ndarray:
    return np.exp(1j * (omega % TWO_PI) * np.arange(n))


def segment_rng(seed: int, s: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(s,)))


def complex_gaussian(rng: np.random.Generator, var, size) -> np.ndarray:
    """Circular complex Gaussian samples with ``E|z|^2 = var``."""
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return np.sqrt(np.asarray(var) / 2) * z


def _steering_matrix(config: SignalConfig) -> np.ndarray:
    if not config.sinusoids:
        return np.zeros((config.n, 0), dtype=complex)
    return np.stack([steering_vector(s.omega, config.n) for s in config.sinusoids], axis=1)


def gen_segment(config: SignalConfig, s: int, rng: np.random.Generator | None = None) -> np.ndarray:
    if not 0 <= s < config.t:
        raise IndexError(f"segment {s} outside [0, {config.t})")
    return _draw(config, _steering_matrix(config), rng or segment_rng(config.seed, s))


def _draw(config: SignalConfig, steer: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    amp_var = np.array([sp.amp_var for sp in config.sinusoids])
    amps = complex_gaussian(rng, amp_var, config.k)
    noise = complex_gaussian(rng, config.noise_var, config.n)
    return steer @ amps + noise


def gen_segments(config: SignalConfig) -> np.ndarray:
    """All ``t`` segments as a ``(t, n)`` array."""
    steer = _steering_matrix(config)
    return np.stack([_draw(config, steer, segment_rng(config.seed, s)) for s in range(config.t)])
