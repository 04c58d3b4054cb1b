"""Window design: Dolph-Chebyshev pre-windows, flat windows and compound N-D windows.

Windows are stored peak-normalized. The detection pipeline works with the
unit-energy versions (see :func:`pipeline_pair`), so thresholds are expressed
relative to a noise floor of ``noise_var`` per cell.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.signal.windows import chebwin

BANDWIDTH_OVERSAMPLE = 32
PASSBAND_FRACTION = 0.9


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class WindowSpec:
    """A real symmetric taper with its measured 6-dB main-lobe width."""

    coeffs: np.ndarray
    attenuation_db: float
    eta_m: float

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def unit_energy(self) -> np.ndarray:
        return self.coeffs / np.linalg.norm(self.coeffs)


@dataclass(frozen=True)
class FlatWindowSpec:
    """Flat-passband window for a ``b``-bucket alias stage.

    ``coeffs`` is the real symmetric taper, whose passband is centred on DC and
    spans one bucket (``n // b`` bins). ``aligned()`` returns the complex
    window actually used by the pipeline: the same taper shifted so that
    bucket ``j`` collects permuted bins ``j*L .. j*L + L - 1``.
    """

    coeffs: np.ndarray
    b: int
    attenuation_db: float
    passband_ripple_db: float

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def bucket_len(self) -> int:
        return self.n // self.b

    def aligned(self) -> np.ndarray:
        t = np.arange(self.n)
        shift = np.exp(-1j * np.pi * (self.bucket_len - 1) * t / self.n)
        return self.coeffs * shift


def dolph_chebyshev(n: int, attenuation_db: float) -> WindowSpec:
    """Length-``n`` Dolph-Chebyshev window with equiripple sidelobes."""
    if n < 8:
        raise ValueError(f"window length must be >= 8, got {n}")
    if attenuation_db < 20:
        raise ValueError(f"attenuation must be >= 20 dB, got {attenuation_db}")
    with warnings.catch_warnings():
        # scipy warns below 45 dB about endpoint spikes; they are expected.
        warnings.simplefilter("ignore", UserWarning)
        w = chebwin(n, attenuation_db, sym=True)
    w = 0.5 * (w + w[::-1])
    w = w / w.max()
    return WindowSpec(w, float(attenuation_db), measure_6db_bandwidth(w))


def _coeffs(w) -> np.ndarray:
    return np.asarray(getattr(w, "coeffs", w))


def _response_db(w: np.ndarray, oversample: int) -> np.ndarray:
    h = np.abs(np.fft.fft(w, len(w) * oversample))
    with np.errstate(divide="ignore"):
        return 20 * np.log10(h / h.max())


def _crossing(db: np.ndarray, level: float) -> float:
    """Distance in grid points from index 0 to where ``db`` first drops below ``level``."""
    below = np.nonzero(db < level)[0]
    if len(below) == 0:
        raise ValueError("response never drops below the requested level")
    i = below[0]
    # linear interpolation in dB between the straddling grid points
    return (i - 1) + (db[i - 1] - level) / (db[i - 1] - db[i])


def measure_6db_bandwidth(w, oversample: int = BANDWIDTH_OVERSAMPLE) -> float:
    """6-dB main-lobe width of ``w`` in DFT bins.

    The response is evaluated on a grid ``oversample`` times finer than the
    bin spacing, and the two -6 dB crossings are located by linear
    interpolation on the dB curve.
    """
    if oversample < BANDWIDTH_OVERSAMPLE:
        raise ValueError(f"oversample must be >= {BANDWIDTH_OVERSAMPLE}")
    db = _response_db(_coeffs(w), oversample)
    right = _crossing(db, -6.0)
    left = _crossing(np.roll(db[::-1], 1), -6.0)
    return float((right + left) / oversample)


def sidelobe_level_db(w, oversample: int = 8) -> float:
    """Highest sidelobe relative to the main-lobe peak, in dB."""
    db = _response_db(_coeffs(w), oversample)
    half = len(db) // 2
    rising = np.nonzero(np.diff(db[:half]) > 0)[0]
    if len(rising) == 0:
        raise ValueError("no sidelobes found")
    first_null = rising[0]
    return float(db[first_null : len(db) - first_null + 1].max())


def flat_window(n: int, b: int, attenuation_db: float) -> FlatWindowSpec:
    """Flat window for ``b`` buckets.

    An ideal boxcar of width one bucket is convolved (circularly, on the unit
    circle) with the spectrum of a Dolph-Chebyshev prototype; in time this is
    the prototype multiplied by the matching sinc kernel.
    """
    if not _is_pow2(n) or not _is_pow2(b):
        raise ValueError(f"n and b must be powers of two, got n={n}, b={b}")
    if b > n:
        raise ValueError(f"bucket count {b} exceeds length {n}")
    proto = dolph_chebyshev(n, attenuation_db).coeffs
    x = np.arange(n) - (n - 1) / 2
    taper = proto * np.sinc(x / b)
    taper = taper / taper.max()
    ripple = passband_ripple_db(taper, n // b)
    return FlatWindowSpec(taper, b, float(attenuation_db), ripple)


def passband_ripple_db(taper: np.ndarray, bucket_len: int, oversample: int = 16) -> float:
    """Peak-to-trough variation (dB) over the central 90% of the passband."""
    db = _response_db(taper, oversample)
    edge = int(np.floor(PASSBAND_FRACTION * bucket_len / 2 * oversample))
    band = np.concatenate([db[: edge + 1], db[len(db) - edge :]])
    return float(band.max() - band.min())


WindowLike = Union[WindowSpec, FlatWindowSpec, np.ndarray, Sequence[float]]


def compound_window(per_dim: Sequence[WindowLike]) -> np.ndarray:
    """Separable N-D window: the outer product of the per-axis windows."""
    if len(per_dim) == 0:
        raise ValueError("need at least one axis")
    out = np.asarray(_coeffs(per_dim[0]))
    for w in per_dim[1:]:
        out = np.multiply.outer(out, _coeffs(w))
    return out


def pipeline_pair(pre: WindowSpec, flat: FlatWindowSpec) -> tuple[np.ndarray, np.ndarray]:
    """Unit-energy (pre-window, aligned flat window) arrays for one axis."""
    if pre.n != flat.n:
        raise ValueError(f"window lengths differ: {pre.n} vs {flat.n}")
    wbar = flat.aligned()
    return pre.unit_energy(), wbar / np.linalg.norm(wbar)


def design_pair(n: int, b: int, pre_db: float = 40.0, flat_db: float = 40.0):
    """Build the default per-axis windows and return ``(pre, flat)`` specs."""
    return dolph_chebyshev(n, pre_db), flat_window(n, b, flat_db)
