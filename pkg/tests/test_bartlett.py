import math

import numpy as np
import pytest
from scipy.stats import gamma as gamma_dist

from rsft.bartlett import (
    BartlettStats,
    bartlett_roc,
    bartlett_run,
    bartlett_snr_min,
    bartlett_spectrum,
    bartlett_stats,
    bartlett_threshold,
)
from rsft.optimizer import qinv
from rsft.windows import dolph_chebyshev


def test_stats_rectangular_on_grid():
    n = 64
    s = bartlett_stats(5 * 2 * np.pi / n, np.ones(n) / np.sqrt(n), 10)
    assert s.alpha_prime == pytest.approx(n)
    assert s.beta_prime == pytest.approx(1.0)
    with pytest.raises(ValueError):
        BartlettStats(0.0, 1.0, 5)


def test_off_grid_loses_gain():
    w = dolph_chebyshev(256, 40).unit_energy()
    on = bartlett_stats(10 * 2 * np.pi / 256, w, 10).alpha_prime
    off = bartlett_stats(10.5 * 2 * np.pi / 256, w, 10).alpha_prime
    assert off < on


def test_threshold_forms():
    assert bartlett_threshold(1e-6, 2.0, 25) == pytest.approx(2.0 * (1 + float(qinv(1e-6)) / 5))
    assert bartlett_threshold(1e-2, 1.0, 4, exact=True) == pytest.approx(gamma_dist.isf(1e-2, 4) / 4)
    with pytest.raises(ValueError):
        bartlett_threshold(0.0, 1.0, 4)


def test_exact_threshold_false_alarm_rate():
    rng = np.random.default_rng(0)
    t, trials, pfa = 4, 200_000, 1e-2
    cells = rng.exponential(1.0, size=(trials, t)).mean(axis=1)
    rate = np.mean(cells > bartlett_threshold(pfa, 1.0, t, exact=True))
    assert abs(rate - pfa) < 3 * math.sqrt(pfa * (1 - pfa) / trials)


def test_roc_hand_values():
    s = BartlettStats(10.0, 1.0, 50)
    # when SNR*alpha' equals beta' the statistic offsets cancel and P_d = P_fa
    assert bartlett_roc(0.1, s, 1e-3) == pytest.approx(1e-3, rel=1e-9)
    assert bartlett_roc(0.0, s, 1e-3) == 0.0
    pds = bartlett_roc(0.2, s, np.array([1e-6, 1e-3, 1e-1]))
    assert np.all(np.diff(pds) > 0)
    with pytest.raises(ValueError):
        bartlett_roc(0.1, s, 1.0)


def test_snr_min_inverts_roc():
    s = bartlett_stats(64.5 * 2 * np.pi / 1024, dolph_chebyshev(1024, 40).unit_energy(), 50)
    db = bartlett_snr_min(0.9, 1e-6, s)
    assert bartlett_roc(10 ** (db / 10), s, 1e-6) == pytest.approx(0.9, abs=1e-8)
    assert db < -20


def test_spectrum_averages_and_streams():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((3, 32)) + 0j
    w = np.ones(32)
    spec, t = bartlett_spectrum(iter(x), w)
    assert t == 3
    np.testing.assert_allclose(spec, np.mean(np.abs(np.fft.fft(x, axis=1)) ** 2, axis=0))
    with pytest.raises(ValueError):
        bartlett_spectrum([], w)
    with pytest.raises(ValueError):
        bartlett_spectrum([np.zeros(16)], w)


def test_nd_run_detects_tone_cell():
    w = np.ones((8, 16)) / np.sqrt(128)
    tone = 3 * np.exp(2j * np.pi * (2 * np.arange(8)[:, None] / 8 + 9 * np.arange(16)[None, :] / 16))
    _, dets = bartlett_run([tone, tone], w, threshold=10.0)
    assert dets == [(2, 9)]


def test_fluctuating_tone_detection_rate_matches_gamma_law():
    # averaged periodogram of a Swerling-I tone is Gamma(T) with mean SNR*alpha' + beta'
    n, t, trials, snr = 64, 5, 20_000, 0.05
    rng = np.random.default_rng(2)
    w = np.ones(n) / np.sqrt(n)
    k = 7
    amps = np.sqrt(snr / 2) * (rng.standard_normal((trials, t)) + 1j * rng.standard_normal((trials, t)))
    noise = (rng.standard_normal((trials, t, n)) + 1j * rng.standard_normal((trials, t, n))) / np.sqrt(2)
    x = amps[..., None] * np.exp(2j * np.pi * k * np.arange(n) / n) + noise
    cell = np.mean(np.abs(np.fft.fft(w * x, axis=-1)[..., k]) ** 2, axis=1)
    thr = bartlett_threshold(1e-2, 1.0, t, exact=True)
    m = snr * n + 1.0
    expected = gamma_dist.sf(thr * t / m, t)
    assert abs(np.mean(cell > thr) - expected) < 3 * math.sqrt(expected * (1 - expected) / trials)


def test_roc_below_pfa_when_signal_gain_under_noise_gain():
    # the closed form takes the H1 mean as SNR*alpha' alone; once that falls
    # under beta' the curve drops below the chance line
    s = BartlettStats(10.0, 1.0, 50)
    assert bartlett_roc(0.05, s, 1e-3) < 1e-3
