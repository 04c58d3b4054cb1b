import numpy as np
import pytest

from rsft.signal_model import (
    SignalConfig,
    SinusoidSpec,
    complex_gaussian,
    gen_segment,
    gen_segments,
    segment_rng,
    steering_vector,
)

N = 256


def test_at_bin_sets_frequency_and_power():
    s = SinusoidSpec.at_bin(64.5, 1024, -10.0, noise_var=2.0)
    assert s.omega == pytest.approx(64.5 * 2 * np.pi / 1024)
    assert s.amp_var == pytest.approx(0.2)
    assert SinusoidSpec.at_bin(-1, 8, 0).omega == pytest.approx(7 * 2 * np.pi / 8)


@pytest.mark.parametrize("kw", [dict(omega=-0.1, amp_var=1), dict(omega=7.0, amp_var=1), dict(omega=1.0, amp_var=-1)])
def test_sinusoid_validation(kw):
    with pytest.raises(ValueError):
        SinusoidSpec(**kw)


@pytest.mark.parametrize("kw", [dict(n=100, t=1, noise_var=1), dict(n=64, t=0, noise_var=1),
                                dict(n=64, t=1, noise_var=-1), dict(n=64, t=1, noise_var=0)])
def test_signal_config_validation(kw):
    with pytest.raises(ValueError):
        SignalConfig(**kw)


def test_noise_free_signal_allowed_with_sinusoids():
    cfg = SignalConfig(64, 2, 0.0, (SinusoidSpec.at_bin(3, 64, 0),))
    x = gen_segment(cfg, 0)
    # a single tone: constant modulus
    assert np.ptp(np.abs(x)) < 1e-12


def test_complex_gaussian_moments():
    z = complex_gaussian(np.random.default_rng(0), 3.0, 200_000)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(3.0, rel=0.02)
    assert abs(np.mean(z**2)) < 0.03  # circular
    assert np.var(z.real) == pytest.approx(1.5, rel=0.02)


def test_per_bin_snr():
    cfg = SignalConfig(N, 4000, 1.0, (SinusoidSpec.at_bin(10, N, -3.0),), seed=7)
    x = gen_segments(cfg)
    # project onto the tone: |v^H x|^2 / n has mean n*snr + 1
    proj = np.abs(x @ steering_vector(cfg.sinusoids[0].omega, N).conj()) ** 2 / N
    assert proj.mean() == pytest.approx(N * 10 ** -0.3 + 1, rel=0.05)


def test_segments_reproducible_and_independent():
    cfg = SignalConfig(N, 3, 1.0, (SinusoidSpec.at_bin(5, N, 0),), seed=11)
    a, b = gen_segments(cfg), gen_segments(cfg)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a[2], gen_segment(cfg, 2))
    assert not np.allclose(a[0], a[1])
    with pytest.raises(IndexError):
        gen_segment(cfg, 3)


def test_segment_rng_streams_differ():
    assert segment_rng(0, 0).random() != segment_rng(0, 1).random()
    assert segment_rng(0, 1).random() == segment_rng(0, 1).random()


def test_resolvability_warning():
    close = SignalConfig(N, 1, 1.0, (SinusoidSpec.at_bin(10, N, 0), SinusoidSpec.at_bin(11, N, 0)))
    with pytest.warns(UserWarning):
        assert not close.check_resolvable(1.8)
    far = SignalConfig(N, 1, 1.0, (SinusoidSpec.at_bin(10, N, 0), SinusoidSpec.at_bin(200, N, 0)))
    assert far.check_resolvable(1.8)
    assert far.min_spacing() == pytest.approx(66 * 2 * np.pi / N)
