import numpy as np
import pytest

from rsft.radar import (
    RadarParams,
    Target,
    conventional_threshold,
    conventional_window,
    cube_stream,
    dechirped_cube,
    design_rsft,
    peak_count_detect,
    score_reconstruction,
    scene_targets,
    target_to_freqs,
    true_bins,
)

FULL = RadarParams()
DESK = RadarParams.desk()


def test_target_frequencies():
    f_r, f_d, spatial = target_to_freqs(Target(1000.0, 100.0, 30.0, 0.0), FULL)
    assert f_r == pytest.approx(20e6)
    assert f_d == pytest.approx(6666.6667, rel=1e-6)
    assert spatial == pytest.approx(np.pi / 2)


def test_velocity_limit_and_doppler_bins():
    assert FULL.v_max == pytest.approx(300.0)
    # Doppler bin = f_d * t_p * M
    assert true_bins(Target(1000.0, 100.0, 0.0, 0.0), FULL)[2] == pytest.approx(6666.6667 * 5e-5 * 32, rel=1e-6)


@pytest.mark.parametrize("kw", [dict(doa_deg=90.0), dict(velocity_mps=301.0), dict(range_m=-1.0)])
def test_target_validation(kw):
    args = dict(range_m=100.0, velocity_mps=0.0, doa_deg=0.0, snr_db=0.0) | kw
    with pytest.raises(ValueError):
        Target(**args)


def test_params_validation():
    with pytest.raises(ValueError):
        RadarParams(chirp_rate=1e12)
    with pytest.raises(ValueError):
        RadarParams(f_s=10e6)


def test_range_ambiguity_rejected():
    with pytest.raises(ValueError):
        dechirped_cube(DESK, [Target(1600.0, 0.0, 0.0, 0.0)], 0)


@pytest.mark.parametrize("tgt", scene_targets((30.0,) * 4))
def test_noise_free_cube_peaks_at_true_bin(tgt):
    cube = dechirped_cube(DESK, [tgt], 0, seed=3, noise_var=0.0)
    power = np.abs(np.fft.fftn(cube)) ** 2
    peak = np.array(np.unravel_index(np.argmax(power), power.shape))
    d = np.abs(peak - true_bins(tgt, DESK))
    d = np.minimum(d, np.array(DESK.dims) - d)
    assert np.all(d <= 0.5 + 1e-9)


def test_bursts_reproducible_and_swerling():
    a = list(cube_stream(DESK, scene_targets(), 2, seed=4))
    b = list(cube_stream(DESK, scene_targets(), 2, seed=4))
    np.testing.assert_array_equal(a[1], b[1])
    assert not np.allclose(a[0], a[1])


def test_score_examples():
    tgts = scene_targets()
    grid = [tuple(int(v) for v in np.mod(np.round(true_bins(t, DESK)), DESK.dims)) for t in tgts]
    s = score_reconstruction(grid, tgts, DESK)
    assert s.all_hit and s.n_false == 0
    far = (grid[0][0] + 40, grid[0][1], grid[0][2])
    s = score_reconstruction(grid[:3] + [far], tgts, DESK)
    assert s.hits[:3] == (True, True, True)
    assert s.n_false == 1 and s.false_detections == (far,)
    assert not score_reconstruction([], tgts, DESK).all_hit


def test_conventional_threshold_exact_above_normal_at_small_t():
    w = conventional_window(DESK)
    assert np.sum(w**2) == pytest.approx(1.0)
    assert conventional_threshold(w, 10) > conventional_threshold(w, 10, exact=False)


def test_design_rsft_shapes():
    cfg, op = design_rsft(DESK, (64, 8, 4), 10, snr_db=-10.0)
    assert cfg.dims == DESK.dims and cfg.reduced == (64, 8, 4)
    assert 1 <= op.mu <= 10 and op.gamma > 0
    assert (cfg.gamma, cfg.mu) == (op.gamma, op.mu)


def test_peak_count_detect():
    class Rep:
        accumulator = {(1, 0, 0): 3, (2, 0, 0): 5, (0, 0, 0): 5}

    assert peak_count_detect(Rep(), 2) == [(0, 0, 0), (2, 0, 0)]
