import numpy as np
import pytest

from caris.errors import SingularInnovation
from caris.tracking.kalman import (
    STATE_DIM,
    gating_distance,
    initiate,
    kf_predict,
    kf_update,
    measurement_noise,
)


def random_psd(rng, dim=STATE_DIM, scale=1.0):
    a = rng.normal(size=(dim, dim)) * scale
    return a @ a.T + 1e-6 * np.eye(dim)


def test_zero_velocity_predict_keeps_position_and_grows_diag_by_q():
    mean, _ = initiate(np.array([10.0, 20.0, 0.5, 40.0]))
    cov = np.diag([1.0, 1.0, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0])  # no velocity uncertainty
    new_mean, new_cov = kf_predict(mean, cov, dt=1.0)
    assert np.allclose(new_mean[:4], mean[:4])
    # with zero velocity variance, F P F' has the same diagonal, so growth is Q's diagonal
    growth = np.diag(new_cov) - np.diag(cov)
    h = mean[3]
    expected = np.square([h / 20, h / 20, 1e-2, h / 20, h / 160, h / 160, 1e-5, h / 160])
    assert np.allclose(growth, expected)


def test_linear_motion_prediction():
    mean = np.array([0.0, 0.0, 1.0, 10.0, 5.0, 0.0, 0.0, 0.0])
    cov = np.eye(STATE_DIM)
    new_mean, _ = kf_predict(mean, cov, dt=1.0)
    assert new_mean[0] == pytest.approx(5.0)
    assert new_mean[1] == pytest.approx(0.0)


def test_predict_preserves_symmetric_psd_on_random_covariances():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        mean, _ = initiate(np.array([0.0, 0.0, 1.0, rng.uniform(5, 200)]))
        cov = random_psd(rng, scale=rng.uniform(0.1, 10))
        _, new_cov = kf_predict(mean, cov, dt=rng.uniform(0.1, 2.0))
        assert np.allclose(new_cov, new_cov.T)
        assert np.linalg.eigvalsh(new_cov).min() >= -1e-9


def test_zero_innovation_update_keeps_position():
    z = np.array([50.0, 60.0, 0.5, 80.0])
    mean, cov = initiate(z)
    new_mean, _ = kf_update(mean, cov, z)
    assert np.allclose(new_mean[:4], z, atol=1e-9)


def test_update_limits_huge_and_tiny_measurement_noise():
    z0 = np.array([50.0, 60.0, 0.5, 80.0])
    mean, cov = initiate(z0)
    mean, cov = kf_predict(mean, cov, 1.0)
    z = np.array([55.0, 58.0, 0.52, 82.0])
    base_r = measurement_noise(mean[3])
    # R huge: posterior stays at the prior
    big_mean, _ = kf_update(mean, cov, z, r=base_r * 1e6)
    assert np.allclose(big_mean[:4], mean[:4], atol=1e-3 * np.abs(mean[:4]).max())
    # R tiny: posterior lands on the measurement
    small_mean, _ = kf_update(mean, cov, z, r=base_r * 1e-6)
    assert np.allclose(small_mean[:4], z, atol=1e-3)


def test_update_never_increases_trace():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        mean, _ = initiate(np.array([0.0, 0.0, 1.0, rng.uniform(10, 100)]))
        cov = random_psd(rng, scale=rng.uniform(0.5, 5))
        z = mean[:4] + rng.normal(size=4)
        _, new_cov = kf_update(mean, cov, z)
        assert np.trace(new_cov) <= np.trace(cov) + 1e-9
        assert np.allclose(new_cov, new_cov.T)
        assert np.linalg.eigvalsh(new_cov).min() >= -1e-9


def test_singular_innovation_detected():
    mean, cov = initiate(np.array([0.0, 0.0, 1.0, 10.0]))
    bad_cov = np.zeros((STATE_DIM, STATE_DIM))
    with pytest.raises(SingularInnovation):
        kf_update(mean, bad_cov, np.zeros(4), r=np.zeros((4, 4)))


def test_gating_distance_zero_at_prediction():
    mean, cov = initiate(np.array([10.0, 10.0, 0.4, 30.0]))
    assert gating_distance(mean, cov, mean[:4]) == pytest.approx(0.0, abs=1e-12)


def test_gating_distance_grows_with_offset():
    mean, cov = initiate(np.array([10.0, 10.0, 0.4, 30.0]))
    near = gating_distance(mean, cov, mean[:4] + np.array([1.0, 0, 0, 0]))
    far = gating_distance(mean, cov, mean[:4] + np.array([50.0, 0, 0, 0]))
    assert far > near > 0.0
