"""Constant-velocity Kalman filter over bounding-box state.

State is the 8-vector (cx, cy, aspect, height, and their velocities);
measurements are the 4-vector bbox observation. Process and measurement
noise scale with box height, so uncertainty tracks apparent target size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from caris.errors import SingularInnovation

STATE_DIM = 8
MEAS_DIM = 4


@dataclass(frozen=True)
class KalmanParams:
    std_weight_position: float = 1.0 / 20
    std_weight_velocity: float = 1.0 / 160


DEFAULT_PARAMS = KalmanParams()


def _measurement_matrix() -> np.ndarray:
    return np.eye(MEAS_DIM, STATE_DIM)


def _transition_matrix(dt: float) -> np.ndarray:
    f = np.eye(STATE_DIM)
    for i in range(MEAS_DIM):
        f[i, MEAS_DIM + i] = dt
    return f


def _process_noise(height: float, p: KalmanParams) -> np.ndarray:
    wp, wv = p.std_weight_position, p.std_weight_velocity
    std = [wp * height, wp * height, 1e-2, wp * height,
           wv * height, wv * height, 1e-5, wv * height]
    return np.diag(np.square(std))


def measurement_noise(height: float, p: KalmanParams = DEFAULT_PARAMS) -> np.ndarray:
    wp = p.std_weight_position
    std = [wp * height, wp * height, 1e-1, wp * height]
    return np.diag(np.square(std))


def initiate(measurement: np.ndarray, p: KalmanParams = DEFAULT_PARAMS) -> tuple[np.ndarray, np.ndarray]:
    """Create (mean, covariance) from a first (cx, cy, aspect, h) observation."""
    mean = np.zeros(STATE_DIM)
    mean[:MEAS_DIM] = measurement
    h = measurement[3]
    wp, wv = p.std_weight_position, p.std_weight_velocity
    std = [2 * wp * h, 2 * wp * h, 1e-2, 2 * wp * h,
           10 * wv * h, 10 * wv * h, 1e-5, 10 * wv * h]
    return mean, np.diag(np.square(std))


def kf_predict(
    mean: np.ndarray, cov: np.ndarray, dt: float, p: KalmanParams = DEFAULT_PARAMS
) -> tuple[np.ndarray, np.ndarray]:
    """Time update: mean <- F mean, cov <- F cov F' + Q."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    f = _transition_matrix(dt)
    q = _process_noise(mean[3], p)
    mean = f @ mean
    cov = f @ cov @ f.T + q
    return mean, 0.5 * (cov + cov.T)


def _innovation_cov(cov: np.ndarray, r: np.ndarray) -> np.ndarray:
    h = _measurement_matrix()
    return h @ cov @ h.T + r


def kf_update(
    mean: np.ndarray,
    cov: np.ndarray,
    measurement: np.ndarray,
    p: KalmanParams = DEFAULT_PARAMS,
    r: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Measurement update; raises SingularInnovation on a degenerate gate."""
    h = _measurement_matrix()
    if r is None:
        r = measurement_noise(mean[3], p)
    s = _innovation_cov(cov, r)
    try:
        s_chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as e:
        raise SingularInnovation("innovation covariance is not positive definite") from e
    # K = P H' S^-1 via two triangular solves
    pht = cov @ h.T
    k = np.linalg.solve(s_chol.T, np.linalg.solve(s_chol, pht.T)).T
    innovation = measurement - h @ mean
    new_mean = mean + k @ innovation
    # Joseph form keeps the covariance symmetric PSD under roundoff.
    ikh = np.eye(STATE_DIM) - k @ h
    new_cov = ikh @ cov @ ikh.T + k @ r @ k.T
    return new_mean, 0.5 * (new_cov + new_cov.T)


def gating_distance(
    mean: np.ndarray,
    cov: np.ndarray,
    measurement: np.ndarray,
    p: KalmanParams = DEFAULT_PARAMS,
) -> float:
    """Squared Mahalanobis distance of a bbox under the projected state."""
    h = _measurement_matrix()
    s = _innovation_cov(cov, measurement_noise(mean[3], p))
    try:
        s_chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as e:
        raise SingularInnovation("innovation covariance is not positive definite") from e
    y = measurement - h @ mean
    z = np.linalg.solve(s_chol, y)
    return float(z @ z)
