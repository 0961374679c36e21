"""Space-time signal model: steering vectors, crabbed clutter ridge, covariance.

Steering vectors are temporal-major: entry ``m * N + n`` (pulse ``m``,
element ``n``) is ``exp(2j*pi*(m*omega + n*theta))`` where ``theta`` is the
spatial frequency in cycles/element and ``omega`` the Doppler in cycles/pulse.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCovarianceError, ValidationError

# sub-stream tags for np.random.default_rng([seed, tag])
STREAM_CLUTTER = 1
STREAM_SNAPSHOTS = 2


class Hypothesis(str, enum.Enum):
    H0 = "H0"
    H1 = "H1"


def steering_vector(spatial_freq, norm_doppler, num_elements, num_pulses):
    n = np.arange(num_elements)
    m = np.arange(num_pulses)
    phase = m[:, None] * norm_doppler + n[None, :] * spatial_freq
    return np.exp(2j * np.pi * phase).ravel()


def steering_matrix(spatial_freqs, norm_dopplers, num_elements, num_pulses):
    """Column ``k`` is ``steering_vector(spatial_freqs[k], norm_dopplers[k], ...)``."""
    spatial_freqs = np.atleast_1d(np.asarray(spatial_freqs, dtype=float))
    norm_dopplers = np.atleast_1d(np.asarray(norm_dopplers, dtype=float))
    spatial = np.exp(2j * np.pi * np.arange(num_elements)[:, None] * spatial_freqs)
    temporal = np.exp(2j * np.pi * np.arange(num_pulses)[:, None] * norm_dopplers)
    out = temporal[:, None, :] * spatial[None, :, :]
    return out.reshape(num_pulses * num_elements, -1)


@dataclass(frozen=True)
class ClutterRidge:
    """Clutter patches on one iso-range ring, stored column-wise."""

    azimuth: np.ndarray
    spatial_freq: np.ndarray
    doppler: np.ndarray
    power: np.ndarray

    def __len__(self):
        return len(self.azimuth)


def clutter_ridge(config, rng=None):
    """Place ``num_clutter_patches`` patches around the ring.

    Azimuth is measured from the array axis; the patch at azimuth ``phi``
    has spatial frequency ``(d/lambda) cos(phi)`` and Doppler
    ``(2v/lambda) cos(phi - crab)``. Patches behind the array face
    (``sin(phi) < 0``) are scaled by the backlobe gain. With
    ``clutter_fluctuation`` the ring gets a random azimuth offset and each
    patch a Rayleigh amplitude; the total power is always
    ``cnr_linear * noise_power``.
    """
    k = config.num_clutter_patches
    step = 2 * np.pi / k
    if config.clutter_fluctuation:
        if rng is None:
            rng = np.random.default_rng([config.rng_seed, STREAM_CLUTTER])
        offset = rng.uniform(0.0, step)
        amp = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2)
        power = np.abs(amp) ** 2
    else:
        offset = 0.0
        power = np.ones(k)
    azimuth = np.mod(np.arange(k) * step + offset, 2 * np.pi)
    spatial = config.spacing / config.wavelength * np.cos(azimuth)
    doppler = config.max_clutter_doppler * np.cos(azimuth - config.crab_angle)
    power = np.where(np.sin(azimuth) < 0, power * config.backlobe_gain, power)
    total = power.sum()
    if total > 0:
        power = power * (config.cnr_linear * config.noise_power / total)
    return ClutterRidge(azimuth, spatial, doppler, power)


@dataclass(frozen=True)
class SpaceTimeCovariance:
    matrix: np.ndarray
    clutter: np.ndarray
    noise: np.ndarray
    target: np.ndarray | None
    hypothesis: Hypothesis

    @property
    def size(self):
        return self.matrix.shape[0]


def clutter_covariance(config, ridge):
    V = steering_matrix(ridge.spatial_freq, ridge.doppler / config.prf_hz,
                        config.num_elements, config.num_pulses)
    Kc = (V * ridge.power) @ V.conj().T
    return (Kc + Kc.conj().T) / 2


def covariance(config, hypothesis=None, ridge=None):
    """K = K_c + K_n (+ K_t under H1)."""
    if hypothesis is None:
        hypothesis = Hypothesis.H1 if config.target_present else Hypothesis.H0
    hypothesis = Hypothesis(hypothesis)
    if ridge is None:
        ridge = clutter_ridge(config)
    Kc = clutter_covariance(config, ridge)
    Kn = config.noise_power * np.eye(config.size, dtype=complex)
    K = Kc + Kn
    Kt = None
    if hypothesis is Hypothesis.H1:
        vt = steering_vector(config.target_spatial_freq, config.target_doppler_hz / config.prf_hz,
                             config.num_elements, config.num_pulses)
        Kt = config.snr_linear * config.noise_power * np.outer(vt, vt.conj())
        K = K + Kt
    return SpaceTimeCovariance(K, Kc, Kn, Kt, hypothesis)


def sample_snapshots(K, count, seed):
    """Draw ``count`` circular complex Gaussian vectors with covariance ``K``.

    Returns an array of shape ``(count, NM)``.
    """
    if count < 1:
        raise ValidationError("snapshot count must be >= 1")
    K = np.asarray(K)
    w, U = np.linalg.eigh((K + K.conj().T) / 2)
    if w[0] < -1e-9 * max(w[-1], 0.0) or w[-1] < 0:
        raise InvalidCovarianceError("covariance is not positive semidefinite")
    factor = U * np.sqrt(np.clip(w, 0.0, None))
    rng = np.random.default_rng([seed, STREAM_SNAPSHOTS])
    z = rng.standard_normal((K.shape[0], count)) + 1j * rng.standard_normal((K.shape[0], count))
    return (factor @ z).T / np.sqrt(2)


def sample_covariance(snapshots):
    X = np.asarray(snapshots)
    return X.T @ X.conj() / X.shape[0]


def write_covariance_csv(K, path):
    """Row-major dump: header ``NM,<int>`` then one line per row, re/im interleaved."""
    K = np.asarray(K)
    n = K.shape[0]
    pairs = np.empty((n, 2 * n))
    pairs[:, 0::2] = K.real
    pairs[:, 1::2] = K.imag
    with open(path, "w") as fh:
        fh.write(f"NM,{n}\n")
        for row in pairs:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def read_covariance_csv(path):
    with open(path) as fh:
        head = fh.readline().strip().split(",")
        if len(head) != 2 or head[0] != "NM":
            raise ValidationError(f"{path}: missing 'NM,<int>' header")
        n = int(head[1])
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.shape != (n, 2 * n):
        raise ValidationError(f"{path}: expected {n}x{2 * n} values, got {data.shape}")
    return data[:, 0::2] + 1j * data[:, 1::2]
