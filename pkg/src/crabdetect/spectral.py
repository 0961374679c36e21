"""Minimum-variance (Capon) angle-Doppler map and its noise-floor denoiser.

Storage convention for maps: ``values[i_doppler, i_angle]``, Doppler index
increasing with the row, angle index increasing with the column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import DegenerateCovarianceError

LOADING_FACTOR = 1e-6
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SpectralGrid:
    angle_axis: np.ndarray  # cycles/element
    doppler_axis: np.ndarray  # Hz
    prf: float
    num_elements: int
    num_pulses: int

    @classmethod
    def from_config(cls, config, grid_size=None):
        n_angle, n_doppler = grid_size or config.grid_size
        return cls(
            np.linspace(-0.5, 0.5, n_angle),
            np.linspace(-config.prf_hz / 2, config.prf_hz / 2, n_doppler),
            config.prf_hz,
            config.num_elements,
            config.num_pulses,
        )

    @property
    def shape(self):
        return len(self.doppler_axis), len(self.angle_axis)

    def nearest_cell(self, spatial_freq, doppler_hz):
        """(row, col) of the grid cell closest to a point."""
        row = int(np.argmin(np.abs(self.doppler_axis - doppler_hz)))
        col = int(np.argmin(np.abs(self.angle_axis - spatial_freq)))
        return row, col


@dataclass(frozen=True)
class AngleDopplerMap:
    values: np.ndarray
    angle_axis: np.ndarray
    doppler_axis: np.ndarray
    loading: float = 0.0


@dataclass(frozen=True)
class DenoisedMap:
    values: np.ndarray
    threshold: float
    angle_axis: np.ndarray
    doppler_axis: np.ndarray

    @property
    def support_count(self):
        return int(np.count_nonzero(self.values))

    @property
    def mask(self):
        return self.values > 0


def _cholesky(K):
    try:
        return scipy.linalg.cho_factor(K, lower=False, check_finite=False)
    except np.linalg.LinAlgError:
        return None


def hermitian_inverse(K):
    """Inverse of a Hermitian PSD matrix, diagonally loaded when ill-conditioned.

    Loading of ``1e-6 * trace(K) / n`` is added only when the Cholesky
    factorisation fails or the LAPACK reciprocal-condition estimate says the
    condition number exceeds 1e12. Returns ``(K_inv, loading)``.
    """
    K = np.asarray(K, dtype=complex)
    n = K.shape[0]
    if not np.all(np.isfinite(K)):
        raise DegenerateCovarianceError("covariance has non-finite entries")
    loading = 0.0
    fac = _cholesky(K)
    if fac is not None:
        anorm = np.abs(K).sum(axis=0).max()
        rcond, info = lapack.zpocon(fac[0], anorm, uplo="U")
        if info != 0 or rcond * MAX_CONDITION < 1.0:
            fac = None
    if fac is None:
        loading = LOADING_FACTOR * float(np.trace(K).real) / n
        if not loading > 0:
            raise DegenerateCovarianceError("covariance is singular and has zero trace")
        fac = _cholesky(K + loading * np.eye(n))
        if fac is None:
            raise DegenerateCovarianceError("covariance is singular even after diagonal loading")
    Kinv = scipy.linalg.cho_solve(fac, np.eye(n, dtype=complex), check_finite=False)
    return (Kinv + Kinv.conj().T) / 2, loading


def mv_spectrum(K, grid):
    """Capon power ``1 / (v^H K^-1 v)`` over the whole grid.

    The inverse is formed once; the quadratic forms are evaluated through
    the Kronecker structure of the steering vectors, so no NM-length vector
    is ever built per grid point.
    """
    N, M = grid.num_elements, grid.num_pulses
    K = np.asarray(K)
    if K.shape != (N * M, N * M):
        raise ValueError(f"covariance shape {K.shape} does not match N*M={N * M}")
    Kinv, loading = hermitian_inverse(K)
    S = np.exp(2j * np.pi * np.outer(np.arange(N), grid.angle_axis))  # (N, A)
    T = np.exp(2j * np.pi * np.outer(np.arange(M), grid.doppler_axis / grid.prf))  # (M, D)
    A = S.shape[1]
    # Y[m, n, k, a] = sum_p Kinv[m, n, k, p] S[p, a]
    Y = (Kinv.reshape(M * N * M, N) @ S).reshape(M, N, M, A)
    X = np.einsum("na,mnka->mka", S.conj(), Y)
    # q[d, a] = sum_{m,k} conj(T[m, d]) X[m, k, a] T[k, d]
    R = np.matmul(X.transpose(2, 0, 1), T)  # (A, M, D)
    q = np.einsum("md,amd->da", T.conj(), R).real
    if not np.all(np.isfinite(q)) or np.any(q <= 0):
        raise DegenerateCovarianceError("non-positive Capon denominator")
    return AngleDopplerMap(1.0 / q, grid.angle_axis.copy(), grid.doppler_axis.copy(), loading)


def threshold_from_floor(values, k_sigma=3.0, bottom_fraction=0.5):
    """mean + k_sigma * std of the lowest ``bottom_fraction`` of pixel values."""
    flat = np.sort(np.asarray(values, dtype=float).ravel())
    count = max(1, int(flat.size * bottom_fraction))
    bottom = flat[:count]
    return float(bottom.mean() + k_sigma * bottom.std())


def denoise(adm, k_sigma=3.0, bottom_fraction=0.5, threshold=None):
    """Zero every pixel not strictly above the noise-floor threshold."""
    if not k_sigma > 0:
        raise ValueError("k_sigma must be > 0")
    if threshold is None:
        threshold = threshold_from_floor(adm.values, k_sigma, bottom_fraction)
    values = np.where(adm.values > threshold, adm.values, 0.0)
    return DenoisedMap(values, float(threshold), adm.angle_axis, adm.doppler_axis)


def write_map_csv(values, angle_axis, doppler_axis, path):
    """Header row holds the angle axis; first column holds the Doppler axis."""
    values = np.asarray(values)
    with open(path, "w") as fh:
        fh.write("doppler_hz\\angle_cpe," + ",".join(repr(float(a)) for a in angle_axis) + "\n")
        for f, row in zip(doppler_axis, values):
            fh.write(repr(float(f)) + "," + ",".join(repr(float(x)) for x in row) + "\n")


def read_map_csv(path):
    with open(path) as fh:
        head = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    angle = np.array([float(x) for x in head[1:]])
    return data[:, 1:], angle, data[:, 0]


def pgm_pixels(values):
    """Min-max scale to 16 bits: round(65535 (v - min) / (max - min)), half up."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint16)
    return np.floor(65535.0 * (values - lo) / (hi - lo) + 0.5).astype(np.uint16)


def write_map_pgm(values, path):
    """Binary 16-bit PGM; image row 0 is the highest Doppler."""
    pix = pgm_pixels(values)[::-1]
    rows, cols = pix.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n65535\n".encode("ascii"))
        fh.write(pix.astype(">u2").tobytes())


def read_map_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    # header is exactly four whitespace-separated tokens then one whitespace byte
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        tokens.append(data[pos:end])
        pos = end
    pos += 1
    if tokens[0] != b"P5" or int(tokens[3]) != 65535:
        raise ValueError(f"{path}: not a 16-bit binary PGM")
    cols, rows = int(tokens[1]), int(tokens[2])
    pix = np.frombuffer(data, dtype=">u2", count=rows * cols, offset=pos).reshape(rows, cols)
    return pix[::-1].astype(np.uint16)
