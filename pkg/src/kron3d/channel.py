"""Ray-based 3D MIMO channel for an M x N planar array with a single-antenna receiver.

Spacings are in wavelengths (lambda = 1). Channel vectors use the column-major
vectorization of the M x N array response, so element (k, l) (elevation k,
azimuth l, both 0-based) sits at index ``k + l * M``; equivalently each path
contributes ``b(v) kron a(u)``.
"""
from dataclasses import dataclass

import numpy as np

from .rng import trial_rng


@dataclass(frozen=True)
class ArrayGeometry:
    m_elev: int = 4
    n_az: int = 4
    d1: float = 0.5
    d2: float = 0.5

    def __post_init__(self):
        if int(self.m_elev) != self.m_elev or self.m_elev < 1:
            raise ValueError(f"m_elev must be a positive integer, got {self.m_elev}")
        if int(self.n_az) != self.n_az or self.n_az < 1:
            raise ValueError(f"n_az must be a positive integer, got {self.n_az}")
        for name in ("d1", "d2"):
            d = getattr(self, name)
            if not (np.isfinite(d) and d > 0):
                raise ValueError(f"{name} must be finite and positive, got {d}")

    @property
    def size(self):
        return self.m_elev * self.n_az


@dataclass(frozen=True)
class ChannelParams:
    phi: float = np.pi / 3
    theta: float = 3 * np.pi / 8
    sigma: float = np.pi / 6
    xi: float = np.pi / 12
    paths: int = 20

    def __post_init__(self):
        if not (0.0 < self.theta < np.pi):
            raise ValueError(f"theta must lie in (0, pi), got {self.theta}")
        if not np.isfinite(self.phi):
            raise ValueError(f"phi must be finite, got {self.phi}")
        for name in ("sigma", "xi"):
            x = getattr(self, name)
            if not (np.isfinite(x) and x >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {x}")
        if int(self.paths) != self.paths or self.paths < 1:
            raise ValueError(f"paths must be a positive integer, got {self.paths}")


@dataclass(frozen=True)
class PathDraw:
    d_theta: float
    d_phi: float
    phase: float


@dataclass(frozen=True)
class PathDraws:
    """A batch of path draws stored as parallel arrays."""

    d_theta: np.ndarray
    d_phi: np.ndarray
    phase: np.ndarray

    def __len__(self):
        return len(self.phase)

    def __getitem__(self, i):
        return PathDraw(float(self.d_theta[i]), float(self.d_phi[i]), float(self.phase[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def steering_elevation(geom, u):
    return np.exp(-1j * np.arange(geom.m_elev) * u)


def steering_azimuth(geom, v):
    return np.exp(-1j * np.arange(geom.n_az) * v)


def phase_args(geom, params, draw):
    """Electrical phase increments ``(u, v)`` for one draw or a batch of draws."""
    el = params.theta + np.asarray(draw.d_theta)
    az = params.phi + np.asarray(draw.d_phi)
    u = 2 * np.pi * geom.d1 * np.cos(el)
    v = 2 * np.pi * geom.d2 * np.sin(el) * np.cos(az)
    return u, v


def sample_paths(params, seed, count=None):
    """Draw ``params.paths`` (or ``count``) angular perturbations and phases.

    Perturbations are zero-mean normals with standard deviations ``xi``
    (elevation) and ``sigma`` (azimuth); phases are uniform on [0, 2pi).
    """
    n = params.paths if count is None else count
    rng = trial_rng(seed)
    d_theta = params.xi * rng.standard_normal(n)
    d_phi = params.sigma * rng.standard_normal(n)
    phase = rng.uniform(0.0, 2 * np.pi, n)
    return PathDraws(d_theta, d_phi, phase)


def path_responses(geom, params, draws):
    """Per-path array responses ``b(v_k) kron a(u_k)``, shape (L, M*N)."""
    u, v = phase_args(geom, params, draws)
    u, v = np.atleast_1d(u), np.atleast_1d(v)
    a = np.exp((-1j * np.arange(geom.m_elev))[None, :] * u[:, None])
    b = np.exp((-1j * np.arange(geom.n_az))[None, :] * v[:, None])
    return (b[:, :, None] * a[:, None, :]).reshape(len(u), geom.size)


def channel_vector(geom, params, draws):
    if len(draws) == 0:
        raise ValueError("channel_vector needs at least one path draw")
    resp = path_responses(geom, params, draws)
    gains = np.exp(1j * np.asarray(draws.phase)) / np.sqrt(len(draws))
    return (gains[:, None] * resp).sum(axis=0)


def ray_channel(geom, params, seed, trial=None):
    """Channel for one trial of the ray model with ``params.paths`` paths."""
    return channel_vector(geom, params, sample_paths(params, seed if trial is None else (seed, trial)))


def complex_normal(rng, n):
    """CN(0, 1) samples: unit total variance, 1/2 per real component."""
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def channel_from_correlation(sqrt_r, seed):
    sqrt_r = np.asarray(sqrt_r, dtype=complex)
    if sqrt_r.ndim != 2 or sqrt_r.shape[0] != sqrt_r.shape[1]:
        raise ValueError(f"sqrt_r must be square, got shape {sqrt_r.shape}")
    w = complex_normal(trial_rng(seed), sqrt_r.shape[0])
    return sqrt_r @ w
