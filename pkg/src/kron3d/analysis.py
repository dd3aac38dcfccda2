"""Experiment kernels: eigen-spectra, capacity CDFs, beamforming loss, unlimited feedback."""
import dataclasses
import enum
from dataclasses import dataclass

import numpy as np
from scipy.stats import ks_2samp

from . import correlation as corr
from .channel import complex_normal, ray_channel
from .linalg import hermitian_eig, kron, psd_sqrt
from .rng import map_trials, trial_rng


class Scheme(str, enum.Enum):
    RAY = "RayModel"
    FULL = "FullCorr"
    KRON = "KronCorr"


@dataclass(frozen=True)
class SpectrumComparison:
    eig_full: np.ndarray
    eig_kron: np.ndarray
    max_rel_gap: float


@dataclass(frozen=True)
class CapacitySample:
    scheme: Scheme
    snr_db: float
    capacity: float


@dataclass(frozen=True)
class BeamformingLossReport:
    lambda1: float
    mu: float
    loss_db: float


def compare_spectra(r_full, r_kron, top=None):
    """Descending spectra of both matrices and ``max_i |l_i - l'_i| / l_1`` over the top ``top``."""
    r_full, r_kron = np.asarray(r_full), np.asarray(r_kron)
    if r_full.shape != r_kron.shape:
        raise ValueError(f"shape mismatch: {r_full.shape} vs {r_kron.shape}")
    a = hermitian_eig(r_full).eigenvalues
    b = hermitian_eig(r_kron).eigenvalues
    t = len(a) if top is None else top
    gap = float(np.max(np.abs(a[:t] - b[:t])) / a[0]) if len(a) else 0.0
    return SpectrumComparison(a, b, gap)


def correlation_sqrts(geom, params):
    """Hermitian square roots of R and of R_K (the latter as a product of factor roots)."""
    s_full = psd_sqrt(corr.full_correlation(geom, params))
    s_kron = kron(psd_sqrt(corr.azimuth_correlation(geom, params)),
                  psd_sqrt(corr.elevation_correlation(geom, params)))
    return s_full, s_kron


def correlated_channels(sqrt_r, seed, trials, workers=1):
    """Rows are ``sqrt_r @ w_t`` with ``w_t`` drawn from trial substream ``(seed, t)``."""
    n = sqrt_r.shape[0]

    def chunk(idx):
        w = np.stack([complex_normal(trial_rng(seed, int(t)), n) for t in idx])
        return w @ sqrt_r.T

    return map_trials(chunk, trials, workers)


def ray_channels(geom, params, seed, trials, workers=1):
    def chunk(idx):
        return np.stack([ray_channel(geom, params, seed, int(t)) for t in idx])

    return map_trials(chunk, trials, workers)


def capacity(h, snr_db):
    """``log2(1 + rho * ||h||^2)`` per row of ``h``, with ``rho`` given in dB."""
    rho = 10.0 ** (snr_db / 10.0)
    return np.log2(1.0 + rho * np.sum(np.abs(np.atleast_2d(h)) ** 2, axis=1))


def capacity_cdf(scheme, geom, params, snr_db, trials, seed, workers=1, sqrts=None):
    """Per-trial capacities for one scheme, in trial order.

    FullCorr and KronCorr share the same ``w`` draws for a given seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    scheme = Scheme(scheme)
    if scheme is Scheme.RAY:
        h = ray_channels(geom, params, seed, trials, workers)
    else:
        s_full, s_kron = sqrts if sqrts is not None else correlation_sqrts(geom, params)
        h = correlated_channels(s_full if scheme is Scheme.FULL else s_kron, seed, trials, workers)
    caps = capacity(h, snr_db)
    return [CapacitySample(scheme, float(snr_db), float(c)) for c in caps]


def ks_distance(a, b):
    return float(ks_2samp(a, b).statistic)


def beamforming_loss(geom, params):
    """Gain lost by beamforming along ``u_az kron u_el`` instead of the dominant eigenvector of R."""
    r = corr.full_correlation(geom, params)
    lam1, _ = hermitian_eig(r).dominant()
    _, u_az = hermitian_eig(corr.azimuth_correlation(geom, params)).dominant()
    _, u_el = hermitian_eig(corr.elevation_correlation(geom, params)).dominant()
    u = np.kron(u_az, u_el)
    mu = float(np.real(u.conj() @ r @ u))
    return BeamformingLossReport(lam1, mu, float(10 * np.log10(lam1 / mu)))


SWEEP_POINTS = 25


def sweep_grid(name, points=SWEEP_POINTS):
    if name == "phi":
        return np.linspace(0.0, np.pi, points)
    if name == "theta":
        return np.linspace(0.0, np.pi, points + 2)[1:-1]
    if name == "sigma":
        return np.linspace(0.0, np.pi / 6, points)
    if name == "xi":
        return np.linspace(0.0, np.pi / 12, points)
    raise ValueError(f"unknown sweep parameter {name!r}")


def loss_sweep(geom, params, points=SWEEP_POINTS):
    """One-at-a-time sweeps around ``params``; returns ``(varied_param, value, loss_db)`` rows."""
    rows = [("default", 0.0, beamforming_loss(geom, params).loss_db)]
    for name in ("phi", "theta", "sigma", "xi"):
        for value in sweep_grid(name, points):
            p = dataclasses.replace(params, **{name: float(value)})
            rows.append((name, float(value), beamforming_loss(geom, p).loss_db))
    return rows


def unlimited_feedback_gains(s_full, s_kron, seed, trials, workers=1):
    """Gains ``|h^H f|^2`` of the matched and Kronecker-model beamformers, shared ``w``.

    Returns ``(h, gain_full, gain_kron)`` where ``h = R^{1/2} w`` and the two
    beamformers are ``R^{1/2} w`` and ``R_K^{1/2} w``, each normalized.
    """
    n = s_full.shape[0]

    def chunk(idx):
        return np.stack([complex_normal(trial_rng(seed, int(t)), n) for t in idx])

    w = map_trials(chunk, trials, workers)
    h = w @ s_full.T
    fk = w @ s_kron.T
    fk /= np.linalg.norm(fk, axis=1, keepdims=True)
    g_full = np.sum(np.abs(h) ** 2, axis=1)
    g_kron = np.abs(np.sum(h.conj() * fk, axis=1)) ** 2
    return h, g_full, g_kron


def unlimited_feedback_snr(geom, params, use_kron, trials, seed, workers=1):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s_full, s_kron = correlation_sqrts(geom, params)
    _, g_full, g_kron = unlimited_feedback_gains(s_full, s_kron, seed, trials, workers)
    return g_kron if use_kron else g_full
