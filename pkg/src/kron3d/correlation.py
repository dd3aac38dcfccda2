"""Closed-form spatial correlation of the ray model and its Kronecker approximation.

Entry ``R[(k,l),(p,q)]`` depends only on the lags ``dk = p - k`` (elevation)
and ``dl = q - l`` (azimuth). The angular perturbations enter through a
Gaussian approximation of ``cos(.)``, which makes the double expectation
solvable in closed form.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .linalg import kron


@dataclass(frozen=True)
class DTerms:
    d1_term: complex
    d2_term: float
    d3_term: float
    d4_term: float
    d5_term: float
    d6_term: float
    d7_term: float
    sigma_tilde: float
    xi_tilde: float


def _d_terms(geom, params, dk, dl):
    """Array-valued D-terms for lag arrays ``dk``, ``dl`` (broadcastable)."""
    th, ph, xi = params.theta, params.phi, params.xi
    tp = 2 * np.pi
    dk = np.asarray(dk, dtype=float)
    dl = np.asarray(dl, dtype=float)
    sig_t = np.sin(ph) * params.sigma
    d1 = np.exp(1j * tp * geom.d1 * dk * np.cos(th)) * np.exp(
        -0.5 * (xi * tp * geom.d1) ** 2 * dk**2 * np.sin(th) ** 2
    )
    d2 = tp * geom.d2 * dl * np.sin(th)
    d3 = xi * tp * geom.d2 * dl * np.cos(th)
    d4 = 0.5 * (xi * tp) ** 2 * geom.d1 * geom.d2 * dk * dl * np.sin(2 * th)
    d5 = d3**2 * sig_t**2 + 1.0
    d6 = d4 * sig_t**2 + np.cos(ph)
    d7 = d3**2 * np.cos(ph) ** 2 - d4**2 * sig_t**2 - 2 * d4 * np.cos(ph)
    return d1, d2, d3, d4, d5, d6, d7, sig_t


def d_terms(geom, params, k, l, p, q):
    """D-terms for the entry between elements (k, l) and (p, q), 1-based."""
    d1, d2, d3, d4, d5, d6, d7, sig_t = _d_terms(geom, params, p - k, q - l)
    # nominal xi_tilde at eta = 0; the exact value depends on the azimuth draw
    return DTerms(complex(d1), float(d2), float(d3), float(d4), float(d5), float(d6),
                  float(d7), float(sig_t), float(np.sin(params.theta) * params.xi))


def _closed_form(geom, params, dk, dl):
    d1, d2, _, _, d5, d6, d7, sig_t = _d_terms(geom, params, dk, dl)
    return (d1 / np.sqrt(d5) * np.exp(-d7 / (2 * d5)) * np.exp(1j * d2 * d6 / d5)
            * np.exp(-0.5 * (d2 * sig_t) ** 2 / d5))


def _check_index(geom, k, l, p, q):
    for name, i, hi in (("k", k, geom.m_elev), ("p", p, geom.m_elev),
                        ("l", l, geom.n_az), ("q", q, geom.n_az)):
        if not (1 <= i <= hi):
            raise IndexError(f"{name}={i} outside 1..{hi}")


def corr_entry(geom, params, k, l, p, q):
    """Correlation between element (k, l) and (p, q); indices are 1-based."""
    _check_index(geom, k, l, p, q)
    return complex(_closed_form(geom, params, p - k, q - l))


def _lags(m, n):
    k = np.tile(np.arange(m), n)  # elevation index fastest
    l = np.repeat(np.arange(n), m)
    return k[None, :] - k[:, None], l[None, :] - l[:, None]


def full_correlation(geom, params):
    """MN x MN correlation matrix, rows/cols indexed by ``k + l*M`` (0-based)."""
    dk, dl = _lags(geom.m_elev, geom.n_az)
    return _closed_form(geom, params, dk, dl)


def elevation_correlation(geom, params):
    k = np.arange(geom.m_elev)
    dk = k[None, :] - k[:, None]
    th = params.theta
    tp = 2 * np.pi * geom.d1
    return np.exp(1j * tp * dk * np.cos(th)) * np.exp(
        -0.5 * (params.xi * tp) ** 2 * dk**2 * np.sin(th) ** 2
    )


def azimuth_correlation(geom, params):
    l = np.arange(geom.n_az)
    dl = l[None, :] - l[:, None]
    _, d2, d3, _, d5, _, _, sig_t = _d_terms(geom, params, 0, dl)
    c = np.cos(params.phi)
    return (1 / np.sqrt(d5) * np.exp(-(d3**2) * c**2 / (2 * d5)) * np.exp(1j * d2 * c / d5)
            * np.exp(-0.5 * (d2 * sig_t) ** 2 / d5))


def kronecker_correlation(geom, params):
    return kron(azimuth_correlation(geom, params), elevation_correlation(geom, params))


def quadrature_oracle_entry(geom, params, k, l, p, q, nodes=96):
    """Independent numerical evaluation of one correlation entry.

    Nested Gauss-Hermite quadrature: the outer variable is
    ``nu = cos(phi + dphi) ~ N(cos phi, sin(phi) sigma)``; for each node the
    elevation phase is rewritten as ``A cos(theta + dtheta + eta)`` and
    ``mu = cos(theta + dtheta + eta) ~ N(cos(theta + eta), sin(theta + eta) xi)``
    is integrated numerically as well. No D-terms are used.
    """
    _check_index(geom, k, l, p, q)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    w = w / np.sqrt(np.pi)
    th = params.theta
    sig_t = np.sin(params.phi) * params.sigma
    nu = np.cos(params.phi) + np.sqrt(2) * sig_t * x
    # A cos(theta + eta) and A sin(theta + eta) as functions of nu
    ac = (p - k) * geom.d1 * np.cos(th) + (q - l) * geom.d2 * np.sin(th) * nu
    as_ = (p - k) * geom.d1 * np.sin(th) - (q - l) * geom.d2 * np.cos(th) * nu
    amp = np.hypot(ac, as_)
    ang = np.arctan2(as_, ac)  # theta + eta
    mu_bar = np.cos(ang)
    xi_t = np.sin(ang) * params.xi
    mu = mu_bar[:, None] + np.sqrt(2) * xi_t[:, None] * x[None, :]
    inner = np.exp(1j * 2 * np.pi * amp[:, None] * mu) @ w
    return complex(inner @ w)


def write_matrix_csv(path, m):
    m = np.asarray(m)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["row", "col", "re", "im"])
        for (i, j), z in np.ndenumerate(m):
            out.writerow([i, j, f"{z.real:.12g}", f"{z.imag:.12g}"])


def read_matrix_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    n = 1 + max(int(r["row"]) for r in rows)
    c = 1 + max(int(r["col"]) for r in rows)
    m = np.zeros((n, c), dtype=complex)
    for r in rows:
        m[int(r["row"]), int(r["col"])] = float(r["re"]) + 1j * float(r["im"])
    return m
