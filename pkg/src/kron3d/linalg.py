"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` complex arrays. The Hermitian eigensolver is a
cyclic Jacobi method; each sweep visits all pivot pairs in round-robin order so
that ``n // 2`` disjoint rotations can be applied at once with array ops.
"""
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-9
OFF_DIAG_TOL = 1e-12
MAX_SWEEPS = 100
PSD_CLAMP = 1e-8
SINGULAR_TOL = 1e-14


class LinalgError(ArithmeticError):
    pass


class NotHermitianError(LinalgError, ValueError):
    pass


class NoConvergenceError(LinalgError):
    pass


class NotPSDError(LinalgError, ValueError):
    pass


class SingularError(LinalgError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns match eigenvalues

    def reconstruct(self):
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def dominant(self):
        """Return the top eigenpair with the vector's largest entry made real positive."""
        u = self.eigenvectors[:, 0]
        i = int(np.argmax(np.abs(u)))
        return float(self.eigenvalues[0]), u * (np.abs(u[i]) / u[i])


def as_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def check_hermitian(m, tol=HERMITIAN_TOL):
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"matrix is not square: {m.shape}")
    err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if err > tol:
        raise NotHermitianError(f"max |m - m^H| = {err:.3g} exceeds {tol:g}")
    return m


def _round_robin(n):
    """Pair schedules covering every (p, q) once per sweep (circle method)."""
    idx = list(range(n)) + ([-1] if n % 2 else [])
    m = len(idx)
    rounds = []
    for _ in range(m - 1):
        pairs = [(idx[i], idx[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        p, q = np.array(pairs, dtype=int).reshape(-1, 2).T
        rounds.append((p, q))
        idx = [idx[0], idx[-1]] + idx[1:-1]
    return rounds


def _off(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return np.linalg.norm(off)


def hermitian_eig(m, tol=OFF_DIAG_TOL, max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below
    ``tol * ||m||_F``. Eigenvalues come back sorted in descending order.
    """
    a = check_hermitian(m).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    rounds = _round_robin(n) if n > 1 else []
    sweeps = 0
    while n > 1 and _off(a) > tol * scale:
        if sweeps >= max_sweeps:
            raise NoConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p, q in rounds:
            b = a[p, q]
            mag = np.abs(b)
            live = mag > 1e-300
            safe = np.where(live, mag, 1.0)
            phase = np.where(live, b.conj() / safe, 1.0)  # e^{-j arg b}
            app, aqq = a[p, p].real, a[q, q].real
            tau = (aqq - app) / (2.0 * safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # G restricted to (p, q) is [[c, s], [-s e, c e]] with e = phase
            gpp, gpq, gqp, gqq = c, s, -s * phase, c * phase
            ap, aq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = ap * gpp + aq * gqp
            a[:, q] = ap * gpq + aq * gqq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = np.conj(gpp)[:, None] * rp + np.conj(gqp)[:, None] * rq
            a[q, :] = np.conj(gpq)[:, None] * rp + np.conj(gqq)[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * gpp + vq * gqp
            v[:, q] = vp * gpq + vq * gqq
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def psd_sqrt(m):
    """Hermitian square root of a PSD matrix.

    Eigenvalues down to ``-1e-8 * lambda_max`` are treated as noise and clamped
    to zero; anything more negative raises :class:`NotPSDError`.
    """
    eig = hermitian_eig(m)
    lam = eig.eigenvalues
    top = max(lam[0], 0.0) if lam.size else 0.0
    if lam.size and lam[-1] < -PSD_CLAMP * top:
        raise NotPSDError(f"eigenvalue {lam[-1]:.3g} below -{PSD_CLAMP:g}*lambda_max")
    u = eig.eigenvectors
    s = (u * np.sqrt(np.clip(lam, 0.0, None))) @ u.conj().T
    return 0.5 * (s + s.conj().T)


def condition_number(m):
    lam = hermitian_eig(m).eigenvalues
    lmax, lmin = lam[0], lam[-1]
    if lmin <= SINGULAR_TOL * lmax:
        raise SingularError(f"lambda_min = {lmin:.3g} is singular relative to {lmax:.3g}")
    return float(lmax / lmin)
