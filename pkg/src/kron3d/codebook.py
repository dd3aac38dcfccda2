"""Grassmannian line packing and product codebooks for limited feedback.

Codebook words are stored as rows of a ``(size, dim)`` complex array. A
product codebook pairs an azimuth book (dimension N) with an elevation book
(dimension M); the pair ``(i, k)`` stands for ``f_az[i] kron f_el[k]``, which
matches the ``k + l*M`` channel layout.
"""
from dataclasses import dataclass

import numpy as np

from .channel import complex_normal
from .linalg import SINGULAR_TOL, SingularError, hermitian_eig, kron
from .rng import trial_rng

UNIT_TOL = 1e-12
FILE_UNIT_TOL = 1e-9


class NullSpaceWordError(ValueError):
    pass


@dataclass(frozen=True)
class Codebook:
    dim: int
    words: np.ndarray

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.words, dtype=complex))
        object.__setattr__(self, "words", w)
        if w.shape[0] < 1 or w.shape[1] != self.dim:
            raise ValueError(f"codebook words must have shape (size>=1, {self.dim}), got {w.shape}")
        err = np.max(np.abs(np.linalg.norm(w, axis=1) - 1.0))
        if err > UNIT_TOL:
            raise ValueError(f"codebook words are not unit-norm (max error {err:.3g})")

    @classmethod
    def from_vectors(cls, vectors):
        v = np.atleast_2d(np.asarray(vectors, dtype=complex))
        return cls(v.shape[1], v / np.linalg.norm(v, axis=1, keepdims=True))

    @property
    def size(self):
        return self.words.shape[0]

    def __len__(self):
        return self.size


@dataclass(frozen=True)
class PackingQuality:
    min_chordal_distance: float
    rankin_bound: float


@dataclass(frozen=True)
class FeedbackResult:
    index_az: int
    index_el: int
    gain: float
    loss_vs_unquantized: float


@dataclass(frozen=True)
class JointFeedbackResult:
    index: int
    gain: float
    loss_vs_unquantized: float


def min_chordal_distance(words):
    words = np.atleast_2d(words)
    if len(words) < 2:
        return 1.0
    g = np.abs(words.conj() @ words.T) ** 2
    np.fill_diagonal(g, 0.0)
    return float(np.sqrt(max(1.0 - g.max(), 0.0)))


def rankin_bound(dim, size):
    """Simplex (Rankin) bound on min chordal distance; generic limit when ``size > dim**2``."""
    if size < 2:
        return 1.0
    if size <= dim * dim:
        return float(np.sqrt((dim - 1) * size / (dim * (size - 1))))
    return float(np.sqrt((dim - 1) / dim))


def _refine(x, iterations, step=0.1):
    """Repulsion on a batch of packings ``x`` of shape (restarts, size, dim).

    Gradient descent on a soft-max of the squared pairwise inner products,
    with step decay and temperature growth. Returns the best iterate per
    restart together with its smallest pairwise chordal distance.
    """
    r, n, _ = x.shape
    off = ~np.eye(n, dtype=bool)
    best = x.copy()
    best_d = np.full(r, -1.0)
    for it in range(iterations + 1):
        g = np.einsum("rid,rjd->rij", x.conj(), x)  # <x_i, x_j>
        p = np.abs(g) ** 2
        worst = np.where(off, p, 0.0).max(axis=(1, 2))
        d = np.sqrt(np.clip(1.0 - worst, 0.0, None))
        better = d > best_d
        best[better] = x[better]
        best_d[better] = d[better]
        if it == iterations:
            break
        frac = it / max(iterations, 1)
        temp = 10.0 * 100.0**frac
        z = np.where(off, temp * (p - worst[:, None, None]), -np.inf)
        wgt = np.exp(z)
        wgt /= wgt.sum(axis=(1, 2), keepdims=True)
        # d p_ij / d conj(x_i) = x_j <x_j, x_i>
        grad = np.einsum("rij,rjd->rid", wgt * np.swapaxes(g, 1, 2), x)
        x = x - step * (1.0 - 0.9 * frac) * grad / np.maximum(wgt.max(axis=(1, 2)), 1e-12)[:, None, None]
        x /= np.linalg.norm(x, axis=2, keepdims=True)
    return best, best_d


def pack_lines(dim, size, seed=0, restarts=20, iterations=2000):
    """Best-of-``restarts`` line packing of ``size`` unit vectors in C^dim."""
    if dim < 1 or size < 1:
        raise ValueError("dim and size must be >= 1")
    rng = trial_rng(seed)
    x = complex_normal(rng, restarts * size * dim).reshape(restarts, size, dim)
    x /= np.linalg.norm(x, axis=2, keepdims=True)
    if size > 1 and dim > 1:
        x, d = _refine(x, iterations)
        i = int(np.argmax(d))
        words = x[i]
    else:
        words = x[0]
    words = words / np.linalg.norm(words, axis=1, keepdims=True)
    quality = PackingQuality(min_chordal_distance(words), rankin_bound(dim, size))
    return Codebook(dim, words), quality


def rotate_codebook(base, corr_sqrt):
    """Words ``S c / ||S c||`` for each base word ``c``."""
    s = np.asarray(corr_sqrt, dtype=complex)
    if s.shape != (base.dim, base.dim):
        raise ValueError(f"corr_sqrt shape {s.shape} does not match codebook dim {base.dim}")
    rot = base.words @ s.T
    norms = np.linalg.norm(rot, axis=1)
    if np.any(norms <= 1e-12):
        raise NullSpaceWordError(f"word {int(np.argmin(norms))} lies in the null space of corr_sqrt")
    return Codebook(base.dim, rot / norms[:, None])


def _loss_db(h_energy, gain):
    return float(10 * np.log10(h_energy / gain)) if gain > 0 else float("inf")


def product_scores(h, f_az, f_el):
    """``h^H (f_az[i] kron f_el[k])`` for all pairs, shape (N1, N2)."""
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] != f_az.dim * f_el.dim:
        raise ValueError(f"h has length {h.shape[-1]}, expected {f_az.dim * f_el.dim}")
    hm = h.reshape(h.shape[:-1] + (f_az.dim, f_el.dim)).conj()
    return np.einsum("ia,...ae,ke->...ik", f_az.words, hm, f_el.words)


def product_select(h, f_az, f_el):
    """Exhaustive search of the product codebook; ties go to the smallest ``(i_az, i_el)``."""
    gains = np.abs(product_scores(h, f_az, f_el)) ** 2
    flat = int(np.argmax(gains))
    i, k = divmod(flat, f_el.size)
    gain = float(gains[i, k])
    return FeedbackResult(i, k, gain, _loss_db(float(np.vdot(h, h).real), gain))


def joint_select(h, f_joint):
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] != f_joint.dim:
        raise ValueError(f"h has length {h.shape[-1]}, expected {f_joint.dim}")
    gains = np.abs(f_joint.words @ h.conj()) ** 2
    i = int(np.argmax(gains))
    return JointFeedbackResult(i, float(gains[i]), _loss_db(float(np.vdot(h, h).real), float(gains[i])))


def optimal_kronecker_factors(h, n_az, m_el, tol=1e-10, max_iter=10_000):
    """Unit ``(a, e)`` maximizing ``|h^H (a kron e)|`` by alternating power iteration.

    This is the dominant singular pair of the N x M matrix ``conj(h)`` reshaped;
    returns ``(a, e, gain)`` with ``gain = sigma_max**2``.
    """
    hm = np.asarray(h, dtype=complex).reshape(n_az, m_el).conj()
    # start from the heaviest row for a deterministic, non-orthogonal init
    e = hm[int(np.argmax(np.linalg.norm(hm, axis=1)))].conj()
    nrm = np.linalg.norm(e)
    if nrm == 0:
        return np.eye(n_az, dtype=complex)[0], np.eye(m_el, dtype=complex)[0], 0.0
    e = e / nrm
    s_old = 0.0
    for _ in range(max_iter):
        a = hm.conj() @ e.conj()  # maximizes |a^T hm e| over a
        a /= np.linalg.norm(a)
        e = (a @ hm).conj()
        s = np.linalg.norm(e)
        e /= s
        if abs(s - s_old) <= tol * s:
            break
        s_old = s
    return a, e, float(abs(a @ hm @ e) ** 2)


def kron_optimal_gain(h, n_az, m_el):
    return optimal_kronecker_factors(h, n_az, m_el)[2]


def distortion_estimate(geom, params, f_az, f_el, trials, seed, channels=None):
    """Mean gap between the optimal Kronecker gain and the best product-codeword gain.

    Channels are ``R_K^{1/2} w`` with ``w ~ CN(0, I)`` from trial substreams,
    unless ``channels`` (shape (trials, MN)) is given.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if channels is None:
        from .analysis import correlated_channels, correlation_sqrts

        channels = correlated_channels(correlation_sqrts(geom, params)[1], seed, trials)
    gaps = []
    for h in channels[:trials]:
        best = float(np.max(np.abs(product_scores(h, f_az, f_el)) ** 2))
        opt = kron_optimal_gain(h, f_az.dim, f_el.dim)
        gaps.append(max(opt - best, 0.0))
    return float(np.mean(gaps))


def isotropic_unit_vectors(rng, count, dim):
    w = complex_normal(rng, count * dim).reshape(count, dim)
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def expected_max_overlap(book, draws=100_000, seed=0):
    """Monte-Carlo ``E[max_i |w^H c_i|]`` for isotropic unit ``w``."""
    w = isotropic_unit_vectors(trial_rng(seed), draws, book.dim)
    return float(np.mean(np.max(np.abs(w.conj() @ book.words.T), axis=1)))


def distortion_bound(geom, params, base_az, base_el, draws=100_000, seed=0):
    """Upper bound on the product-codebook distortion from the packing overlaps.

    ``2 MN lmax lmin^{-1/2} (sqrt(2 - 2 E max|w^H c_az|) + sqrt(2 - 2 E max|w^H c_el|))``
    with the extreme eigenvalues taken from ``R_az kron R_el``.
    """
    from .correlation import azimuth_correlation, elevation_correlation

    lam = np.sort(np.kron(hermitian_eig(azimuth_correlation(geom, params)).eigenvalues,
                          hermitian_eig(elevation_correlation(geom, params)).eigenvalues))
    lmin, lmax = lam[0], lam[-1]
    if lmin <= SINGULAR_TOL * lmax:
        raise SingularError(f"lambda_min = {lmin:.3g} is singular relative to {lmax:.3g}")
    t_az = np.sqrt(max(2 - 2 * expected_max_overlap(base_az, draws, (seed, 0)), 0.0))
    t_el = np.sqrt(max(2 - 2 * expected_max_overlap(base_el, draws, (seed, 1)), 0.0))
    return float(2 * geom.size * lmax / np.sqrt(lmin) * (t_az + t_el))


def product_words(f_az, f_el):
    """Explicit Kronecker words, index ``i * N2 + k``."""
    return np.stack([kron(a, e).ravel() for a in f_az.words for e in f_el.words])


def save_codebook(path, book):
    """Write ``dim size`` then one ``re im re im ...`` line per word (``repr`` floats)."""
    lines = [f"{book.dim} {book.size}"]
    lines += [" ".join(f"{float(x.real)!r} {float(x.imag)!r}" for x in w) for w in book.words]
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def load_codebook(path):
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    dim, size = int(lines[0][0]), int(lines[0][1])
    rows = lines[1:]
    if len(rows) != size:
        raise ValueError(f"expected {size} words, found {len(rows)}")
    words = np.empty((size, dim), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != 2 * dim:
            raise ValueError(f"word {i} has {len(row)} numbers, expected {2 * dim}")
        v = np.array([float(t) for t in row])
        words[i] = v[0::2] + 1j * v[1::2]
    err = np.max(np.abs(np.linalg.norm(words, axis=1) - 1.0))
    if err > FILE_UNIT_TOL:
        raise ValueError(f"codebook file has non-unit words (max error {err:.3g})")
    if err > UNIT_TOL:
        words = words / np.linalg.norm(words, axis=1, keepdims=True)
    return Codebook(dim, words)
