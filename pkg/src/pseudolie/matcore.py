"""Dense complex matrix utilities.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_cmatrix`
validates and converts. Eigenvalues and singular values come from LAPACK via
``numpy.linalg``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

NORMAL_TOL = 1e-10
EIG_TOL = 1e-8

FAMILIES = ("dense", "normal", "two-eig-normal", "triangular", "nilpotent")


class DimensionError(ValueError):
    """Raised when matrix shapes are incompatible or too small."""


class ConvergenceError(RuntimeError):
    """Raised when the eigenvalue solver fails to converge."""


def as_cmatrix(A, min_dim: int = 1) -> np.ndarray:
    """Return ``A`` as a finite square complex128 array.

    Raises :class:`DimensionError` for non-square input or ``n < min_dim``
    and ``ValueError`` for non-finite entries.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < max(1, min_dim):
        raise DimensionError(f"matrix dimension {A.shape[0]} < {max(1, min_dim)}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def unit_matrix(n: int, i: int, j: int) -> np.ndarray:
    """``E_ij`` with 1-based indices."""
    E = np.zeros((n, n), dtype=complex)
    E[i - 1, j - 1] = 1.0
    return E


def commutator(A, B) -> np.ndarray:
    """Lie product ``AB - BA``."""
    A = as_cmatrix(A)
    B = as_cmatrix(B)
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def singular_values(A) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(as_cmatrix(A), compute_uv=False)


def spectral_norm(A) -> float:
    return float(singular_values(A)[0])


def smin_shift(A, z: complex) -> float:
    """Smallest singular value of ``A - z I``."""
    A = as_cmatrix(A)
    return float(np.linalg.svd(A - z * np.eye(A.shape[0]), compute_uv=False)[-1])


def smin_batch(A: np.ndarray, zs, chunk: int = 4096) -> np.ndarray:
    """Vectorised :func:`smin_shift` over an array of shifts.

    ``A`` is assumed validated. Work is chunked to bound memory.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    n = A.shape[0]
    out = np.empty(zs.shape[0])
    idx = np.arange(n)
    for start in range(0, zs.shape[0], chunk):
        zc = zs[start:start + chunk]
        M = np.broadcast_to(A, (zc.shape[0], n, n)).copy()
        M[:, idx, idx] -= zc[:, None]
        out[start:start + chunk] = np.linalg.svd(M, compute_uv=False)[:, -1]
    return out


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues with diagnostics.

    ``residual`` is ``max ||Av - lambda v|| / ||A||`` over computed pairs and
    ``min_gap`` the smallest pairwise distance between eigenvalues (0 for
    repeated ones), useful when a distinct-eigenvalue count looks suspicious.
    """

    eigenvalues: np.ndarray
    residual: float = 0.0
    min_gap: float = field(default=np.inf)

    @classmethod
    def from_values(cls, values) -> "SpectralData":
        values = np.asarray(values, dtype=complex).ravel()
        return cls(values, 0.0, _min_gap(values))

    @property
    def spread(self) -> float:
        return _spread(self.eigenvalues)


def _pairwise(values: np.ndarray) -> np.ndarray:
    return np.abs(values[:, None] - values[None, :])


def _spread(values: np.ndarray) -> float:
    return float(_pairwise(values).max()) if values.size else 0.0


def _min_gap(values: np.ndarray) -> float:
    if values.size < 2:
        return np.inf
    d = _pairwise(values)
    return float(d[np.triu_indices(values.size, 1)].min())


def eigenvalues(A) -> SpectralData:
    """Eigenvalues (with multiplicity) of ``A``.

    LAPACK ``geev`` is used; its internal QR iteration cap is 30 sweeps per
    eigenvalue. Failure to converge raises :class:`ConvergenceError`.
    """
    A = as_cmatrix(A)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    res = np.linalg.norm(A @ V - V * w, axis=0) / np.maximum(np.linalg.norm(V, axis=0), 1e-300)
    return SpectralData(w, float(res.max() / scale), _min_gap(w))


def is_normal(A, tol: float = NORMAL_TOL) -> bool:
    """True iff ``||AA* - A*A||_F <= tol * max(1, ||A||_F^2)``."""
    A = as_cmatrix(A)
    defect = np.linalg.norm(A @ A.conj().T - A.conj().T @ A)
    return bool(defect <= tol * max(1.0, np.linalg.norm(A) ** 2))


def normality_residual(A) -> float:
    """Relative normality defect, the quantity thresholded by :func:`is_normal`."""
    A = as_cmatrix(A)
    defect = np.linalg.norm(A @ A.conj().T - A.conj().T @ A)
    return float(defect / max(1.0, np.linalg.norm(A) ** 2))


def _values(s) -> np.ndarray:
    if isinstance(s, SpectralData):
        return s.eigenvalues
    return np.asarray(s, dtype=complex).ravel()


def cluster_eigenvalues(s, tol: float = EIG_TOL) -> list[np.ndarray]:
    """Single-linkage clusters of eigenvalues.

    Two values are linked when closer than ``tol * (1 + spread)``. Returns
    the index arrays of each cluster, ordered by first member.
    """
    vals = _values(s)
    if vals.size == 0:
        return []
    d = _pairwise(vals)
    thresh = tol * (1.0 + d.max())
    _, labels = connected_components(csr_matrix(d <= thresh), directed=False)
    order = []
    for lab in labels:
        if lab not in order:
            order.append(lab)
    return [np.flatnonzero(labels == lab) for lab in order]


def distinct_eigenvalue_count(s, tol: float = EIG_TOL) -> int:
    """Number of eigenvalue clusters, see :func:`cluster_eigenvalues`.

    Near-degenerate spectra (gaps close to the threshold) can flip the
    count; ``SpectralData.min_gap`` shows how close a call was.
    """
    return len(cluster_eigenvalues(s, tol))


def distinct_eigenvalues(s, tol: float = EIG_TOL) -> np.ndarray:
    """One representative (the cluster mean) per eigenvalue cluster."""
    vals = _values(s)
    return np.array([vals[c].mean() for c in cluster_eigenvalues(vals, tol)])


def eigenvalues_collinear(s, tol: float = EIG_TOL) -> bool:
    """True iff the eigenvalues lie on one real-affine line in the plane.

    The line runs through the two most separated eigenvalues; every value
    must lie within ``tol * spread`` of it.
    """
    vals = _values(s)
    reps = distinct_eigenvalues(vals, tol)
    if reps.size <= 2:
        return True
    d = _pairwise(vals)
    p, q = np.unravel_index(np.argmax(d), d.shape)
    direction = (vals[q] - vals[p]) / d[p, q]
    dev = np.abs(np.imag((vals - vals[p]) * np.conj(direction)))
    return bool(dev.max() <= tol * d[p, q])


def apply_affine(A, mu: complex, nu: complex) -> np.ndarray:
    """``mu A + nu I``."""
    A = as_cmatrix(A)
    return mu * A + nu * np.eye(A.shape[0])


@dataclass(frozen=True)
class RankOneNilpotent:
    """Rank-one nilpotent ``x y*`` with ``y`` orthogonal to ``x``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex).ravel()
        y = np.asarray(self.y, dtype=complex).ravel()
        if x.shape != y.shape:
            raise DimensionError("x and y must have the same length")
        nx, ny = np.linalg.norm(x), np.linalg.norm(y)
        if nx == 0 or ny == 0:
            raise ValueError("x and y must be non-zero")
        if abs(np.vdot(y, x)) > 1e-12 * nx * ny:
            raise ValueError(f"y is not orthogonal to x (|y*x| = {abs(np.vdot(y, x)):.3e})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def weight(self) -> float:
        """``||x|| ||y||``, the only non-zero singular value."""
        return float(np.linalg.norm(self.x) * np.linalg.norm(self.y))

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.x, self.y.conj())

    def padded(self, n: int) -> "RankOneNilpotent":
        if n < self.n:
            raise DimensionError(f"cannot pad a length-{self.n} factor to {n}")
        z = np.zeros(n - self.n, dtype=complex)
        return RankOneNilpotent(np.concatenate([self.x, z]), np.concatenate([self.y, z]))

    def conjugated(self, W: np.ndarray) -> "RankOneNilpotent":
        """Factors of ``W X W*`` for unitary ``W``."""
        return RankOneNilpotent(W @ self.x, W @ self.y)

    @classmethod
    def from_matrix(cls, X, tol: float = 1e-9) -> "RankOneNilpotent":
        """Factor a rank-one nilpotent matrix via its leading singular pair."""
        X = as_cmatrix(X)
        U, s, Vh = np.linalg.svd(X)
        if s[0] == 0 or (s.size > 1 and s[1] > tol * s[0]):
            raise ValueError("matrix is not rank one")
        x = U[:, 0] * s[0]
        y = Vh[0].conj()
        # remove the round-off component along x
        y = y - np.vdot(x, y) / np.vdot(x, x) * x
        return cls(x, y)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def seed_sequence(seed) -> np.random.SeedSequence:
    """Normalise an int, ``None``, ``SeedSequence`` or ``Generator`` to a ``SeedSequence``."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = _rng(seed)
    Q, R = np.linalg.qr(_complex_gaussian(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_rank_one_nilpotent(n: int, seed=None) -> RankOneNilpotent:
    """Random ``x y*``: Gaussian ``x``, Gaussian ``y`` projected onto ``x``'s complement."""
    if n < 2:
        raise DimensionError("rank-one nilpotents need n >= 2")
    rng = _rng(seed)
    x = _complex_gaussian(rng, n)
    y = _complex_gaussian(rng, n)
    y = y - np.vdot(x, y) / np.vdot(x, x) * x
    y = y - np.vdot(x, y) / np.vdot(x, x) * x
    return RankOneNilpotent(x, y)


def random_matrix(n: int, seed=None, family: str = "dense") -> np.ndarray:
    """Random ``n x n`` matrix from one of :data:`FAMILIES`.

    ``two-eig-normal`` is ``U (alpha P + beta I) U*`` with ``P`` a coordinate
    projection of random rank ``1 <= k < n``; ``nilpotent`` is a unitarily
    rotated strictly upper-triangular Gaussian matrix.
    """
    rng = _rng(seed)
    if family == "dense":
        return _complex_gaussian(rng, (n, n))
    if family == "triangular":
        return np.triu(_complex_gaussian(rng, (n, n)))
    U = random_unitary(n, rng)
    if family == "normal":
        return (U * _complex_gaussian(rng, n)) @ U.conj().T
    if family == "two-eig-normal":
        if n < 2:
            raise DimensionError("two-eig-normal needs n >= 2")
        k = int(rng.integers(1, n))
        alpha, beta = _complex_gaussian(rng, 2)
        alpha = alpha if abs(alpha) > 0.1 else alpha + 1.0
        d = np.full(n, beta)
        d[:k] += alpha
        return (U * d) @ U.conj().T
    if family == "nilpotent":
        return U @ np.triu(_complex_gaussian(rng, (n, n)), 1) @ U.conj().T
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
