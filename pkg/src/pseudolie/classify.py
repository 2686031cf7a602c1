"""Normal matrices with at most two distinct eigenvalues, three ways.

For ``n >= 3`` the following agree:

* ``A`` is normal with at most two distinct eigenvalues (checked directly);
* ``sigma_eps([A, B])`` is symmetric about 0 for every rank-one nilpotent
  ``B`` (probed with random ``B``);
* otherwise an explicit rank-one nilpotent ``B`` breaks the symmetry
  (constructed from the eigen/Schur structure of ``A`` and certified by a
  concrete sample point).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import cubiclemma
from .matcore import (
    EIG_TOL,
    NORMAL_TOL,
    DimensionError,
    RankOneNilpotent,
    as_cmatrix,
    cluster_eigenvalues,
    commutator,
    distinct_eigenvalue_count,
    eigenvalues,
    is_normal,
    random_rank_one_nilpotent,
    seed_sequence,
    spectral_norm,
)
from .pseudo import SYMMETRY_MARGIN, symmetric

log = logging.getLogger(__name__)

CASE_TAGS = ("TwoEigNormal", "NormalManyEig", "NonNormal-2a", "NonNormal-2bi",
             "NonNormal-2bii", "Fallback")


class InvalidTarget(ValueError):
    """The matrix is normal with at most two distinct eigenvalues; no witness exists."""


class BudgetExhausted(RuntimeError):
    """No certified witness was found within the search budget."""


def _check_dim(A) -> np.ndarray:
    A = as_cmatrix(A)
    if A.shape[0] < 3:
        raise DimensionError("the classification needs n >= 3")
    return A


def direct_two_eig_normal(A, normal_tol: float = NORMAL_TOL, eig_tol: float = EIG_TOL) -> bool:
    A = _check_dim(A)
    return is_normal(A, normal_tol) and distinct_eigenvalue_count(eigenvalues(A), eig_tol) <= 2


@dataclass(frozen=True)
class ProbeResult:
    symmetric: bool
    probes_used: int
    witness: complex | None = None

    def __bool__(self):
        return self.symmetric


def probe_two_eig_normal(A, eps: float = 1.0, n_probes: int = 20, samples_per_probe: int = 256,
                         seed=None, margin: float = SYMMETRY_MARGIN) -> ProbeResult:
    """Symmetry of ``sigma_eps([A, B])`` for ``n_probes`` random rank-one nilpotents ``B``.

    Stops at the first asymmetric commutator.
    """
    A = as_cmatrix(A)
    if eps <= 0:
        raise ValueError("eps must be positive")
    seeds = seed_sequence(seed).spawn(n_probes)
    for k, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        B = random_rank_one_nilpotent(A.shape[0], rng).matrix
        verdict = symmetric(commutator(A, B), eps, samples_per_probe, rng, margin)
        if not verdict.symmetric:
            return ProbeResult(False, k + 1, verdict.witness)
    return ProbeResult(True, n_probes)


@dataclass(frozen=True)
class Witness:
    """A rank-one nilpotent ``B`` with ``sigma_eps([A, B]) != -sigma_eps([A, B])``.

    ``point`` lies inside ``sigma_eps`` and ``-point`` outside, each by at
    least ``margin``.
    """

    nilpotent: RankOneNilpotent
    commutator: np.ndarray
    epsilon: float
    point: complex
    margin: float
    route: str


def _lead_nonnormal_frame(A: np.ndarray, tol: float, eig_tol: float):
    """Unitary ``W`` with ``T = W* A W`` upper triangular and ``T[0, 1] != 0``.

    Works from a Schur form: the first column ``j`` with a non-zero entry
    above the diagonal yields a 2-dimensional invariant subspace on which
    ``A`` is not normal; putting it first gives the required triangular form.
    """
    T, Z = scipy.linalg.schur(A, output="complex")
    n = A.shape[0]
    thresh = tol * max(1.0, np.linalg.norm(A))
    d = np.diag(T)
    same = lambda u, v: abs(u - v) <= eig_tol * (1.0 + np.ptp(d.real) + np.ptp(d.imag))
    for j in range(1, n):
        col = T[:j, j]
        if np.abs(col).max() <= thresh:
            continue
        # leading j x j block is diagonal, so e_0..e_{j-1} are eigenvectors
        y = np.zeros(n, complex)
        y[j] = 1.0
        w = np.zeros(n, complex)
        for k in range(j):
            if same(d[k], d[j]):
                w[k] = col[k]
            else:
                y[k] = col[k] / (d[j] - d[k])
        if np.linalg.norm(w) > thresh:
            first, second = w, y
        else:
            k = int(np.argmax(np.where([not same(d[i], d[j]) for i in range(j)], np.abs(col), 0)))
            first = np.zeros(n, complex)
            first[k] = 1.0
            second = y
        q1 = first / np.linalg.norm(first)
        q2 = second - np.vdot(q1, second) * q1
        q2 /= np.linalg.norm(q2)
        basis = np.column_stack([q1, q2, np.eye(n)])
        Q, _ = np.linalg.qr(basis)
        Q = Q[:, :n]
        Q[:, 0] *= np.vdot(Q[:, 0], q1) / abs(np.vdot(Q[:, 0], q1))
        Q[:, 1] *= np.vdot(Q[:, 1], q2) / abs(np.vdot(Q[:, 1], q2))
        M = Q.conj().T @ T @ Q
        if n > 2:
            T2, Z2 = scipy.linalg.schur(M[2:, 2:], output="complex")
            Q[:, 2:] = Q[:, 2:] @ Z2
            M = Q.conj().T @ T @ Q
        M = np.triu(M)
        return M, Z @ Q
    raise ValueError("matrix is normal to working precision")


def _unitary_with_first_column(v: np.ndarray) -> np.ndarray:
    m = v.size
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(m)]))
    Q = Q[:, :m]
    Q[:, 0] *= np.vdot(Q[:, 0], v) / abs(np.vdot(Q[:, 0], v))
    return Q


def _subcase_2a(T: np.ndarray):
    """Frame change ``U = U1 + U2`` making row 2 equal ``[a21, a22, a23, 0, ...]``.

    ``U1`` is a 2x2 rotation picked from a grid to maximise
    ``|a21| |a23|^2`` (the linear coefficient magnitude), then phased so
    ``a21`` is real; ``U2`` folds the rest of row 2 into column 3.
    """
    n = T.shape[0]
    T2, R = T[:2, :2], T[:2, 2:]
    best = None
    for th in np.linspace(0.05, np.pi / 2 - 0.05, 12):
        for ps in np.linspace(0, 2 * np.pi, 12, endpoint=False):
            c, s = np.cos(th), np.sin(th)
            U1 = np.array([[c, -np.exp(-1j * ps) * s], [np.exp(1j * ps) * s, c]])
            a21 = (U1 @ T2 @ U1.conj().T)[1, 0]
            r = np.linalg.norm((U1 @ R)[1])
            score = abs(a21) * r * r
            if best is None or score > best[0]:
                best = (score, U1)
    U1 = best[1]
    a21 = (U1 @ T2 @ U1.conj().T)[1, 0]
    U1 = np.diag([1.0, np.exp(-1j * np.angle(a21))]) @ U1
    r = (U1 @ R)[1]
    Q = _unitary_with_first_column(r.conj() / np.linalg.norm(r))
    U = np.zeros((n, n), complex)
    U[:2, :2] = U1
    U[2:, 2:] = Q.conj().T
    At = U @ T @ U.conj().T
    block = cubiclemma.subcase_2a_block(At[0, 0], At[1, 1], float(At[1, 0].real), At[1, 2])
    return U, block


def _certify(A, B: RankOneNilpotent, eps, route, block=None, scale=1.0, seed=None):
    """Check ``[A, B]`` for asymmetry, seeding probes from a cubic-polynomial certificate when available."""
    C = commutator(A, B.matrix)
    normC = spectral_norm(C)
    if normC == 0:
        return None
    eps_c = normC if eps is None else eps
    extra, hints = [], [float(np.angle(scale))]
    if block is not None:
        try:
            cert = cubiclemma.asymmetry_certificate(block, eps_c / abs(scale))
        except (cubiclemma.RootFindingError, cubiclemma.CrossValidationError):
            cert = None
        if cert is not None:
            extra.append(scale * cert.witness)
    verdict = symmetric(C, eps_c, 256, seed, extra_points=extra, hint_angles=hints)
    if verdict.symmetric:
        return None
    return Witness(B, C, float(eps_c), verdict.witness, verdict.margin, route)


def _witness_normal(A, eps, eig_tol, seed):
    T, Z = scipy.linalg.schur(A, output="complex")
    d = np.diag(T)
    clusters = cluster_eigenvalues(d, eig_tol)
    reps = [c[0] for c in clusters]
    best = None
    for tri in itertools.combinations(reps, 3):
        vals = d[list(tri)]
        gap = min(abs(vals[0] - vals[1]), abs(vals[0] - vals[2]), abs(vals[1] - vals[2]))
        if best is None or gap > best[0]:
            best = (gap, tri)
    tri = best[1]
    # relabel so Re((b - a) conj(c - a)) > 0; first labelling within half of the best
    options = []
    for ia in sorted(tri):
        ib, ic = [i for i in sorted(tri) if i != ia]
        a, b, c = d[ia], d[ib], d[ic]
        options.append((((b - a) * np.conj(c - a)).real, ia, ib, ic))
    top = max(o[0] for o in options)
    _, ia, ib, ic = next(o for o in options if o[0] >= 0.5 * top)
    a, b, c = d[ia], d[ib], d[ic]
    alpha = 2.0 / (b - c)
    a_scaled = alpha * (a - (b + c) / 2)
    perm = [ia, ib, ic] + [i for i in range(A.shape[0]) if i not in (ia, ib, ic)]
    W = Z[:, perm]
    n = A.shape[0]
    u = np.zeros(n, complex)
    v = np.zeros(n, complex)
    u[:3] = [np.sqrt(2.0), 1.0, 1.0]
    v[:3] = [0.0, -1.0, 1.0]
    B = RankOneNilpotent(W @ u, W @ v)
    return _certify(A, B, eps, "NormalManyEig", cubiclemma.case1_block(a_scaled), 1.0 / alpha, seed)


def _witness_nonnormal(A, eps, tol, eig_tol, seed):
    n = A.shape[0]
    T, W = _lead_nonnormal_frame(A, tol, eig_tol)
    thresh = tol * max(1.0, np.linalg.norm(A))
    if np.abs(T[:2, 2:]).max() > thresh:
        U, block = _subcase_2a(T)
        F = W @ U.conj().T
        B = RankOneNilpotent(F[:, 0], F[:, 1])
        return _certify(A, B, eps, "NonNormal-2a", block, 1.0, seed)

    That = T - T[2, 2] * np.eye(n)
    if max(abs(That[0, 0]), abs(That[1, 1])) <= thresh:
        a12 = That[0, 1]
        u = np.zeros(n, complex)
        v = np.zeros(n, complex)
        u[:3] = [1.0, 1.0, -1.0]
        v[:3] = [1.0, 0.0, 1.0]
        B = RankOneNilpotent(W @ u, W @ v)
        return _certify(A, B, eps, "NonNormal-2bi", cubiclemma.subcase_2bi_block(), a12, seed)

    if abs(That[0, 0]) < abs(That[1, 1]):
        T, W, info = scipy.linalg.lapack.ztrexc(T, W, 2, 1)
        if info != 0:
            raise RuntimeError(f"ztrexc failed with info={info}")
        That = T - T[2, 2] * np.eye(n)
    a11, a12 = That[0, 0], That[0, 1]
    u = np.zeros(n, complex)
    v = np.zeros(n, complex)
    u[:3] = [1.0, 0.0, -1.0]
    v[:3] = [1.0, 0.0, 1.0]
    B = RankOneNilpotent(W @ u, W @ v)
    scale = np.exp(1j * np.angle(a11)) * abs(a12)
    block = cubiclemma.subcase_2bii_block(abs(a11) / abs(a12))
    return _certify(A, B, eps, "NonNormal-2bii", block, scale, seed)


def construct_witness(A, eps: float | None = None, budget: int = 200, seed=None,
                      normal_tol: float = NORMAL_TOL, eig_tol: float = EIG_TOL) -> Witness:
    """Rank-one nilpotent ``B`` whose commutator with ``A`` has asymmetric pseudospectrum.

    Tries the structured construction for the case ``A`` falls in, then
    random rank-one nilpotents (up to ``budget``). With ``eps=None`` the
    certification uses ``eps = ||[A, B]||``, i.e. unit epsilon after
    normalising the commutator.
    """
    A = _check_dim(A)
    if direct_two_eig_normal(A, normal_tol, eig_tol):
        raise InvalidTarget("A is normal with at most two distinct eigenvalues")
    ss = seed_sequence(seed)
    structured_seed, fallback_seed = ss.spawn(2)
    try:
        if is_normal(A, normal_tol):
            w = _witness_normal(A, eps, eig_tol, structured_seed)
        else:
            w = _witness_nonnormal(A, eps, normal_tol, eig_tol, structured_seed)
    except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        log.info("structured witness failed (%s); falling back to random search", exc)
        w = None
    if w is not None:
        return w
    for child in fallback_seed.spawn(budget):
        rng = np.random.default_rng(child)
        B = random_rank_one_nilpotent(A.shape[0], rng)
        w = _certify(A, B, eps, "Fallback", seed=rng)
        if w is not None:
            return w
    raise BudgetExhausted(f"no asymmetric commutator found in {budget} random probes")


def two_eig_frame(A, eig_tol: float = EIG_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``(V, J)`` with ``V* A V = nu I + lam J`` and ``J = I_k + (-I_{n-k})``."""
    A = as_cmatrix(A)
    reps = [np.mean(eigenvalues(A).eigenvalues[c]) for c in cluster_eigenvalues(eigenvalues(A), eig_tol)]
    if len(reps) != 2:
        raise ValueError("A must have exactly two distinct eigenvalues")
    p, q = reps
    P = (A - q * np.eye(A.shape[0])) / (p - q)
    w, V = np.linalg.eigh((P + P.conj().T) / 2)
    order = np.argsort(-w)
    V = V[:, order]
    k = int(np.sum(w > 0.5))
    J = np.diag(np.r_[np.ones(k), -np.ones(A.shape[0] - k)]).astype(complex)
    return V, J


def two_eig_symmetry_identity(A, B, tol: float = 1e-8, normal_tol: float = NORMAL_TOL,
                              eig_tol: float = EIG_TOL) -> bool:
    """``-C = J C J*`` for ``C = V* [A, B] V`` in the eigen-frame of a two-eigenvalue normal ``A``."""
    A = _check_dim(A)
    if not direct_two_eig_normal(A, normal_tol, eig_tol):
        raise ValueError("A is not normal with at most two distinct eigenvalues")
    if distinct_eigenvalue_count(eigenvalues(A), eig_tol) < 2:
        raise ValueError("A is scalar; the frame involution is undefined")
    V, J = two_eig_frame(A, eig_tol)
    C = V.conj().T @ commutator(A, B) @ V
    return bool(np.linalg.norm(C + J @ C @ J.conj().T) <= tol * np.linalg.norm(C))


@dataclass(frozen=True)
class ClassReport:
    direct: bool
    probe: ProbeResult
    witness: Witness | None
    case_tag: str
    normality_residual: float
    min_gap: float

    @property
    def agree(self) -> bool:
        return self.direct == self.probe.symmetric


def classify(A, eps: float = 1.0, n_probes: int = 20, samples_per_probe: int = 256, seed=None,
             budget: int = 200, normal_tol: float = NORMAL_TOL,
             eig_tol: float = EIG_TOL) -> ClassReport:
    """Run the direct test, the random probe and (if needed) the witness construction."""
    from .matcore import normality_residual

    A = _check_dim(A)
    probe_seed, witness_seed = seed_sequence(seed).spawn(2)
    direct = direct_two_eig_normal(A, normal_tol, eig_tol)
    probe = probe_two_eig_normal(A, eps, n_probes, samples_per_probe, probe_seed)
    witness = None
    if direct:
        tag = "TwoEigNormal"
    else:
        try:
            witness = construct_witness(A, eps, budget, witness_seed, normal_tol, eig_tol)
            tag = witness.route
        except BudgetExhausted:
            tag = "Fallback"
    return ClassReport(direct, probe, witness, tag, normality_residual(A), eigenvalues(A).min_gap)
