"""Maps of the form ``A -> mu_A U tau(A) U* + nu_A I`` and what they preserve.

A radial unitary similarity invariant ``f`` satisfies

* P1: ``f(mu U A U*) = f(A)`` for unit ``mu`` and unitary ``U``;
* P2: ``f(X) = f(0)`` only for ``X = 0``;
* P3: ``t -> f(t X)`` is strictly increasing on ``[0, inf)`` for every
  rank-one nilpotent ``X``.

The checkers here test these properties numerically, and the ``verify_*``
functions test that canonical maps keep ``f([A, B])`` (or the whole
pseudospectrum of ``[A, B]``) unchanged on random pairs.
"""

from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import pseudo
from .matcore import (
    EIG_TOL,
    NORMAL_TOL,
    RankOneNilpotent,
    as_cmatrix,
    commutator,
    distinct_eigenvalue_count,
    eigenvalues,
    eigenvalues_collinear,
    is_normal,
    random_matrix,
    random_rank_one_nilpotent,
    random_unitary,
    seed_sequence,
    spectral_norm,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- functions

@dataclass(frozen=True)
class RadialFunction:
    name: str
    func: Callable[[np.ndarray], float]
    params: dict = field(default_factory=dict)
    tol: float = 1e-12

    def __call__(self, A) -> float:
        return float(self.func(as_cmatrix(A)))


def pseudospectral_radius(eps: float, n_rays: int = 360, tol: float = 1e-10) -> RadialFunction:
    return RadialFunction(
        f"r_eps({eps:g})",
        lambda A: pseudo.radius(A, eps, n_rays=n_rays, tol=tol).value,
        {"eps": eps, "n_rays": n_rays, "tol": tol},
        tol,
    )


def frobenius_norm() -> RadialFunction:
    return RadialFunction("frobenius", lambda A: np.linalg.norm(A))


def largest_singular_value() -> RadialFunction:
    return RadialFunction("s1", spectral_norm)


def spectral_radius() -> RadialFunction:
    """Spectral radius. Not positive on nilpotents, so it fails P2; a negative control."""
    return RadialFunction("spectral_radius", lambda A: np.abs(np.linalg.eigvals(A)).max())


def parse_function(spec: str, n_rays: int = 360, tol: float = 1e-10) -> RadialFunction:
    """``reps:0.5``, ``frobenius``, ``s1`` or ``spectral_radius``."""
    name, _, arg = spec.partition(":")
    if name == "reps":
        return pseudospectral_radius(float(arg or 1.0), n_rays, tol)
    table = {"frobenius": frobenius_norm, "s1": largest_singular_value,
             "spectral_radius": spectral_radius}
    if name not in table:
        raise ValueError(f"unknown function {spec!r}")
    return table[name]()


def _mixed_matrix(n, rng, k):
    families = ("dense", "normal", "two-eig-normal", "triangular", "nilpotent", "rank-one")
    fam = families[k % len(families)]
    if fam == "rank-one":
        return random_rank_one_nilpotent(n, rng).matrix
    return random_matrix(n, rng, fam)


def check_P1(f: RadialFunction, n_trials: int = 20, seed=None, tol: float = 1e-8, n: int = 3) -> bool:
    rng = np.random.default_rng(seed_sequence(seed))
    for k in range(n_trials):
        A = _mixed_matrix(n, rng, k)
        U = random_unitary(n, rng)
        mu = np.exp(2j * np.pi * rng.uniform())
        fa, fb = f(A), f(mu * U @ A @ U.conj().T)
        if abs(fa - fb) > tol * (1 + fa):
            log.info("P1 counterexample for %s: %g vs %g", f.name, fa, fb)
            return False
    return True


def check_P2(f: RadialFunction, n_trials: int = 20, seed=None, n: int = 3,
             tol: float = 1e-6) -> bool:
    """``f(A) > f(0)`` on random non-zero ``A``.

    The gap must exceed ``tol * (1 + ||A||)``: values that only differ from
    ``f(0)`` by round-off (e.g. computed eigenvalues of a nilpotent) count as
    equal.
    """
    rng = np.random.default_rng(seed_sequence(seed))
    f0 = f(np.zeros((n, n), complex))
    for k in range(n_trials):
        A = _mixed_matrix(n, rng, k)
        if not f(A) - f0 > tol * (1 + spectral_norm(A)):
            log.info("P2 counterexample for %s at trial %d", f.name, k)
            return False
    return True


def check_P3(f: RadialFunction, X: RankOneNilpotent, t_grid) -> bool:
    """``f(t X)`` strictly increasing on ``{0} U t_grid``."""
    ts = np.concatenate([[0.0], np.sort(np.asarray(t_grid, dtype=float))])
    if ts.size < 2 or np.any(ts[1:] <= 0):
        raise ValueError("t_grid must hold positive values")
    vals = np.array([f(t * X.matrix) for t in ts])
    return bool(np.all(np.diff(vals) > f.tol * (1 + np.abs(vals[1:]))))


# -------------------------------------------------------------- canonical maps

class Tau(enum.Enum):
    IDENTITY = "identity"
    CONJUGATE = "conjugate"
    TRANSPOSE = "transpose"
    ADJOINT = "adjoint"
    ITRANSPOSE = "itranspose"

    def __call__(self, A: np.ndarray) -> np.ndarray:
        if self is Tau.IDENTITY:
            return A
        if self is Tau.CONJUGATE:
            return A.conj()
        if self is Tau.TRANSPOSE:
            return A.T
        if self is Tau.ADJOINT:
            return A.conj().T
        return 1j * A.T


class Swap(enum.Enum):
    ADJOINT = "adjoint"   # exceptional A: tau(A) replaced by tau(A)*
    NEGATE = "negate"     # exceptional A: mu_A replaced by -mu_A


class ConstantScalars:
    def __init__(self, mu: complex = 1.0, nu: complex = 0.0):
        self.mu, self.nu = complex(mu), complex(nu)
        self.params = {"mu": [self.mu.real, self.mu.imag], "nu": [self.nu.real, self.nu.imag]}

    def __call__(self, A):
        return self.mu, self.nu


class RandomScalars:
    """Unit ``mu_A`` and Gaussian ``nu_A``, a deterministic function of ``(A, seed)``.

    With ``mu_choices`` set, ``mu_A`` is drawn from that finite set instead.
    """

    def __init__(self, seed: int = 0, nu_scale: float = 1.0, mu_choices=None):
        self.seed, self.nu_scale = int(seed), float(nu_scale)
        self.mu_choices = None if mu_choices is None else [complex(m) for m in mu_choices]
        self.params = {"seed": self.seed, "nu_scale": self.nu_scale}

    def __call__(self, A):
        digest = hashlib.sha256(np.ascontiguousarray(A).tobytes()).digest()
        rng = np.random.default_rng([self.seed, int.from_bytes(digest[:8], "little")])
        if self.mu_choices is None:
            mu = np.exp(2j * np.pi * rng.uniform())
        else:
            mu = self.mu_choices[int(rng.integers(len(self.mu_choices)))]
        nu = self.nu_scale * (rng.standard_normal() + 1j * rng.standard_normal())
        return complex(mu), complex(nu)


def never(A) -> bool:
    return False


def two_eig_normal_predicate(normal_tol: float = NORMAL_TOL, eig_tol: float = EIG_TOL):
    """Membership in the set of normal matrices with at most two distinct eigenvalues."""
    def pred(A):
        return is_normal(A, normal_tol) and distinct_eigenvalue_count(eigenvalues(A), eig_tol) <= 2
    pred.kind = "two-eig-normal"
    return pred


def matches_any(targets, atol: float = 1e-12):
    """Predicate true on matrices equal (to ``atol``) to one of ``targets``."""
    targets = [as_cmatrix(T) for T in targets]

    def pred(A):
        return any(T.shape == A.shape and np.allclose(A, T, atol=atol, rtol=0) for T in targets)
    pred.kind = "explicit"
    return pred


class MapError(ValueError):
    pass


@dataclass
class CanonicalMap:
    U: np.ndarray
    tau: Tau = Tau.IDENTITY
    scalar_rule: Callable = field(default_factory=ConstantScalars)
    exceptional: Callable = never
    swap: Swap = Swap.ADJOINT

    def __post_init__(self):
        self.U = as_cmatrix(self.U)
        n = self.U.shape[0]
        if np.linalg.norm(self.U.conj().T @ self.U - np.eye(n)) > 1e-10:
            raise MapError("U is not unitary")
        self.tau = Tau(self.tau)
        self.swap = Swap(self.swap)

    @classmethod
    def identity(cls, n: int) -> "CanonicalMap":
        return cls(np.eye(n))

    def scalars(self, A) -> tuple[complex, complex]:
        mu, nu = self.scalar_rule(A)
        if abs(abs(mu) - 1) > 1e-10:
            raise MapError(f"|mu_A| = {abs(mu)} != 1")
        return mu, nu

    def __call__(self, A) -> np.ndarray:
        return apply_map(self, A)


def apply_map(m: CanonicalMap, A) -> np.ndarray:
    A = as_cmatrix(A)
    if A.shape != m.U.shape:
        raise MapError(f"dimension mismatch: {A.shape} vs {m.U.shape}")
    mu, nu = m.scalars(A)
    T = m.tau(A)
    if m.exceptional(A):
        if m.swap is Swap.ADJOINT:
            T = T.conj().T
        else:
            mu = -mu
    return mu * (m.U @ T @ m.U.conj().T) + nu * np.eye(A.shape[0])


# ------------------------------------------------------------------ verification

@dataclass
class InvarianceReport:
    passed: bool
    pairs: int
    max_deviation: float
    counterexamples: list = field(default_factory=list)
    patterns: list = field(default_factory=list)


def random_pairs(n: int, n_pairs: int, seed=None, engineered: bool = False):
    """Mixed-family pairs.

    With ``engineered`` set, pair ``k`` has ``k % 3`` members drawn from the
    two-eigenvalue normal family and the rest from the other families.
    """
    rng = np.random.default_rng(seed_sequence(seed))
    pairs = []
    for k in range(n_pairs):
        if not engineered:
            pairs.append((_mixed_matrix(n, rng, k), _mixed_matrix(n, rng, k + 3)))
            continue
        want = k % 3
        A = random_matrix(n, rng, "two-eig-normal") if want >= 1 else _other_matrix(n, rng, k)
        B = random_matrix(n, rng, "two-eig-normal") if want == 2 else _other_matrix(n, rng, k + 1)
        if want == 1 and k % 2:
            A, B = B, A
        pairs.append((A, B))
    return pairs


def _other_matrix(n, rng, k):
    fam = ("dense", "normal", "triangular", "nilpotent", "rank-one")[k % 5]
    if fam == "rank-one":
        return random_rank_one_nilpotent(n, rng).matrix
    return random_matrix(n, rng, fam)


def verify_lie_invariance(m: CanonicalMap, f: RadialFunction, n_pairs: int = 20, seed=None,
                          tol: float = 1e-8, pairs=None) -> InvarianceReport:
    """``f([A, B])`` against ``f([m(A), m(B)])`` on random pairs.

    Passes when every absolute deviation is at most ``tol * (1 + f([A, B]))``.
    """
    n = m.U.shape[0]
    pairs = random_pairs(n, n_pairs, seed) if pairs is None else pairs
    worst, bad = 0.0, []
    for A, B in pairs:
        before = f(commutator(A, B))
        after = f(commutator(apply_map(m, A), apply_map(m, B)))
        dev = abs(before - after)
        worst = max(worst, dev)
        if dev > tol * (1 + before):
            bad.append({"A": A, "B": B, "before": before, "after": after})
    return InvarianceReport(not bad, len(pairs), worst, bad)


def _check_sigma_family(m: CanonicalMap, probes):
    if m.tau not in (Tau.IDENTITY, Tau.ITRANSPOSE):
        raise MapError(f"tau must be identity or i*transpose, got {m.tau.value}")
    if m.exceptional is not never and m.swap is not Swap.NEGATE:
        raise MapError("exceptional matrices must flip the sign of mu")
    mus = {m.scalars(A)[0] for A in probes}
    if len(mus) != 1 or next(iter(mus)) not in (1, -1):
        raise MapError("mu_A must be a constant +1 or -1 outside the exceptional set")


def verify_sigma_invariance(m: CanonicalMap, eps: float, n_pairs: int = 20, samples: int = 512,
                            seed=None, delta: float = 1e-6, pairs=None) -> InvarianceReport:
    """Sampled equality of ``sigma_eps([A, B])`` and ``sigma_eps([m(A), m(B)])``.

    The pattern of each pair records how many of ``A, B`` are exceptional.
    """
    n = m.U.shape[0]
    ss = seed_sequence(seed)
    pair_seed, sample_seed = ss.spawn(2)
    if pairs is None:
        pairs = random_pairs(n, n_pairs, pair_seed, engineered=True)
    _check_sigma_family(m, [M for pr in pairs for M in pr])
    bad, patterns = [], []
    worst = 0.0
    for (A, B), child in zip(pairs, sample_seed.spawn(len(pairs))):
        pattern = ("none", "one", "both")[int(m.exceptional(A)) + int(m.exceptional(B))]
        patterns.append(pattern)
        C1 = commutator(A, B)
        C2 = commutator(apply_map(m, A), apply_map(m, B))
        cmp = pseudo.compare_sampled_sets(C1, C2, eps, samples, child, delta)
        worst = max(worst, len(cmp.disagreements) / max(cmp.compared, 1))
        if not cmp.equal:
            bad.append({"A": A, "B": B, "pattern": pattern, "points": cmp.disagreements[:5]})
    return InvarianceReport(not bad, len(pairs), worst, bad, patterns)


# ---------------------------------------------------------------- spectra

class MatchMode(enum.Enum):
    LINEAR = "Linear"
    CONJUGATE_LINEAR = "ConjugateLinear"
    BOTH = "Both"


class NoIsometry(ValueError):
    pass


class NoSolution(ValueError):
    pass


@dataclass(frozen=True)
class SpectrumMatch:
    """``gamma_i = mu lambda_i + nu`` (Linear) or ``conj(gamma_i) = mu lambda_i + nu``.

    For ``Both``, ``mu, nu`` are the linear solution and ``conj_mu, conj_nu``
    the conjugate-linear one.
    """

    mode: MatchMode
    mu: complex
    nu: complex
    max_residual: float
    conj_mu: complex | None = None
    conj_nu: complex | None = None

    def apply(self, lambdas) -> np.ndarray:
        lam = np.asarray(lambdas, dtype=complex)
        if self.mode is MatchMode.CONJUGATE_LINEAR:
            return np.conj(self.mu * lam + self.nu)
        return self.mu * lam + self.nu


def _spread(v):
    return float(np.abs(v[:, None] - v[None, :]).max()) if v.size else 0.0


def check_pairwise_isometry(lambdas, gammas, tol: float = 1e-9) -> bool:
    lam = np.asarray(lambdas, dtype=complex).ravel()
    gam = np.asarray(gammas, dtype=complex).ravel()
    if lam.shape != gam.shape:
        raise ValueError("lambdas and gammas differ in length")
    dl = np.abs(lam[:, None] - lam[None, :])
    dg = np.abs(gam[:, None] - gam[None, :])
    return bool(np.abs(dl - dg).max(initial=0.0) <= tol * (1 + _spread(lam)))


def match_spectra(lambdas, gammas, tol: float = 1e-9) -> SpectrumMatch:
    """Recover the rigid motion taking ``lambdas`` to ``gammas`` (index-matched).

    Raises :class:`NoIsometry` when pairwise distances differ and
    :class:`NoSolution` when neither a rotation nor a reflection fits.
    """
    lam = np.asarray(lambdas, dtype=complex).ravel()
    gam = np.asarray(gammas, dtype=complex).ravel()
    if lam.size == 0:
        raise ValueError("need at least one point")
    if not check_pairwise_isometry(lam, gam, tol):
        raise NoIsometry("pairwise distances are not preserved")
    bound = tol * (1 + _spread(lam))
    if _spread(lam) <= bound:
        nu = gam[0] - lam[0]
        res = float(np.abs(gam - lam - nu).max())
        return SpectrumMatch(MatchMode.BOTH, 1.0 + 0j, complex(nu), res, 1.0 + 0j,
                             complex(np.conj(gam[0]) - lam[0]))
    d = np.abs(lam[:, None] - lam[None, :])
    p, q = np.unravel_index(np.argmax(d), d.shape)
    mu1 = (gam[p] - gam[q]) / (lam[p] - lam[q])
    mu2 = np.conj(gam[p] - gam[q]) / (lam[p] - lam[q])
    mu1 /= abs(mu1)
    mu2 /= abs(mu2)
    nu1 = gam[p] - mu1 * lam[p]
    nu2 = np.conj(gam[p]) - mu2 * lam[p]
    res1 = float(np.abs(mu1 * lam + nu1 - gam).max())
    res2 = float(np.abs(mu2 * lam + nu2 - np.conj(gam)).max())
    ok1, ok2 = res1 <= bound, res2 <= bound
    if ok1 and ok2:
        return SpectrumMatch(MatchMode.BOTH, complex(mu1), complex(nu1), max(res1, res2),
                             complex(mu2), complex(nu2))
    if ok1:
        return SpectrumMatch(MatchMode.LINEAR, complex(mu1), complex(nu1), res1)
    if ok2:
        return SpectrumMatch(MatchMode.CONJUGATE_LINEAR, complex(mu2), complex(nu2), res2)
    raise NoSolution(f"isometric but no affine fit (residuals {res1:.2e}, {res2:.2e})")


def collinear(values, tol: float = EIG_TOL) -> bool:
    return eigenvalues_collinear(values, tol)
