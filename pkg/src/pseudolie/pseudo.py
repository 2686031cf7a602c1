"""Pseudospectra, pseudospectral radius and symmetry probing.

The epsilon-pseudospectrum of ``A`` is the open set of ``z`` with
``s_min(A - zI) < eps``. Everything here is built on evaluating that smallest
singular value; since ``z -> s_min(A - zI)`` is 1-Lipschitz, boundary searches
along rays can skip ahead safely by ``s_min - eps``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .matcore import DimensionError, as_cmatrix, eigenvalues, smin_batch, smin_shift, spectral_norm

DEFAULT_TOL = 1e-10
DEFAULT_RAYS = 720
SCAN_STEPS = 256
SYMMETRY_MARGIN = 1e-6
_JITTERS = (1e-3, 1e-2, 5e-2)


def member(A, z: complex, eps: float) -> bool:
    """Strict membership ``s_min(A - zI) < eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return smin_shift(A, z) < eps


@dataclass(frozen=True)
class GridSpec:
    center: complex = 0.0
    half_width: float = 1.0
    resolution: int = 101

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise ValueError("half_width must be positive and finite")

    def points(self) -> np.ndarray:
        """Grid points, imaginary part in the outer loop."""
        ax = np.linspace(-self.half_width, self.half_width, self.resolution)
        re, im = np.meshgrid(ax, ax)
        return (complex(self.center) + re + 1j * im).ravel()


@dataclass(frozen=True)
class PseudospecSample:
    epsilon: float
    points: np.ndarray
    smin_values: np.ndarray

    @property
    def membership(self) -> np.ndarray:
        return self.smin_values < self.epsilon

    def rows(self):
        """``(re, im, smin, member)`` tuples, the CSV layout."""
        for z, s, m in zip(self.points, self.smin_values, self.membership):
            yield float(z.real), float(z.imag), float(s), bool(m)


def grid(A, eps: float, spec: GridSpec, threads: int = 1, chunk: int = 2048) -> PseudospecSample:
    """Evaluate ``s_min(A - zI)`` on every point of ``spec``.

    Chunks are evaluated on up to ``threads`` workers and reassembled in
    index order, so results do not depend on the thread count.
    """
    A = as_cmatrix(A)
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = spec.points()
    blocks = [pts[i:i + chunk] for i in range(0, pts.size, chunk)]
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: smin_batch(A, b), blocks))
    else:
        parts = [smin_batch(A, b) for b in blocks]
    return PseudospecSample(float(eps), pts, np.concatenate(parts))


class RayBoundary(NamedTuple):
    t: float
    empty: bool


def _check_ray_tol(tol: float, tmax: float):
    if tol <= 0:
        raise ValueError("tol must be positive")
    if tol < 8 * np.finfo(float).eps * max(1.0, tmax):
        raise ValueError(
            f"tol={tol:g} is below the floating-point resolution of rays of length {tmax:g}")


def _march(A, eps, dirs, tmax, steps):
    """Walk inwards from ``tmax`` along each direction until ``s_min <= eps``.

    Steps are ``max(s_min - eps, tmax/steps)``: never coarser than a uniform
    scan with ``steps`` intervals, and Lipschitz-safe when longer. Returns
    brackets ``lo <= t* <= hi`` and a mask of rays that never entered.
    """
    h = tmax / steps
    m = dirs.size
    t = np.full(m, tmax)
    hi = np.full(m, tmax)
    lo = np.zeros(m)
    empty = np.zeros(m, dtype=bool)
    active = np.ones(m, dtype=bool)
    for _ in range(10 * steps + 10):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s = smin_batch(A, t[idx] * dirs[idx])
        inside = s <= eps
        done = idx[inside]
        lo[done] = t[done]
        active[done] = False
        out = idx[~inside]
        hi[out] = t[out]
        at_origin = t[out] <= 0.0
        empty[out[at_origin]] = True
        active[out[at_origin]] = False
        move = out[~at_origin]
        t[move] = np.maximum(t[move] - np.maximum(s[~inside][~at_origin] - eps, h), 0.0)
    # rays that started inside have a degenerate bracket at tmax
    hi = np.maximum(hi, lo)
    return lo, hi, empty


def _bisect(A, eps, dirs, lo, hi, tol):
    """Shrink brackets ``[lo, hi]`` (inside at ``lo``, outside at ``hi``) below ``tol``.

    Vectorised Illinois iteration: regula falsi with the stale endpoint's
    value halved, and a plain bisection step whenever a bracket fails to
    halve over two iterations.
    """
    lo, hi = lo.copy(), hi.copy()
    g_lo = smin_batch(A, lo * dirs) - eps
    g_hi = smin_batch(A, hi * dirs) - eps
    side = np.zeros(lo.size, dtype=int)  # +1 last kept lo, -1 last kept hi
    prev_width = np.full(lo.size, np.inf)
    width = hi - lo
    for it in range(200):
        open_ = np.flatnonzero(width > tol)
        if open_.size == 0:
            break
        a, b, ga, gb = lo[open_], hi[open_], g_lo[open_], g_hi[open_]
        denom = gb - ga
        with np.errstate(divide="ignore", invalid="ignore"):
            x = b - gb * (b - a) / denom
        slow = width[open_] > 0.5 * prev_width[open_]
        bad = ~np.isfinite(x) | (x <= a) | (x >= b) | (denom <= 0) | slow
        x[bad] = 0.5 * (a[bad] + b[bad])
        gx = smin_batch(A, x * dirs[open_]) - eps
        inside = gx <= 0

        if it % 2 == 0:
            prev_width[open_] = width[open_]
        kin, kout = open_[inside], open_[~inside]
        lo[kin], g_lo[kin] = x[inside], gx[inside]
        hi[kout], g_hi[kout] = x[~inside], gx[~inside]
        # Illinois: the endpoint retained twice in a row has its value halved
        stale_hi = kin[side[kin] == 1]
        g_hi[stale_hi] *= 0.5
        stale_lo = kout[side[kout] == -1]
        g_lo[stale_lo] *= 0.5
        side[kin], side[kout] = 1, -1
        width = hi - lo
    return 0.5 * (lo + hi)


def _ray_extent(A: np.ndarray) -> float:
    return float(np.linalg.svd(A, compute_uv=False)[0])


def ray_boundaries(A, eps: float, thetas, tol: float = DEFAULT_TOL,
                   scan_steps: int = SCAN_STEPS) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`boundary_ray`; returns ``(t, empty)`` arrays."""
    A = as_cmatrix(A)
    if eps <= 0:
        raise ValueError("eps must be positive")
    tmax = _ray_extent(A) + eps
    _check_ray_tol(tol, tmax)
    dirs = np.exp(1j * np.asarray(thetas, dtype=float).ravel())
    lo, hi, empty = _march(A, eps, dirs, tmax, scan_steps)
    t = _bisect(A, eps, dirs, lo, hi, tol)
    t[empty] = 0.0
    return t, empty


def boundary_ray(A, eps: float, theta: float, tol: float = DEFAULT_TOL,
                 scan_steps: int = SCAN_STEPS) -> RayBoundary:
    """Outermost ``t`` in ``[0, s_1(A) + eps]`` with ``s_min(A - t e^{i theta} I) <= eps``.

    The ray is scanned inwards from its far end and the first crossing is
    refined by Brent's method to ``tol``. ``empty`` is set (and ``t = 0``)
    when no scanned point of the ray lies in the closed pseudospectrum.
    """
    A = as_cmatrix(A)
    if eps <= 0:
        raise ValueError("eps must be positive")
    tmax = _ray_extent(A) + eps
    _check_ray_tol(tol, tmax)
    d = complex(math.cos(theta), math.sin(theta))
    n = A.shape[0]
    eye = np.eye(n)

    def g(t):
        return np.linalg.svd(A - (t * d) * eye, compute_uv=False)[-1] - eps

    h = tmax / scan_steps
    t, hi = tmax, tmax
    for _ in range(10 * scan_steps + 10):
        gt = g(t)
        if gt <= 0:
            break
        if t <= 0.0:
            return RayBoundary(0.0, True)
        hi = t
        t = max(t - max(gt, h), 0.0)
    if hi == t:
        return RayBoundary(t, False)
    if hi - t <= tol:
        return RayBoundary(0.5 * (t + hi), False)
    if g(hi) == 0.0:
        return RayBoundary(hi, False)
    root = brentq(g, t, hi, xtol=tol / 2, rtol=4 * np.finfo(float).eps, maxiter=200)
    return RayBoundary(float(root), False)


@dataclass(frozen=True)
class RadiusResult:
    """Pseudospectral radius with the boundary point that attains it.

    ``certificate_residual`` is ``|s_min(A - argmax I) - eps|``.
    """

    value: float
    argmax: complex
    certificate_residual: float
    rays_used: int


def _golden_max(fun, a, b, width_tol, max_iter=80):
    """Golden-section search for a maximum of ``fun`` on ``[a, b]``.

    Returns every ``(x, f(x))`` evaluated so the caller can keep the best.
    """
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    seen = [(c, fc), (d, fd)]
    for _ in range(max_iter):
        if b - a < width_tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
            seen.append((c, fc))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
            seen.append((d, fd))
    return seen


def radius(A, eps: float, n_rays: int = DEFAULT_RAYS, tol: float = DEFAULT_TOL,
           scan_steps: int = SCAN_STEPS, refine_peaks: int = 3) -> RadiusResult:
    """Pseudospectral radius ``sup{|z| : s_min(A - zI) < eps}``.

    ``n_rays`` uniform angles (plus the arguments of the eigenvalues, so no
    eigenvalue disk can fall between rays) are swept; the best
    ``refine_peaks`` local maxima are refined in angle by golden-section
    search over a window of two ray spacings.
    """
    A = as_cmatrix(A)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n_rays < 8:
        raise ValueError("n_rays must be >= 8")
    tmax = _ray_extent(A) + eps
    _check_ray_tol(tol, tmax)

    thetas = 2 * np.pi * np.arange(n_rays) / n_rays
    lam = eigenvalues(A).eigenvalues
    lam = lam[np.abs(lam) > 0]
    thetas = np.sort(np.concatenate([thetas, np.mod(np.angle(lam), 2 * np.pi)]))
    dirs = np.exp(1j * thetas)

    lo, hi, empty = _march(A, eps, dirs, tmax, scan_steps)
    # only rays whose bracket can beat the best lower bound need refining
    cand = np.flatnonzero(hi >= lo.max())
    vals = lo.copy()
    vals[cand] = _bisect(A, eps, dirs[cand], lo[cand], hi[cand], tol)
    vals[empty] = 0.0

    spacing = 2 * np.pi / n_rays
    m = vals.size
    peaks = [k for k in range(m) if vals[k] >= vals[k - 1] and vals[k] >= vals[(k + 1) % m]]
    peaks = sorted(peaks, key=lambda k: -vals[k])[:refine_peaks]

    best_k = int(np.argmax(vals))
    best_theta, best_t = float(thetas[best_k]), float(vals[best_k])
    evaluations = m

    def ray_t(theta):
        return boundary_ray(A, eps, theta, tol, scan_steps).t

    for k in peaks:
        centre = float(thetas[k])
        # peaks are smooth, so an angle error d costs O(t d^2) in the value
        seen = _golden_max(ray_t, centre - spacing, centre + spacing,
                           width_tol=math.sqrt(tol / max(best_t, tol)))
        evaluations += len(seen)
        for th, tv in seen:
            if tv > best_t:
                best_theta, best_t = th, tv

    z = best_t * complex(math.cos(best_theta), math.sin(best_theta))
    resid = abs(smin_shift(A, z) - eps)
    return RadiusResult(float(best_t), z, float(resid), int(evaluations))


class SymmetryKind(enum.Enum):
    SYMMETRIC_UP_TO_BUDGET = "SymmetricUpToBudget"
    ASYMMETRIC = "Asymmetric"


@dataclass(frozen=True)
class SymmetryVerdict:
    """Outcome of probing ``sigma_eps(C) == -sigma_eps(C)``.

    An asymmetric verdict carries ``witness`` with
    ``s_min(C - witness) < eps - margin`` and
    ``s_min(C + witness) > eps + margin``. A symmetric verdict only means no
    witness was found among ``probes_used`` points.
    """

    kind: SymmetryKind
    witness: complex | None = None
    margin: float = 0.0
    probes_used: int = 0

    @property
    def symmetric(self) -> bool:
        return self.kind is SymmetryKind.SYMMETRIC_UP_TO_BUDGET


def _probe_points(mats, eps, n_points, rng, tol, hint_angles=()):
    """Sample points concentrated near the pseudospectral boundaries of ``mats``.

    Per matrix: outermost boundary hits on uniform rays jittered in and out,
    midpoints between the boundary hits of antipodal rays, then uniform
    points in the disk of radius ``max s_1 + eps``.
    """
    m = max(8, n_points // 16)
    m += m % 2
    thetas = 2 * np.pi * (np.arange(m) + rng.uniform()) / m
    hints = np.asarray(list(hint_angles), dtype=float)
    thetas = np.concatenate([thetas, hints, hints + np.pi])
    structured = []
    for A in mats:
        t, empty = ray_boundaries(A, eps, thetas, tol=tol)
        dirs = np.exp(1j * thetas)
        hits = (t * dirs)[~empty]
        for j in _JITTERS:
            structured.append(hits * (1 - j))
            structured.append(hits * (1 + j))
        # antipodal pairs: uniform block pairs k with k + m/2, hints with hints
        anti = np.concatenate([(np.arange(m) + m // 2) % m,
                               m + hints.size + np.arange(hints.size),
                               m + np.arange(hints.size)])
        ta = t[anti]
        longer = np.where(t >= ta, t, ta)
        shorter = np.where(t >= ta, ta, t)
        angle = np.where(t >= ta, thetas, thetas[anti])
        differ = longer - shorter > tol
        structured.append((0.5 * (longer + shorter) * np.exp(1j * angle))[differ])
    structured = np.concatenate(structured) if structured else np.zeros(0, complex)
    r_disk = max(_ray_extent(A) for A in mats) + eps
    n_rand = max(n_points - structured.size, n_points // 4)
    rad = r_disk * np.sqrt(rng.uniform(size=n_rand))
    rand = rad * np.exp(2j * np.pi * rng.uniform(size=n_rand))
    return np.concatenate([structured, rand])


def symmetric(C, eps: float, n_probes: int = 512, seed=None, margin: float = SYMMETRY_MARGIN,
              extra_points=(), hint_angles=(), tol: float = 1e-10) -> SymmetryVerdict:
    """Probe whether ``sigma_eps(C)`` is symmetric about the origin.

    Each probe ``z`` is checked together with ``-z``; a witness needs
    ``s_min(C - z) < eps - margin`` and ``s_min(C + z) > eps + margin``.
    Among all qualifying probes the one with the largest margin is returned.
    ``extra_points`` and ``hint_angles`` let callers add targeted probes.
    """
    C = as_cmatrix(C)
    if eps <= 0 or margin <= 0:
        raise ValueError("eps and margin must be positive")
    rng = np.random.default_rng(seed)
    pts = _probe_points([C], eps, n_probes, rng, tol, hint_angles)
    pts = np.concatenate([np.asarray(list(extra_points), dtype=complex), pts])
    s_plus = smin_batch(C, pts)
    s_minus = smin_batch(C, -pts)
    fwd = np.minimum(eps - s_plus, s_minus - eps)
    bwd = np.minimum(eps - s_minus, s_plus - eps)
    score = np.maximum(fwd, bwd)
    k = int(np.argmax(score)) if pts.size else 0
    if pts.size and score[k] > margin:
        z = pts[k] if fwd[k] >= bwd[k] else -pts[k]
        return SymmetryVerdict(SymmetryKind.ASYMMETRIC, complex(z), float(score[k]), int(pts.size))
    return SymmetryVerdict(SymmetryKind.SYMMETRIC_UP_TO_BUDGET, None, 0.0, int(pts.size))


@dataclass
class SetComparison:
    """Sampled comparison of two pseudospectra."""

    equal: bool
    compared: int
    skipped: int
    disagreements: list = field(default_factory=list)

    def __bool__(self):
        return self.equal


def compare_sampled_sets(C1, C2, eps: float, n_samples: int = 512, seed=None,
                         delta: float = SYMMETRY_MARGIN, tol: float = 1e-10) -> SetComparison:
    """Compare membership in ``sigma_eps(C1)`` and ``sigma_eps(C2)`` on shared samples.

    Samples where either ``|s_min - eps| <= delta`` are skipped and counted.
    """
    C1 = as_cmatrix(C1)
    C2 = as_cmatrix(C2)
    if C1.shape != C2.shape:
        raise DimensionError(f"dimension mismatch: {C1.shape} vs {C2.shape}")
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be positive")
    rng = np.random.default_rng(seed)
    pts = _probe_points([C1, C2], eps, n_samples, rng, tol)
    s1 = smin_batch(C1, pts)
    s2 = smin_batch(C2, pts)
    clear = (np.abs(s1 - eps) > delta) & (np.abs(s2 - eps) > delta)
    bad = clear & ((s1 < eps) != (s2 < eps))
    return SetComparison(
        equal=not bool(bad.any()),
        compared=int(clear.sum()),
        skipped=int((~clear).sum()),
        disagreements=[complex(z) for z in pts[bad]],
    )


def sampled_set_equal(C1, C2, eps: float, n_samples: int = 512, seed=None,
                      delta: float = SYMMETRY_MARGIN) -> bool:
    """True iff sampled memberships of ``C1`` and ``C2`` agree outside the dead-band."""
    return compare_sampled_sets(C1, C2, eps, n_samples, seed, delta).equal


def spectral_abs_bounds(A, eps: float) -> tuple[float, float]:
    """``(rho(A), s_1(A) + eps)``, the a-priori bracket for the radius."""
    A = as_cmatrix(A)
    rho = float(np.abs(eigenvalues(A).eigenvalues).max())
    return rho, spectral_norm(A) + eps
