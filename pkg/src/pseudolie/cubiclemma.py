"""Characteristic polynomial of the shifted Gram matrix of a 3x3 block.

For real ``t`` let ``M(t) = (C - tI)^* (C - tI)``. Its characteristic
polynomial ``lambda^3 + p2(t) lambda^2 + p1(t) lambda + p0(t)`` has
polynomial coefficients of degree 2, 4 and 6 in ``t``. When ``p0`` and ``p2``
are even in ``t`` and ``p1`` is even up to a non-zero linear term ``a t``,
the smallest root at ``t0`` and ``-t0`` straddles ``eps^2`` and the
pseudospectrum of ``C`` cannot be symmetric about 0. The helpers here
compute the coefficients, test that structure, and locate ``t0``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .matcore import DimensionError, as_cmatrix, smin_shift

log = logging.getLogger(__name__)

FIT_NODES = np.array([0.0, 1.0, -1.0, 2.0, -2.0, 3.0, -3.0])
CHECK_NODES = np.array([0.5, -1.5, 2.5])


class CrossValidationError(RuntimeError):
    pass


class RootFindingError(RuntimeError):
    pass


def _as_block(C1) -> np.ndarray:
    C1 = as_cmatrix(C1)
    if C1.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 block, got {C1.shape}")
    return C1


def gram_charpoly_at(C1, t: float) -> tuple[float, float, float]:
    """``(p2(t), p1(t), p0(t))`` evaluated directly from ``M(t)``."""
    C1 = _as_block(C1)
    S = C1 - t * np.eye(3)
    M = S.conj().T @ S
    minors = sum(M[i, i] * M[j, j] - M[i, j] * M[j, i] for i, j in ((0, 1), (0, 2), (1, 2)))
    return (float(-np.trace(M).real), float(minors.real), float(-np.linalg.det(M).real))


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficient vectors in ascending powers of ``t``.

    ``odd_linear_a`` is the ``t^1`` coefficient of ``p1``.
    """

    p2: np.ndarray
    p1: np.ndarray
    p0: np.ndarray

    @property
    def odd_linear_a(self) -> float:
        return float(self.p1[1])

    def evaluate(self, t: float) -> tuple[float, float, float]:
        return (float(P.polyval(t, self.p2)), float(P.polyval(t, self.p1)),
                float(P.polyval(t, self.p0)))

    def cubic_roots(self, t: float) -> np.ndarray:
        """Roots of the cubic in ``lambda`` at ``t``, descending."""
        p2, p1, p0 = self.evaluate(t)
        return np.sort(np.roots([1.0, p2, p1, p0]).real)[::-1]

    def scale(self) -> float:
        return float(max(1.0, np.abs(np.concatenate([self.p2, self.p1, self.p0])).max()))


def extract_polynomials(C1, rtol: float = 1e-7) -> CubicCoeffs:
    """Fit ``p2, p1, p0`` from evaluations at ``t`` in ``{0, +-1, +-2, +-3}``.

    Seven nodes determine the degree-6 ``p0`` exactly; ``p1`` and ``p2`` are
    least-squares fits, exact for polynomial data. The fit is checked at
    three further nodes and :class:`CrossValidationError` raised on a
    relative residual above ``rtol``. A warning is issued when the block is
    not trace-free or has rank 3 (the setting the structure test assumes).
    """
    C1 = _as_block(C1)
    scale = max(1.0, float(np.linalg.norm(C1)))
    if abs(np.trace(C1)) > 1e-9 * scale or np.linalg.svd(C1, compute_uv=False)[-1] > 1e-9 * scale:
        warnings.warn("block is not trace-free with rank <= 2", stacklevel=2)

    vals = np.array([gram_charpoly_at(C1, t) for t in FIT_NODES])
    p2 = P.polyfit(FIT_NODES, vals[:, 0], 2)
    p1 = P.polyfit(FIT_NODES, vals[:, 1], 4)
    p0 = P.polyfit(FIT_NODES, vals[:, 2], 6)
    coeffs = CubicCoeffs(p2, p1, p0)

    for t in CHECK_NODES:
        direct = np.array(gram_charpoly_at(C1, t))
        fitted = np.array(coeffs.evaluate(t))
        err = np.abs(direct - fitted).max() / max(1.0, np.abs(direct).max())
        if err > rtol:
            raise CrossValidationError(f"polynomial fit residual {err:.2e} at t={t}")
    return coeffs


def lemt_applicable(coeffs: CubicCoeffs, tol: float = 1e-8) -> bool:
    """Parity test: ``p0``, ``p2`` even, ``p1`` even except a non-zero ``t`` term.

    ``tol`` is relative to the largest coefficient magnitude.
    """
    thresh = tol * coeffs.scale()
    odd = [coeffs.p0[1], coeffs.p0[3], coeffs.p0[5], coeffs.p2[1], coeffs.p1[3]]
    return bool(np.all(np.abs(odd) <= thresh) and abs(coeffs.odd_linear_a) > thresh)


@dataclass(frozen=True)
class AsymmetryCertificate:
    """``t0`` is a real boundary point, ``s_min(C1 - t0) = eps``, with ``-t0`` inside.

    ``orientation`` is -1 when ``a > 0`` forced ``t -> -t``.
    ``witness`` is a point just beyond ``-t0`` that lies inside the
    pseudospectrum while its negative lies outside, both by at least
    ``witness_margin``.
    """

    t0: float
    margin: float
    epsilon: float
    orientation: int
    witness: complex
    witness_margin: float


def _largest_crossing(g, t_hi, steps=256):
    grid_t = np.linspace(0.0, t_hi, steps + 1)
    vals = np.array([g(t) for t in grid_t])
    idx = np.flatnonzero((vals[:-1] <= 0) & (vals[1:] > 0))
    if idx.size == 0:
        return None
    k = idx[-1]
    if vals[k] == 0:
        return float(grid_t[k])
    try:
        return float(brentq(g, grid_t[k], grid_t[k + 1], xtol=1e-14, maxiter=200))
    except RuntimeError as exc:
        raise RootFindingError(str(exc)) from exc


def asymmetry_certificate(C1, eps: float, tol: float = 1e-8) -> AsymmetryCertificate | None:
    """Locate ``t0 > 0`` with ``s_min(C1 - t0 I) = eps`` and confirm ``-t0`` is inside.

    The sign of ``t`` is oriented so the linear coefficient ``a`` of ``p1``
    is negative; then the largest crossing ``t0`` on the positive axis is
    outside the open pseudospectrum and ``-t0`` strictly inside. Returns
    ``None`` when no crossing is found or ``-t0`` is not inside.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    C1 = _as_block(C1)
    coeffs = extract_polynomials(C1)
    if not lemt_applicable(coeffs, tol):
        log.warning("parity hypothesis fails for this block; certificate is heuristic")
    orientation = -1 if coeffs.odd_linear_a > 0 else 1
    t_hi = float(np.linalg.svd(C1, compute_uv=False)[0]) + eps + 1.0

    def g(t):
        return smin_shift(C1, orientation * t) - eps

    t0 = _largest_crossing(g, t_hi)
    if t0 is None or t0 <= 0:
        return None
    t0_signed = orientation * t0
    margin = eps - smin_shift(C1, -t0_signed)
    if margin <= 64 * np.finfo(float).eps * max(1.0, eps):
        return None

    # step past -t0 by half the margin; Lipschitz keeps it inside
    step = 0.5 * margin
    witness = -t0_signed - orientation * step
    inside = eps - smin_shift(C1, witness)
    outside = smin_shift(C1, -witness) - eps
    return AsymmetryCertificate(
        t0=float(t0_signed),
        margin=float(margin),
        epsilon=float(eps),
        orientation=orientation,
        witness=complex(witness),
        witness_margin=float(min(inside, outside)),
    )


# Blocks from the asymmetry constructions, used as fixtures and by the classifier.

def case1_block(a: complex) -> np.ndarray:
    """``[diag(a, 1, -1), X]`` for ``X = u v*``, ``u = (sqrt2, 1, 1)``, ``v = (0, -1, 1)``."""
    r2 = np.sqrt(2.0)
    return np.array([[0, r2 * (1 - a), r2 * (1 + a)], [0, 0, 2], [0, 2, 0]], dtype=complex)


def subcase_2a_block(a11: complex, a22: complex, a21: float, a23: complex) -> np.ndarray:
    return np.array([[-a21, a11 - a22, -a23], [0, a21, 0], [0, 0, 0]], dtype=complex)


def subcase_2bi_block() -> np.ndarray:
    return np.array([[1, -1, 1], [0, -1, 0], [0, 1, 0]], dtype=complex)


def subcase_2bii_block(a11: float) -> np.ndarray:
    return np.array([[0, -1, a11], [0, 0, 0], [a11, 1, 0]], dtype=complex)
