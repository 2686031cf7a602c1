"""
Recovering a rigid motion between two spectra
=============================================

Two index-matched point sets related by ``gamma = mu lambda + nu`` or its
conjugate are matched by comparing pairwise distances and solving for
``mu`` and ``nu``. Collinear sets admit both kinds of motion.
"""

import numpy as np

from pseudolie import preserve as pr

rng = np.random.default_rng(7)
lam = rng.standard_normal(5) + 1j * rng.standard_normal(5)
mu, nu = np.exp(0.7j), 1.5 - 2j

for label, gam in {"linear": mu * lam + nu, "conjugate-linear": np.conj(mu * lam + nu)}.items():
    m = pr.match_spectra(lam, gam)
    print(f"{label:17s} -> {m.mode.value:16s} mu={m.mu:.4f} nu={m.nu:.4f} residual={m.max_residual:.1e}")

line = np.array([0, 1 + 1j, 2.5 + 2.5j])
print("collinear:", pr.match_spectra(line, 1j * line + 3).mode.value)

try:
    pr.match_spectra(lam, 2 * lam)
except pr.NoIsometry as exc:
    print("scaled set:", exc)
