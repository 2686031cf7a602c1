"""
Which matrices have symmetric commutator pseudospectra?
========================================================

For ``n >= 3``, ``sigma_eps([A, B])`` is symmetric about 0 for every
rank-one nilpotent ``B`` exactly when ``A`` is normal with at most two
distinct eigenvalues. We check this three ways on several families, and
print the explicit asymmetry witness for ``diag(2, 1, -1)``.
"""

import numpy as np

from pseudolie import construct_witness, random_matrix
from pseudolie.classify import classify
from pseudolie.matcore import FAMILIES, smin_shift

rng = np.random.default_rng(0)
for family in FAMILIES:
    A = random_matrix(4, rng, family)
    rep = classify(A, eps=1.0, n_probes=10, seed=rng)
    print(f"{family:15s} direct={rep.direct!s:5s} probe={rep.probe.symmetric!s:5s} "
          f"route={rep.case_tag}")

A = np.diag([2.0, 1.0, -1.0])
w = construct_witness(A, eps=1.0, seed=0)
print("x =", np.round(w.nilpotent.x, 4))
print("y =", np.round(w.nilpotent.y, 4))
print("[A, B] =\n", np.round(w.commutator.real, 4))
z = w.point
print(f"s_min at z = {smin_shift(w.commutator, z):.4f} < 1 < {smin_shift(w.commutator, -z):.4f} at -z")

# Non-normal matrices go through Schur-frame constructions.
E12 = np.eye(3, k=1) * np.array([[1], [0], [0]])
for name, A in {"E12": E12, "I + E12": np.eye(3) + E12,
                "[[1,1,0],0,0]": np.array([[1.0, 1, 0], [0, 0, 0], [0, 0, 0]])}.items():
    w = construct_witness(A, seed=1)
    print(f"{name:14s} route={w.route} margin={w.margin:.3g}")
