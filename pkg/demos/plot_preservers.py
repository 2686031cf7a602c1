"""
Maps that preserve commutator pseudospectra
===========================================

Maps ``A -> mu_A U tau(A) U* + nu_A I`` with unimodular ``mu_A`` keep the
pseudospectral radius of every commutator. Keeping the whole pseudospectrum
needs more: ``tau`` must be the identity or ``A -> i A^T``, and a sign flip
is only allowed on normal matrices with at most two eigenvalues.
"""

import numpy as np

from pseudolie import preserve as pr
from pseudolie.classify import construct_witness
from pseudolie.matcore import random_unitary

U = random_unitary(3, seed=1)
f = pr.pseudospectral_radius(0.5)
for tau in (pr.Tau.IDENTITY, pr.Tau.CONJUGATE, pr.Tau.TRANSPOSE, pr.Tau.ADJOINT):
    m = pr.CanonicalMap(U, tau, pr.RandomScalars(seed=2))
    rep = pr.verify_lie_invariance(m, f, n_pairs=10, seed=3)
    print(f"{tau.value:10s} passed={rep.passed} max deviation={rep.max_deviation:.1e}")

# The radial function properties, and a function that lacks one of them.
X = pr.random_rank_one_nilpotent(3, seed=4)
for g in (pr.frobenius_norm(), pr.largest_singular_value(), pr.spectral_radius()):
    print(f"{g.name:16s} P1={pr.check_P1(g, 10, seed=5, tol=1e-4)} "
          f"P2={pr.check_P2(g, 10, seed=5)} P3={pr.check_P3(g, X, [0.5, 1, 2])}")

# Flipping the sign on the two-eigenvalue class keeps whole pseudospectra.
m = pr.CanonicalMap(U, pr.Tau.ITRANSPOSE, pr.ConstantScalars(1, 0.5),
                    pr.two_eig_normal_predicate(), pr.Swap.NEGATE)
rep = pr.verify_sigma_invariance(m, 1.0, n_pairs=12, samples=512, seed=6)
print("sign flip on the two-eigenvalue class:", rep.passed, sorted(set(rep.patterns)))

# Flipping it on diag(2, 1, -1) does not.
A = np.diag([2.0, 1.0, -1.0])
B = construct_witness(A, 1.0, seed=0).nilpotent.matrix
bad = pr.CanonicalMap(np.eye(3), exceptional=pr.matches_any([A]), swap=pr.Swap.NEGATE)
print("sign flip on diag(2, 1, -1):", pr.verify_sigma_invariance(bad, 1.0, pairs=[(A, B)]).passed)
