"""
Pseudospectra on a grid and the pseudospectral radius
=====================================================

The epsilon-pseudospectrum of a matrix is the set of points where the
smallest singular value of ``A - zI`` drops below epsilon. We sample it on a
grid, draw a coarse text portrait, and compare the pseudospectral radius of a
rank-one nilpotent against its closed form.
"""

import numpy as np

from pseudolie import GridSpec, grid, radius, random_rank_one_nilpotent

# A Jordan-like block is the classic example: its spectrum is {0} but the
# pseudospectrum is much larger than an eps-disk.
A = np.diag([1.0, 1.0, 1.0], k=1)
sample = grid(A, 0.1, GridSpec(0j, 1.5, 41))

inside = sample.membership.reshape(41, 41)
for row in inside[::-2]:
    print("".join("#" if m else "." for m in row[::2]))

# Radius is the largest modulus over the pseudospectrum.
res = radius(A, 0.1)
print(f"r_0.1 = {res.value:.10f} attained at {res.argmax:.4f}")

# For X = x y* with y orthogonal to x the radius is known exactly.
X = random_rank_one_nilpotent(5, seed=3)
for eps in (0.1, 1.0, 3.0):
    exact = np.sqrt(eps**2 + X.weight * eps)
    print(f"eps={eps:<4} radius={radius(X.matrix, eps).value:.12f} closed form={exact:.12f}")

# Points sampled on the grid can be written as CSV for external plotting.
rows = list(sample.rows())
print("first CSV rows:", rows[:2])
