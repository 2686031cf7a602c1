"""
Certifying asymmetry with the cubic Gram polynomial
===================================================

For a 3x3 block ``C`` the characteristic polynomial of
``(C - tI)^* (C - tI)`` has coefficients that are polynomials in ``t``. When
their even/odd structure is broken only by a linear term of ``p1``, the
pseudospectrum of ``C`` is not symmetric about the origin, and a concrete
real point ``t0`` shows it.
"""

import numpy as np

from pseudolie import cubiclemma as cl
from pseudolie.matcore import smin_shift

C = cl.case1_block(2)
coeffs = cl.extract_polynomials(C)
print("p2:", np.round(coeffs.p2, 10))
print("p1:", np.round(coeffs.p1, 10))
print("p0:", np.round(coeffs.p0, 10))
print("structure test passes:", cl.lemt_applicable(coeffs))

# The certificate finds t0 on the boundary and checks that -t0 lies inside.
for eps in (0.5, 1.0, 2.0):
    cert = cl.asymmetry_certificate(C, eps)
    print(f"eps={eps}: t0={cert.t0:+.6f}  s_min at t0={smin_shift(C, cert.t0):.6f}  "
          f"s_min at -t0={smin_shift(C, -cert.t0):.6f}")

# A block with a symmetric spectrum and pseudospectrum gets no certificate.
print("diag(i, -i, 0):", cl.asymmetry_certificate(np.diag([1j, -1j, 0]), 0.5))
