#!/usr/bin/env python3
"""Generate the golden failure floor for the number-conserving even-weight case.

At M=2 the normalized operator in the rotated basis is diagonal with entries
prod_j w(n_j, lambda_j), w(0, l) = e^{-l/2} / (2 cosh(l/2)), w(1, l) = e^{l/2} / (2 cosh(l/2)).
Averaging over the hermitian-matrix radial density (l1 - l2)^2 exp(-p (l1^2 + l2^2))
gives a diagonal operator that does not depend on the rotation. The residual
min_c max|Q - c I| equals half the spread of those diagonal entries.

Usage: nc_failure_floor.py [p] > tests/golden/nc_failure_floor.json
"""
import json
import math
import sys

from scipy import integrate

p = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
L = 12.0 / math.sqrt(p)


def weight(l1, l2):
    return (l1 - l2) ** 2 * math.exp(-p * (l1 * l1 + l2 * l2))


def occ_factor(n, l):
    return math.exp((l if n else -l) / 2.0) / (2.0 * math.cosh(l / 2.0))


opts = dict(epsabs=1e-14, epsrel=1e-13)
norm, _ = integrate.dblquad(lambda y, x: weight(x, y), -L, L, -L, L, **opts)
diag = []
for state in range(4):
    n1, n2 = state & 1, (state >> 1) & 1
    val, _ = integrate.dblquad(
        lambda y, x: weight(x, y) * occ_factor(n1, x) * occ_factor(n2, y), -L, L, -L, L, **opts
    )
    diag.append(val / norm)

residual = (max(diag) - min(diag)) / 2.0
floor = math.floor(residual * 1e3) / 1e3
json.dump(
    {
        "modes": 2,
        "p": p,
        "diagonal": diag,
        "residual": residual,
        "failure_floor": floor,
        "generator": "tools/golden/nc_failure_floor.py",
    },
    sys.stdout,
    indent=2,
)
print()
