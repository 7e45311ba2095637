"""The five membership tests, from cheap-and-conservative to exact.

Diagonal dominance is sufficient but covers little.  The periodic check is
O(n) and asymptotically exact.  Its doubled-grid variant is a rigorous
certificate (periodic matrix on the doubled grid contains the lattice one
as a principal submatrix, so Cauchy interlacing applies).  The symbol-limit
check decides validity for every grid size at once.  The exact check
assembles and solves.
"""

import json

from bigmrf import (Theta, certified_check, circulant_check,
                    diag_dominance_check, exact_check, limit_check)

dims = (20, 20)
cases = {
    "comfortably valid": Theta(0.1, 0.1, 0.05, -0.05, 0.1),
    "valid, not dominant": Theta(0.55, 0.05, 0.1, -0.1, 0.05),
    "invalid": Theta(0.2, 0.3, 0.1, 0.1, 0.3),
    "boundary": Theta(0.0, 0.25, 0.0, 0.0, 0.25),
}

for label, theta in cases.items():
    print(f"--- {label}: phi={theta.phi}, rho=({theta.rho11}, {theta.rho12}, "
          f"{theta.rho21}, {theta.rho22})")
    for check in (diag_dominance_check, circulant_check, certified_check):
        v = check(theta, dims)
        tri = {True: "valid", False: "invalid", None: "unknown"}[v.valid]
        print(f"  {v.method:15s} -> {tri:8s} evidence {v.min_eig_evidence:+.6f}")
    v = limit_check(theta)
    tri = {True: "valid for every grid", False: "invalid on large grids",
           None: "unknown"}[v.valid]
    print(f"  {'limit':15s} -> {tri} (C = {v.min_eig_evidence:+.6f})")
    v = exact_check(theta, dims)
    print(f"  {'exact':15s} -> {'valid' if v.valid else 'invalid':8s} "
          f"evidence {v.min_eig_evidence:+.6f}")

print("\na verdict serialises to JSON:")
print(json.dumps(circulant_check(cases["invalid"], dims).to_json_dict(), indent=2))
