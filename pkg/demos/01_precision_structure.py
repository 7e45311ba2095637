"""Assemble the lattice precision, its periodic twin, and their difference.

The two variables on the n1 x n2 lattice give a 2n x 2n matrix built from
four block-Toeplitz blocks.  Wrapping the lattice on a torus adds a handful
of entries: the difference matrix is tiny, traceless and indefinite.
"""

import numpy as np

from bigmrf import Theta, build_bundle, write_matrix_market

theta = Theta(phi=0.1, rho11=0.1, rho12=0.05, rho21=-0.05, rho22=0.1)
dims = (4, 6)

bundle = build_bundle(theta, dims)
n1, n2 = dims
n = n1 * n2

print(f"grid {n1} x {n2}, matrix size {2 * n} x {2 * n}")
print(f"nnz(Q)       = {bundle.q.nnz}   (bound 20*n1*n2 - 8*n1 - 8*n2 = "
      f"{20 * n - 8 * n1 - 8 * n2})")
print(f"nnz(deltaQ)  = {bundle.delta_q.nnz}    (bound 8*(n1+n2) = {8 * (n1 + n2)})")
print(f"trace(deltaQ) = {bundle.delta_q.trace()}")

eigs = np.linalg.eigvalsh(bundle.delta_q.to_dense())
print(f"deltaQ eigenvalue range: [{eigs[0]:+.3f}, {eigs[-1]:+.3f}]  "
      "(indefinite: both signs present)")

# the sparsity pattern, coarsely
dense = bundle.q.to_dense()
art = "\n".join("".join("X" if dense[r, c] != 0.0 else "." for c in range(2 * n))
                for r in range(2 * n))
print("\nsparsity pattern of Q (X = nonzero):")
print(art)

write_matrix_market(bundle.q, "precision_4x6.mtx")
print("\nwrote precision_4x6.mtx (MatrixMarket, symmetric)")
