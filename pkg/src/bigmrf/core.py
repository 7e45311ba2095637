"""Sparse assembly of the bivariate lattice precision matrix.

The field lives on a regular n1 x n2 lattice and carries two variables per
site.  Sites are ordered row-major with the n1 direction fastest (flat index
``i * n1 + j`` for row ``i < n2`` and column ``j < n1``) and the full state
vector stacks all n sites of variable 1 followed by all n sites of variable 2.

Three matrices are assembled here:

* ``Q``      -- the 2n x 2n precision matrix built from four block-Toeplitz
                blocks (tridiagonal sub-blocks, diagonal neighbour blocks),
* ``Q~``     -- its periodic counterpart, where every tridiagonal sub-block is
                wrapped into a circulant and block-level wrap blocks are added
                (toroidal boundary conditions on the lattice),
* ``delta Q`` = ``Q~ - Q`` -- the boundary perturbation, supported on the
                wrap positions only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Theta",
    "Tau",
    "GridDims",
    "SparseSymMatrix",
    "PrecisionBundle",
    "build_toeplitz_block",
    "build_circulant_block",
    "build_inner_precision",
    "build_precision",
    "build_bundle",
    "write_matrix_market",
]


@dataclass(frozen=True)
class Theta:
    """Interaction parameters of the bivariate field.

    ``phi`` couples the two variables at the same site, ``rho11``/``rho22``
    couple neighbouring sites within variable 1/2, and ``rho12``/``rho21``
    couple the two variables across neighbouring sites.  The cross couplings
    are deliberately allowed to differ; the matrix stays symmetric either way.

    No range restriction is imposed here: deciding which values yield a
    positive-definite precision is exactly what the rest of the package does.
    """

    phi: float
    rho11: float
    rho12: float
    rho21: float
    rho22: float

    def __post_init__(self):
        for name in ("phi", "rho11", "rho12", "rho21", "rho22"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"theta component {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.rho11, self.rho12, self.rho21, self.rho22])

    @classmethod
    def from_array(cls, values) -> "Theta":
        phi, r11, r12, r21, r22 = (float(v) for v in values)
        return cls(phi, r11, r12, r21, r22)

    @classmethod
    def zero(cls) -> "Theta":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Tau:
    """Marginal standard deviations (tau1, tau2), both strictly positive."""

    tau1: float
    tau2: float

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class GridDims:
    """Lattice dimensions.

    ``n1`` is the fast (within-block, tridiagonal) direction, ``n2`` the slow
    (block) direction.  Both must be at least 3 so the circulant wrap entries
    land strictly off the tridiagonal band and off the first neighbour block.
    """

    n1: int
    n2: int

    def __post_init__(self):
        for name in ("n1", "n2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value < 3:
                raise ValueError(f"{name} must be >= 3, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    def doubled(self) -> "GridDims":
        return GridDims(2 * self.n1, 2 * self.n2)


def _as_dims(dims) -> GridDims:
    if isinstance(dims, GridDims):
        return dims
    n1, n2 = dims
    return GridDims(n1, n2)


class SparseSymMatrix:
    """Symmetric sparse matrix stored as deduplicated upper-triangle triplets.

    Exactly one triplet is stored per unordered index pair (``row <= col``),
    entries are sorted lexicographically and explicit zeros are dropped, so
    nonzero counts are well defined and bit-exact assertions on the pattern
    are possible.
    """

    __slots__ = ("dim", "rows", "cols", "vals", "_csr")

    def __init__(self, dim, rows, cols, vals):
        dim = int(dim)
        if dim <= 0:
            raise ValueError("dim must be positive")
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
            raise ValueError("rows, cols, vals must be 1-D arrays of equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0
                          or rows.max() >= dim or cols.max() >= dim):
            raise ValueError("triplet index out of bounds")

        # Fold to the upper triangle, merge duplicates, drop exact zeros.
        swap = rows > cols
        r = np.where(swap, cols, rows)
        c = np.where(swap, rows, cols)
        order = np.lexsort((c, r))
        r, c, v = r[order], c[order], vals[order]
        if r.size:
            key_change = np.empty(r.size, dtype=bool)
            key_change[0] = True
            key_change[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
            group = np.cumsum(key_change) - 1
            merged = np.zeros(group[-1] + 1)
            np.add.at(merged, group, v)
            r, c = r[key_change], c[key_change]
            v = merged
            keep = v != 0.0
            r, c, v = r[keep], c[keep], v[keep]

        self.dim = dim
        self.rows = r
        self.cols = c
        self.vals = v
        self._csr = None

    @classmethod
    def from_scipy(cls, m, check_symmetry: bool = True) -> "SparseSymMatrix":
        """Fold a symmetric scipy sparse matrix into triplet storage."""
        m = m.tocsr()
        if m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if check_symmetry and (m != m.T).nnz != 0:
            raise ValueError("matrix is not symmetric")
        coo = sp.triu(m, format="coo")
        return cls(m.shape[0], coo.row, coo.col, coo.data)

    @property
    def nnz(self) -> int:
        """Nonzero count of the full symmetric matrix (mirrored entries counted)."""
        return int(self.vals.size + np.count_nonzero(self.rows != self.cols))

    @property
    def nnz_stored(self) -> int:
        return int(self.vals.size)

    def trace(self) -> float:
        on_diag = self.rows == self.cols
        return float(self.vals[on_diag].sum())

    def norm1(self) -> float:
        """Maximum absolute row sum (equals the 1-norm by symmetry)."""
        acc = np.zeros(self.dim)
        a = np.abs(self.vals)
        np.add.at(acc, self.rows, a)
        off = self.rows != self.cols
        np.add.at(acc, self.cols[off], a[off])
        return float(acc.max()) if self.dim else 0.0

    def to_csr(self) -> sp.csr_matrix:
        """Expand to a full (unfolded) CSR matrix; cached."""
        if self._csr is None:
            off = self.rows != self.cols
            r = np.concatenate([self.rows, self.cols[off]])
            c = np.concatenate([self.cols, self.rows[off]])
            v = np.concatenate([self.vals, self.vals[off]])
            self._csr = sp.coo_matrix((v, (r, c)), shape=(self.dim, self.dim)).tocsr()
        return self._csr

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        out[self.rows, self.cols] = self.vals
        off = self.rows != self.cols
        out[self.cols[off], self.rows[off]] = self.vals[off]
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.dim,):
            raise ValueError(f"vector length {v.shape} does not match dim {self.dim}")
        return self.to_csr() @ v

    def __repr__(self):
        return f"SparseSymMatrix(dim={self.dim}, nnz={self.nnz})"


@dataclass(frozen=True)
class PrecisionBundle:
    """The precision matrix, its periodic counterpart, and their difference."""

    q: SparseSymMatrix
    q_tilde: SparseSymMatrix
    delta_q: SparseSymMatrix
    dims: GridDims
    theta: Theta


def _block_triplets(x, y, z, dims: GridDims, wrap: bool):
    """Triplet arrays for T(x, y, z) (wrap=False) or C(x, y, z) (wrap=True).

    Layout: tridiag(x, y, z) sub-blocks on the block diagonal, diag(z) on the
    first block superdiagonal, diag(x) on the first block subdiagonal.  The
    circulant version adds the corner entries x at (0, n1-1) / z at (n1-1, 0)
    inside every diagonal sub-block plus the block-level wrap blocks diag(x)
    at (0, n2-1) and diag(z) at (n2-1, 0).  Zero couplings are never stored.
    """
    n1, n2, n = dims.n1, dims.n2, dims.n
    idx = np.arange(n)
    rows, cols, vals = [], [], []

    def add(r, c, value):
        if value != 0.0 and r.size:
            rows.append(r)
            cols.append(c)
            vals.append(np.full(r.size, value))

    add(idx, idx, y)
    in_row = idx[idx % n1 != n1 - 1]          # within-block band
    add(in_row, in_row + 1, z)
    add(in_row + 1, in_row, x)
    lower = idx[idx < n - n1]                  # first neighbour blocks
    add(lower, lower + n1, z)
    add(lower + n1, lower, x)
    if wrap:
        first = np.arange(n2) * n1             # sub-block corners
        add(first, first + n1 - 1, x)
        add(first + n1 - 1, first, z)
        head = np.arange(n1)                   # block-level wrap
        tail = head + n - n1
        add(head, tail, x)
        add(tail, head, z)

    if rows:
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    return (np.empty(0, dtype=np.int64),) * 2 + (np.empty(0),)


def _block(x, y, z, dims: GridDims, wrap: bool) -> sp.csr_matrix:
    r, c, v = _block_triplets(x, y, z, dims, wrap)
    return sp.coo_matrix((v, (r, c)), shape=(dims.n, dims.n)).tocsr()


def build_toeplitz_block(x: float, y: float, z: float, dims) -> sp.csr_matrix:
    """Block-Toeplitz lattice block T(x, y, z), stored as a general sparse matrix.

    Returned general (not symmetry-folded) because T is asymmetric when x != z.
    """
    return _block(float(x), float(y), float(z), _as_dims(dims), wrap=False)


def build_circulant_block(x: float, y: float, z: float, dims) -> sp.csr_matrix:
    """Block-circulant lattice block C(x, y, z): T(x, y, z) plus wrap entries."""
    return _block(float(x), float(y), float(z), _as_dims(dims), wrap=True)


def _inner_full(theta: Theta, dims: GridDims, wrap: bool,
                scale11: float = 1.0, scale12: float = 1.0,
                scale22: float = 1.0) -> sp.csr_matrix:
    b11 = _block(theta.rho11 * scale11, 1.0 * scale11, theta.rho11 * scale11, dims, wrap)
    b12 = _block(theta.rho21 * scale12, theta.phi * scale12, theta.rho12 * scale12, dims, wrap)
    b22 = _block(theta.rho22 * scale22, 1.0 * scale22, theta.rho22 * scale22, dims, wrap)
    return sp.bmat([[b11, b12], [b12.T, b22]], format="csr")


def build_inner_precision(theta: Theta, dims) -> SparseSymMatrix:
    """The 2n x 2n precision matrix with unit marginal scales.

    Positive-definiteness of the full precision is equivalent to that of this
    inner matrix for any valid tau (congruence by a positive diagonal matrix),
    so all validity work operates on it.
    """
    dims = _as_dims(dims)
    return SparseSymMatrix.from_scipy(_inner_full(theta, dims, wrap=False),
                                      check_symmetry=False)


def build_precision(theta: Theta, tau: Tau, dims) -> SparseSymMatrix:
    """The full precision matrix, i.e. the inner matrix scaled by 1/tau per variable."""
    dims = _as_dims(dims)
    s1 = 1.0 / tau.tau1
    s2 = 1.0 / tau.tau2
    full = _inner_full(theta, dims, wrap=False,
                       scale11=s1 * s1, scale12=s1 * s2, scale22=s2 * s2)
    return SparseSymMatrix.from_scipy(full, check_symmetry=False)


def build_bundle(theta: Theta, dims) -> PrecisionBundle:
    """Assemble Q, its periodic counterpart and their difference.

    The difference is kept explicit (its entries feed the perturbation-bound
    diagnostics) and satisfies: at most 8(n1+n2) nonzeros, zero trace.
    """
    dims = _as_dims(dims)
    q_full = _inner_full(theta, dims, wrap=False)
    qt_full = _inner_full(theta, dims, wrap=True)
    delta_full = (qt_full - q_full).tocsr()
    delta_full.eliminate_zeros()

    q = SparseSymMatrix.from_scipy(q_full, check_symmetry=False)
    q_tilde = SparseSymMatrix.from_scipy(qt_full, check_symmetry=False)
    delta_q = SparseSymMatrix.from_scipy(delta_full, check_symmetry=False)

    n1, n2 = dims.n1, dims.n2
    assert q.nnz <= 20 * n1 * n2 - 8 * n1 - 8 * n2
    assert delta_q.nnz <= 8 * (n1 + n2)
    assert delta_q.trace() == 0.0
    return PrecisionBundle(q=q, q_tilde=q_tilde, delta_q=delta_q, dims=dims, theta=theta)


def write_matrix_market(m, f) -> None:
    """Dump a matrix in MatrixMarket coordinate format (1-based indices).

    ``SparseSymMatrix`` inputs use the ``symmetric`` qualifier and emit the
    lower triangle (the MatrixMarket convention); scipy sparse inputs are
    written as ``general``.
    """
    own = isinstance(f, str)
    out = open(f, "w") if own else f
    try:
        if isinstance(m, SparseSymMatrix):
            out.write("%%MatrixMarket matrix coordinate real symmetric\n")
            out.write(f"{m.dim} {m.dim} {m.nnz_stored}\n")
            for r, c, v in zip(m.rows, m.cols, m.vals):
                out.write(f"{c + 1} {r + 1} {float(v)!r}\n")
        else:
            coo = sp.coo_matrix(m)
            out.write("%%MatrixMarket matrix coordinate real general\n")
            out.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                out.write(f"{r + 1} {c + 1} {float(v)!r}\n")
    finally:
        if own:
            out.close()
