"""Dense complex linear-algebra kernel and tolerance policy shared by all modules.

Everything works on plain ``numpy`` arrays of ``complex128``.  Matrices are
row-major and dense; the dimensions in play (at most 64 for states, a few
thousand rows for span-dimension estimates) make dense SVD and explicit
Gram-Schmidt entirely adequate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class LinearDependenceError(ValueError):
    """Raised when an input vector is (numerically) dependent on its predecessors.

    The offending position in the input sequence is available as ``index``.
    """

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"vector {index} is linearly dependent on its predecessors "
            f"(residual norm {residual:.3e})"
        )


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical tolerances used throughout the package.

    eq_tol is the absolute entrywise tolerance for equality checks, rank_tol
    the relative singular-value cutoff for rank decisions and the residual
    cutoff for orthogonalization.  Defaults are tuned for double precision at
    dimensions up to 64.
    """

    eq_tol: float = 1e-10
    rank_tol: float = 1e-9

    def __post_init__(self):
        for name in ("eq_tol", "rank_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ValueError(f"{name} must lie strictly between 0 and 1e-2, got {value}")


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix contains non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product, (a kron b)[i1*rb+i2, j1*cb+j2] = a[i1,j1] b[i2,j2]."""
    return np.kron(as_matrix(a), as_matrix(b))


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def frob_inner(a, b) -> complex:
    """Frobenius inner product Tr(a^dag b), conjugate-linear in the first slot."""
    am, bm = as_matrix(a), as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    return complex(np.vdot(am, bm))


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise ValueError(f"expected a vector, got shape {arr.shape}")
    return arr


def gram_schmidt(
    vectors: Sequence[np.ndarray], policy: TolerancePolicy = DEFAULT_POLICY
) -> list[np.ndarray]:
    """Orthonormalize ``vectors`` by classical Gram-Schmidt, deterministically.

    Classical Gram-Schmidt in the given input order with one
    re-orthogonalization pass (CGS2).  The expansion coefficients of the
    output in the input depend only on the Gram matrix of the input, which is
    what lets identically-shaped vector families come out identically aligned.

    Raises
    ------
    LinearDependenceError
        If some vector's residual after projection falls below
        ``rank_tol`` times its original norm; carries the offending index.
    """
    vecs = [_as_vector(v) for v in vectors]
    if vecs and any(v.shape != vecs[0].shape for v in vecs):
        raise ValueError("all vectors must share one dimension")
    out: list[np.ndarray] = []
    for i, v in enumerate(vecs):
        w = v.copy()
        for _ in range(2):  # CGS + one re-orthogonalization pass
            if out:
                basis = np.array(out)
                w = w - basis.T @ (basis.conj() @ w)
        norm_w = np.linalg.norm(w)
        if norm_w < policy.rank_tol * max(np.linalg.norm(v), 1.0):
            raise LinearDependenceError(i, float(norm_w))
        out.append(w / norm_w)
    return out


def numerical_rank(
    vectors: Sequence[np.ndarray], policy: TolerancePolicy = DEFAULT_POLICY
) -> int:
    """Rank of the span: singular values above ``rank_tol`` times the largest.

    Each element may be a vector or a matrix; matrices are vectorized
    row-major before stacking.
    """
    if len(vectors) == 0:
        raise ValueError("need at least one vector")
    rows = [np.asarray(v, dtype=complex).ravel() for v in vectors]
    if any(r.shape != rows[0].shape for r in rows):
        raise ValueError("all vectors must share one dimension")
    svals = np.linalg.svd(np.array(rows), compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.count_nonzero(svals > policy.rank_tol * svals[0]))
