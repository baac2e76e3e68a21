"""Schur operator bases and Heisenberg-Weyl unitary operator bases.

``SchurOperatorSet`` materializes, from a :class:`~schurtwirl.schur.SchurBasis`,
the operators

* ``pi(k, m1, m2)``   = sum_lam |k,m1,lam><k,m2,lam|   (spans the group action),
* ``lam(k, l1, l2)``  = sum_m   |k,m,l1><k,m,l2|       (spans the commutant),
* ``sector_projector(k)`` = sum_m pi(k,m,m) = sum_l lam(k,l,l),

all as dense matrices on the full d^t-dimensional space, memoized per set.
Indices k, m, lam are 1-based to match the basis labels.

``heisenberg_weyl`` builds the clock-and-shift unitary operator basis used as
the per-sector 1-design in the channel module.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .schur import SchurBasis


@dataclass(frozen=True)
class UnitaryOperatorBasis:
    """D^2 pairwise Frobenius-orthogonal unitaries on C^D."""

    dim: int
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.elements) != self.dim**2:
            raise ValueError(f"expected {self.dim ** 2} elements, got {len(self.elements)}")


def heisenberg_weyl(dim: int) -> UnitaryOperatorBasis:
    """Heisenberg-Weyl basis {w^(ij) Z^i X^j : i, j = 0..D-1} on C^D.

    X is the cyclic shift |n> -> |n+1 mod D|, Z the clock diag(w^n) with
    w = exp(2 pi i / D); element l = i*D + j (0-based).  The w^(ij) phase is
    immaterial for conjugation channels but fixed here so serialized output
    is stable.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    omega = np.exp(2j * np.pi / dim)
    shift = np.zeros((dim, dim), dtype=complex)
    shift[(np.arange(dim) + 1) % dim, np.arange(dim)] = 1.0
    clock = np.diag(omega ** np.arange(dim))
    elements = []
    z_pow = np.eye(dim, dtype=complex)
    for i in range(dim):
        x_pow = np.eye(dim, dtype=complex)
        for j in range(dim):
            el = omega ** (i * j) * z_pow @ x_pow
            el.flags.writeable = False
            elements.append(el)
            x_pow = x_pow @ shift
        z_pow = z_pow @ clock
    return UnitaryOperatorBasis(dim=dim, elements=tuple(elements))


class SchurOperatorSet:
    """Memoized Schur operator basis over one SchurBasis.

    All returned matrices are read-only; the cache is lock-protected, so a
    set can be shared across threads.
    """

    def __init__(self, basis: SchurBasis):
        self._basis = basis
        self._cache: dict[tuple, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def basis(self) -> SchurBasis:
        return self._basis

    @property
    def n_sectors(self) -> int:
        return len(self._basis.sectors)

    @property
    def dim(self) -> int:
        return self._basis.dim

    def _memo(self, key, make):
        with self._lock:
            hit = self._cache.get(key)
            if hit is None:
                hit = make()
                hit.flags.writeable = False
                self._cache[key] = hit
        return hit

    def _sector(self, k: int):
        if not 1 <= k <= self.n_sectors:
            raise IndexError(f"sector {k} out of range (1..{self.n_sectors})")
        return self._basis.sector(k)

    def pi(self, k: int, m1: int, m2: int) -> np.ndarray:
        """sum_lam |k,m1,lam><k,m2,lam|; trace = delta_{m1 m2} * D_C^k."""
        sector = self._sector(k)
        if not (1 <= m1 <= sector.d_g and 1 <= m2 <= sector.d_g):
            raise IndexError(f"m index out of range for sector {k}")
        vecs = sector.vectors

        def make():
            return np.einsum("lx,ly->xy", vecs[m1 - 1], vecs[m2 - 1].conj())

        return self._memo(("pi", k, m1, m2), make)

    def lam(self, k: int, lam1: int, lam2: int) -> np.ndarray:
        """sum_m |k,m,lam1><k,m,lam2|; trace = delta_{lam1 lam2} * D_G^k."""
        sector = self._sector(k)
        if not (1 <= lam1 <= sector.d_c and 1 <= lam2 <= sector.d_c):
            raise IndexError(f"lam index out of range for sector {k}")
        vecs = sector.vectors

        def make():
            return np.einsum("mx,my->xy", vecs[:, lam1 - 1], vecs[:, lam2 - 1].conj())

        return self._memo(("lam", k, lam1, lam2), make)

    def full(self, k1: int, m1: int, lam1: int, k2: int, m2: int, lam2: int) -> np.ndarray:
        """The elementary outer product |k1,m1,lam1><k2,m2,lam2|."""
        v1 = self._sector(k1).vectors[m1 - 1, lam1 - 1]
        v2 = self._sector(k2).vectors[m2 - 1, lam2 - 1]
        return np.outer(v1, v2.conj())

    def sector_projector(self, k: int) -> np.ndarray:
        """Projector onto the whole k-th sector."""
        vecs = self._sector(k).vectors

        def make():
            flat = vecs.reshape(-1, vecs.shape[-1])
            return flat.T @ flat.conj()

        return self._memo(("proj", k), make)

    def sector_dims(self) -> list[tuple[int, int]]:
        """(D_G, D_C) per sector, in sector order."""
        return [(s.d_g, s.d_c) for s in self._basis.sectors]


def decompose_in_pi_basis(ops: SchurOperatorSet, k: int, mat: np.ndarray) -> np.ndarray:
    """Coefficients K[m1, m2] = Tr(M pi(k,m1,m2)^dag) / D_C^k.

    The reconstruction sum_{m1 m2} K[m1,m2] pi(k,m1,m2) reproduces the
    sector-k block of M exactly when M commutes with the commutant operators
    (collective actions U^(x)t do; a generic Hermitian M does not).
    """
    sector = ops.basis.sector(k)
    vecs = sector.vectors  # (d_g, d_c, dim)
    return np.einsum("alx,xy,bly->ab", vecs.conj(), np.asarray(mat, dtype=complex), vecs) / sector.d_c


def embed_gamma(ops: SchurOperatorSet, k: int, gamma: np.ndarray) -> np.ndarray:
    """Extend a D_G^k x D_G^k matrix to the full space through the pi operators.

    Returns sum_{m1 m2} gamma[m1,m2] pi(k,m1,m2): supported on sector k only,
    and a partial isometry with gt^dag gt = sector projector whenever gamma
    is unitary.
    """
    sector = ops.basis.sector(k)
    gam = np.asarray(gamma, dtype=complex)
    if gam.shape != (sector.d_g, sector.d_g):
        raise ValueError(
            f"gamma must be {sector.d_g} x {sector.d_g} for sector {k}, got {gam.shape}"
        )
    vecs = sector.vectors
    return np.einsum("alx,ab,bly->xy", vecs, gam, vecs.conj())
