"""Schur bases for the collective action U^(x)t of U(2) on t qubits.

The basis vectors |k, m, lam> organize (C^2)^(x)t into isotypic sectors k
(one per two-row Young diagram), with m = 1..D_G indexing the irrep dimension
and lam = 1..D_C the multiplicity.  Row subspaces (fixed lam) are invariant
under the collective action, and the representation matrix seen on a row is
the same for every lam ("column alignment"), which is the property the
operator-basis and channel modules rely on.

Construction: one highest-weight vector per standard tableau via Young
symmetrizers, spin-lowering to fill each irrep copy, then a deterministic
Gram-Schmidt within each multiplicity column.  Alignment survives the
orthogonalization because the column Gram matrices are identical across m.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from .numerics import DEFAULT_POLICY, TolerancePolicy, gram_schmidt

SUPPORTED_D = 2
MAX_T = 6


class UnsupportedDimensionError(ValueError):
    """Raised for (d, t) outside the supported envelope (d=2, 1 <= t <= 6)."""


@dataclass(frozen=True)
class YoungDiagram:
    """A partition of t into at most d parts, as weakly decreasing row lengths."""

    row_lengths: tuple[int, ...]

    def __post_init__(self):
        rows = self.row_lengths
        if not rows or any(r <= 0 for r in rows):
            raise ValueError("row lengths must be positive")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ValueError("row lengths must be weakly decreasing")

    @property
    def boxes(self) -> int:
        return sum(self.row_lengths)

    @property
    def n_rows(self) -> int:
        return len(self.row_lengths)


@dataclass(frozen=True)
class SchurSector:
    """One isotypic sector: D_G x D_C orthonormal vectors on C^(d^t).

    ``vectors[m-1, lam-1]`` is the basis vector |k, m, lam>.  Rows (fixed lam)
    span one irrep copy; columns (fixed m) span one multiplicity space.
    """

    k: int
    diagram: YoungDiagram
    d_g: int
    d_c: int
    vectors: np.ndarray  # shape (d_g, d_c, d**t)

    def column(self, lam: int) -> np.ndarray:
        """Matrix (dim x D_G) whose columns are |k, 1, lam> .. |k, D_G, lam>."""
        return self.vectors[:, lam - 1, :].T

    def projector(self) -> np.ndarray:
        """Orthogonal projector onto the whole sector."""
        flat = self.vectors.reshape(-1, self.vectors.shape[-1])
        return flat.T @ flat.conj()


@dataclass(frozen=True)
class SchurBasis:
    """Complete Schur basis of (C^d)^(x)t, sectors ordered by decreasing diagram."""

    d: int
    t: int
    sectors: tuple[SchurSector, ...]

    @property
    def dim(self) -> int:
        return self.d**self.t

    def sector(self, k: int) -> SchurSector:
        return self.sectors[k - 1]

    def transform_matrix(self) -> np.ndarray:
        """The change-of-basis matrix: row (k, m, lam) holds <k,m,lam| in ket order.

        Unitary when the basis is complete and orthonormal.
        """
        rows = [s.vectors.reshape(-1, self.dim).conj() for s in self.sectors]
        return np.concatenate(rows, axis=0)

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "t": self.t,
            "sectors": [
                {
                    "k": s.k,
                    "D_G": s.d_g,
                    "D_C": s.d_c,
                    "diagram": list(s.diagram.row_lengths),
                    "vectors": [
                        [[float(a.real), float(a.imag)] for a in s.vectors[m, lam]]
                        for m in range(s.d_g)
                        for lam in range(s.d_c)
                    ],
                }
                for s in self.sectors
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SchurBasis":
        d, t = int(doc["d"]), int(doc["t"])
        dim = d**t
        sectors = []
        for entry in doc["sectors"]:
            d_g, d_c = int(entry["D_G"]), int(entry["D_C"])
            vecs = np.empty((d_g, d_c, dim), dtype=complex)
            for m in range(d_g):
                for lam in range(d_c):
                    amps = entry["vectors"][m * d_c + lam]
                    vecs[m, lam] = np.array([re + 1j * im for re, im in amps])
            sectors.append(
                SchurSector(
                    k=int(entry["k"]),
                    diagram=YoungDiagram(tuple(entry["diagram"])),
                    d_g=d_g,
                    d_c=d_c,
                    vectors=vecs,
                )
            )
        return cls(d=d, t=t, sectors=tuple(sectors))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SchurBasis":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def enumerate_diagrams(t: int, d: int) -> list[YoungDiagram]:
    """All partitions of t into at most d parts, lexicographically decreasing."""
    if t < 1 or d < 2:
        raise ValueError("need t >= 1 and d >= 2")
    out: list[YoungDiagram] = []

    def rec(remaining: int, max_part: int, prefix: list[int]):
        if remaining == 0:
            out.append(YoungDiagram(tuple(prefix)))
            return
        if len(prefix) == d:
            return
        for part in range(min(remaining, max_part), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(t, t, [])
    return out


def standard_tableaux(diagram: YoungDiagram) -> list[tuple[tuple[int, ...], ...]]:
    """Standard fillings of ``diagram`` (entries increase along rows and columns).

    Returned in lexicographic order of the row-reading word; restricted to at
    most two rows, which is all d=2 needs.
    """
    t = diagram.boxes
    if diagram.n_rows == 1:
        return [(tuple(range(1, t + 1)),)]
    if diagram.n_rows != 2:
        raise UnsupportedDimensionError("only diagrams with at most two rows are supported")
    b = diagram.row_lengths[1]
    tabs = []
    for row2 in combinations(range(1, t + 1), b):
        row1 = tuple(sorted(set(range(1, t + 1)) - set(row2)))
        if row1[0] == 1 and all(row1[i] < row2[i] for i in range(b)):
            tabs.append((row1, row2))
    tabs.sort()
    return tabs


def _digit_table(t: int, d: int) -> np.ndarray:
    """digits[i, p] = p-th ket label of basis state i (slot 1 most significant)."""
    idx = np.arange(d**t)
    return np.stack([(idx // d ** (t - 1 - p)) % d for p in range(t)], axis=1)


def permutation_operator(perm: Sequence[int], t: int, d: int = 2) -> np.ndarray:
    """Matrix of the slot permutation pi on (C^d)^(x)t: content of slot j moves to slot pi(j).

    ``perm[j-1]`` is pi(j) with 1-based slots; the map pi -> operator is a
    group homomorphism.
    """
    digits = _digit_table(t, d)
    out_digits = np.empty_like(digits)
    for j in range(t):
        out_digits[:, perm[j] - 1] = digits[:, j]
    weights = d ** np.arange(t - 1, -1, -1)
    out_idx = out_digits @ weights
    n = d**t
    mat = np.zeros((n, n))
    mat[out_idx, np.arange(n)] = 1.0
    return mat


def _perm_sign(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, cycle = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            cycle += 1
        if cycle % 2 == 0:
            sign = -sign
    return sign


def _subgroup(groups: Iterable[tuple[int, ...]], t: int) -> list[tuple[int, ...]]:
    """All permutations of 1..t that permute within each cell group."""
    perms = [tuple(range(1, t + 1))]
    for grp in groups:
        if len(grp) < 2:
            continue
        extended = []
        for base in perms:
            for image in permutations(grp):
                m = list(base)
                for src, dst in zip(grp, image):
                    m[src - 1] = dst
                extended.append(tuple(m))
        perms = extended
    return perms


def young_projector(
    diagram: YoungDiagram, tableau: Sequence[Sequence[int]], d: int = 2
) -> np.ndarray:
    """Young symmetrizer of a standard tableau as an operator on (C^d)^(x)t.

    Row symmetrizer applied after the column antisymmetrizer (both as plain
    sums of slot-permutation operators, no normalization), so the result is
    essentially idempotent: P @ P = c P for a positive scalar c.
    """
    t = diagram.boxes
    rows = [tuple(r) for r in tableau]
    if tuple(len(r) for r in rows) != diagram.row_lengths:
        raise ValueError("tableau shape does not match diagram")
    if len(rows) == 1:
        cols = []
    else:
        r1, r2 = rows
        cols = [(r1[i], r2[i]) for i in range(len(r2))]
    sym = np.zeros((d**t, d**t))
    for p in _subgroup(rows, t):
        sym += permutation_operator(p, t, d)
    anti = np.zeros((d**t, d**t))
    for p in _subgroup(cols, t):
        anti += _perm_sign(p) * permutation_operator(p, t, d)
    return sym @ anti


def _lowering_operator(t: int) -> np.ndarray:
    """Collective spin-lowering operator sum_p |1><0|_p on t qubits."""
    digits = _digit_table(t, 2)
    weights = 2 ** np.arange(t - 1, -1, -1)
    n = 2**t
    J = np.zeros((n, n))
    for p in range(t):
        src = np.nonzero(digits[:, p] == 0)[0]
        J[src + weights[p], src] += 1.0
    return J


def _tableau_ket(tableau: Sequence[Sequence[int]], t: int) -> np.ndarray:
    """Computational ket with |1> at the second-row slots of the tableau."""
    row2 = tableau[1] if len(tableau) > 1 else ()
    idx = 0
    for p in range(1, t + 1):
        idx = 2 * idx + (1 if p in row2 else 0)
    ket = np.zeros(2**t)
    ket[idx] = 1.0
    return ket


def raw_column_families(t: int, d: int = 2) -> list[np.ndarray]:
    """Pre-orthogonalization vector families, one (D_G, D_C, 2^t) array per sector.

    Entry [m-1, lam-1] is the normalized image of the lam-th tableau's
    symmetrizer ket lowered m-1 times.  Within a sector the D_C x D_C Gram
    matrix of each column (fixed m) is the same for every m, which is the
    property that lets a deterministic Gram-Schmidt preserve column alignment.
    """
    _check_envelope(d, t)
    lower = _lowering_operator(t)
    families = []
    for diagram in enumerate_diagrams(t, d):
        j = diagram.row_lengths[1] if diagram.n_rows > 1 else 0
        d_g = diagram.row_lengths[0] - j + 1
        tabs = standard_tableaux(diagram)
        fam = np.empty((d_g, len(tabs), 2**t), dtype=complex)
        for lam, tab in enumerate(tabs):
            vec = young_projector(diagram, tab, d) @ _tableau_ket(tab, t)
            norm = np.linalg.norm(vec)
            if norm < 1e-9:
                raise RuntimeError(f"symmetrizer image vanished for tableau {tab}")
            vec = vec / norm
            for m in range(d_g):
                if m > 0:
                    vec = lower @ vec
                    vec = vec / np.linalg.norm(vec)
                fam[m, lam] = vec
        families.append(fam)
    return families


def _fix_sign(v: np.ndarray, eq_tol: float) -> np.ndarray:
    nz = np.nonzero(np.abs(v) > eq_tol)[0]
    lead = v[nz[0]]
    return v * (abs(lead) / lead)


def _check_envelope(d: int, t: int) -> None:
    if d != SUPPORTED_D or not (1 <= t <= MAX_T):
        raise UnsupportedDimensionError(
            f"unsupported (d, t) = ({d}, {t}); supported: d = {SUPPORTED_D}, 1 <= t <= {MAX_T}"
        )


def build_schur_basis(
    t: int, d: int = 2, policy: TolerancePolicy = DEFAULT_POLICY
) -> SchurBasis:
    """Construct the Schur basis of (C^2)^(x)t.

    Sectors are ordered by lexicographically decreasing diagram; within a
    sector, m runs over descending weight (number of |0> labels) and lam over
    tableaux in lexicographic order.  Each vector's first nonzero amplitude
    (in computational-basis order) is made real positive; this never disturbs
    column alignment because the sign pattern factors over rows and columns.
    """
    _check_envelope(d, t)
    sectors = []
    for k, (diagram, fam) in enumerate(
        zip(enumerate_diagrams(t, d), raw_column_families(t, d)), start=1
    ):
        d_g, d_c = fam.shape[0], fam.shape[1]
        vecs = np.empty_like(fam)
        for m in range(d_g):
            ortho = gram_schmidt([fam[m, lam] for lam in range(d_c)], policy)
            for lam in range(d_c):
                vecs[m, lam] = _fix_sign(ortho[lam], policy.eq_tol)
        sectors.append(
            SchurSector(k=k, diagram=diagram, d_g=d_g, d_c=d_c, vectors=vecs)
        )
    return SchurBasis(d=d, t=t, sectors=tuple(sectors))


def _ket(bits: str) -> np.ndarray:
    vec = np.zeros(2 ** len(bits))
    vec[int(bits, 2)] = 1.0
    return vec


def reference_basis_t4(policy: TolerancePolicy = DEFAULT_POLICY) -> SchurBasis:
    """Hard-coded four-qubit Schur basis from the textbook symmetrizer vectors.

    Independent of :func:`build_schur_basis` except for the shared
    Gram-Schmidt routine: the non-orthogonalized family below is written out
    literally and only orthogonalized within each multiplicity column.  Used
    as a golden cross-check; its sector projectors must agree with the
    generic construction.
    """
    s6, s12 = 1 / np.sqrt(6.0), 1 / np.sqrt(12.0)
    symmetric = np.array(
        [
            _ket("0000"),
            0.5 * (_ket("1000") + _ket("0100") + _ket("0010") + _ket("0001")),
            s6
            * (
                _ket("1100")
                + _ket("1010")
                + _ket("1001")
                + _ket("0110")
                + _ket("0101")
                + _ket("0011")
            ),
            0.5 * (_ket("1110") + _ket("1101") + _ket("1011") + _ket("0111")),
            _ket("1111"),
        ],
        dtype=complex,
    ).reshape(5, 1, 16)

    spin1 = {
        (1, 1): s6 * (2 * _ket("0001") - _ket("1000") - _ket("0010")),
        (1, 2): s6 * (2 * _ket("0010") - _ket("1000") - _ket("0001")),
        (1, 3): s6 * (2 * _ket("0100") - _ket("1000") - _ket("0001")),
        (2, 1): s6 * (2 * _ket("1110") - _ket("0111") - _ket("1101")),
        (2, 2): s6 * (2 * _ket("1101") - _ket("0111") - _ket("1110")),
        (2, 3): s6 * (2 * _ket("1011") - _ket("0111") - _ket("1110")),
        (3, 1): s12
        * (
            2 * _ket("0101")
            - 2 * _ket("1010")
            + _ket("0011")
            - _ket("1100")
            + _ket("1001")
            - _ket("0110")
        ),
        (3, 2): s12
        * (
            2 * _ket("0110")
            - 2 * _ket("1001")
            + _ket("0011")
            - _ket("1100")
            + _ket("1010")
            - _ket("0101")
        ),
        (3, 3): s12
        * (
            2 * _ket("0110")
            - 2 * _ket("1001")
            + _ket("0101")
            - _ket("1010")
            + _ket("1100")
            - _ket("0011")
        ),
    }
    sector2 = np.empty((3, 3, 16), dtype=complex)
    for m in (1, 2, 3):
        ortho = gram_schmidt([spin1[(m, lam)] for lam in (1, 2, 3)], policy)
        for lam in (1, 2, 3):
            sector2[m - 1, lam - 1] = ortho[lam - 1]

    singlets = [
        0.5 * (_ket("1100") + _ket("0011") - _ket("1001") - _ket("0110")),
        0.5 * (_ket("1010") + _ket("0101") - _ket("1001") - _ket("0110")),
    ]
    sector3 = np.array(gram_schmidt(singlets, policy)).reshape(1, 2, 16)

    return SchurBasis(
        d=2,
        t=4,
        sectors=(
            SchurSector(1, YoungDiagram((4,)), 5, 1, symmetric),
            SchurSector(2, YoungDiagram((3, 1)), 3, 3, sector2),
            SchurSector(3, YoungDiagram((2, 2)), 1, 2, sector3),
        ),
    )
