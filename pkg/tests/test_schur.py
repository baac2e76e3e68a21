import json

import numpy as np
import pytest

from schurtwirl import build_schur_basis, enumerate_diagrams, reference_basis_t4
from schurtwirl.schur import (
    SchurBasis,
    UnsupportedDimensionError,
    YoungDiagram,
    permutation_operator,
    raw_column_families,
    standard_tableaux,
    young_projector,
)
from conftest import ket, kron_power, random_unitary, span_projector


def brute_force_partitions(t, d):
    """Independent partition enumerator (decreasing sequences summing to t)."""
    found = []

    def rec(rest, cap, prefix):
        if rest == 0:
            found.append(tuple(prefix))
            return
        for p in range(min(rest, cap), 0, -1):
            if len(prefix) < d:
                rec(rest - p, p, prefix + [p])

    rec(t, t, [])
    return sorted(found, reverse=True)


def hook_length_count(shape):
    """Number of standard tableaux by the hook length formula (two rows)."""
    import math

    a = shape[0]
    b = shape[1] if len(shape) > 1 else 0
    hooks = []
    for j in range(a):
        hooks.append(a - j + (1 if j < b else 0))
    for j in range(b):
        hooks.append(b - j)
    total = math.factorial(a + b)
    for h in hooks:
        total //= h
    return total


# ---------------------------------------------------------------------------
# diagrams and tableaux


def test_enumerate_diagrams_t4():
    assert [d.row_lengths for d in enumerate_diagrams(4, 2)] == [(4,), (3, 1), (2, 2)]


def test_enumerate_diagrams_t1():
    assert [d.row_lengths for d in enumerate_diagrams(1, 2)] == [(1,)]


@pytest.mark.parametrize("t", range(1, 7))
def test_enumerate_diagrams_vs_oracle(t):
    got = [d.row_lengths for d in enumerate_diagrams(t, 2)]
    assert got == brute_force_partitions(t, 2)


def test_young_diagram_validation():
    with pytest.raises(ValueError):
        YoungDiagram((1, 2))
    with pytest.raises(ValueError):
        YoungDiagram((2, 0))


@pytest.mark.parametrize(
    "shape", [(4,), (3, 1), (2, 2), (4, 2), (3, 3), (5, 1), (6,)]
)
def test_standard_tableaux_count_vs_hook_formula(shape):
    tabs = standard_tableaux(YoungDiagram(shape))
    assert len(tabs) == hook_length_count(shape)
    for tab in tabs:
        flat = sorted(x for row in tab for x in row)
        assert flat == list(range(1, sum(shape) + 1))
        for row in tab:
            assert list(row) == sorted(row)
        if len(tab) == 2:
            assert all(tab[0][i] < tab[1][i] for i in range(len(tab[1])))


def test_standard_tableaux_lex_order():
    tabs = standard_tableaux(YoungDiagram((3, 1)))
    assert tabs == [((1, 2, 3), (4,)), ((1, 2, 4), (3,)), ((1, 3, 4), (2,))]


# ---------------------------------------------------------------------------
# permutation operators and Young projectors


def test_permutation_operator_homomorphism(rng):
    t = 4
    p1 = (2, 1, 3, 4)  # swap slots 1,2
    p2 = (1, 3, 2, 4)  # swap slots 2,3
    composed = tuple(p1[p2[j] - 1] for j in range(t))
    m = permutation_operator(p1, t) @ permutation_operator(p2, t)
    assert np.array_equal(m, permutation_operator(composed, t))


def test_permutation_operator_action_on_ket():
    # cycle 1->2->3->1 applied to |100>: the 1 moves from slot 1 to slot 2
    op = permutation_operator((2, 3, 1), 3)
    assert np.abs(op @ ket("100") - ket("010")).max() == 0


def test_young_projector_symmetrizer_rank():
    diagram = YoungDiagram((4,))
    proj = young_projector(diagram, standard_tableaux(diagram)[0])
    assert np.linalg.matrix_rank(proj) == 5  # symmetric subspace of 4 qubits


def test_young_projector_essential_idempotence():
    diagram = YoungDiagram((3, 1))
    proj = young_projector(diagram, standard_tableaux(diagram)[0])
    scale = np.trace(proj @ proj) / np.trace(proj)
    assert np.abs(proj @ proj - scale * proj).max() < 1e-10


def test_young_projector_two_two_spans_singlet_plane():
    diagram = YoungDiagram((2, 2))
    images = []
    for tab in standard_tableaux(diagram):
        row2 = tab[1]
        bits = "".join("1" if p in row2 else "0" for p in range(1, 5))
        images.append(young_projector(diagram, tab) @ ket(bits))
    f1 = 0.5 * (ket("1100") + ket("0011") - ket("1001") - ket("0110"))
    f2 = 0.5 * (ket("1010") + ket("0101") - ket("1001") - ket("0110"))
    assert np.abs(span_projector(images) - span_projector([f1, f2])).max() < 1e-10


def test_young_projector_shape_mismatch():
    with pytest.raises(ValueError):
        young_projector(YoungDiagram((3, 1)), ((1, 2), (3, 4)))


# ---------------------------------------------------------------------------
# basis construction


def test_build_dims_t4():
    basis = build_schur_basis(4)
    assert [(s.d_g, s.d_c) for s in basis.sectors] == [(5, 1), (3, 3), (1, 2)]


def test_build_t1_defining_rep():
    basis = build_schur_basis(1)
    assert [(s.d_g, s.d_c) for s in basis.sectors] == [(2, 1)]
    assert np.abs(basis.sectors[0].vectors[0, 0] - ket("0")).max() < 1e-12
    assert np.abs(basis.sectors[0].vectors[1, 0] - ket("1")).max() < 1e-12


def test_build_t2_matches_swap_eigenspaces():
    # independent oracle: the swap operator's +1/-1 eigenspaces
    basis = build_schur_basis(2)
    assert [(s.d_g, s.d_c) for s in basis.sectors] == [(3, 1), (1, 1)]
    swap = permutation_operator((2, 1), 2)
    sym = (np.eye(4) + swap) / 2
    anti = (np.eye(4) - swap) / 2
    assert np.abs(basis.sectors[0].projector() - sym).max() < 1e-12
    assert np.abs(basis.sectors[1].projector() - anti).max() < 1e-12


@pytest.mark.parametrize("t", range(1, 7))
def test_completeness_transform_unitary(t, policy):
    basis = build_schur_basis(t)
    q = basis.transform_matrix()
    assert q.shape == (2**t, 2**t)
    assert np.abs(q @ q.conj().T - np.eye(2**t)).max() < policy.eq_tol


@pytest.mark.parametrize("t", range(1, 7))
def test_equivariance_and_column_alignment(t, rng, policy):
    basis = build_schur_basis(t)
    for _ in range(20):
        big = kron_power(random_unitary(2, rng), t)
        for sector in basis.sectors:
            first_block = None
            for lam in range(1, sector.d_c + 1):
                col = sector.column(lam)
                block = col.conj().T @ big @ col
                # row spans are invariant under the collective action
                assert np.abs(big @ col - col @ block).max() < policy.eq_tol
                # and every multiplicity column sees the same matrix
                if first_block is None:
                    first_block = block
                else:
                    assert np.abs(block - first_block).max() < policy.eq_tol


@pytest.mark.parametrize("t", [4, 5, 6])
def test_gram_matrix_determinism_across_columns(t, policy):
    for fam in raw_column_families(t):
        d_g, d_c = fam.shape[0], fam.shape[1]
        reference = None
        for m in range(d_g):
            gram = np.einsum("ax,bx->ab", fam[m].conj(), fam[m])
            if reference is None:
                reference = gram
            else:
                assert np.abs(gram - reference).max() < policy.eq_tol


@pytest.mark.parametrize("t", range(1, 7))
def test_phase_convention_leading_amplitude_positive(t):
    basis = build_schur_basis(t)
    for sector in basis.sectors:
        for vec in sector.vectors.reshape(-1, 2**t):
            lead = vec[np.abs(vec) > 1e-10][0]
            assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_m_ordering_descending_weight():
    # m=1 holds the most |0> labels: for the symmetric sector of t=4 the
    # first and last vectors are the all-zeros and all-ones kets
    basis = build_schur_basis(4)
    sym = basis.sectors[0]
    assert np.abs(sym.vectors[0, 0] - ket("0000")).max() < 1e-12
    assert np.abs(sym.vectors[4, 0] - ket("1111")).max() < 1e-12


@pytest.mark.parametrize("d,t", [(3, 4), (2, 0), (2, 7), (4, 2)])
def test_unsupported_envelope(d, t):
    with pytest.raises(UnsupportedDimensionError):
        build_schur_basis(t, d)


# ---------------------------------------------------------------------------
# hard-coded t=4 reference basis


def test_reference_symmetric_vectors_exact():
    basis = reference_basis_t4()
    expected = (
        ket("1100") + ket("1010") + ket("1001") + ket("0110") + ket("0101") + ket("0011")
    ) / np.sqrt(6)
    assert np.abs(basis.sectors[0].vectors[2, 0] - expected).max() < 1e-15


def test_reference_orthonormal():
    basis = reference_basis_t4()
    q = basis.transform_matrix()
    assert np.abs(q @ q.conj().T - np.eye(16)).max() < 1e-12


def test_reference_singlet_sector_projector():
    basis = reference_basis_t4()
    f1 = 0.5 * (ket("1100") + ket("0011") - ket("1001") - ket("0110"))
    f2 = 0.5 * (ket("1010") + ket("0101") - ket("1001") - ket("0110"))
    assert np.abs(basis.sectors[2].projector() - span_projector([f1, f2])).max() < 1e-12


def test_reference_matches_generic_sector_projectors():
    generic = build_schur_basis(4)
    reference = reference_basis_t4()
    for gen, ref in zip(generic.sectors, reference.sectors):
        assert (gen.d_g, gen.d_c) == (ref.d_g, ref.d_c)
        assert np.abs(gen.projector() - ref.projector()).max() < 1e-10


# ---------------------------------------------------------------------------
# serialization


@pytest.mark.parametrize("t", [1, 3, 4])
def test_json_roundtrip_exact(t):
    basis = build_schur_basis(t)
    doc = json.loads(json.dumps(basis.to_json_dict()))
    back = SchurBasis.from_json_dict(doc)
    assert back.d == basis.d and back.t == basis.t
    for orig, loaded in zip(basis.sectors, back.sectors):
        assert orig.diagram == loaded.diagram
        assert np.array_equal(orig.vectors, loaded.vectors)  # bit-exact


def test_save_load_file(tmp_path):
    basis = build_schur_basis(4)
    path = tmp_path / "basis.json"
    basis.save(path)
    loaded = SchurBasis.load(path)
    for orig, back in zip(basis.sectors, loaded.sectors):
        assert np.array_equal(orig.vectors, back.vectors)
