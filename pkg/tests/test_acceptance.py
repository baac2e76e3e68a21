"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  Every tolerance is pinned here; Monte-Carlo checks use
1e5 samples.
"""

import time

import numpy as np
import pytest

from schurtwirl import (
    SchurOperatorSet,
    beta_weights,
    build_schur_basis,
    compact_finite_twirl,
    emit_table,
    haar_projection_twirl,
    heisenberg_weyl,
    mc_cartan_twirl,
    mc_haar_twirl,
    noncompact_finite_twirl,
    operator_span_dim,
    random_density_matrix,
    reference_basis_t4,
    sector_term_count,
    select_convention,
    sl2_diagonal_family,
    universal_set_size,
)
from schurtwirl.channels import philox_rng

MC_SAMPLES = 100_000


class _Stopwatch:
    def __init__(self, budget_s):
        self.budget = budget_s
        self.start = time.monotonic()

    def done(self, label):
        elapsed = time.monotonic() - self.start
        print(f"PASS {label} ({elapsed:.2f}s, budget {self.budget:.0f}s)")
        assert elapsed < self.budget, f"{label} exceeded runtime budget"


def test_criterion_1_schur_basis_golden():
    clock = _Stopwatch(1.0)
    basis = build_schur_basis(4)
    assert [(s.d_g, s.d_c) for s in basis.sectors] == [(5, 1), (3, 3), (1, 2)]
    reference = reference_basis_t4()
    for generic, ref in zip(basis.sectors, reference.sectors):
        assert np.abs(generic.projector() - ref.projector()).max() < 1e-10
    clock.done("criterion-1 schur-basis-golden: dims (5,1),(3,3),(1,2); projectors match 1e-10")


def test_criterion_2_oracle_triangle():
    clock = _Stopwatch(120.0)
    rng = philox_rng(2024)
    worst_finite, worst_mc = 0.0, 0.0
    for t in (2, 3, 4):
        ops = SchurOperatorSet(build_schur_basis(t))
        for i in range(20):
            rho = random_density_matrix(2**t, rng)
            finite = compact_finite_twirl(rho, ops)
            exact = haar_projection_twirl(rho, ops)
            mc = mc_haar_twirl(rho, t, MC_SAMPLES, seed=1000 * t + i)
            worst_finite = max(worst_finite, np.abs(finite.state - exact.state).max())
            worst_mc = max(
                worst_mc,
                np.abs(mc.state - exact.state).max(),
                np.abs(mc.state - finite.state).max(),
            )
    assert worst_finite < 1e-10
    assert worst_mc < 5e-3
    clock.done(
        f"criterion-2 oracle-triangle: finite-vs-analytic {worst_finite:.2e} < 1e-10, "
        f"mc-vs-both {worst_mc:.2e} < 5e-3 (20 states, t=2,3,4, 1e5 samples)"
    )


def test_criterion_3_one_design_identity():
    clock = _Stopwatch(1.0)
    rng = philox_rng(3)
    worst = 0.0
    for dim in (2, 3, 5):
        basis = heisenberg_weyl(dim)
        for _ in range(20):
            x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            avg = sum(g @ x @ g.conj().T for g in basis.elements) / dim**2
            worst = max(worst, np.abs(avg - np.trace(x) / dim * np.eye(dim)).max())
    assert worst < 1e-12
    clock.done(f"criterion-3 1-design-identity: max defect {worst:.2e} < 1e-12 (D=2,3,5)")


def test_criterion_4_beta_reproduction():
    clock = _Stopwatch(1.0)
    ops = SchurOperatorSet(build_schur_basis(4))
    beta = beta_weights(ops, sl2_diagonal_family())
    expected = (0.30036, 0.14652, 0.12290)
    worst = max(abs(a - b) for a, b in zip(beta.normalized, expected))
    assert worst < 1e-4
    assert beta.refinement_delta < 1e-6
    clock.done(
        f"criterion-4 beta-reproduction: normalized within {worst:.2e} of "
        f"(0.30036, 0.14652, 0.12290), refinement delta {beta.refinement_delta:.2e} < 1e-6"
    )


def test_criterion_5_noncompact_consistency():
    clock = _Stopwatch(180.0)
    ops = SchurOperatorSet(build_schur_basis(4))
    family = sl2_diagonal_family()
    beta = beta_weights(ops, family)
    rng = philox_rng(5)
    probe = random_density_matrix(16, rng)
    conventions = set()
    for seed in (42, 43, 44):
        convention, _ = select_convention(probe, ops, beta, family, MC_SAMPLES, seed)
        conventions.add(convention)
    assert len(conventions) == 1, f"convention unstable across seeds: {conventions}"
    chosen = conventions.pop()
    worst = 0.0
    for i in range(10):
        rho = random_density_matrix(16, rng)
        finite = noncompact_finite_twirl(rho, ops, beta, chosen)
        oracle = mc_cartan_twirl(rho, 4, family, MC_SAMPLES, seed=500 + i)
        worst = max(worst, np.abs(finite.state - oracle.state).max())
    assert worst < 5e-3
    clock.done(
        f"criterion-5 noncompact-consistency: convention {chosen!r} stable over 3 seeds, "
        f"max oracle delta {worst:.2e} < 5e-3 on 10 states"
    )


def test_criterion_6_table_reproduction():
    clock = _Stopwatch(60.0)
    rows = emit_table()
    assert [r.universal for r in rows] == [10, 20, 56, 45, 165, 325, 666, 1225, 2080, 3321, 5050]
    assert [r.bound for r in rows] == [10, 20, 56, 65, 270, 577, 1226, 2305, 3970, 6401, 9802]
    for t in (1, 2, 3, 4):
        assert operator_span_dim(2, t, 0, seed=60 + t) == universal_set_size(2, t)
    assert operator_span_dim(2, 1, 1, seed=66) == 10
    clock.done(
        "criterion-6 table-reproduction: 11 rows exact; rank oracle confirms "
        "universal sizes for d=2, t<=4 and the t=2 bound 10"
    )


def test_criterion_7_structural_invariants():
    clock = _Stopwatch(30.0)
    rng = philox_rng(7)
    worst = 0.0
    for t in range(1, 7):
        basis = build_schur_basis(t)
        ops = SchurOperatorSet(basis)
        dim = 2**t
        assert sector_term_count(basis) == universal_set_size(2, t)
        total = np.zeros((dim, dim), dtype=complex)
        for k, sector in enumerate(basis.sectors, start=1):
            proj = ops.sector_projector(k)
            total += proj
            pi_sum = sum(ops.pi(k, m, m) for m in range(1, sector.d_g + 1))
            lam_sum = sum(ops.lam(k, l, l) for l in range(1, sector.d_c + 1))
            worst = max(worst, np.abs(pi_sum - proj).max(), np.abs(lam_sum - proj).max())
            for _ in range(4):
                m1, m2, r1, r2 = rng.integers(1, sector.d_g + 1, size=4)
                l1, l2 = rng.integers(1, sector.d_c + 1, size=2)
                pi_op, lam_op = ops.pi(k, m1, m2), ops.lam(k, l1, l2)
                worst = max(worst, np.abs(pi_op @ lam_op - lam_op @ pi_op).max())
                n1, n2 = rng.integers(1, sector.d_g + 1, size=2)
                elem = ops.full(k, n1, l1, k, n2, l2)
                lhs = pi_op @ elem @ ops.pi(k, r1, r2)
                rhs = pi_op @ ops.pi(k, n1, n2) @ ops.lam(k, l1, l2) @ ops.pi(k, r1, r2)
                worst = max(worst, np.abs(lhs - rhs).max())
        worst = max(worst, np.abs(total - np.eye(dim)).max())
    assert worst < 1e-10
    clock.done(
        f"criterion-7 structural-invariants: block-orthogonality, commutation, "
        f"projector sums, completeness and term counts for t<=6, max defect {worst:.2e}"
    )


def test_criterion_8_trace_behavior():
    clock = _Stopwatch(30.0)
    ops = SchurOperatorSet(build_schur_basis(4))
    family = sl2_diagonal_family()
    beta = beta_weights(ops, family)
    probs = beta.probabilities("raw")
    rng = philox_rng(8)
    worst_compact, worst_identity = 0.0, 0.0
    for _ in range(20):
        rho = random_density_matrix(16, rng)
        compact = compact_finite_twirl(rho, ops)
        worst_compact = max(worst_compact, abs(compact.total_trace - 1.0))
        filtered = noncompact_finite_twirl(rho, ops, beta, "raw")
        assert filtered.total_trace < 1.0
        expected = sum(
            p * np.einsum("ij,ji->", ops.sector_projector(k), rho).real
            for k, p in enumerate(probs, start=1)
        )
        worst_identity = max(worst_identity, abs(filtered.total_trace - expected))
    assert worst_compact < 1e-10
    assert worst_identity < 1e-8
    clock.done(
        f"criterion-8 trace-behavior: compact preserves trace within {worst_compact:.2e}, "
        f"filtered trace matches sector identity within {worst_identity:.2e} and stays below 1"
    )
