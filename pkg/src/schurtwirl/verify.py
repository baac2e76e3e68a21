"""Named invariant suite backing the ``verify`` CLI command.

Each check returns (ok, detail); the runner prints one pass/fail line per
invariant.  Monte-Carlo comparisons widen their tolerance like 1/sqrt(N) when
run with fewer samples than the 1e5 default.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import channels, sizes
from .numerics import DEFAULT_POLICY, TolerancePolicy
from .opbasis import SchurOperatorSet, heisenberg_weyl
from .schur import SchurBasis, build_schur_basis, reference_basis_t4

MC_BASE_TOL = 5e-3
MC_BASE_SAMPLES = 100_000


@dataclass
class VerifyConfig:
    samples: int = MC_BASE_SAMPLES
    seed: int = 42
    t_max: int = 4
    policy: TolerancePolicy = DEFAULT_POLICY
    basis: SchurBasis | None = None  # externally loaded basis, checked structurally

    @property
    def mc_tol(self) -> float:
        return MC_BASE_TOL * np.sqrt(MC_BASE_SAMPLES / self.samples)


def _bases(cfg: VerifyConfig) -> list[SchurBasis]:
    if cfg.basis is not None:
        return [cfg.basis]
    return [build_schur_basis(t) for t in range(1, cfg.t_max + 1)]


def check_schur_completeness(cfg: VerifyConfig):
    worst = 0.0
    for basis in _bases(cfg):
        q = basis.transform_matrix()
        if q.shape[0] != basis.dim:
            return False, f"t={basis.t}: {q.shape[0]} vectors for dim {basis.dim}"
        worst = max(worst, np.abs(q @ q.conj().T - np.eye(basis.dim)).max())
    ok = worst < cfg.policy.eq_tol
    return ok, f"max unitarity defect {worst:.2e}"


def check_schur_equivariance(cfg: VerifyConfig):
    rng = channels.philox_rng(cfg.seed)
    worst_row, worst_align = 0.0, 0.0
    for basis in _bases(cfg):
        for u in channels.haar_unitaries(2, 20, rng):
            big = channels.tensor_power(u, basis.t)
            for sector in basis.sectors:
                block0 = None
                for lam in range(1, sector.d_c + 1):
                    col = sector.column(lam)
                    block = col.conj().T @ big @ col
                    worst_row = max(worst_row, np.abs(big @ col - col @ block).max())
                    if block0 is None:
                        block0 = block
                    else:
                        worst_align = max(worst_align, np.abs(block - block0).max())
    ok = worst_row < cfg.policy.eq_tol and worst_align < cfg.policy.eq_tol
    return ok, f"row-invariance {worst_row:.2e}, column alignment {worst_align:.2e}"


def check_schur_golden_t4(cfg: VerifyConfig):
    generic = build_schur_basis(4)
    reference = reference_basis_t4()
    worst = max(
        np.abs(g.projector() - r.projector()).max()
        for g, r in zip(generic.sectors, reference.sectors)
    )
    dims = [(s.d_g, s.d_c) for s in generic.sectors]
    ok = worst < 1e-10 and dims == [(5, 1), (3, 3), (1, 2)]
    return ok, f"sector dims {dims}, projector delta {worst:.2e}"


def check_opbasis_structure(cfg: VerifyConfig):
    rng = channels.philox_rng(cfg.seed + 1)
    worst = 0.0
    for basis in _bases(cfg):
        ops = SchurOperatorSet(basis)
        total = np.zeros((basis.dim, basis.dim), dtype=complex)
        for k, sector in enumerate(basis.sectors, start=1):
            proj = ops.sector_projector(k)
            total += proj
            from_pi = sum(ops.pi(k, m, m) for m in range(1, sector.d_g + 1))
            from_lam = sum(ops.lam(k, l, l) for l in range(1, sector.d_c + 1))
            worst = max(worst, np.abs(from_pi - proj).max(), np.abs(from_lam - proj).max())
            # commutation of the two operator families
            for _ in range(3):
                m1, m2 = rng.integers(1, sector.d_g + 1, size=2)
                l1, l2 = rng.integers(1, sector.d_c + 1, size=2)
                pi_op, lam_op = ops.pi(k, m1, m2), ops.lam(k, l1, l2)
                worst = max(worst, np.abs(pi_op @ lam_op - lam_op @ pi_op).max())
            # block-orthogonality against the elementary operators
            for _ in range(3):
                m1, m2, r1, r2 = rng.integers(1, sector.d_g + 1, size=4)
                kk = int(rng.integers(1, len(basis.sectors) + 1))
                other = basis.sector(kk)
                n1, n2 = rng.integers(1, other.d_g + 1, size=2)
                l1, l2 = rng.integers(1, other.d_c + 1, size=2)
                elem = ops.full(kk, n1, l1, kk, n2, l2)
                lhs = ops.pi(k, m1, m2) @ elem @ ops.pi(k, r1, r2)
                if kk == k:
                    mid = ops.pi(k, n1, n2) @ ops.lam(k, l1, l2)
                else:
                    mid = np.zeros_like(elem)
                rhs = ops.pi(k, m1, m2) @ mid @ ops.pi(k, r1, r2)
                worst = max(worst, np.abs(lhs - rhs).max())
        worst = max(worst, np.abs(total - np.eye(basis.dim)).max())
    ok = worst < cfg.policy.eq_tol
    return ok, f"max structural defect {worst:.2e}"


def check_hw_one_design(cfg: VerifyConfig):
    rng = channels.philox_rng(cfg.seed + 2)
    worst = 0.0
    for dim in (2, 3, 5):
        basis = heisenberg_weyl(dim)
        for _ in range(20):
            x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            avg = sum(g @ x @ g.conj().T for g in basis.elements) / dim**2
            worst = max(worst, np.abs(avg - np.trace(x) / dim * np.eye(dim)).max())
    return worst < 1e-12, f"max 1-design defect {worst:.2e}"


def check_oracle_triangle(cfg: VerifyConfig):
    rng = channels.philox_rng(cfg.seed + 3)
    worst_exact, worst_mc = 0.0, 0.0
    for t in (2, 3, 4):
        ops = SchurOperatorSet(build_schur_basis(t))
        for i in range(3):
            rho = channels.random_density_matrix(2**t, rng)
            finite = channels.compact_finite_twirl(rho, ops)
            exact = channels.haar_projection_twirl(rho, ops)
            mc = channels.mc_haar_twirl(rho, t, cfg.samples, cfg.seed + 10 * t + i)
            worst_exact = max(worst_exact, np.abs(finite.state - exact.state).max())
            worst_mc = max(worst_mc, np.abs(mc.state - exact.state).max())
    ok = worst_exact < 1e-10 and worst_mc < cfg.mc_tol
    return ok, (
        f"finite-vs-analytic {worst_exact:.2e}, mc-vs-analytic {worst_mc:.2e} "
        f"(tolerance {cfg.mc_tol:.2e} at {cfg.samples} samples)"
    )


def check_beta_reproduction(cfg: VerifyConfig):
    ops = SchurOperatorSet(build_schur_basis(4))
    beta = channels.beta_weights(ops, channels.sl2_diagonal_family())
    expected = (0.30036, 0.14652, 0.12290)
    worst = max(abs(a - b) for a, b in zip(beta.normalized, expected))
    ok = worst < 1e-4 and beta.refinement_delta < 1e-6
    return ok, (
        f"normalized {tuple(round(v, 6) for v in beta.normalized)}, "
        f"max deviation {worst:.2e}, refinement delta {beta.refinement_delta:.2e}"
    )


def check_noncompact_consistency(cfg: VerifyConfig):
    ops = SchurOperatorSet(build_schur_basis(4))
    family = channels.sl2_diagonal_family()
    beta = channels.beta_weights(ops, family)
    rng = channels.philox_rng(cfg.seed + 4)
    rho = channels.random_density_matrix(16, rng)
    convention, diag = channels.select_convention(
        rho, ops, beta, family, cfg.samples, cfg.seed + 5
    )
    delta = diag[f"delta_{convention}"]
    other = diag["delta_normalized" if convention == "raw" else "delta_raw"]
    # the conventions are only statistically distinguishable with enough samples
    ok = delta < cfg.mc_tol and (cfg.samples < 20_000 or other > 3 * delta)
    return ok, (
        f"selected {convention!r}: oracle delta {delta:.2e} "
        f"(rejected candidate {other:.2e}, tolerance {cfg.mc_tol:.2e})"
    )


def check_trace_behavior(cfg: VerifyConfig):
    ops = SchurOperatorSet(build_schur_basis(4))
    family = channels.sl2_diagonal_family()
    beta = channels.beta_weights(ops, family)
    rng = channels.philox_rng(cfg.seed + 6)
    worst_compact, worst_deficit = 0.0, 0.0
    trace_below_one = True
    for _ in range(5):
        rho = channels.random_density_matrix(16, rng)
        compact = channels.compact_finite_twirl(rho, ops)
        worst_compact = max(worst_compact, abs(compact.total_trace - 1.0))
        result = channels.noncompact_finite_twirl(rho, ops, beta, "raw")
        probs = beta.probabilities("raw")
        expected = sum(
            p * np.einsum("ij,ji->", ops.sector_projector(k), rho).real
            for k, p in enumerate(probs, start=1)
        )
        worst_deficit = max(worst_deficit, abs(result.total_trace - expected))
        trace_below_one = trace_below_one and result.total_trace < 1.0
    ok = worst_compact < 1e-10 and worst_deficit < 1e-8 and trace_below_one
    return ok, (
        f"compact trace defect {worst_compact:.2e}, "
        f"non-compact trace identity defect {worst_deficit:.2e}"
    )


def check_sector_term_count(cfg: VerifyConfig):
    if cfg.basis is not None:
        basis = cfg.basis
        expected = sizes.universal_set_size(basis.d, basis.t)
        count = sizes.sector_term_count(basis)
        return count == expected, f"t={basis.t}: {count} terms vs {expected}"
    for t in range(1, 7):
        count = sizes.sector_term_count(build_schur_basis(t))
        expected = sizes.universal_set_size(2, t)
        if count != expected:
            return False, f"t={t}: {count} terms, expected {expected}"
    return True, "sum_k (D_G^k)^2 matches binom(d^2+t-1, t) for t <= 6"


def check_table_reproduction(cfg: VerifyConfig):
    rows = {(r.d, r.t): r for r in sizes.emit_table()}
    expected_universal = [10, 20, 56, 45, 165, 325, 666, 1225, 2080, 3321, 5050]
    expected_bound = [10, 20, 56, 65, 270, 577, 1226, 2305, 3970, 6401, 9802]
    got_universal = [rows[p].universal for p in sizes.TABLE_PAIRS]
    got_bound = [rows[p].bound for p in sizes.TABLE_PAIRS]
    if got_universal != expected_universal or got_bound != expected_bound:
        return False, f"universal {got_universal}, bound {got_bound}"
    oracle = sizes.operator_span_dim(2, 2, 0, seed=cfg.seed)
    oracle_bound = sizes.operator_span_dim(2, 1, 1, seed=cfg.seed)
    ok = oracle == 10 and oracle_bound == 10
    return ok, f"11 rows exact; rank oracle D(2,2,0)={oracle}, D(2,1,1)={oracle_bound}"


STRUCTURAL_CHECKS: list[tuple[str, Callable]] = [
    ("schur-completeness", check_schur_completeness),
    ("schur-equivariance", check_schur_equivariance),
    ("opbasis-structure", check_opbasis_structure),
    ("sector-term-count", check_sector_term_count),
]

FULL_CHECKS: list[tuple[str, Callable]] = [
    ("schur-completeness", check_schur_completeness),
    ("schur-equivariance", check_schur_equivariance),
    ("schur-golden-t4", check_schur_golden_t4),
    ("opbasis-structure", check_opbasis_structure),
    ("hw-1design", check_hw_one_design),
    ("oracle-triangle", check_oracle_triangle),
    ("beta-reproduction", check_beta_reproduction),
    ("noncompact-consistency", check_noncompact_consistency),
    ("trace-behavior", check_trace_behavior),
    ("sector-term-count", check_sector_term_count),
    ("table-reproduction", check_table_reproduction),
]


def run_suite(cfg: VerifyConfig, echo=print) -> bool:
    """Run the invariant suite, print one line per check, return overall pass."""
    checks = STRUCTURAL_CHECKS if cfg.basis is not None else FULL_CHECKS
    all_ok = True
    for name, fn in checks:
        try:
            ok, detail = fn(cfg)
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
