"""Finite averaging channels for collective group actions, with their oracles.

The compact channel averages a t-qubit state over the collective U(2) action
by a *finite* sum: on each Schur sector k it applies a uniformly mixed unitary
channel built from a Heisenberg-Weyl operator basis embedded through the
sector's pi operators.  The non-compact variant (collective SL(2,C) /
filtering operations) rescales each sector term by a probability p_k obtained
by integrating the normalized Abelian Cartan factor, and is trace decreasing.

Three independent oracles back the construction:

* ``haar_projection_twirl`` -- closed-form Haar average via commutant operators,
* ``mc_haar_twirl``         -- Monte-Carlo average of U^(x)t rho U^(x)t^dag,
* ``mc_cartan_twirl``       -- Monte-Carlo average over S A(x) S' factors.

All Monte-Carlo paths are driven by a Philox stream keyed on the seed, with
every random variate drawn up front in a fixed order and the heavy algebra
evaluated in fixed-size chunks, so reruns are bit-identical and results do
not depend on thread count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .numerics import DEFAULT_POLICY, TolerancePolicy
from .opbasis import SchurOperatorSet, UnitaryOperatorBasis, embed_gamma, heisenberg_weyl


class InvalidDensityMatrixError(ValueError):
    """Input fails a density-matrix invariant; the message names which one."""


class QuadratureError(RuntimeError):
    """Quadrature refinement did not converge."""


class ConventionError(ValueError):
    """Ambiguous sector-probability convention with no explicit choice."""


def check_density_matrix(rho, dim: int | None = None, tol: float = 1e-8) -> np.ndarray:
    """Validate a density matrix, raising with the violated invariant named."""
    mat = np.asarray(rho, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidDensityMatrixError(f"not a square matrix: shape {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise InvalidDensityMatrixError(f"dimension {mat.shape[0]} != expected {dim}")
    if not (np.all(np.isfinite(mat.real)) and np.all(np.isfinite(mat.imag))):
        raise InvalidDensityMatrixError("non-finite entries")
    if np.abs(mat - mat.conj().T).max() > tol:
        raise InvalidDensityMatrixError("not Hermitian")
    trace = np.trace(mat).real
    if abs(trace - 1.0) > tol:
        raise InvalidDensityMatrixError(f"trace {trace} differs from 1 by more than {tol}")
    if np.linalg.eigvalsh(mat).min() < -tol:
        raise InvalidDensityMatrixError("negative eigenvalue")
    return mat


# ---------------------------------------------------------------------------
# Random sampling


def philox_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the single entry point for all randomness."""
    return np.random.Generator(np.random.Philox(key=seed))


def haar_unitaries(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar-random U(dim) matrices, shape (count, dim, dim).

    QR of a complex Ginibre matrix with the R diagonal phases folded back in,
    which makes the distribution exactly Haar.
    """
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    diag = np.einsum("nii->ni", r)
    return q * (diag / np.abs(diag))[:, None, :]


def special_unitaries(count: int, rng: np.random.Generator) -> np.ndarray:
    """Batch of Haar-random SU(2) matrices (U(2) samples divided by det^(1/2))."""
    u = haar_unitaries(2, count, rng)
    det = u[:, 0, 0] * u[:, 1, 1] - u[:, 0, 1] * u[:, 1, 0]
    return u / np.sqrt(det)[:, None, None]


def tensor_power_batch(mats: np.ndarray, t: int) -> np.ndarray:
    """Batched t-fold Kronecker power of (n, d, d) matrices."""
    n, d = mats.shape[0], mats.shape[1]
    out = np.ones((n, 1, 1), dtype=complex)
    size = 1
    for _ in range(t):
        out = np.einsum("nij,nkl->nikjl", out, mats).reshape(n, size * d, size * d)
        size *= d
    return out


def tensor_power(mat: np.ndarray, t: int) -> np.ndarray:
    """t-fold Kronecker power of a single matrix."""
    return tensor_power_batch(np.asarray(mat, dtype=complex)[None], t)[0]


# ---------------------------------------------------------------------------
# Results


@dataclass
class TwirlResult:
    """Output state of an averaging channel plus bookkeeping.

    ``sector_weights`` are the traces of the output on each Schur sector
    (present when the channel knows the sector structure), ``terms`` counts
    summands (finite channels) or samples (Monte-Carlo ones).
    """

    state: np.ndarray
    total_trace: float
    terms: int
    sector_weights: tuple[float, ...] | None = None
    convention: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        doc = {
            "state": [
                [float(a.real), float(a.imag)] for a in np.asarray(self.state).ravel()
            ],
            "sector_weights": list(self.sector_weights) if self.sector_weights else None,
            "total_trace": float(self.total_trace),
            "terms": int(self.terms),
            "convention": self.convention,
        }
        extras = {
            key: value
            for key, value in self.diagnostics.items()
            if isinstance(value, (int, float, str, bool, list, tuple)) or value is None
        }
        if "oracle_delta" in extras:
            doc["oracle_delta"] = float(extras.pop("oracle_delta"))
        if extras:
            doc["diagnostics"] = {
                k: list(v) if isinstance(v, tuple) else v for k, v in extras.items()
            }
        return doc


def _sector_weights(state: np.ndarray, ops: SchurOperatorSet | None):
    if ops is None:
        return None
    return tuple(
        float(np.einsum("ij,ji->", ops.sector_projector(k), state).real)
        for k in range(1, ops.n_sectors + 1)
    )


# ---------------------------------------------------------------------------
# Compact averaging: finite form and two oracles


def _sector_bases(
    ops: SchurOperatorSet, hw: Mapping[int, UnitaryOperatorBasis] | None
) -> dict[int, UnitaryOperatorBasis]:
    bases = {}
    for k, (d_g, _) in enumerate(ops.sector_dims(), start=1):
        basis = hw[k] if hw is not None else heisenberg_weyl(d_g)
        if basis.dim != d_g:
            raise ValueError(
                f"operator basis for sector {k} has dim {basis.dim}, expected {d_g}"
            )
        bases[k] = basis
    return bases


def _mixed_unitary_sum(rho: np.ndarray, ops: SchurOperatorSet, weights, bases) -> tuple[np.ndarray, int]:
    out = np.zeros_like(rho)
    terms = 0
    for k, (d_g, _) in enumerate(ops.sector_dims(), start=1):
        scale = weights[k - 1] / d_g**2
        for gamma in bases[k].elements:
            gt = embed_gamma(ops, k, gamma)
            out += scale * (gt @ rho @ gt.conj().T)
            terms += 1
    return out, terms


def compact_finite_twirl(
    rho,
    ops: SchurOperatorSet,
    hw: Mapping[int, UnitaryOperatorBasis] | None = None,
) -> TwirlResult:
    """Finite averaging over the collective U(2) action.

    Applies, on each sector k, the uniformly mixed unitary channel
    (1/D_G^2) sum_l gt_l rho gt_l^dag with gt_l the Heisenberg-Weyl elements
    embedded through the sector's pi operators.  Trace preserving, and equal
    to the exact Haar twirl (``haar_projection_twirl``) up to roundoff.
    """
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (ops.dim, ops.dim):
        raise ValueError(f"state shape {mat.shape} does not match space dim {ops.dim}")
    bases = _sector_bases(ops, hw)
    out, terms = _mixed_unitary_sum(mat, ops, [1.0] * ops.n_sectors, bases)
    return TwirlResult(
        state=out,
        total_trace=float(np.trace(out).real),
        terms=terms,
        sector_weights=_sector_weights(out, ops),
        diagnostics={"channel": "compact-finite"},
    )


def haar_projection_twirl(rho, ops: SchurOperatorSet) -> TwirlResult:
    """Exact Haar average over the collective action, in closed form.

    T(rho) = sum_k (1/D_G^k) sum_{l1 l2} Tr(rho Lam_k^{l1 l2 dag}) Lam_k^{l1 l2};
    an idempotent projection onto the commutant.  Serves as the analytic
    oracle for the finite compact channel.
    """
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (ops.dim, ops.dim):
        raise ValueError(f"state shape {mat.shape} does not match space dim {ops.dim}")
    out = np.zeros_like(mat)
    for k, sector in enumerate(ops.basis.sectors, start=1):
        vecs = sector.vectors  # (d_g, d_c, dim)
        coeff = np.einsum("max,xy,mby->ab", vecs.conj(), mat, vecs)
        out += np.einsum("ab,max,mby->xy", coeff, vecs, vecs.conj()) / sector.d_g
    return TwirlResult(
        state=out,
        total_trace=float(np.trace(out).real),
        terms=sum(d_g**2 for d_g, _ in ops.sector_dims()),
        sector_weights=_sector_weights(out, ops),
        diagnostics={"channel": "haar-projection"},
    )


def _chunk_size(dim: int, samples: int) -> int:
    # cache-friendly intermediates, and >= 32 blocks for the standard-error
    # estimate when the sample count allows; fixed per config so sums (and
    # therefore reruns) are bit-stable
    cap = max(32, 1_048_576 // (dim * dim))
    return min(cap, max(32, -(-samples // 32)))


def _mc_conjugation(rho: np.ndarray, mats: np.ndarray, t: int):
    """Mean of M_i^(x)t rho (M_i^(x)t)^dag with a per-entry standard error.

    Works chunkwise: each chunk's contribution collapses into one GEMM, and
    the standard error of the mean is estimated from the scatter of the
    full-size chunk means (a trailing ragged chunk feeds the mean only).
    """
    n = mats.shape[0]
    dim = rho.shape[0]
    acc = np.zeros((dim, dim), dtype=complex)
    chunk = _chunk_size(dim, n)
    block_sums = []
    for start in range(0, n, chunk):
        sub = mats[start : start + chunk]
        big = tensor_power_batch(sub, t)
        m = sub.shape[0]
        left = (big.reshape(m * dim, dim) @ rho).reshape(m, dim, dim)
        x = np.ascontiguousarray(left.transpose(1, 0, 2)).reshape(dim, m * dim)
        y = np.ascontiguousarray(big.transpose(1, 0, 2)).reshape(dim, m * dim)
        part = x @ y.conj().T
        acc += part
        if m == chunk:
            block_sums.append(part)
    mean = acc / n
    if len(block_sums) >= 2:
        blocks = np.array(block_sums) / chunk
        dev = blocks - blocks.mean(axis=0)
        var_of_mean = (dev.real**2 + dev.imag**2).sum(axis=0) / (
            len(blocks) * (len(blocks) - 1)
        )
        std_err = np.sqrt(var_of_mean)
    else:
        std_err = np.full((dim, dim), np.nan)
    return mean, std_err


def mc_haar_twirl(
    rho, t: int, samples: int, seed: int, ops: SchurOperatorSet | None = None
) -> TwirlResult:
    """Monte-Carlo Haar average (1/N) sum_i U_i^(x)t rho U_i^(x)t^dag, U_i Haar on U(2).

    Deterministic for a fixed seed; the per-entry standard error of the mean
    is reported in ``diagnostics["entry_std_error"]``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mat = np.asarray(rho, dtype=complex)
    rng = philox_rng(seed)
    unitaries = haar_unitaries(2, samples, rng)
    mean, std_err = _mc_conjugation(mat, unitaries, t)
    return TwirlResult(
        state=mean,
        total_trace=float(np.trace(mean).real),
        terms=samples,
        sector_weights=_sector_weights(mean, ops),
        diagnostics={
            "channel": "mc-haar",
            "seed": seed,
            "entry_std_error": std_err,
            "max_std_error": float(std_err.max()),
        },
    )


# ---------------------------------------------------------------------------
# Non-compact averaging: Abelian families, sector probabilities, channels


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre spec for the Abelian integral: [1, x_max] with ``nodes`` points."""

    x_max: float = 40.0
    nodes: int = 64

    def __post_init__(self):
        if self.nodes < 32:
            raise ValueError("need at least 32 quadrature nodes")
        if self.x_max <= 1.0:
            raise ValueError("x_max must exceed 1")


@dataclass(frozen=True)
class AbelianFamily:
    """Normalized non-compact Cartan factor A_n(x) with its sampling measure.

    ``abelian_factor(x)`` must return a d x d matrix of operator norm 1 with
    A_n(1) = I; ``weight`` is the normalized density on [1, inf); ``inv_cdf``
    maps uniforms in (0, 1] to x so Monte-Carlo draws follow ``weight``.
    """

    name: str
    dim: int
    abelian_factor: Callable[[float], np.ndarray]
    weight: Callable[[np.ndarray], np.ndarray]
    inv_cdf: Callable[[np.ndarray], np.ndarray]


def sl2_diagonal_family() -> AbelianFamily:
    """diag(1, x^-2) filtering factor under the normalized measure e^(1-x) dx on [1, inf)."""
    return AbelianFamily(
        name="sl2-diagonal",
        dim=2,
        abelian_factor=lambda x: np.diag([1.0, float(x) ** -2]).astype(complex),
        weight=lambda x: np.exp(1.0 - np.asarray(x, dtype=float)),
        inv_cdf=lambda u: 1.0 - np.log(np.asarray(u, dtype=float)),
    )


def identity_family() -> AbelianFamily:
    """Trivial Abelian factor: the compact limit, every sector probability 1."""
    return AbelianFamily(
        name="identity",
        dim=2,
        abelian_factor=lambda x: np.eye(2, dtype=complex),
        weight=lambda x: np.exp(1.0 - np.asarray(x, dtype=float)),
        inv_cdf=lambda u: np.ones_like(np.asarray(u, dtype=float)),
    )


@dataclass(frozen=True)
class BetaWeights:
    """Per-sector Abelian integrals Tr(Mbar Pi_k) and their D^k-normalized form.

    ``raw[k-1]`` is the trace of Mbar = integral of (A_n A_n^dag)^(x)t against
    the sector projector; ``normalized[k-1] = raw[k-1] / (D_G^k D_C^k)``.
    """

    raw: tuple[float, ...]
    normalized: tuple[float, ...]
    sector_dims: tuple[int, ...]
    refinement_delta: float
    nodes: int
    x_max: float

    def probabilities(self, convention: str) -> tuple[float, ...]:
        """Sector probabilities p_k under a convention: raw/D^k or normalized/D^k."""
        if convention == "raw":
            return tuple(r / d for r, d in zip(self.raw, self.sector_dims))
        if convention == "normalized":
            return tuple(n / d for n, d in zip(self.normalized, self.sector_dims))
        raise ConventionError(f"unknown convention {convention!r}")

    def to_json_dict(self) -> dict:
        return {
            "raw": list(self.raw),
            "normalized": list(self.normalized),
            "sector_dims": list(self.sector_dims),
            "refinement_delta": self.refinement_delta,
            "nodes": self.nodes,
            "x_max": self.x_max,
        }


def _abelian_moment(ops: SchurOperatorSet, family: AbelianFamily, nodes: int, x_max: float):
    """raw_k at one quadrature resolution."""
    t = ops.basis.t
    points, gl_weights = np.polynomial.legendre.leggauss(nodes)
    xs = 0.5 * (x_max - 1.0) * points + 0.5 * (x_max + 1.0)
    ws = 0.5 * (x_max - 1.0) * gl_weights * family.weight(xs)
    dim = ops.dim
    moment = np.zeros((dim, dim), dtype=complex)
    for x, w in zip(xs, ws):
        a = family.abelian_factor(x)
        moment += w * tensor_power(a @ a.conj().T, t)
    return np.array(
        [
            np.einsum("ij,ji->", moment, ops.sector_projector(k)).real
            for k in range(1, ops.n_sectors + 1)
        ]
    )


def beta_weights(
    ops: SchurOperatorSet,
    family: AbelianFamily,
    quad: QuadratureSpec = QuadratureSpec(),
) -> BetaWeights:
    """Sector weights of the Abelian average, with a doubled-node refinement check.

    The integrand entries decay like x^(-4w) e^(-x) for the diagonal family,
    so Gauss-Legendre on [1, x_max] converges fast; the doubled-resolution
    delta must come in below 1e-6 or a :class:`QuadratureError` is raised.
    """
    coarse = _abelian_moment(ops, family, quad.nodes, quad.x_max)
    fine = _abelian_moment(ops, family, 2 * quad.nodes, quad.x_max)
    delta = float(np.abs(fine - coarse).max())
    if delta > 1e-6:
        raise QuadratureError(
            f"refinement delta {delta:.3e} exceeds 1e-6 at {quad.nodes}->{2 * quad.nodes} nodes"
        )
    dims = tuple(d_g * d_c for d_g, d_c in ops.sector_dims())
    return BetaWeights(
        raw=tuple(float(v) for v in fine),
        normalized=tuple(float(v) / d for v, d in zip(fine, dims)),
        sector_dims=dims,
        refinement_delta=delta,
        nodes=quad.nodes,
        x_max=quad.x_max,
    )


def noncompact_finite_twirl(
    rho,
    ops: SchurOperatorSet,
    beta: BetaWeights,
    convention: str | None = None,
    hw: Mapping[int, UnitaryOperatorBasis] | None = None,
    policy: TolerancePolicy = DEFAULT_POLICY,
) -> TwirlResult:
    """Finite averaging over the collective SL(2,C)-type action.

    Each sector's mixed unitary channel is rescaled by p_k derived from
    ``beta`` under the chosen convention; the output trace drops to
    sum_k p_k Tr(Pi_k rho).  If ``convention`` is omitted it is only accepted
    when both candidates coincide; otherwise use :func:`select_convention`.
    """
    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (ops.dim, ops.dim):
        raise ValueError(f"state shape {mat.shape} does not match space dim {ops.dim}")
    p_raw = beta.probabilities("raw")
    p_norm = beta.probabilities("normalized")
    if convention is None:
        if max(abs(a - b) for a, b in zip(p_raw, p_norm)) > policy.eq_tol:
            raise ConventionError(
                "raw and normalized conventions disagree; pass one explicitly "
                "or run select_convention against the Monte-Carlo oracle"
            )
        convention = "raw"
    probs = beta.probabilities(convention)
    bases = _sector_bases(ops, hw)
    out, terms = _mixed_unitary_sum(mat, ops, probs, bases)
    trace = float(np.trace(out).real)
    return TwirlResult(
        state=out,
        total_trace=trace,
        terms=terms,
        sector_weights=_sector_weights(out, ops),
        convention=convention,
        diagnostics={
            "channel": "noncompact-finite",
            "probabilities": tuple(probs),
            "trace_deficit": 1.0 - trace,
        },
    )


def mc_cartan_twirl(
    rho,
    t: int,
    family: AbelianFamily,
    samples: int,
    seed: int,
    ops: SchurOperatorSet | None = None,
) -> TwirlResult:
    """Monte-Carlo average of (S A_n(x) S')^(x)t rho (...)^dag.

    S, S' are Haar on SU(2) and x is drawn from the family measure by inverse
    CDF; the sampling order (S block, S' block, uniforms) is fixed, so a seed
    pins the result bit-for-bit.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    mat = np.asarray(rho, dtype=complex)
    rng = philox_rng(seed)
    left = special_unitaries(samples, rng)
    right = special_unitaries(samples, rng)
    u = 1.0 - rng.random(samples)  # uniform on (0, 1]
    xs = family.inv_cdf(u)
    abelian = np.stack([family.abelian_factor(x) for x in xs])
    mats = left @ abelian @ right
    mean, std_err = _mc_conjugation(mat, mats, t)
    return TwirlResult(
        state=mean,
        total_trace=float(np.trace(mean).real),
        terms=samples,
        sector_weights=_sector_weights(mean, ops),
        diagnostics={
            "channel": "mc-cartan",
            "family": family.name,
            "seed": seed,
            "entry_std_error": std_err,
            "max_std_error": float(std_err.max()),
        },
    )


def select_convention(
    rho,
    ops: SchurOperatorSet,
    beta: BetaWeights,
    family: AbelianFamily,
    samples: int,
    seed: int,
    hw: Mapping[int, UnitaryOperatorBasis] | None = None,
) -> tuple[str, dict]:
    """Let the Monte-Carlo Cartan oracle pick the sector-probability convention.

    Runs both finite-channel candidates against ``mc_cartan_twirl`` on the
    same state and returns the closer convention together with both
    deviations; callers persist the choice in the result diagnostics.
    """
    oracle = mc_cartan_twirl(rho, ops.basis.t, family, samples, seed)
    deltas = {}
    for convention in ("raw", "normalized"):
        candidate = noncompact_finite_twirl(rho, ops, beta, convention, hw)
        deltas[convention] = float(np.abs(candidate.state - oracle.state).max())
    chosen = min(deltas, key=deltas.get)
    return chosen, {
        "delta_raw": deltas["raw"],
        "delta_normalized": deltas["normalized"],
        "mc_samples": samples,
        "mc_seed": seed,
        "mc_max_std_error": oracle.diagnostics["max_std_error"],
    }


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank mixed state: normalized G G^dag with G complex Ginibre."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mat = g @ g.conj().T
    return mat / np.trace(mat).real
