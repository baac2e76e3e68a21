"""Command-line front end: basis construction, twirling, sector weights, tables, verification.

Every command is reproducible from its flags: all randomness flows from the
--seed value, JSON output is written with sorted keys, and rerunning with the
same configuration produces byte-identical files.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import channels, sizes
from .channels import (
    ConventionError,
    InvalidDensityMatrixError,
    QuadratureError,
    QuadratureSpec,
)
from .numerics import TolerancePolicy
from .opbasis import SchurOperatorSet
from .schur import SchurBasis, UnsupportedDimensionError, build_schur_basis
from .verify import VerifyConfig, run_suite

EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4

PRESET_NAMES = ("ghz4", "zero4", "mixed", "singlet-pair")


def _policy() -> TolerancePolicy:
    """Default tolerances, overridable through SCHURTWIRL_EQ_TOL / SCHURTWIRL_RANK_TOL."""
    try:
        return TolerancePolicy(
            eq_tol=float(os.environ.get("SCHURTWIRL_EQ_TOL", 1e-10)),
            rank_tol=float(os.environ.get("SCHURTWIRL_RANK_TOL", 1e-9)),
        )
    except ValueError as exc:
        raise click.UsageError(f"bad tolerance override: {exc}")


def _dump_json(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _preset_state(name: str, t: int) -> np.ndarray:
    if name == "mixed":
        dim = 2**t
        return np.eye(dim, dtype=complex) / dim
    if t != 4:
        raise click.UsageError(f"preset {name!r} is a 4-qubit state; it needs --t 4")
    if name == "ghz4":
        vec = np.zeros(16, dtype=complex)
        vec[0] = vec[15] = 1 / np.sqrt(2.0)
    elif name == "zero4":
        vec = np.zeros(16, dtype=complex)
        vec[0] = 1.0
    elif name == "singlet-pair":
        pair = np.zeros(4, dtype=complex)
        pair[1], pair[2] = 1 / np.sqrt(2.0), -1 / np.sqrt(2.0)
        vec = np.kron(pair, pair)
    else:
        raise click.UsageError(f"unknown preset {name!r}")
    return np.outer(vec, vec.conj())


def _load_state(spec: str, t: int) -> np.ndarray:
    """A preset name or a JSON file {dim, entries: [[re, im], ...]} row-major."""
    if spec in PRESET_NAMES:
        return _preset_state(spec, t)
    path = Path(spec)
    if not path.exists():
        raise click.UsageError(f"state {spec!r} is neither a preset {PRESET_NAMES} nor a file")
    try:
        doc = json.loads(path.read_text())
        dim = int(doc["dim"])
        entries = np.array([re + 1j * im for re, im in doc["entries"]])
        mat = entries.reshape(dim, dim)
    except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"could not parse state file {spec!r}: {exc}")
    return mat


def _fail_numeric(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_NUMERICAL)


@click.group()
def main():
    """Finite averaging of multi-qubit states via Schur operator bases."""


@main.command("schur")
@click.option("--d", "d", type=int, default=2, show_default=True, help="Local dimension.")
@click.option("--t", "t", type=int, default=4, show_default=True, help="Tensor power.")
@click.option("--output", "-o", type=click.Path(), default=None, help="Basis JSON path.")
def cmd_schur(d, t, output):
    """Build the Schur basis and print its sector dimension table."""
    try:
        basis = build_schur_basis(t, d, policy=_policy())
    except UnsupportedDimensionError as exc:
        raise click.UsageError(str(exc))
    click.echo("k  D_G  D_C  diagram")
    for sector in basis.sectors:
        click.echo(
            f"{sector.k}  {sector.d_g:3d}  {sector.d_c:3d}  {list(sector.diagram.row_lengths)}"
        )
    if output:
        _dump_json(basis.to_json_dict(), output)
        click.echo(f"wrote {output}")


_ORACLE_FOR = {
    "compact": "haar",
    "noncompact": "mc-cartan",
    "haar": "compact",
    "mc-haar": "haar",
    "mc-cartan": "noncompact",
}


@main.command("twirl")
@click.option("--t", "t", type=int, default=4, show_default=True)
@click.option(
    "--channel",
    type=click.Choice(["compact", "noncompact", "haar", "mc-haar", "mc-cartan"]),
    default="compact",
    show_default=True,
)
@click.option("--state", default="mixed", show_default=True, help="Preset name or JSON file.")
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--x-max", type=float, default=40.0, show_default=True)
@click.option("--nodes", type=int, default=64, show_default=True)
@click.option(
    "--convention",
    type=click.Choice(["auto", "raw", "normalized"]),
    default="auto",
    show_default=True,
    help="Sector-probability convention for the non-compact channel.",
)
@click.option("--verify", "cross_verify", is_flag=True, help="Cross-run the matching oracle.")
@click.option("--output", "-o", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None, help="Render a report figure PNG.")
def cmd_twirl(t, channel, state, seed, samples, x_max, nodes, convention, cross_verify, output, plot):
    """Average a state over the collective action with the selected channel."""
    policy = _policy()
    try:
        basis = build_schur_basis(t, policy=policy)
    except UnsupportedDimensionError as exc:
        raise click.UsageError(str(exc))
    ops = SchurOperatorSet(basis)
    raw_state = _load_state(state, t)
    try:
        rho = channels.check_density_matrix(raw_state, dim=2**t)
    except InvalidDensityMatrixError as exc:
        _fail_numeric(f"invalid density matrix: {exc}")
    family = channels.sl2_diagonal_family()
    quad = QuadratureSpec(x_max=x_max, nodes=nodes)

    def _noncompact():
        beta = channels.beta_weights(ops, family, quad)
        if convention == "auto":
            chosen, diag = channels.select_convention(rho, ops, beta, family, samples, seed)
        else:
            chosen, diag = convention, {}
        result = channels.noncompact_finite_twirl(rho, ops, beta, chosen)
        result.diagnostics.update(diag)
        return result

    try:
        if channel == "compact":
            result = channels.compact_finite_twirl(rho, ops)
        elif channel == "haar":
            result = channels.haar_projection_twirl(rho, ops)
        elif channel == "mc-haar":
            result = channels.mc_haar_twirl(rho, t, samples, seed, ops=ops)
        elif channel == "mc-cartan":
            result = channels.mc_cartan_twirl(rho, t, family, samples, seed, ops=ops)
        else:
            result = _noncompact()
        if cross_verify:
            oracle_name = _ORACLE_FOR[channel]
            if oracle_name == "compact":
                oracle = channels.compact_finite_twirl(rho, ops)
            elif oracle_name == "haar":
                oracle = channels.haar_projection_twirl(rho, ops)
            elif oracle_name == "mc-cartan":
                oracle = channels.mc_cartan_twirl(rho, t, family, samples, seed + 1, ops=ops)
            else:
                oracle = _noncompact()
            delta = float(np.abs(result.state - oracle.state).max())
            result.diagnostics["oracle_delta"] = delta
            result.diagnostics["oracle"] = oracle_name
            click.echo(f"oracle {oracle_name}: max entry delta {delta:.3e}")
    except (QuadratureError, ConventionError) as exc:
        _fail_numeric(str(exc))
    doc = result.to_json_dict()
    click.echo(
        f"channel {channel}: total trace {result.total_trace:.10f}, "
        f"sector weights {tuple(round(w, 10) for w in result.sector_weights)}"
    )
    if output:
        _dump_json(doc, output)
    if plot:
        from .report import save_twirl_figure

        save_twirl_figure(result, plot)
        click.echo(f"wrote figure {plot}")


@main.command("beta")
@click.option("--t", "t", type=int, default=4, show_default=True)
@click.option("--x-max", type=float, default=40.0, show_default=True)
@click.option("--nodes", type=int, default=64, show_default=True)
@click.option("--identity-family", is_flag=True, help="Use the trivial Abelian factor.")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--output", "-o", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None)
def cmd_beta(t, x_max, nodes, identity_family, samples, seed, output, plot):
    """Sector weights of the Abelian integral, plus the oracle-selected convention."""
    policy = _policy()
    try:
        basis = build_schur_basis(t, policy=policy)
    except UnsupportedDimensionError as exc:
        raise click.UsageError(str(exc))
    ops = SchurOperatorSet(basis)
    family = channels.identity_family() if identity_family else channels.sl2_diagonal_family()
    try:
        beta = channels.beta_weights(ops, family, QuadratureSpec(x_max=x_max, nodes=nodes))
        probe = np.eye(2**t, dtype=complex) / 2**t
        convention, diag = channels.select_convention(probe, ops, beta, family, samples, seed)
    except (QuadratureError, ConventionError) as exc:
        _fail_numeric(str(exc))
    doc = beta.to_json_dict()
    doc["convention"] = convention
    doc["selection"] = diag
    click.echo(f"raw:        {tuple(round(v, 6) for v in beta.raw)}")
    click.echo(f"normalized: {tuple(round(v, 6) for v in beta.normalized)}")
    click.echo(f"selected convention: {convention}")
    if output:
        _dump_json(doc, output)
    if plot:
        from .report import save_beta_figure

        save_beta_figure(beta, plot)
        click.echo(f"wrote figure {plot}")


@main.command("sizes")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
)
@click.option("--output", "-o", type=click.Path(), default=None)
@click.option("--plot", type=click.Path(), default=None)
def cmd_sizes(fmt, output, plot):
    """Reproduce the averaging-set size comparison table."""
    rows = sizes.emit_table()
    if fmt == "csv":
        text = sizes.table_to_csv(rows)
    else:
        text = sizes.table_to_json(rows)
    if output:
        Path(output).write_text(text)
        click.echo(f"wrote {output} ({len(rows)} rows)")
    else:
        click.echo(text, nl=False)
    if plot:
        from .report import save_sizes_figure

        save_sizes_figure(rows, plot)
        click.echo(f"wrote figure {plot}")


@main.command("verify")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--t-max", type=int, default=4, show_default=True)
@click.option(
    "--basis-file",
    type=click.Path(exists=True),
    default=None,
    help="Run the structural checks against a serialized basis instead.",
)
def cmd_verify(samples, seed, t_max, basis_file):
    """Run the invariant suite; exit 0 only if every check passes."""
    basis = SchurBasis.load(basis_file) if basis_file else None
    cfg = VerifyConfig(samples=samples, seed=seed, t_max=t_max, policy=_policy(), basis=basis)
    if not run_suite(cfg, echo=click.echo):
        sys.exit(EXIT_VERIFICATION)


if __name__ == "__main__":
    main()
