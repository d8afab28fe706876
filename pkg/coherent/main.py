"""
Main CLI entrypoint for the coherent tool.

Author: The Coherent Pairs Team
"""

import os
import sys
from functools import wraps

import click

from . import audit
from . import config as config_logic
from . import report as report_logic
from .coherence_logic import build_pair, discover_index, pair_depths
from .errors import CoherentError, ConfigError
from .griffin_logic import GriffinInput, end_to_end_verify
from .ops_logic import ops_from_functional
from .polynomial import Polynomial
from .semiclassical import ROUTES, check_degree_laws, derive, rows_needed, verify_lemma_identities
from .spec_files import build_functional, load_spec

# Extra moments carried beyond what the OPS need, so identity checks certify a useful range.
DEFAULT_D_CHECK = 30


def run_guarded(func):
    """Turns library exceptions into logged failures with the matching exit status."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CoherentError as e:
            audit.handle_critical_failure(f"{type(e).__name__}: {e}", e.exit_code)
    return wrapper


def backend_options(func):
    func = click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON report here instead of stdout.")(func)
    func = click.option("--nmax", type=int, default=None, help="Depth of the computation (default from config, 10).")(func)
    func = click.option("--tolerance", default=None, help="Comparison tolerance for the float backend.")(func)
    func = click.option("--precision-bits", type=int, default=None, help="Working precision of the float backend.")(func)
    func = click.option("--backend", type=click.Choice(config_logic.BACKENDS), default=None, help="Scalar backend.")(func)
    return func


def structure_options(func):
    func = click.option("--k", "order_k", type=int, required=True, help="Derivative order on Q.")(func)
    func = click.option("--m", "order_m", type=int, required=True, help="Derivative order on P.")(func)
    func = click.option("--N", "degree_n", type=int, default=None, help="Degree of pi (checked against --pi).")(func)
    func = click.option("--M", "index_m", type=int, required=True, help="Index of the structure relation.")(func)
    func = click.option("--pi", "pi_text", default="1", show_default=True, help="Coefficients of pi, ascending: \"c0,c1,...,1\".")(func)
    func = click.option("--v", "v_path", required=True, type=click.Path(), help="Spec file of the functional v.")(func)
    func = click.option("--u", "u_path", required=True, type=click.Path(), help="Spec file of the functional u.")(func)
    return func


def parse_pi(text: str, field, degree_n=None) -> Polynomial:
    """Parses "c0,c1,...,cN"; a non-monic pi is normalized with a warning."""
    try:
        pi = Polynomial([field.coerce(part.strip()) for part in text.split(",") if part.strip()], field)
    except CoherentError as e:
        raise ConfigError(f"cannot parse --pi {text!r}: {e}") from e
    if pi.is_zero():
        raise ConfigError("--pi must be a nonzero polynomial")
    if not field.equal(pi.leading, field.one):
        audit.log_warning(f"pi is not monic (leading coefficient {field.to_text(pi.leading)}); normalizing")
        pi = pi.scale(field.one / pi.leading)
        pi = Polynomial(pi.coeffs[:-1] + (field.one,), field)
    if degree_n is not None and degree_n != pi.degree:
        raise ConfigError(f"--N {degree_n} disagrees with deg pi = {pi.degree}")
    return pi


def load_pair(u_path, v_path, pi, index_m, order_m, order_k, band_rows, extra):
    field = pi.field
    p_depth, q_depth = pair_depths(pi.degree, order_m, order_k, band_rows)
    degree = 2 * max(p_depth, q_depth) + 1 + extra
    u = build_functional(load_spec(u_path), degree, field)
    v = build_functional(load_spec(v_path), degree, field)
    return build_pair(u, v, pi, index_m, order_m, order_k, band_rows)


# ==============================================================================
# Command group
# ==============================================================================

@click.group()
def cli():
    """Coherent: coherent pairs of orthogonal polynomials and their semiclassical functionals."""
    home = config_logic.coherent_home()
    os.makedirs(home, exist_ok=True)
    audit.initialize_logging(os.path.join(home, "audit.log"))


@cli.command()
@click.option("--u", "u_path", required=True, type=click.Path(), help="Spec file of the functional.")
@backend_options
@run_guarded
def recurrence(u_path, backend, precision_bits, tolerance, nmax, out):
    """Recurrence coefficients of the monic OPS of a functional.

    Examples:

        coherent recurrence --u hermite.yaml --nmax 5
    """
    run = config_logic.resolve_run_config("recurrence", backend, precision_bits, tolerance, nmax, out)
    field = run.field()
    u = build_functional(load_spec(u_path), 2 * run.nmax + 1, field)
    ops = ops_from_functional(u, run.nmax)
    table = ops.table()
    report = {
        "command": "recurrence",
        "backend": field.describe(),
        "n_max": run.nmax,
        "beta": [row["beta"] for row in table],
        "gamma": [row["gamma"] for row in table[1:]],
        "norms": [row["norm"] for row in table],
        "positive_definite": ops.positive_definite,
    }
    report_logic.show(report_logic.recurrence_table(table))
    report_logic.emit_report(report, run.out)


@cli.command(name="coherence-check")
@structure_options
@backend_options
@run_guarded
def coherence_check(u_path, v_path, pi_text, index_m, degree_n, order_m, order_k,
                    backend, precision_bits, tolerance, nmax, out):
    """Check pi P_n^[m] = sum_{j=n-M}^{n+N} c_{n,j} Q_j^[k] for n <= nmax.

    Examples:

        coherent coherence-check --u hermite.yaml --v hermite.yaml --pi 0,1 --M 1 --m 1 --k 0
    """
    run = config_logic.resolve_run_config("coherence-check", backend, precision_bits, tolerance, nmax, out)
    pi = parse_pi(pi_text, run.field(), degree_n)
    pair = load_pair(u_path, v_path, pi, index_m, order_m, order_k, run.nmax, 0)
    verdict = pair.verdict
    report = {
        "command": "coherence-check",
        "backend": pair.field.describe(),
        "parameters": pair.parameters(),
        "verdict": verdict.to_dict(),
        "discovered": discover_index(pair.band),
        "band": pair.band.to_rows(),
    }
    report_logic.show(report_logic.band_table(report["band"]))
    report_logic.emit_report(report, run.out)
    if verdict.holds:
        click.echo(click.style("Structure relation holds.", fg="green"), err=True)
    else:
        audit.handle_critical_failure(
            f"structure relation violated at (n={verdict.n}, j={verdict.j}): {verdict.reason}", 3
        )


@cli.command()
@structure_options
@click.option("--theorem", type=click.Choice(ROUTES), default="auto", show_default=True,
              help="Force a derivation route.")
@click.option("--n-check", type=int, default=None, help="Rows of the lemma identities to verify (default nmax).")
@click.option("--d-check", type=int, default=None, help="Highest moment compared in each identity.")
@backend_options
@run_guarded
def semiclassical(u_path, v_path, pi_text, index_m, degree_n, order_m, order_k, theorem, n_check,
                  d_check, backend, precision_bits, tolerance, nmax, out):
    """Derive semiclassical certificates D(Phi w) = Psi w for a coherent pair.

    Examples:

        coherent semiclassical --u hermite.yaml --v hermite.yaml --M 0 --m 1 --k 0

        coherent semiclassical --u hermite.yaml --v hermite.yaml --pi 0,1 --M 1 --m 1 --k 0
    """
    run = config_logic.resolve_run_config("semiclassical", backend, precision_bits, tolerance, nmax, out)
    field = run.field()
    pi = parse_pi(pi_text, field, degree_n)
    n_check = run.nmax if n_check is None else n_check
    band_rows = max(run.nmax, rows_needed(index_m, pi.degree, order_m, order_k, n_check))
    extra = (DEFAULT_D_CHECK if d_check is None else d_check) + 4 * (order_m + order_k + index_m + pi.degree + 2)
    pair = load_pair(u_path, v_path, pi, index_m, order_m, order_k, band_rows, extra)
    if not pair.verdict.holds:
        audit.handle_critical_failure(
            f"not a coherent pair: violation at (n={pair.verdict.n}, j={pair.verdict.j}): {pair.verdict.reason}", 3
        )

    degree_violations = check_degree_laws(pair, n_check)
    lemma = verify_lemma_identities(pair, n_check, d_check)
    result = derive(pair, theorem, d_check)
    report = {
        "command": "semiclassical",
        "backend": field.describe(),
        "degree_law_violations": degree_violations,
        "lemma": [check.to_dict() for check in lemma],
        **result.to_dict(),
    }
    if result.certificates:
        report_logic.show(report_logic.certificate_table(report["certificates"]))
    report_logic.emit_report(report, run.out)

    if result.hypothesis_failed:
        audit.handle_critical_failure(result.message, 5)
    if not result.verified or not all(check.holds for check in lemma):
        audit.handle_critical_failure("an identity left a nonzero residual", 7)
    click.echo(click.style("All identities verified.", fg="green"), err=True)


@cli.command()
@click.option("--r0", required=True, help="r_0 of the structure relation.")
@click.option("--r1", required=True, help="r_1 of the structure relation.")
@click.option("--s1", required=True, help="s_1 of the structure relation (positive).")
@click.option("--s2", required=True, help="s_2 of the structure relation (nonzero).")
@backend_options
@run_guarded
def griffin(r0, r1, s1, s2, backend, precision_bits, tolerance, nmax, out):
    """Reconstruct the weight of an OPS with x P'_{n+1}/(n+1) = P_{n+1} + r_n P_n + s_n P_{n-1}.

    Examples:

        coherent griffin --r0 0 --r1 0 --s1 1/2 --s2 1
    """
    run = config_logic.resolve_run_config("griffin", backend, precision_bits, tolerance, nmax, out)
    numeric = run.field()
    inp = GriffinInput.parse(r0, r1, s1, s2)
    result = end_to_end_verify(inp, run.nmax, numeric)
    report = {"command": "griffin", **result.to_dict()}
    report_logic.show(report_logic.checks_table(result.checks))
    report_logic.emit_report(report, run.out)
    if not result.passed:
        audit.handle_critical_failure(f"checks failed: {', '.join(result.failures())}", 7)
    click.echo(click.style("Weight reconstructed; all checks pass.", fg="green"), err=True)


@cli.command()
@click.option("--u", "u_path", required=True, type=click.Path(), help="Spec file of the functional.")
@backend_options
@run_guarded
def moments(u_path, backend, precision_bits, tolerance, nmax, out):
    """Dump the moments u_0..u_nmax of a functional spec."""
    run = config_logic.resolve_run_config("moments", backend, precision_bits, tolerance, nmax, out)
    field = run.field()
    u = build_functional(load_spec(u_path), run.nmax, field)
    u = u.truncated(min(run.nmax, u.max_degree))
    report = {"command": "moments", "backend": field.describe(), "moments": u.to_strings()}
    report_logic.emit_report(report, run.out)


# ==============================================================================
# Stored defaults
# ==============================================================================

@cli.group(name="config")
def config_group():
    """Manage stored defaults."""
    pass


@config_group.command(name="setup")
@click.option("--backend", type=click.Choice(config_logic.BACKENDS), default=None)
@click.option("--precision-bits", type=int, default=None)
@click.option("--tolerance", default=None)
@click.option("--nmax", type=int, default=None)
def config_setup(backend, precision_bits, tolerance, nmax):
    """Store default settings.

    Examples:

        coherent config setup --backend float --precision-bits 256
    """
    success, message = config_logic.save_config(backend, precision_bits, tolerance, nmax)
    if success:
        click.echo(click.style(message, fg="green"))
    else:
        click.echo(click.style(message, fg="red"))
        sys.exit(1)


@config_group.command(name="status")
def config_status():
    """Show stored defaults."""
    status = config_logic.get_config_status()
    if not status["configured"]:
        click.echo("No defaults stored; using built-ins.")
        click.echo(status["message"])
    else:
        click.echo(click.style("Stored defaults", bold=True))
    click.echo(f"  Backend: {status['backend']}")
    click.echo(f"  Precision bits: {status['precision_bits']}")
    click.echo(f"  Tolerance: {status['tolerance']}")
    click.echo(f"  nmax: {status['nmax']}")
    if status["configured"]:
        click.echo(f"  Configured: {status['configured_at']}")


@config_group.command(name="delete")
@click.confirmation_option(prompt="Are you sure you want to delete the stored defaults?")
def config_delete():
    """Delete stored defaults."""
    success, message = config_logic.delete_config()
    if success:
        click.echo(click.style(message, fg="green"))
    else:
        click.echo(click.style(message, fg="red"))


if __name__ == "__main__":
    cli()
