# report.py
# JSON reports (stdout or --out) and rich summary tables (stderr).

import json
from typing import Dict, Optional

import click
from rich.console import Console
from rich.table import Table

from . import audit

console = Console(stderr=True)


def emit_report(report: Dict, out: Optional[str] = None):
    """Writes the report to out, or echoes it to stdout."""
    text = json.dumps(report, indent=2)
    if out:
        try:
            with open(out, "w") as f:
                f.write(text + "\n")
        except IOError as e:
            audit.handle_critical_failure(f"Failed to write report file: {e}")
        audit.log_info(f"Report saved to {out}")
        click.echo(f"Report saved to: {out}")
    else:
        click.echo(text)


def recurrence_table(rows) -> Table:
    table = Table(title="Three-term recurrence")
    for column in ("n", "beta_n", "gamma_n", "h_n"):
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(str(row["n"]), row["beta"], row["gamma"], row["norm"])
    return table


def band_table(rows, limit: int = 12) -> Table:
    table = Table(title="Structure relation coefficients")
    table.add_column("n", justify="right")
    table.add_column("j_min", justify="right")
    table.add_column("c_{n,j_min..n+N}")
    for row in rows[:limit]:
        table.add_row(str(row["n"]), str(row["j_min"]), ", ".join(row["coefficients"]))
    return table


def certificate_table(certificates) -> Table:
    table = Table(title="Semiclassical certificates  D(Phi w) = Psi w")
    for column in ("w", "Phi", "Psi", "class <=", "degree", "holds"):
        table.add_column(column)
    for cert in certificates:
        table.add_row(
            cert["functional"],
            format_poly(cert["Phi"]),
            format_poly(cert["Psi"]),
            str(cert["class_bound"]),
            str(cert["verified_degree"]),
            "yes" if cert["holds"] else "NO",
        )
    return table


def checks_table(checks) -> Table:
    table = Table(title="Checks")
    table.add_column("check")
    table.add_column("result")
    for check in checks:
        mark = "[green]pass[/green]" if check["passed"] else "[red]FAIL[/red]"
        table.add_row(check["name"], mark)
    return table


def format_poly(coefficients) -> str:
    """Ascending coefficient strings as a readable polynomial."""
    terms = []
    for j, c in enumerate(coefficients):
        if c in ("0", "0.0"):
            continue
        if j == 0:
            terms.append(c)
        elif j == 1:
            terms.append(f"{c}*x")
        else:
            terms.append(f"{c}*x^{j}")
    return " + ".join(terms) if terms else "0"


def show(table: Table):
    console.print(table)
