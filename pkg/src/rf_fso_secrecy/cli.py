"""Command-line interface for RF-FSO secrecy analysis.

Exit codes: 0 success, 2 parse or validation error, 3 numerical failure,
4 route disagreement when --strict is set. CSV goes to stdout, diagnostics
to stderr.
"""

from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console
from rich.table import Table

from .data import PRESETS, preset_values
from .logging import setup_logger
from .models import McConfig, Method, Metric
from .paths import path_builder
from .pipeline import ResultExporter, SweepRunner, reproduce_figure
from .pipeline.sweep import figure_scenario_text
from .safety import NumericalError, ValidationError
from .settings import settings
from .storage import load_scenario
from .utils import format_duration

EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_DISAGREE = 4

app = typer.Typer(
    name="rf-fso-secrecy",
    help="Secrecy metrics of dual-hop RF-FSO links by closed form, quadrature and Monte-Carlo",
    add_completion=False
)
console = Console(stderr=True)

def _parse_choices(raw: str, enum, option: str) -> list:
    names = [part.strip().lower() for part in raw.split(",") if part.strip()]
    valid = [e.value for e in enum]
    unknown = [n for n in names if n not in valid]
    if unknown or not names:
        raise ValidationError(f"{option} accepts {', '.join(valid)}; got '{raw}'")
    return [enum(n) for n in dict.fromkeys(names)]

def _mc_config(seed: Optional[int], samples: Optional[int]) -> McConfig:
    cfg = settings.montecarlo
    return McConfig(
        n_samples=samples if samples is not None else cfg.n_samples,
        seed=seed if seed is not None else cfg.seed,
        n_streams=cfg.n_streams,
        n_batches=cfg.n_batches,
        confidence=cfg.confidence,
        fso_sampler=cfg.fso_sampler,
    )

@app.command()
def run(
    scenario: Path = typer.Argument(..., help="Path to a key=value scenario file"),
    metrics: str = typer.Option("asc,sop,pnsc", "--metrics", help="Comma-separated: asc, sop, pnsc"),
    methods: str = typer.Option(
        "quadrature,monte_carlo", "--methods",
        help="Comma-separated: closed_form, quadrature, monte_carlo",
    ),
    strict: bool = typer.Option(False, "--strict", help="Exit 4 when routes disagree"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Monte-Carlo master seed"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Monte-Carlo sample count"),
    bits: bool = typer.Option(False, "--bits", help="Report ASC in bits instead of nats"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Evaluate metrics over the scenario's sweep and print CSV rows."""
    setup_logger("rf_fso_secrecy", level="DEBUG" if verbose else "INFO")

    try:
        scenario_file = load_scenario(scenario)
        metric_list = _parse_choices(metrics, Metric, "--metrics")
        method_list = _parse_choices(methods, Method, "--methods")
        mc = None
        if Method.MONTE_CARLO in method_list:
            mc = _mc_config(
                seed if seed is not None else scenario_file.mc_seed,
                samples if samples is not None else scenario_file.mc_samples,
            )
        runner = SweepRunner(metrics=metric_list, methods=method_list, mc=mc, bits=bits)
    except (ValidationError, PydanticValidationError) as e:
        console.print(f"[bold red]✗ Validation error:[/bold red] {e}")
        raise typer.Exit(code=EXIT_PARSE)
    except OSError as e:
        console.print(f"[bold red]✗ Cannot read scenario:[/bold red] {e}")
        raise typer.Exit(code=EXIT_PARSE)

    try:
        rows = runner.run(scenario_file)
    except (NumericalError, ValidationError) as e:
        console.print(f"[bold red]✗ Numerical error:[/bold red] {e}")
        raise typer.Exit(code=EXIT_NUMERIC)

    ResultExporter.stream_csv(rows)

    failures = [row for row in rows if not row.agreement_flag]
    if failures:
        console.print(
            f"[bold yellow]⚠ {len(failures)} of {len(rows)} rows outside the summed error bounds[/bold yellow]"
        )
        if strict:
            raise typer.Exit(code=EXIT_DISAGREE)

@app.command()
def preset(
    name: str = typer.Argument(..., help="Preset name, e.g. rayleigh-gg"),
):
    """Print a scenario file for one of the classical special cases."""
    if name not in PRESETS:
        console.print(f"[bold red]✗ Unknown preset:[/bold red] '{name}'. Valid names: {', '.join(PRESETS)}")
        raise typer.Exit(code=EXIT_PARSE)

    row = PRESETS[name]
    header = [
        f"preset {name}",
        f"alpha_r = alpha_v = {row['alpha']:g}, mu_r = mu_v = {row['mu']:g}, "
        f"g_d = {row['g_d']:g}, omega_cap_d = {row['omega_cap_d']:g}, rho = {row['rho']:g}",
    ]
    text = figure_scenario_text(
        preset_values(name), "rf_main.omega_db", settings.figures.sweep_points, header=header
    )
    typer.echo(text, nl=False)

@app.command("reproduce-figure")
def reproduce_figure_command(
    fig_id: int = typer.Argument(..., help="Figure number, 2 to 13"),
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", "-o", help="Output directory"),
    methods: Optional[str] = typer.Option(None, "--methods", help="Comma-separated methods"),
    points: Optional[int] = typer.Option(None, "--points", help="Sweep points per curve"),
    samples: Optional[int] = typer.Option(None, "--samples", help="Monte-Carlo sample count"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Write one CSV per curve of a figure sweep."""
    settings.ensure_directories()
    logger = setup_logger(
        "rf_fso_secrecy",
        log_file=path_builder.get_log_path("figures"),
        level="DEBUG" if verbose else "INFO",
    )

    try:
        method_list = _parse_choices(methods, Method, "--methods") if methods else None
        mc = None
        if samples is not None:
            mc = McConfig(n_samples=samples, seed=settings.montecarlo.seed)
        console.print(f"[bold cyan]Reproducing figure {fig_id}[/bold cyan]")
        manifest = reproduce_figure(fig_id, out_dir, methods=method_list, points=points, mc=mc)
    except (ValidationError, PydanticValidationError) as e:
        console.print(f"[bold red]✗ Validation error:[/bold red] {e}")
        raise typer.Exit(code=EXIT_PARSE)
    except NumericalError as e:
        console.print(f"[bold red]✗ Numerical error:[/bold red] {e}")
        raise typer.Exit(code=EXIT_NUMERIC)

    logger.debug(f"manifest: {manifest['manifest']}")
    console.print(f"\n[bold green]✓ Figure {fig_id} complete![/bold green]")
    console.print(f"[cyan]Curves:[/cyan] {len(manifest['curves'])}")
    console.print(f"[cyan]Duration:[/cyan] {format_duration(manifest['seconds'])}")
    console.print(f"[cyan]Manifest:[/cyan] {manifest['manifest']}")
    for curve in manifest["curves"]:
        mark = "✓" if curve["agreement"] else "⚠"
        console.print(f"  {mark} {curve['label']}: {curve['csv']}")

@app.command()
def doctor(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Verbose output"),
):
    """Check the numeric stack and configuration."""
    console.print("[bold cyan]RF-FSO Secrecy Doctor - Environment Check[/bold cyan]\n")

    checks = []
    for package in ("numpy", "scipy", "pydantic", "typer", "rich", "tqdm"):
        try:
            checks.append((package, f"✓ {version(package)}", "green"))
        except PackageNotFoundError:
            checks.append((package, "✗ Not installed", "red"))

    for dir_name in ["results_dir", "logs_dir"]:
        dir_path = getattr(settings, dir_name)
        if dir_path.exists():
            checks.append((dir_name, f"✓ {dir_path}", "green"))
        else:
            checks.append((dir_name, f"⚠ {dir_path} (created on first run)", "yellow"))

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Component", style="cyan")
    table.add_column("Status", style="white")

    for name, status, color in checks:
        table.add_row(name, f"[{color}]{status}[/{color}]")

    console.print(table)

    if verbose:
        console.print(f"\n[bold]Configuration:[/bold]")
        console.print(f"  Precision: rel_tol={settings.precision.rel_tol:g}, "
                      f"max_contour_nodes={settings.precision.max_contour_nodes}")
        console.print(f"  Quadrature: rel_tol={settings.quadrature.rel_tol:g}, "
                      f"max_nodes={settings.quadrature.max_nodes}")
        console.print(f"  Monte-Carlo: n_samples={settings.montecarlo.n_samples}, "
                      f"seed={settings.montecarlo.seed}, batches={settings.montecarlo.n_batches}")
        console.print(f"  Log Level: {settings.log_level}")

    if all("✓" in status for _, status, _ in checks[:3]):
        console.print(f"\n[bold green]✓ All critical checks passed![/bold green]")
    else:
        console.print(f"\n[bold yellow]⚠ Numeric stack incomplete. Run: pip install -e .[/bold yellow]")

@app.callback()
def main():
    """RF-FSO Secrecy - ASC, SOP and PNSC of dual-hop RF-FSO links."""
    pass

if __name__ == "__main__":
    app()
