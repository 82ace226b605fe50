import argparse
import logging
import sys
from typing import Optional

from dotenv import load_dotenv
load_dotenv()

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from src.models.errors import AoiError, ConfigError, ConfigValidationError
from src.reporting.loader import PRESETS, apply_overrides, load_config, load_preset
from src.reporting.pipeline import run_experiment, run_oracle
from src.reporting.report import ExperimentReport, OracleReport
from src.settings import RuntimeSettings

console = Console()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def configure_logging(level: str) -> None:
    if not isinstance(logging.getLevelName(level), int):
        level = "INFO"
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def display_spec(spec, settings: RuntimeSettings) -> None:
    sim = spec.simulation
    lines = [
        f"[bold cyan]Experiment:[/bold cyan] {spec.name}",
        f"[bold]Policy:[/bold] {sim.policy.kind}"
        + (f" (V={sim.policy.v:g})" if sim.policy.kind == "dpp" and spec.sweep is None else ""),
        f"[bold]Users:[/bold] "
        + ", ".join(f"p={u.p:g} a_max={u.a_max:g}" for u in sim.users),
        f"[bold]Horizon:[/bold] {sim.horizon:,} slots x {sim.replications} replication(s), seed {sim.seed}",
        f"[bold]Workers:[/bold] {settings.max_workers}",
    ]
    if spec.sweep is not None:
        values = ", ".join(
            f"{v:g}" if isinstance(v, float) or isinstance(v, int) else "(" + ",".join(f"{x:g}" for x in v) + ")"
            for v in spec.sweep.values
        )
        lines.append(f"[bold]Sweep:[/bold] {spec.sweep.kind} in {{{values}}}")
    console.print()
    console.print(Panel("\n".join(lines), title="Configuration", border_style="blue"))


def display_experiment(report: ExperimentReport) -> None:
    n = report.spec.simulation.n_users
    table = Table(title=f"Results: {report.spec.name}")
    table.add_column("Point", style="cyan")
    table.add_column("Avg cost", justify="right")
    for i in range(n):
        table.add_column(f"Avg age {i + 1}", justify="right")
        table.add_column(f"Avg queue {i + 1}", justify="right")
    table.add_column("Constraints", justify="center")

    for point in report.points:
        cost = report.result.stat(point.index, "avg_cost")
        row = [point.label, f"{cost['mean']:.4f} ± {cost['std']:.4f}"]
        for i in range(n):
            age = report.result.stat(point.index, "avg_age", str(i + 1))
            queue = report.result.stat(point.index, "avg_queue", str(i + 1))
            row.extend([f"{age['mean']:.3f}", f"{queue['mean']:.1f}"])
        row.append("[green]OK[/green]" if point.satisfied else "[red]VIOLATED[/red]")
        table.add_row(*row)

    console.print()
    console.print(table)

    bounds = [p for p in report.points if p.bound is not None]
    if bounds:
        lines = []
        for point in bounds:
            b = point.bound
            ok = b.upper_ok and b.lower_ok
            status = "[green]within bound[/green]" if ok else "[red]outside bound[/red]"
            lines.append(
                f"[cyan]{point.label}[/cyan] c̄={b.avg_cost:.5f} c_opt={b.c_opt:.5f} "
                f"B̄/V={b.slack:.4g} gap={b.gap:.5f} {status}"
            )
        console.print()
        console.print(Panel("\n".join(lines), title="Cost bound", border_style="magenta"))

    if report.trends:
        lines = [
            f"{'[green]yes[/green]' if t.holds else '[yellow]no[/yellow]'}  {t.description}"
            for t in report.trends
        ]
        console.print()
        console.print(Panel("\n".join(lines), title="Trends (within 2 pooled std)", border_style="cyan"))

    files = "\n".join(f"[dim]{path}[/dim]" for path in report.files) or "[dim]no files requested[/dim]"
    console.print()
    console.print(Panel(files, title=f"Output: {report.output_dir}", border_style="green"))


def display_oracle(report: OracleReport) -> None:
    table = Table(title="Constrained-MDP oracle")
    table.add_column("User", style="cyan", justify="center")
    table.add_column("p", justify="right")
    table.add_column("a_max", justify="right")
    table.add_column("c_opt", justify="right")
    table.add_column("Age", justify="right")
    table.add_column("λ", justify="right")
    table.add_column("Mix", justify="right")
    table.add_column("A_cap", justify="right", style="dim")

    for entry, params in zip(report.users, report.spec.simulation.users):
        if entry.result is None:
            table.add_row(str(entry.user), f"{params.p:g}", f"{params.a_max:g}", f"[red]{entry.error}[/red]", "", "", "", "")
            continue
        r = entry.result
        table.add_row(
            str(entry.user), f"{params.p:g}", f"{params.a_max:g}",
            f"{r.c_opt:.6f}", f"{r.achieved_age:.6f}", f"{r.multiplier:.4g}",
            f"{r.mixing_weight:.3f}", str(r.a_cap),
        )
    console.print()
    console.print(table)


def display_error(message: str) -> None:
    console.print()
    console.print(Panel(
        f"[bold red]{message}[/bold red]",
        title="Error",
        border_style="red"
    ))
    console.print()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoi-sched",
        description="Age-of-information scheduling: drift-plus-penalty simulator and constrained-MDP oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path to a JSON experiment config")
    run.add_argument("--workers", type=int, help="worker processes (overrides AOI_MAX_WORKERS)")

    preset = sub.add_parser("preset", help="run a shipped preset")
    preset.add_argument("name", choices=PRESETS)
    preset.add_argument("--out", help="output directory")
    preset.add_argument("--seed", type=int)
    preset.add_argument("--horizon", type=int)
    preset.add_argument("--replications", type=int)
    preset.add_argument("--workers", type=int, help="worker processes (overrides AOI_MAX_WORKERS)")

    oracle = sub.add_parser("oracle", help="solve the single-user constrained MDP for a config")
    oracle.add_argument("config", help="path to a JSON experiment config")
    oracle.add_argument("--workers", type=int, help="worker processes (overrides AOI_MAX_WORKERS)")
    return parser


def run_command(args: argparse.Namespace, settings: RuntimeSettings) -> int:
    if args.command == "preset":
        spec = apply_overrides(
            load_preset(args.name),
            output_dir=args.out,
            seed=args.seed,
            horizon=args.horizon,
            replications=args.replications,
        )
    else:
        spec = load_config(args.config)

    display_spec(spec, settings)

    if args.command == "oracle":
        with console.status("[bold blue]Solving constrained MDP...[/bold blue]"):
            report = run_oracle(spec, settings)
        display_oracle(report)
        if report.experiment is not None:
            display_experiment(report.experiment)
        failed = [u for u in report.users if u.result is None]
        for entry in failed:
            display_error(f"User {entry.user}: {entry.error}")
        return EXIT_FAILURE if failed else EXIT_OK

    total = len(spec.sweep.values) if spec.sweep is not None else 1
    total *= spec.simulation.replications
    done = [0]

    with console.status(f"[bold blue]Simulating 0/{total} episodes...[/bold blue]") as status:
        def on_episode(_result) -> None:
            done[0] += 1
            status.update(f"[bold blue]Simulating {done[0]}/{total} episodes...[/bold blue]")

        report = run_experiment(spec, settings, on_episode=on_episode)

    display_experiment(report)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        settings = RuntimeSettings(max_workers=getattr(args, "workers", None))
    except ValueError as e:
        display_error(str(e))
        return EXIT_CONFIG
    configure_logging(settings.log_level)

    try:
        return run_command(args, settings)
    except ConfigValidationError as e:
        display_error("Invalid configuration:\n" + "\n".join(e.problems))
        return EXIT_CONFIG
    except ConfigError as e:
        display_error(str(e))
        return EXIT_CONFIG
    except (AoiError, OSError) as e:
        display_error(str(e))
        return EXIT_FAILURE
    except KeyboardInterrupt:
        console.print("\n\n[dim]Interrupted.[/dim]\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
