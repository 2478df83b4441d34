import typer

from pilotmesh.__meta__ import __version__
from pilotmesh.cli.commands import app
from pilotmesh.cli.output import formatter
from pilotmesh.logging import setup_logger


@app.command()
def version() -> None:
    formatter.result("pilotmesh", f"v{__version__}")


@app.callback()
def callback(
    debug: bool = typer.Option(  # noqa: FBT001
        default=False,
        help="Log at DEBUG level (otherwise PILOTMESH_LOG decides)",
    ),
) -> None:
    """Pilot selection, two-tier D2D overlay lookups and QoE scoring."""
    setup_logger(debug=debug)


__all__ = ("app",)
