import os
import platform
import shutil
from typing import Any, cast

import click
import numpy as np

from ...constants import __version__
from ...runner import events
from ..context import ExecutionContext
from ..handlers import EventHandler


def get_terminal_width() -> int:
    return shutil.get_terminal_size().columns


def display_section_name(title: str, separator: str = "=", **kwargs: Any) -> None:
    """Print section name with separators in terminal with the given title nicely centered."""
    message = f" {title} ".center(get_terminal_width(), separator)
    kwargs.setdefault("bold", True)
    click.secho(message, **kwargs)


def get_percentage(position: int, length: int) -> str:
    """Format completion percentage in square brackets."""
    percentage_message = f"{position * 100 // length}%".rjust(4)
    return f"[{percentage_message}]"


def display_epoch(context: ExecutionContext, event: events.EpochFinished) -> None:
    """Loss components of the epoch with the current progress on the right side of the line."""
    record = event.record
    message = (
        f"epoch {event.epoch:>5}  total {record.total:.6g}  "
        f"vae {record.l_vae_part:.4g} / {record.l_vae_global:.4g}  "
        f"triplet {record.l_trip_part:.4g} / {record.l_trip_global:.4g}"
    )
    epochs = cast(int, context.epochs)  # is already initialized via `Initialized` event
    current_percentage = get_percentage(event.epoch, epochs)
    padding = 1
    length = max(get_terminal_width() - len(message) - padding, len(current_percentage))
    click.echo(message + click.style(current_percentage.rjust(length), fg="cyan"))


def display_internal_error(context: ExecutionContext, event: events.InternalError) -> None:
    if context.show_errors_tracebacks and event.exception_with_traceback:
        click.secho(event.exception_with_traceback, fg="red", err=True)
    click.secho(f"Error: {event.message}", fg="red", err=True)


def handle_initialized(context: ExecutionContext, event: events.Initialized) -> None:
    """Display information about the training session."""
    context.epochs = event.epochs
    display_section_name("risa training session starts")
    versions = (
        f"platform {platform.system()} -- "
        f"Python {platform.python_version()}, "
        f"risa-{__version__}, "
        f"numpy-{np.__version__}"
    )
    click.echo(versions)
    click.echo(f"rootdir: {os.getcwd()}")
    if context.loss_log_file is not None:
        click.echo(f"Loss log: {context.loss_log_file}")
    click.echo(f"Parameters: {event.parameters_count}")
    click.secho(
        f"collected shapes: {event.shapes_count} in {event.batches_count} batches, up to {event.epochs} epochs",
        bold=True,
    )
    click.echo()


def handle_epoch_finished(context: ExecutionContext, event: events.EpochFinished) -> None:
    context.epochs_processed += 1
    display_epoch(context, event)


def handle_checkpoint_saved(context: ExecutionContext, event: events.CheckpointSaved) -> None:
    click.secho(f"Checkpoint saved to {event.path} (epoch {event.epoch})", fg="cyan")


def handle_converged(context: ExecutionContext, event: events.Converged) -> None:
    click.secho(
        f"Converged at epoch {event.epoch}: relative improvement {event.improvement:.3g} over the patience window",
        fg="yellow",
    )


def handle_finished(context: ExecutionContext, event: events.Finished) -> None:
    """Show the outcome of the whole training session."""
    click.echo()
    if event.record is not None:
        message = f"{event.epochs_run} epochs in {event.running_time:.2f}s, final loss {event.record.total:.6g}"
    else:
        message = f"No epochs run in {event.running_time:.2f}s"
    display_section_name(message, fg="green")


def handle_interrupted(context: ExecutionContext, event: events.Interrupted) -> None:
    click.echo()
    display_section_name("KeyboardInterrupt", "!", bold=False)


def handle_internal_error(context: ExecutionContext, event: events.InternalError) -> None:
    display_internal_error(context, event)
    raise click.Abort


class DefaultOutputStyleHandler(EventHandler):
    def handle_event(self, context: ExecutionContext, event: events.ExecutionEvent) -> None:
        """Choose and execute a proper handler for the given event."""
        if isinstance(event, events.Initialized):
            handle_initialized(context, event)
        if isinstance(event, events.EpochFinished):
            handle_epoch_finished(context, event)
        if isinstance(event, events.CheckpointSaved):
            handle_checkpoint_saved(context, event)
        if isinstance(event, events.Converged):
            handle_converged(context, event)
        if isinstance(event, events.Finished):
            handle_finished(context, event)
        if isinstance(event, events.Interrupted):
            handle_interrupted(context, event)
        if isinstance(event, events.InternalError):
            handle_internal_error(context, event)
