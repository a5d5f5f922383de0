import logging
import pathlib
from contextlib import contextmanager
from typing import Generator, Optional

import click

from ..exceptions import RisaError
from .config import RunConfig, load_run_config


def validate_config(ctx: click.core.Context, param: click.core.Parameter, raw_value: Optional[str]) -> RunConfig:
    with abort_on_error():
        return load_run_config(raw_value)


def validate_directory(
    ctx: click.core.Context, param: click.core.Parameter, raw_value: Optional[str]
) -> Optional[str]:
    if raw_value is not None and not pathlib.Path(raw_value).is_dir():
        raise click.BadParameter(f"Directory not found: {raw_value}")
    return raw_value


def convert_verbosity(ctx: click.core.Context, param: click.core.Parameter, value: str) -> int:
    level = logging.getLevelName(value.upper())
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("risa").setLevel(level)
    return level


@contextmanager
def abort_on_error() -> Generator[None, None, None]:
    """Turn library errors into a one-line ``Error: ...`` diagnostic with exit code 1."""
    try:
        yield
    except (RisaError, FileNotFoundError) as exc:
        raise click.ClickException(str(exc)) from exc
