import os
import shutil
from typing import Optional

import attr


@attr.s(slots=True)  # pragma: no mutate
class ExecutionContext:
    """Storage for the current context of a training run."""

    show_errors_tracebacks: bool = attr.ib(default=False)  # pragma: no mutate
    loss_log_file: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    # It is set in runtime, from an `Initialized` event
    epochs: Optional[int] = attr.ib(default=None)  # pragma: no mutate
    epochs_processed: int = attr.ib(default=0)  # pragma: no mutate
    terminal_size: os.terminal_size = attr.ib(factory=shutil.get_terminal_size)  # pragma: no mutate
