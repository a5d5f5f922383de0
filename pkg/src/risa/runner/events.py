import time
from typing import Optional

import attr

from ..utils import format_exception
from .loss_log import LossRecord


@attr.s()  # pragma: no mutate
class ExecutionEvent:
    """Generic execution event."""


@attr.s(slots=True)  # pragma: no mutate
class Initialized(ExecutionEvent):
    """Runner is initialized, parameters and feature scaling are prepared."""

    # Number of training shapes
    shapes_count: int = attr.ib()  # pragma: no mutate
    batches_count: int = attr.ib()  # pragma: no mutate
    epochs: int = attr.ib()  # pragma: no mutate
    parameters_count: int = attr.ib()  # pragma: no mutate
    # Timestamp of training start
    start_time: float = attr.ib(factory=time.monotonic)  # pragma: no mutate


@attr.s(slots=True)  # pragma: no mutate
class EpochFinished(ExecutionEvent):
    """Happens after each pass over the training shapes."""

    epoch: int = attr.ib()  # pragma: no mutate
    record: LossRecord = attr.ib()  # pragma: no mutate
    # Epoch running time
    elapsed_time: float = attr.ib()  # pragma: no mutate


@attr.s(slots=True)  # pragma: no mutate
class CheckpointSaved(ExecutionEvent):
    path: str = attr.ib()  # pragma: no mutate
    epoch: int = attr.ib()  # pragma: no mutate


@attr.s(slots=True)  # pragma: no mutate
class Converged(ExecutionEvent):
    """The total loss stopped improving, no more epochs are run."""

    epoch: int = attr.ib()  # pragma: no mutate
    # Relative improvement over the patience window
    improvement: float = attr.ib()  # pragma: no mutate


@attr.s(slots=True)  # pragma: no mutate
class Interrupted(ExecutionEvent):
    """If execution was interrupted by Ctrl-C or a received SIGTERM."""


@attr.s(slots=True)  # pragma: no mutate
class InternalError(ExecutionEvent):
    """An error that happened inside the runner."""

    message: str = attr.ib()  # pragma: no mutate
    exception_type: str = attr.ib()  # pragma: no mutate
    exception: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    exception_with_traceback: Optional[str] = attr.ib(default=None)  # pragma: no mutate
    # The original exception, for callers that re-raise it
    error: Optional[Exception] = attr.ib(default=None, repr=False)  # pragma: no mutate

    @classmethod
    def from_exc(cls, exc: Exception) -> "InternalError":
        exception_type = f"{exc.__class__.__module__}.{exc.__class__.__qualname__}"
        exception = format_exception(exc)
        exception_with_traceback = format_exception(exc, include_traceback=True)
        return cls(
            message=str(exc) or "An internal error happened during training",
            exception_type=exception_type,
            exception=exception,
            exception_with_traceback=exception_with_traceback,
            error=exc,
        )


@attr.s(slots=True)  # pragma: no mutate
class Finished(ExecutionEvent):
    """The final event of the run.

    No more events after this point.
    """

    epochs_run: int = attr.ib()  # pragma: no mutate
    record: Optional[LossRecord] = attr.ib()  # pragma: no mutate
    checkpoint_path: Optional[str] = attr.ib()  # pragma: no mutate
    converged: bool = attr.ib()  # pragma: no mutate
    # Total training time
    running_time: float = attr.ib()  # pragma: no mutate
