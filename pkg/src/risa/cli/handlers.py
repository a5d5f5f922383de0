from typing import IO, Optional

from ..runner import events
from ..runner.loss_log import write_header, write_record
from .context import ExecutionContext


class EventHandler:
    def handle_event(self, context: ExecutionContext, event: events.ExecutionEvent) -> None:
        raise NotImplementedError

    def shutdown(self) -> None:
        # Do nothing by default
        pass


class LossLogWriter(EventHandler):
    """Append one CSV row per finished epoch."""

    def __init__(self, path: str) -> None:
        self.path = path
        self.stream: Optional[IO[str]] = None

    def handle_event(self, context: ExecutionContext, event: events.ExecutionEvent) -> None:
        if isinstance(event, events.Initialized):
            self.stream = open(self.path, "w", newline="", encoding="utf-8")
            write_header(self.stream)
        elif isinstance(event, events.EpochFinished) and self.stream is not None:
            write_record(self.stream, event.record)
            self.stream.flush()
        elif isinstance(event, (events.Finished, events.Interrupted, events.InternalError)):
            self.shutdown()

    def shutdown(self) -> None:
        if self.stream is not None:
            self.stream.close()
            self.stream = None
