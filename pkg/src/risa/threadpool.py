"""Spread independent per-shape work among worker threads, keeping results in input order."""
import threading
from queue import Empty, Queue
from typing import Callable, Dict, List, Sequence, Tuple, TypeVar, Union

from .utils import get_workers_count

T = TypeVar("T")
R = TypeVar("R")


def _worker(
    function: Callable[[T], R], tasks_queue: Queue, results: Dict[int, Union[R, BaseException]]
) -> None:
    while True:
        try:
            index, item = tasks_queue.get_nowait()
        except Empty:
            return
        try:
            results[index] = function(item)
        except Exception as exc:  # pylint: disable=broad-except
            results[index] = exc


def ordered_map(function: Callable[[T], R], items: Sequence[T], workers_num: int = 1) -> List[R]:
    """Apply ``function`` to every item.

    The number of threads is capped by ``RISA_THREADS``. The first failing item, in input order, re-raises its
    exception after all workers are done.
    """
    workers_num = min(get_workers_count(workers_num), max(len(items), 1))
    if workers_num == 1:
        return [function(item) for item in items]
    tasks_queue: Queue = Queue()
    tasks_queue.queue.extend(enumerate(items))
    results: Dict[int, Union[R, BaseException]] = {}
    workers = [
        threading.Thread(target=_worker, kwargs={"function": function, "tasks_queue": tasks_queue, "results": results})
        for _ in range(workers_num)
    ]
    for worker in workers:
        worker.start()
    for worker in workers:
        worker.join()
    ordered: List[Tuple[int, Union[R, BaseException]]] = sorted(results.items())
    for _, value in ordered:
        if isinstance(value, BaseException):
            raise value
    return [value for _, value in ordered]  # type: ignore
