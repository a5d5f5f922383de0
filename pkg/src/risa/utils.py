import os
import traceback
from typing import Optional

import numpy as np

from .constants import THREADS_ENV_VAR

try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    # pylint: disable=unused-import
    from yaml import SafeLoader  # type: ignore


def format_exception(error: Exception, include_traceback: bool = False) -> str:
    if include_traceback:
        return "".join(traceback.format_exception(type(error), error, error.__traceback__))
    return "".join(traceback.format_exception_only(type(error), error))


def get_workers_count(requested: Optional[int] = None) -> int:
    """Number of worker threads, capped by the environment when it is set."""
    count = requested if requested is not None else (os.cpu_count() or 1)
    raw_cap = os.environ.get(THREADS_ENV_VAR)
    if raw_cap:
        try:
            count = min(count, int(raw_cap))
        except ValueError:
            pass
    return max(count, 1)


def pairwise_sq_distances(vectors: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all rows."""
    differences = vectors[:, None, :] - vectors[None, :, :]
    return np.einsum("ijk,ijk->ij", differences, differences)
