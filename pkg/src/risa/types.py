from typing import Any, Dict, Sequence, Union

import numpy as np

ArrayLike = Union[np.ndarray, Sequence[Any]]
RawConfig = Dict[str, Any]
