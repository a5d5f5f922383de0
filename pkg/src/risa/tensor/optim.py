from typing import Mapping

import numpy as np

from ..exceptions import ShapeMismatch
from .params import ParameterSet

DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8


def adam_step(
    params: ParameterSet,
    grads: Mapping[str, np.ndarray],
    lr: float,
    beta1: float = DEFAULT_BETA1,
    beta2: float = DEFAULT_BETA2,
    eps: float = DEFAULT_EPS,
) -> None:
    """One bias-corrected Adam update of every parameter that has a gradient, in place."""
    for name, gradient in grads.items():
        if name in params.params and params.params[name].shape != np.shape(gradient):
            raise ShapeMismatch("adam_step", (params.params[name].shape, np.shape(gradient)))
    params.step += 1
    step = params.step
    for name, gradient in grads.items():
        if name not in params.params:
            continue
        m = params.adam_m[name] = beta1 * params.adam_m[name] + (1.0 - beta1) * gradient
        v = params.adam_v[name] = beta2 * params.adam_v[name] + (1.0 - beta2) * gradient ** 2
        m_hat = m / (1.0 - beta1 ** step)
        v_hat = v / (1.0 - beta2 ** step)
        params.params[name] = params.params[name] - lr * m_hat / (np.sqrt(v_hat) + eps)
