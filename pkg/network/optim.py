from dataclasses import dataclass, field
from typing import Dict

import numpy as np

BETA1 = 0.9
BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class AdamWState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adamw_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamWState, lr: float,
               weight_decay: float = 0.0, beta1: float = BETA1, beta2: float = BETA2, eps: float = EPSILON):
    """
    One AdamW update with decoupled weight decay:
    theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).

    Parameters are updated in place; ``state`` accumulates moments keyed like ``params``.
    """
    state.t += 1
    correction1 = 1.0 - beta1**state.t
    correction2 = 1.0 - beta2**state.t
    for name, param in params.items():
        grad = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param)
            state.v[name] = np.zeros_like(param)
        m, v = state.m[name], state.v[name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        update = (m / correction1) / (np.sqrt(v / correction2) + eps) + weight_decay * param
        param -= lr * update
    return params
