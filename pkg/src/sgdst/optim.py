"""Adam optimizer and shared training configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TrainConfig:
    """Defaults follow the head training recipe; lr is sized for the small
    desk-scale heads here, not for fine-tuning a large pretrained stack."""

    lr: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.9999
    eps: float = 1e-6
    weight_decay: float = 0.0
    batch_size: int = 16
    epochs: int = 50
    seed: int = 13
    shuffle: bool = True


class Adam:
    """Adam with bias correction; weight decay is decoupled from the moments."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self._t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        cfg = self.config
        self._t += 1
        bc1 = 1.0 - cfg.beta1**self._t
        bc2 = 1.0 - cfg.beta2**self._t
        for key, grad in grads.items():
            param = params[key]
            m = self._m.get(key)
            if m is None:
                m = self._m[key] = np.zeros_like(param)
                self._v[key] = np.zeros_like(param)
            v = self._v[key]
            m *= cfg.beta1
            m += (1.0 - cfg.beta1) * grad
            v *= cfg.beta2
            v += (1.0 - cfg.beta2) * grad * grad
            update = (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)
            if cfg.weight_decay > 0.0:
                update = update + cfg.weight_decay * param
            param -= cfg.lr * update


def grad_norm(grads: dict[str, np.ndarray]) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    return math.sqrt(total)


def minibatches(count: int, batch_size: int, rng: np.random.Generator | None) -> list[np.ndarray]:
    order = np.arange(count)
    if rng is not None:
        rng.shuffle(order)
    return [order[i : i + batch_size] for i in range(0, count, batch_size)]
