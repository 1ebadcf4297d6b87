"""Wide-and-deep scorer for categorical candidate values.

One candidate at a time: the deep path squeezes the pooled cls vector
through a tanh layer, the wide path is a fixed vector of 83 binary
features (see features.py for the layout), and a logistic layer over the
concatenation yields the candidate probability

  p = sigmoid(w_lr . (tanh(W_dnn cls + b_dnn) (+) wide) + b_lr)

Training is per-candidate binary cross-entropy; ranking picks the
highest-probability candidate for the slot.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import TrainingError
from .optim import Adam, TrainConfig, minibatches

WIDE_DIM = 83


@dataclass(frozen=True)
class WdInstance:
    cls: np.ndarray
    wide: np.ndarray
    label: float


def init_wd_params(dim: int, hidden: int | None = None, seed: int = 0) -> dict[str, np.ndarray]:
    h = dim if hidden is None else hidden
    rng = np.random.default_rng(seed)
    scale = 0.1
    return {
        "W_dnn": rng.uniform(-scale, scale, (h, dim)),
        "b_dnn": np.zeros(h),
        "w_lr": rng.uniform(-scale, scale, h + WIDE_DIM),
        "b_lr": np.zeros(()),
    }


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


def wd_forward(params: dict[str, np.ndarray], cls: np.ndarray, wide: np.ndarray) -> float:
    if wide.shape != (WIDE_DIM,):
        raise TrainingError(f"wide feature vector has shape {wide.shape}, want ({WIDE_DIM},)")
    deep = np.tanh(params["W_dnn"] @ cls + params["b_dnn"])
    joint = np.concatenate([deep, wide])
    return _sigmoid(float(params["w_lr"] @ joint) + float(params["b_lr"]))


def _log(p: float) -> float:
    # Floor instead of additive smoothing so interior probabilities keep
    # their exact log while log(0) stays finite.
    return float(np.log(max(p, 1e-300)))


def wd_loss(params: dict[str, np.ndarray], inst: WdInstance) -> float:
    p = wd_forward(params, inst.cls, inst.wide)
    return -(inst.label * _log(p) + (1 - inst.label) * _log(1 - p))


def wd_loss_and_grads(
    params: dict[str, np.ndarray], batch: list[WdInstance]
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean binary cross-entropy over the batch and its gradients."""
    if not batch:
        raise TrainingError("empty batch")
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    h = params["b_dnn"].shape[0]
    total = 0.0
    for inst in batch:
        deep = np.tanh(params["W_dnn"] @ inst.cls + params["b_dnn"])
        joint = np.concatenate([deep, inst.wide])
        p = _sigmoid(float(params["w_lr"] @ joint) + float(params["b_lr"]))
        total += -(inst.label * _log(p) + (1 - inst.label) * _log(1 - p))
        dlogit = p - inst.label
        grads["w_lr"] += dlogit * joint
        grads["b_lr"] += dlogit
        ddeep = dlogit * params["w_lr"][:h] * (1.0 - deep * deep)
        grads["W_dnn"] += np.outer(ddeep, inst.cls)
        grads["b_dnn"] += ddeep
    n = len(batch)
    for k in grads:
        grads[k] /= n
    return float(total) / n, grads


def rank_candidates(
    params: dict[str, np.ndarray],
    cls_per_candidate: list[np.ndarray],
    wide_per_candidate: list[np.ndarray],
) -> tuple[int, list[float]]:
    """Index of the best-scoring candidate (first on ties) plus all scores."""
    scores = [
        wd_forward(params, cls, wide)
        for cls, wide in zip(cls_per_candidate, wide_per_candidate, strict=True)
    ]
    if not scores:
        raise TrainingError("no candidates to rank")
    best = max(range(len(scores)), key=lambda i: (scores[i], -i))
    return best, scores


def binary_accuracy(params: dict[str, np.ndarray], instances: list[WdInstance]) -> float:
    hit = 0
    for inst in instances:
        p = wd_forward(params, inst.cls, inst.wide)
        hit += (p >= 0.5) == (inst.label >= 0.5)
    return hit / len(instances) if instances else 0.0


def train_wd(
    instances: list[WdInstance],
    config: TrainConfig,
    params: dict[str, np.ndarray] | None = None,
    target_accuracy: float | None = None,
    time_budget: float | None = None,
) -> tuple[dict[str, np.ndarray], list[float]]:
    """Minibatch Adam; returns params and per-epoch mean losses."""
    if not instances:
        raise TrainingError("no training instances")
    dim = instances[0].cls.shape[0]
    if params is None:
        params = init_wd_params(dim, seed=config.seed)
    opt = Adam(config)
    rng = np.random.default_rng(config.seed) if config.shuffle else None
    started = time.monotonic()
    history: list[float] = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for idx in minibatches(len(instances), config.batch_size, rng):
            loss, grads = wd_loss_and_grads(params, [instances[i] for i in idx])
            opt.step(params, grads)
            epoch_loss += loss * len(idx)
        history.append(epoch_loss / len(instances))
        if target_accuracy is not None and binary_accuracy(params, instances) >= target_accuracy:
            break
        if time_budget is not None and time.monotonic() - started > time_budget:
            break
    return params, history
