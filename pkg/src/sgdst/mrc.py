"""Span-extraction head over per-token context representations.

Given token vectors r_1..r_n and a pooled cls vector, the head produces:

* a start distribution  v_start = softmax(r_i . w_start + b_start)
* an end distribution conditioned on a start position p,
  v_end = softmax(w_end . (r_i (+) r_p) + b_end)
* an answerability probability
  p_has = sigmoid(w_ans . tanh(W_g (r_p (+) cls) + b_g) + b_ans)

where (+) is concatenation.  During training p is the gold start when an
answer exists (teacher forcing) and argmax(v_start) otherwise; the argmax
is treated as a constant for gradients.  The per-example loss is

  BCE(p_has, has_answer) + [has_answer] * (-log v_start[s] - log v_end[e])

All gradients are closed-form; training is plain minibatch Adam.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import TrainingError
from .optim import Adam, TrainConfig, minibatches


@dataclass(frozen=True)
class MrcInstance:
    """One training/eval item, already encoded."""

    ctx_reps: np.ndarray
    cls: np.ndarray
    has_answer: bool
    start: int = -1
    end: int = -1


def init_mrc_params(dim: int, hidden: int | None = None, seed: int = 0) -> dict[str, np.ndarray]:
    h = dim if hidden is None else hidden
    rng = np.random.default_rng(seed)
    scale = 0.1
    return {
        "w_start": rng.uniform(-scale, scale, dim),
        "b_start": np.zeros(()),
        "w_end": rng.uniform(-scale, scale, 2 * dim),
        "b_end": np.zeros(()),
        "W_g": rng.uniform(-scale, scale, (h, 2 * dim)),
        "b_g": np.zeros(h),
        "w_ans": rng.uniform(-scale, scale, h),
        "b_ans": np.zeros(()),
    }


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - np.max(z)
    e = np.exp(z)
    return e / np.sum(e)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@dataclass(frozen=True)
class MrcForward:
    v_start: np.ndarray
    v_end: np.ndarray
    p_has: float
    start_pos: int


def mrc_forward(
    params: dict[str, np.ndarray],
    ctx_reps: np.ndarray,
    cls: np.ndarray,
    gold_start: int | None = None,
) -> MrcForward:
    v_start = _softmax(ctx_reps @ params["w_start"] + float(params["b_start"]))
    pos = int(np.argmax(v_start)) if gold_start is None else gold_start
    r_p = ctx_reps[pos]
    dim = ctx_reps.shape[1]
    w_a, w_b = params["w_end"][:dim], params["w_end"][dim:]
    v_end = _softmax(ctx_reps @ w_a + float(r_p @ w_b) + float(params["b_end"]))
    x = np.concatenate([r_p, cls])
    hid = np.tanh(params["W_g"] @ x + params["b_g"])
    p_has = _sigmoid(float(params["w_ans"] @ hid) + float(params["b_ans"]))
    return MrcForward(v_start=v_start, v_end=v_end, p_has=p_has, start_pos=pos)


def _log(p: float) -> float:
    # Floor instead of additive smoothing so interior probabilities keep
    # their exact log while log(0) stays finite.
    return float(np.log(max(p, 1e-300)))


def mrc_loss(params: dict[str, np.ndarray], inst: MrcInstance) -> float:
    fwd = mrc_forward(
        params, inst.ctx_reps, inst.cls, inst.start if inst.has_answer else None
    )
    t = 1.0 if inst.has_answer else 0.0
    loss = -(t * _log(fwd.p_has) + (1.0 - t) * _log(1.0 - fwd.p_has))
    if inst.has_answer:
        loss += -_log(fwd.v_start[inst.start]) - _log(fwd.v_end[inst.end])
    return float(loss)


def _zero_grads(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in params.items()}


def mrc_loss_and_grads(
    params: dict[str, np.ndarray], batch: list[MrcInstance]
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean loss over the batch and its gradients."""
    if not batch:
        raise TrainingError("empty batch")
    grads = _zero_grads(params)
    total = 0.0
    dim = batch[0].ctx_reps.shape[1]
    for inst in batch:
        reps, cls = inst.ctx_reps, inst.cls
        fwd = mrc_forward(params, reps, cls, inst.start if inst.has_answer else None)
        t = 1.0 if inst.has_answer else 0.0
        total += -(t * _log(fwd.p_has) + (1 - t) * _log(1 - fwd.p_has))

        # Answerability path.
        r_p = reps[fwd.start_pos]
        x = np.concatenate([r_p, cls])
        pre = params["W_g"] @ x + params["b_g"]
        hid = np.tanh(pre)
        dlogit = fwd.p_has - t
        grads["w_ans"] += dlogit * hid
        grads["b_ans"] += dlogit
        dhid = dlogit * params["w_ans"] * (1.0 - hid * hid)
        grads["W_g"] += np.outer(dhid, x)
        grads["b_g"] += dhid

        if inst.has_answer:
            total += -_log(fwd.v_start[inst.start])
            total += -_log(fwd.v_end[inst.end])
            dz = fwd.v_start.copy()
            dz[inst.start] -= 1.0
            grads["w_start"] += reps.T @ dz
            grads["b_start"] += np.sum(dz)
            dz_end = fwd.v_end.copy()
            dz_end[inst.end] -= 1.0
            grads["w_end"][:dim] += reps.T @ dz_end
            grads["w_end"][dim:] += np.sum(dz_end) * r_p
            grads["b_end"] += np.sum(dz_end)

    n = len(batch)
    for k in grads:
        grads[k] /= n
    return float(total) / n, grads


def decode_span(
    v_start: np.ndarray, v_end: np.ndarray, max_span_len: int | None = None
) -> tuple[int, int]:
    """Best (s, e) maximizing v_start[s] * v_end[e] with s <= e < s + max_span_len.

    Runs in O(n) using a window maximum over v_end; ties resolve to the
    smallest s, then the smallest e.
    """
    n = len(v_start)
    if n == 0 or len(v_end) != n:
        raise ValueError("start and end distributions must be equal-length and non-empty")
    limit = n if max_span_len is None else max_span_len
    if limit < 1:
        raise ValueError("max_span_len must be >= 1")

    # window_best[s] = index of max v_end over [s, min(n, s+limit)), earliest on ties.
    # Backward scan: indices enter on the left, expire on the right, so the
    # deque keeps values increasing left to right and the max sits at the end.
    window_best = np.empty(n, dtype=np.int64)
    dq: deque[int] = deque()
    for s in range(n - 1, -1, -1):
        while dq and v_end[dq[0]] <= v_end[s]:
            dq.popleft()
        dq.appendleft(s)
        hi = s + limit
        while dq[-1] >= hi:
            dq.pop()
        window_best[s] = dq[-1]

    best_s, best_e, best_p = 0, int(window_best[0]), float(v_start[0] * v_end[window_best[0]])
    for s in range(1, n):
        e = int(window_best[s])
        p = float(v_start[s] * v_end[e])
        if p > best_p:
            best_s, best_e, best_p = s, e, p
    return best_s, best_e


@dataclass(frozen=True)
class SpanPrediction:
    p_has: float
    start: int
    end: int


def predict_span(
    params: dict[str, np.ndarray],
    ctx_reps: np.ndarray,
    cls: np.ndarray,
    max_span_len: int | None = None,
) -> SpanPrediction:
    """Condition the end distribution on the argmax start, then jointly decode."""
    fwd = mrc_forward(params, ctx_reps, cls, None)
    s, e = decode_span(fwd.v_start, fwd.v_end, max_span_len)
    return SpanPrediction(p_has=fwd.p_has, start=s, end=e)


def exact_span_accuracy(params: dict[str, np.ndarray], instances: list[MrcInstance]) -> float:
    """Fraction where answerability (at 0.5) and, if answered, the exact span match."""
    hit = 0
    for inst in instances:
        pred = predict_span(params, inst.ctx_reps, inst.cls)
        if not inst.has_answer:
            hit += pred.p_has < 0.5
        else:
            hit += pred.p_has >= 0.5 and pred.start == inst.start and pred.end == inst.end
    return hit / len(instances) if instances else 0.0


def train_mrc(
    instances: list[MrcInstance],
    config: TrainConfig,
    params: dict[str, np.ndarray] | None = None,
    target_accuracy: float | None = None,
    time_budget: float | None = None,
) -> tuple[dict[str, np.ndarray], list[float]]:
    """Minibatch Adam over the instances; returns params and per-epoch losses.

    Stops early once training accuracy reaches target_accuracy or the time
    budget (seconds) runs out.
    """
    if not instances:
        raise TrainingError("no training instances")
    dim = instances[0].ctx_reps.shape[1]
    if params is None:
        params = init_mrc_params(dim, seed=config.seed)
    opt = Adam(config)
    rng = np.random.default_rng(config.seed) if config.shuffle else None
    started = time.monotonic()
    history: list[float] = []
    for _ in range(config.epochs):
        epoch_loss = 0.0
        batches = minibatches(len(instances), config.batch_size, rng)
        for idx in batches:
            loss, grads = mrc_loss_and_grads(params, [instances[i] for i in idx])
            opt.step(params, grads)
            epoch_loss += loss * len(idx)
        history.append(epoch_loss / len(instances))
        if target_accuracy is not None and exact_span_accuracy(params, instances) >= target_accuracy:
            break
        if time_budget is not None and time.monotonic() - started > time_budget:
            break
    return params, history
