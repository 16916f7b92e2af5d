"""Cross-entropy loss, Adam, the training loop and a finite-difference oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import DatasetSplit, Epoch
from .model import (
    Gradients,
    ModelConfig,
    ModelParams,
    backward,
    forward,
    init_params,
)


class TrainingDivergedError(RuntimeError):
    """Non-finite loss or gradient during training; message names epoch/batch."""


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 2
    learning_rate: float = 1e-4
    epochs: int = 80
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class AdamState:
    m: Gradients
    v: Gradients
    t: int = 0


@dataclass
class TrainHistory:
    epochs: list[dict]  # per-epoch {train_loss, val_loss, val_accuracy}
    best_epoch: int
    best_checkpoint: ModelParams

    def to_json(self) -> str:
        return json.dumps({"epochs": self.epochs, "best_epoch": self.best_epoch}, indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def cross_entropy(probs: np.ndarray, label: int) -> tuple[float, np.ndarray]:
    """Loss and the fused softmax/cross-entropy gradient w.r.t. the logits."""
    probs = np.asarray(probs, dtype=np.float64)
    if not 0 <= label < probs.shape[0]:
        raise ValueError(f"label {label} out of range for {probs.shape[0]} classes")
    loss = -float(np.log(probs[label]))
    grad_logits = probs.copy()
    grad_logits[label] -= 1.0
    return loss, grad_logits


def init_adam(params: ModelParams) -> AdamState:
    zeros = {k: np.zeros_like(v) for k, v in params.arrays().items()}
    return AdamState(m=Gradients(**zeros), v=Gradients(**{k: v.copy() for k, v in zeros.items()}))


def adam_step(
    state: AdamState, params: ModelParams, grads: Gradients, config: TrainConfig
) -> tuple[AdamState, ModelParams]:
    """One Adam update with bias correction; returns fresh state and params."""
    for name, g in grads.arrays().items():
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError(f"non-finite gradient in parameter block '{name}'")
    t = state.t + 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    new_m, new_v, new_p = {}, {}, {}
    p_arrays = params.arrays()
    m_arrays, v_arrays = state.m.arrays(), state.v.arrays()
    for name, g in grads.arrays().items():
        m = b1 * m_arrays[name] + (1 - b1) * g
        v = b2 * v_arrays[name] + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        new_m[name] = m
        new_v[name] = v
        new_p[name] = p_arrays[name] - config.learning_rate * m_hat / (
            np.sqrt(v_hat) + config.adam_eps
        )
    return AdamState(m=Gradients(**new_m), v=Gradients(**new_v), t=t), ModelParams(**new_p)


def _eval_pass(params: ModelParams, epochs: list[Epoch]) -> tuple[float, float]:
    """Mean cross-entropy and accuracy in eval mode (argmax ties go to class 0)."""
    losses, correct = [], 0
    for ep in epochs:
        cache = forward(params, ep.data, mode="eval")
        loss, _ = cross_entropy(cache.probs, ep.label)
        losses.append(loss)
        if int(np.argmax(cache.probs)) == ep.label:
            correct += 1
    return float(np.mean(losses)), correct / len(epochs)


def train(
    data: DatasetSplit, config: TrainConfig, model_config: ModelConfig = ModelConfig()
) -> TrainHistory:
    """Mini-batch Adam training with validation-accuracy checkpoint selection.

    Deterministic given (data, config, model_config): all shuffling, dropout
    and initialization derive from config.seed.
    """
    if not data.train or not data.validation:
        raise ValueError("train and validation partitions must be non-empty")
    params = init_params(config.seed, model_config)
    state = init_adam(params)
    rng = np.random.default_rng([config.seed, 1])  # dropout + shuffle stream

    history: list[dict] = []
    best = None  # (val_acc, -val_loss, -epoch, params)
    n = len(data.train)
    for epoch_idx in range(config.epochs):
        perm = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            batch = [data.train[i] for i in perm[start : start + config.batch_size]]
            grad_sum: dict[str, np.ndarray] | None = None
            for item in batch:
                cache = forward(params, item.data, mode="train", rng=rng)
                loss, grad_logits = cross_entropy(cache.probs, item.label)
                if not np.isfinite(loss):
                    raise TrainingDivergedError(
                        f"non-finite loss at epoch {epoch_idx}, batch {start // config.batch_size}"
                    )
                epoch_losses.append(loss)
                g = backward(cache, params, grad_logits)
                if grad_sum is None:
                    grad_sum = {k: v.copy() for k, v in g.arrays().items()}
                else:
                    for k, v in g.arrays().items():
                        grad_sum[k] += v
            grads = Gradients(**{k: v / len(batch) for k, v in grad_sum.items()})
            state, params = adam_step(state, params, grads, config)
        val_loss, val_acc = _eval_pass(params, data.validation)
        history.append(
            {
                "train_loss": float(np.mean(epoch_losses)),
                "val_loss": val_loss,
                "val_accuracy": val_acc,
            }
        )
        key = (val_acc, -val_loss, -epoch_idx)
        if best is None or key > best[0]:
            best = (key, epoch_idx, params)
    return TrainHistory(epochs=history, best_epoch=best[1], best_checkpoint=best[2])


def finite_diff_check(params: ModelParams, epoch: Epoch, eps: float = 1e-5) -> float:
    """Worst relative error between analytic and central-difference gradients.

    Dropout is disabled (eval-mode gradients) so the loss is deterministic.
    Intended for small models only.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    total = sum(a.size for a in params.arrays().values())
    if total > 10_000:
        raise ValueError(f"model too large for finite differences ({total} parameters)")

    cache = forward(params, epoch.data, mode="eval")
    _, grad_logits = cross_entropy(cache.probs, epoch.label)
    analytic = backward(cache, params, grad_logits)

    def probe(p: ModelParams) -> tuple[float, np.ndarray]:
        c = forward(p, epoch.data, mode="eval")
        return cross_entropy(c.probs, epoch.label)[0], c.relu_mask

    worst = 0.0
    arrays = {k: v.copy() for k, v in params.arrays().items()}
    for name, arr in arrays.items():
        a_grad = analytic.arrays()[name]
        flat = arr.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            lp, mask_p = probe(ModelParams(**arrays))
            flat[i] = orig - eps
            lm, mask_m = probe(ModelParams(**arrays))
            flat[i] = orig
            if not np.array_equal(mask_p, mask_m):
                # perturbation crosses a ReLU kink; the loss is not
                # differentiable there, so central differences are meaningless
                continue
            numeric = (lp - lm) / (2 * eps)
            a = a_grad.reshape(-1)[i]
            scale = max(abs(a), abs(numeric))
            err = abs(a - numeric) if scale < 1e-10 else abs(a - numeric) / scale
            worst = max(worst, err)
    return worst
