"""Single-conv-layer classifier: Conv1D (same padding) -> ReLU -> dropout ->
global average pool -> fully connected -> softmax, with analytic gradients.

All math is float64. The backward pass is hand-derived; there is no autodiff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

DROPOUT_RATE = 0.1


@dataclass(frozen=True)
class ModelConfig:
    in_channels: int = 59
    out_channels: int = 59
    kernel: int = 11
    classes: int = 2

    def __post_init__(self):
        if self.kernel % 2 == 0:
            raise ValueError(f"kernel must be odd for symmetric same padding, got {self.kernel}")
        if min(self.in_channels, self.out_channels, self.kernel, self.classes) < 1:
            raise ValueError(f"all model dimensions must be positive: {self}")


@dataclass(frozen=True)
class ModelParams:
    conv_weight: np.ndarray  # [out_channels, in_channels, kernel]
    conv_bias: np.ndarray  # [out_channels]
    fc_weight: np.ndarray  # [classes, out_channels]
    fc_bias: np.ndarray  # [classes]

    def __post_init__(self):
        out_c, in_c, kernel = self.conv_weight.shape
        if kernel % 2 == 0:
            raise ValueError(f"kernel must be odd, got {kernel}")
        if self.conv_bias.shape != (out_c,):
            raise ValueError("conv_bias shape does not match conv_weight")
        if self.fc_weight.shape[1] != out_c:
            raise ValueError("fc_weight input size does not match conv output channels")
        if self.fc_bias.shape != (self.fc_weight.shape[0],):
            raise ValueError("fc_bias shape does not match fc_weight")

    @property
    def config(self) -> ModelConfig:
        out_c, in_c, kernel = self.conv_weight.shape
        return ModelConfig(in_c, out_c, kernel, self.fc_weight.shape[0])

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "conv_weight": self.conv_weight,
            "conv_bias": self.conv_bias,
            "fc_weight": self.fc_weight,
            "fc_bias": self.fc_bias,
        }


@dataclass(frozen=True)
class Gradients:
    conv_weight: np.ndarray
    conv_bias: np.ndarray
    fc_weight: np.ndarray
    fc_bias: np.ndarray

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "conv_weight": self.conv_weight,
            "conv_bias": self.conv_bias,
            "fc_weight": self.fc_weight,
            "fc_bias": self.fc_bias,
        }


@dataclass(frozen=True)
class ForwardCache:
    input: np.ndarray
    conv_pre_act: np.ndarray
    relu_mask: np.ndarray
    dropout_mask: np.ndarray  # inverted-dropout scaling baked in; all-ones in eval
    pooled: np.ndarray
    logits: np.ndarray
    probs: np.ndarray
    mode: str


def init_params(seed: int, config: ModelConfig = ModelConfig()) -> ModelParams:
    """Uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] weights, zero biases."""
    rng = np.random.default_rng(seed)
    s_conv = 1.0 / np.sqrt(config.in_channels * config.kernel)
    s_fc = 1.0 / np.sqrt(config.out_channels)
    return ModelParams(
        conv_weight=rng.uniform(
            -s_conv, s_conv, size=(config.out_channels, config.in_channels, config.kernel)
        ),
        conv_bias=np.zeros(config.out_channels),
        fc_weight=rng.uniform(-s_fc, s_fc, size=(config.classes, config.out_channels)),
        fc_bias=np.zeros(config.classes),
    )


def param_count(params: ModelParams) -> dict[str, int]:
    return {
        "conv": params.conv_weight.size + params.conv_bias.size,
        "fc": params.fc_weight.size + params.fc_bias.size,
    }


def _padded_windows(x: np.ndarray, kernel: int) -> np.ndarray:
    """Zero-pad (kernel-1)/2 per side and return sliding windows [in, T, K]."""
    pad = (kernel - 1) // 2
    xp = np.pad(x, ((0, 0), (pad, pad)))
    return sliding_window_view(xp, kernel, axis=1)


def conv1d_same(params: ModelParams, x: np.ndarray) -> np.ndarray:
    """Cross-correlation with stride 1 and symmetric zero padding; output [out, T]."""
    x = np.asarray(x, dtype=np.float64)
    out_c, in_c, kernel = params.conv_weight.shape
    if x.ndim != 2 or x.shape[0] != in_c:
        raise ValueError(f"input must be [in_channels={in_c}, T], got shape {x.shape}")
    windows = _padded_windows(x, kernel)  # [in, T, K]
    t = x.shape[1]
    # single GEMM: [out, in*K] @ [in*K, T]
    xm = windows.transpose(0, 2, 1).reshape(in_c * kernel, t)
    y = params.conv_weight.reshape(out_c, in_c * kernel) @ xm
    return y + params.conv_bias[:, None]


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.exp(logits - np.max(logits))
    return z / z.sum()


def forward(
    params: ModelParams,
    x: np.ndarray,
    mode: str = "eval",
    rng: np.random.Generator | None = None,
    dropout_rate: float = DROPOUT_RATE,
) -> ForwardCache:
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite values in model input")
    pre = conv1d_same(params, x)
    relu_mask = pre > 0
    h = pre * relu_mask
    if mode == "train" and dropout_rate > 0:
        if rng is None:
            raise ValueError("train-mode forward needs an RNG for dropout")
        keep = rng.random(h.shape) >= dropout_rate
        dropout_mask = keep / (1.0 - dropout_rate)
    else:
        dropout_mask = np.ones_like(h)
    h = h * dropout_mask
    pooled = h.mean(axis=1)
    logits = params.fc_weight @ pooled + params.fc_bias
    return ForwardCache(
        input=x,
        conv_pre_act=pre,
        relu_mask=relu_mask,
        dropout_mask=dropout_mask,
        pooled=pooled,
        logits=logits,
        probs=softmax(logits),
        mode=mode,
    )


def backward(cache: ForwardCache, params: ModelParams, grad_logits: np.ndarray) -> Gradients:
    """Exact parameter gradients of the logit-weighted loss for one input."""
    out_c, in_c, kernel = params.conv_weight.shape
    if cache.conv_pre_act.shape[0] != out_c or cache.input.shape[0] != in_c:
        raise ValueError("forward cache does not match these parameters")
    grad_logits = np.asarray(grad_logits, dtype=np.float64)
    t = cache.input.shape[1]

    d_fc_weight = np.outer(grad_logits, cache.pooled)
    d_fc_bias = grad_logits.copy()

    d_pooled = params.fc_weight.T @ grad_logits  # [out]
    # pool is a mean, so the upstream gradient spreads uniformly over time
    d_pre = (d_pooled[:, None] / t) * cache.dropout_mask * cache.relu_mask

    d_conv_bias = d_pre.sum(axis=1)
    windows = _padded_windows(cache.input, kernel)  # [in, T, K]
    xm = windows.transpose(0, 2, 1).reshape(in_c * kernel, t)
    d_conv_weight = (d_pre @ xm.T).reshape(out_c, in_c, kernel)

    return Gradients(
        conv_weight=d_conv_weight,
        conv_bias=d_conv_bias,
        fc_weight=d_fc_weight,
        fc_bias=d_fc_bias,
    )
