"""Single-convolutional-layer classifier for multichannel EEG-style epochs,
with preprocessing, training, metrics and frequency-domain probing."""

from .data import (
    DatasetSplit,
    Epoch,
    Manifest,
    ManifestEntry,
    SubjectRecording,
    epoch_recording,
    load_manifest,
    load_subject_csv,
    split_dataset,
)
from .model import ModelConfig, ModelParams, forward, backward, init_params, param_count
from .preprocess import FilterCoeffs, PsdEstimate, apply_zero_phase, design_highpass, welch_psd
from .train import TrainConfig, TrainHistory, adam_step, cross_entropy, finite_diff_check, train
from .metrics import ConfusionMatrix, MetricsReport, confusion, evaluate, roc_auc, scalar_metrics
from .interpret import (
    FilterResponseMap,
    ProbeSpec,
    SensitivityMap,
    conv_filter_response,
    gen_sinusoid_probe,
    gen_white_noise,
    pooling_sensitivity,
)
from .experiments import AblationReport, SweepConfig, group_psd, run_sweep
from .checkpoint import load_checkpoint, save_checkpoint

__version__ = "0.1.0"
