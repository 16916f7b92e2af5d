"""Synthetic two-class datasets for demos and end-to-end checks.

Class 0 subjects carry a sinusoid at f0, class 1 at f1, buried in Gaussian
noise at a chosen SNR. Phases are random per channel and the tones share no
timing across subjects, so the only class signal is spectral.
"""

from __future__ import annotations

import numpy as np

from .data import SubjectRecording


def synthetic_subject(
    subject_id: str,
    label: int,
    tone_hz: float,
    rng: np.random.Generator,
    channels: int = 8,
    fs: float = 500.0,
    n_epochs: int = 12,
    epoch_seconds: float = 5.0,
    snr_db: float = 0.0,
) -> SubjectRecording:
    n = int(round(n_epochs * epoch_seconds * fs))
    t = np.arange(n) / fs
    phases = rng.uniform(0, 2 * np.pi, size=channels)
    tone = np.sin(2 * np.pi * tone_hz * t[None, :] + phases[:, None])
    # unit-amplitude tone has power 1/2; scale noise to hit the target SNR
    noise_std = np.sqrt(0.5 / 10 ** (snr_db / 10))
    samples = tone + noise_std * rng.standard_normal((channels, n))
    return SubjectRecording(subject_id=subject_id, label=label, fs=fs, samples=samples)


def synthetic_dataset(
    n_subjects: int = 20,
    channels: int = 8,
    fs: float = 500.0,
    n_epochs: int = 12,
    f0: float = 10.0,
    f1: float = 25.0,
    snr_db: float = 0.0,
    seed: int = 0,
) -> list[SubjectRecording]:
    """Balanced list of pseudo-subjects; even indices class 0, odd class 1."""
    rng = np.random.default_rng(seed)
    subjects = []
    for i in range(n_subjects):
        label = i % 2
        subjects.append(
            synthetic_subject(
                subject_id=f"S{i:03d}",
                label=label,
                tone_hz=f1 if label else f0,
                rng=rng,
                channels=channels,
                fs=fs,
                n_epochs=n_epochs,
                snr_db=snr_db,
            )
        )
    return subjects
