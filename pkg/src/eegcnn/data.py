"""Subject CSV loading, epoch segmentation and subject-level dataset splits."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Positive class is PD throughout the package.
LABEL_CODES = {"Control": 0, "PD": 1}
LABEL_NAMES = {v: k for k, v in LABEL_CODES.items()}


class ManifestError(ValueError):
    """Malformed or inconsistent dataset manifest."""


class CsvFormatError(ValueError):
    """Malformed subject CSV; message carries the offending row/column."""


@dataclass(frozen=True)
class ManifestEntry:
    subject_id: str
    file: str
    label: int


@dataclass(frozen=True)
class Manifest:
    entries: list[ManifestEntry]
    fs: float
    channel_names: list[str]

    def __post_init__(self):
        ids = [e.subject_id for e in self.entries]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ManifestError(f"duplicate subject ids in manifest: {dupes}")
        if self.fs <= 0:
            raise ManifestError(f"sampling rate must be positive, got {self.fs}")


@dataclass(frozen=True)
class SubjectRecording:
    subject_id: str
    label: int
    fs: float
    samples: np.ndarray  # [channels, time], microvolts

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise ValueError(f"samples must be 2D [channels, time], got ndim={self.samples.ndim}")
        if self.samples.shape[0] < 1:
            raise ValueError("recording needs at least one channel")
        if self.fs <= 0:
            raise ValueError(f"sampling rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError(f"non-finite sample values in subject {self.subject_id}")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class Epoch:
    data: np.ndarray  # [channels, epoch_len]
    label: int
    subject_id: str
    epoch_index: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.data)):
            raise ValueError(f"non-finite values in epoch {self.epoch_index} of {self.subject_id}")


@dataclass(frozen=True)
class DatasetSplit:
    train: list[Epoch]
    validation: list[Epoch]
    test: list[Epoch]
    seed: int
    subject_assignment: dict[str, str] = field(default_factory=dict)

    def partition(self, name: str) -> list[Epoch]:
        return {"train": self.train, "validation": self.validation, "test": self.test}[name]


def load_manifest(path: str | Path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON ({exc})") from exc
    for key in ("fs", "channels", "subjects"):
        if key not in raw:
            raise ManifestError(f"{path}: missing manifest key '{key}'")
    entries = []
    for i, sub in enumerate(raw["subjects"]):
        for key in ("id", "file", "label"):
            if key not in sub:
                raise ManifestError(f"{path}: subject #{i} missing '{key}'")
        if sub["label"] not in LABEL_CODES:
            raise ManifestError(
                f"{path}: subject {sub['id']} has unknown label {sub['label']!r}; "
                f"expected one of {sorted(LABEL_CODES)}"
            )
        entries.append(ManifestEntry(str(sub["id"]), str(sub["file"]), LABEL_CODES[sub["label"]]))
    return Manifest(entries=entries, fs=float(raw["fs"]), channel_names=list(raw["channels"]))


def load_subject_csv(path: str | Path, entry: ManifestEntry, manifest: Manifest) -> SubjectRecording:
    """Load one subject CSV (header row of channel names, one row per time sample)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"subject file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        n_channels = len(header)
        if n_channels != len(manifest.channel_names):
            raise CsvFormatError(
                f"{path}: {n_channels} channels in header, manifest declares "
                f"{len(manifest.channel_names)}"
            )
        rows = []
        for row_idx, row in enumerate(reader, start=1):
            if len(row) != n_channels:
                raise CsvFormatError(
                    f"{path}: row {row_idx} has {len(row)} cells, expected {n_channels}"
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                for col_idx, cell in enumerate(row):
                    try:
                        float(cell)
                    except ValueError:
                        raise CsvFormatError(
                            f"{path}: non-numeric cell {cell!r} at row {row_idx}, "
                            f"column {col_idx} ({header[col_idx]})"
                        ) from None
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    samples = np.asarray(rows, dtype=np.float64).T  # [channels, time]
    return SubjectRecording(
        subject_id=entry.subject_id, label=entry.label, fs=manifest.fs, samples=samples
    )


def write_subject_csv(path: str | Path, rec: SubjectRecording, channel_names: list[str]) -> None:
    """Inverse of load_subject_csv; uses repr precision so reloads are exact."""
    if len(channel_names) != rec.channels:
        raise ValueError(f"{len(channel_names)} channel names for {rec.channels} channels")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(channel_names)
        for row in rec.samples.T:
            writer.writerow([repr(v) for v in row.tolist()])


def epoch_recording(rec: SubjectRecording, epoch_seconds: float = 5.0) -> list[Epoch]:
    """Segment a recording into non-overlapping epochs; trailing remainder is dropped."""
    n_float = epoch_seconds * rec.fs
    epoch_len = int(round(n_float))
    if epoch_len <= 0 or abs(n_float - epoch_len) > 1e-9:
        raise ValueError(
            f"epoch_seconds * fs must be a positive integer, got {epoch_seconds} * {rec.fs}"
        )
    n_epochs = rec.n_samples // epoch_len
    return [
        Epoch(
            data=rec.samples[:, i * epoch_len : (i + 1) * epoch_len].copy(),
            label=rec.label,
            subject_id=rec.subject_id,
            epoch_index=i,
        )
        for i in range(n_epochs)
    ]


def split_dataset(
    subjects: list[SubjectRecording],
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
    epoch_seconds: float = 5.0,
) -> DatasetSplit:
    """Subject-level train/validation/test split.

    Subjects are sorted by id before the seeded shuffle so the split does not
    depend on manifest order. Train and validation sizes use round(); the
    remainder goes to test.
    """
    if any(r <= 0 for r in ratios):
        raise ValueError(f"all split ratios must be positive, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    if len(subjects) < 3:
        raise ValueError(f"need at least 3 subjects to form 3 partitions, got {len(subjects)}")

    ordered = sorted(subjects, key=lambda s: s.subject_id)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(ordered))
    shuffled = [ordered[i] for i in perm]

    n = len(shuffled)
    n_train = int(round(ratios[0] * n))
    n_val = int(round(ratios[1] * n))
    groups = {
        "train": shuffled[:n_train],
        "validation": shuffled[n_train : n_train + n_val],
        "test": shuffled[n_train + n_val :],
    }
    assignment = {}
    parts: dict[str, list[Epoch]] = {}
    for name, subs in groups.items():
        parts[name] = []
        for sub in subs:
            assignment[sub.subject_id] = name
            parts[name].extend(epoch_recording(sub, epoch_seconds))
    return DatasetSplit(
        train=parts["train"],
        validation=parts["validation"],
        test=parts["test"],
        seed=seed,
        subject_assignment=assignment,
    )
