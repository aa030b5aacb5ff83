"""Labeled source and unlabeled target samples of a real covariate."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class UnlabeledSample:
    x: np.ndarray
    seed: object = None

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64).ravel()
        if x.size == 0:
            raise ValueError("sample is empty")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    def __len__(self):
        return self.x.shape[0]


@dataclass(frozen=True, eq=False)
class LabeledSample:
    x: np.ndarray
    y: np.ndarray
    seed: object = None

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64).ravel()
        y = np.array(self.y).ravel()
        if x.size == 0:
            raise ValueError("sample is empty")
        if y.shape != x.shape:
            raise ValueError("one label per covariate is required")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        y = y.astype(np.int8)
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.shape[0]

    def unlabeled(self) -> UnlabeledSample:
        return UnlabeledSample(self.x, self.seed)


def read_sample(path: str | Path) -> LabeledSample | UnlabeledSample:
    """One covariate per line, optionally followed by a 0/1 label.

    Columns may be separated by whitespace or a comma; blank lines and lines
    starting with ``#`` are skipped. Either every line carries a label or none.
    """
    xs, ys = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) not in (1, 2):
                raise ValueError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(parts)}")
            xs.append(float(parts[0]))
            if len(parts) == 2:
                ys.append(int(float(parts[1])))
    if ys and len(ys) != len(xs):
        raise ValueError(f"{path}: labels present on some lines only")
    return LabeledSample(xs, ys) if ys else UnlabeledSample(xs)


def write_sample(path: str | Path, sample: LabeledSample | UnlabeledSample):
    with open(path, "w") as fh:
        if isinstance(sample, LabeledSample):
            for x, y in zip(sample.x, sample.y):
                fh.write(f"{float(x)!r} {int(y)}\n")
        else:
            for x in sample.x:
                fh.write(f"{float(x)!r}\n")
