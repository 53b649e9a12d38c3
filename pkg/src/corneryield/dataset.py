"""Labeled sample container shared by the selector, surrogates, and pipeline.

Rows are ((x, corner), y) observations accumulated across corners.  Feature
columns are indexed 0..D-1 for process parameters and D..D+p-1 for the corner
encoding; that convention is used by feature selection throughout.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


class Dataset:
    def __init__(self, X: np.ndarray, corner_ids, corner_enc: np.ndarray, y: np.ndarray):
        self.X = np.atleast_2d(np.asarray(X, dtype=float))
        self.corner_ids = list(corner_ids)
        self.corner_enc = np.atleast_2d(np.asarray(corner_enc, dtype=float))
        self.y = np.asarray(y, dtype=float).ravel()
        n = self.X.shape[0]
        if not (len(self.corner_ids) == self.corner_enc.shape[0] == self.y.size == n):
            raise ValueError("misaligned dataset columns")

    @classmethod
    def empty(cls, dimension: int, encoding_length: int) -> "Dataset":
        return cls(np.empty((0, dimension)), [], np.empty((0, encoding_length)),
                   np.empty(0))

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    @property
    def encoding_length(self) -> int:
        return self.corner_enc.shape[1]

    def extended(self, X, corner_ids, corner_enc, y) -> "Dataset":
        """New dataset with rows appended (the original is left untouched)."""
        other = Dataset(X, corner_ids, corner_enc, y)
        if len(self) == 0:
            return other
        return Dataset(
            np.vstack([self.X, other.X]),
            self.corner_ids + other.corner_ids,
            np.vstack([self.corner_enc, other.corner_enc]),
            np.concatenate([self.y, other.y]),
        )

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.X[idx], [self.corner_ids[i] for i in idx],
                       self.corner_enc[idx], self.y[idx])

    def rows_for_corner(self, corner_id: str) -> np.ndarray:
        return np.array([i for i, c in enumerate(self.corner_ids) if c == corner_id],
                        dtype=int)

    def counts_per_corner(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.corner_ids:
            counts[c] = counts.get(c, 0) + 1
        return counts

    def feature_matrix(self) -> np.ndarray:
        """All D+p feature columns: process parameters then corner encoding."""
        return np.hstack([self.X, self.corner_enc])

    def joint_inputs(self, x_indices) -> np.ndarray:
        """Surrogate inputs: selected process parameters then corner encoding."""
        x_indices = np.asarray(x_indices, dtype=int)
        return np.hstack([self.X[:, x_indices], self.corner_enc])

    def to_csv(self, path) -> None:
        d, p = self.dimension, self.encoding_length
        header = (
            [f"x_{j + 1}" for j in range(d)]
            + ["corner_id"]
            + [f"corner_enc_{j + 1}" for j in range(p)]
            + ["y"]
        )
        lines = [",".join(header)]
        for i in range(len(self)):
            cells = [repr(v) for v in self.X[i]]
            cells.append(self.corner_ids[i])
            cells.extend(repr(v) for v in self.corner_enc[i])
            cells.append(repr(self.y[i]))
            lines.append(",".join(cells))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        lines = Path(path).read_text().strip().splitlines()
        header = lines[0].split(",")
        d = sum(1 for h in header if h.startswith("x_"))
        p = sum(1 for h in header if h.startswith("corner_enc_"))
        X, ids, enc, y = [], [], [], []
        for line in lines[1:]:
            cells = line.split(",")
            X.append([float(v) for v in cells[:d]])
            ids.append(cells[d])
            enc.append([float(v) for v in cells[d + 1:d + 1 + p]])
            y.append(float(cells[-1]))
        if not X:
            return cls.empty(d, p)
        return cls(np.array(X), ids, np.array(enc), np.array(y))
