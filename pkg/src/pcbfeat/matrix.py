"""The persisted feature matrix: regions x named features plus labels.

CSV is the interchange format between extraction and ranking: header row
is the feature names with a final ``label`` column, one row per region,
floats written as their shortest round-trip repr so re-runs are
byte-identical.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptyMatrixError
from .validation import check_feature_array

LABEL_COLUMN = "label"


@dataclass
class FeatureMatrix:
    """Rows = regions of one (image, ksize) pair, columns = named features."""

    feature_names: list
    X: np.ndarray
    labels: np.ndarray
    image_id: str
    ksize: int

    def __post_init__(self):
        self.X = check_feature_array(self.X, n_features=len(self.feature_names))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.X.shape[0] == 0:
            raise EmptyMatrixError(f"no regions for {self.image_id} k={self.ksize}")
        if self.labels.shape[0] != self.X.shape[0]:
            raise ValueError("label count does not match row count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("feature names are not unique")

    @property
    def n_regions(self):
        return self.X.shape[0]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(list(self.feature_names) + [LABEL_COLUMN])
            for row, label in zip(self.X, self.labels):
                writer.writerow([repr(float(v)) for v in row] + [int(label)])

    @classmethod
    def read_csv(cls, path, image_id, ksize):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if not header or header[-1] != LABEL_COLUMN:
                raise ValueError(f"{path}: missing trailing {LABEL_COLUMN!r} column")
            names = header[:-1]
            rows, labels = [], []
            for rec in reader:
                rows.append([float(v) for v in rec[:-1]])
                labels.append(int(rec[-1]))
        return cls(names, np.asarray(rows, dtype=np.float64),
                   np.asarray(labels, dtype=np.int64), image_id, int(ksize))
