import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

from vaesynth.dataio.csvio import write_csv
from vaesynth.evalkit.classifier import Classifier, predict
from vaesynth.synthgen.preprocess import LabeledImages

CSV_HEADER = ["class", "precision", "recall", "f1", "support"]


@dataclass
class ConfusionMatrix:
    """
    Counts of (actual, predicted) class pairs.

    Attributes:
        counts (np.ndarray): (|C|, |C|) non-negative integers; rows are actual classes, columns predictions.
        classes (List[str]): Class names in index order.
    """
    counts: np.ndarray
    classes: List[str]

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        k = len(self.classes)
        if self.counts.shape != (k, k):
            raise ValueError(f"Confusion matrix of {k} classes must be ({k}, {k}), got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("Confusion matrix counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_predictions(cls, actual, predicted, classes: List[str]) -> 'ConfusionMatrix':
        counts = confusion_matrix(np.asarray(actual, dtype=np.int64), np.asarray(predicted, dtype=np.int64),
                                  labels=np.arange(len(classes)))
        return cls(counts, list(classes))

    def pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        """The (actual, predicted) label arrays the counts tally, in row-major cell order."""
        cells = np.repeat(np.arange(self.counts.size), self.counts.ravel())
        return np.divmod(cells, len(self.classes))

    def to_dict(self) -> Dict:
        return {"classes": list(self.classes), "counts": self.counts.tolist()}


def confusion(classifier: Classifier, test_set: LabeledImages) -> ConfusionMatrix:
    """
    Tally the predictions of a classifier on labeled images.

    :raises ValueError: If the test set is empty.
    """
    if len(test_set) == 0:
        raise ValueError("The test set is empty")
    return ConfusionMatrix.from_predictions(test_set.y, predict(classifier, test_set.x), classifier.classes)


@dataclass
class MetricsReport:
    """
    Per-class precision, recall and F1 with their unweighted means and the overall accuracy.
    """
    classes: List[str]
    precision: List[float]
    recall: List[float]
    f1: List[float]
    support: List[int]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float

    def to_dict(self) -> Dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "classes": {c: {"precision": p, "recall": r, "f1": f, "support": s}
                        for c, p, r, f, s in zip(self.classes, self.precision, self.recall, self.f1, self.support)},
        }

    def to_json(self, path: Path) -> None:
        with open(path, "w", newline="\n") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    def to_csv(self, path: Path) -> None:
        """Write one (class, precision, recall, f1, support) row per class."""
        rows = [list(r) for r in zip(self.classes, self.precision, self.recall, self.f1, self.support)]
        write_csv(rows, CSV_HEADER, path)


def metrics_from_confusion(m: ConfusionMatrix) -> MetricsReport:
    """
    One-vs-rest metrics of a confusion matrix.

        precision = TP / (TP + FP)
        recall    = TP / (TP + FN)
        f1        = 2 · precision · recall / (precision + recall)

    A zero denominator gives 0.

    :raises ValueError: If the matrix is empty.
    """
    if m.total == 0:
        raise ValueError("Cannot compute metrics of an empty confusion matrix")
    actual, predicted = m.pairs()
    precision, recall, f1, _ = precision_recall_fscore_support(actual, predicted, labels=np.arange(len(m.classes)),
                                                              average=None, zero_division=0)
    return MetricsReport(
        classes=list(m.classes),
        precision=precision.tolist(),
        recall=recall.tolist(),
        f1=f1.tolist(),
        support=m.counts.sum(axis=1).tolist(),
        macro_precision=float(precision.mean()),
        macro_recall=float(recall.mean()),
        macro_f1=float(f1.mean()),
        accuracy=float(np.trace(m.counts) / m.total),
    )
