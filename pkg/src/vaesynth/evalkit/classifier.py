"""
Small fully connected image classifier trained from scratch on the numcore operators.

    flatten → dense(hidden) → ReLU → dense(|C|) → softmax cross-entropy
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np

from vaesynth.numcore.optim import DEFAULT_LEARNING_RATE, adam_step
from vaesynth.numcore.params import ParamSet
from vaesynth.numcore.rng import Rng
from vaesynth.numcore.tape import Tape
from vaesynth.numcore.tensor import NumericMode, Tensor
from vaesynth.synthgen.preprocess import LabeledImages

logger = logging.getLogger(__name__)


@dataclass
class ClassifierConfig:
    """
    Attributes:
        hidden (int): Width of the hidden layer.
        learning_rate (float): Adam learning rate.
        batch_size (int): Images per optimizer step.
        max_epochs (int): Upper bound on the number of epochs.
        patience (int): Epochs without a better validation accuracy before training stops.
        seed (int): Seed of the initialization and shuffle streams.
        mode (NumericMode): Numeric mode of the weights.
    """
    hidden: int = 64
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = 32
    max_epochs: int = 200
    patience: int = 10
    seed: int = 0
    mode: NumericMode = NumericMode.STANDARD

    def __post_init__(self):
        for name in ("hidden", "batch_size", "max_epochs", "patience"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


@dataclass
class Classifier:
    """
    Trained classifier.

    Attributes:
        params (ParamSet): Weights of the epoch with the best selection accuracy.
        classes (List[str]): Class names in label order.
        input_size (int): Number of pixels per image.
        best_epoch (int): Epoch the weights were taken from.
        best_accuracy (float): Selection accuracy of that epoch.
        epochs_run (int): Number of epochs trained before stopping.
    """
    params: ParamSet
    classes: List[str]
    input_size: int
    best_epoch: int = 0
    best_accuracy: float = 0.0
    epochs_run: int = 0
    history: List[float] = field(default_factory=list, repr=False)


def _flatten(x, mode: NumericMode) -> np.ndarray:
    x = np.asarray(x, dtype=mode.dtype)
    return x.reshape(x.shape[0], -1)


def _init_params(input_size: int, hidden: int, n_classes: int, cfg: ClassifierConfig) -> ParamSet:
    gen = Rng(cfg.seed).stream("classifier/init")
    params = ParamSet(cfg.mode)
    params.add("hidden.w", gen.standard_normal((input_size, hidden)) * np.sqrt(2.0 / input_size))
    params.add("hidden.b", np.zeros(hidden))
    params.add("out.w", gen.standard_normal((hidden, n_classes)) * np.sqrt(2.0 / hidden))
    params.add("out.b", np.zeros(n_classes))
    return params


def _logits(params: ParamSet, x: np.ndarray, tape: Tape) -> Tensor:
    h = tape.apply("relu", tape.apply("add_bias", tape.apply("matmul", x, params["hidden.w"]), params["hidden.b"]))
    return tape.apply("add_bias", tape.apply("matmul", h, params["out.w"]), params["out.b"])


def predict_logits(classifier: Classifier, x) -> np.ndarray:
    """
    Class scores of a batch.

    :param classifier: The classifier.
    :param x: (N, ...) images with `input_size` pixels each.
    :return: (N, |C|) logits.
    """
    flat = _flatten(x, classifier.params.mode)
    if flat.shape[1] != classifier.input_size:
        raise ValueError(f"Classifier expects {classifier.input_size} pixels per image, got {flat.shape[1]}")
    return _logits(classifier.params, flat, Tape(enabled=False)).data


def predict(classifier: Classifier, x) -> np.ndarray:
    """Predicted class index per image; ties go to the lowest class index."""
    return np.argmax(predict_logits(classifier, x), axis=1)


def _accuracy(params: ParamSet, x: np.ndarray, y: np.ndarray) -> float:
    pred = np.argmax(_logits(params, x, Tape(enabled=False)).data, axis=1)
    return float(np.mean(pred == y))


def train_classifier(train_set: LabeledImages, val_set: LabeledImages | None,
                     cfg: ClassifierConfig | None = None) -> Classifier:
    """
    Train a classifier with Adam and early stopping on validation accuracy.

    Training stops after `cfg.patience` epochs without a strictly better accuracy or after
    `cfg.max_epochs`; the weights of the best epoch are returned. Without validation images the
    training accuracy is used for selection.

    :param train_set: Training images and labels.
    :param val_set: Validation images and labels, may be empty or None.
    :param cfg: Classifier configuration.
    :return: The classifier.
    :raises ValueError: If the training data holds fewer than 2 classes.
    """
    cfg = cfg or ClassifierConfig()
    classes = list(train_set.classes)
    if len(classes) < 2 or np.unique(train_set.y).size < 2:
        raise ValueError("A classifier needs training images of at least 2 classes")
    x = _flatten(train_set.x, cfg.mode)
    y = np.asarray(train_set.y, dtype=np.int64)
    if val_set is not None and len(val_set) > 0:
        x_sel, y_sel, selection = _flatten(val_set.x, cfg.mode), np.asarray(val_set.y, dtype=np.int64), "validation"
    else:
        x_sel, y_sel, selection = x, y, "training"
    n, input_size = x.shape
    params = _init_params(input_size, cfg.hidden, len(classes), cfg)
    shuffle = Rng(cfg.seed).stream("classifier/shuffle")
    best = params.copy()
    best_accuracy, best_epoch, waited = -1.0, 0, 0
    history: List[float] = []
    epoch = 0
    logger.info("training classifier on %d images of %d classes, selecting on %s accuracy", n, len(classes),
                selection)
    for epoch in range(1, cfg.max_epochs + 1):
        order = shuffle.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            tape = Tape()
            loss = tape.apply("softmax_cross_entropy", _logits(params, x[idx], tape), labels=y[idx])
            tape.backward(loss)
            adam_step(params, lr=cfg.learning_rate)
        accuracy = _accuracy(params, x_sel, y_sel)
        history.append(accuracy)
        logger.info("classifier epoch %d: %s accuracy %.4f", epoch, selection, accuracy)
        if accuracy > best_accuracy:
            best, best_accuracy, best_epoch, waited = params.copy(), accuracy, epoch, 0
        else:
            waited += 1
            if waited >= cfg.patience:
                break
    logger.info("classifier stopped after %d epochs, best %s accuracy %.4f at epoch %d", epoch, selection,
                best_accuracy, best_epoch)
    return Classifier(best, classes, input_size, best_epoch, best_accuracy, epoch, history)
