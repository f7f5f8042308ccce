from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd
from pandas import DataFrame

from vaesynth.dataio.csvio import write_csv
from vaesynth.dataio.svg import PALETTE, new_figure, save_svg

COLUMNS = ["epoch", "total", "reconstruction", "weight_decay", "kld"]


class LossCurve:
    """
    LossCurve holds the per-epoch mean losses of a training run.
    The records are kept in a DataFrame with one row per completed epoch.

    Example Usage:
        curve = LossCurve()
        curve.add(1, total=0.31, reconstruction=0.30, weight_decay=0.01, kld=4.2)
        curve.add(2, total=0.21, reconstruction=0.20, weight_decay=0.01, kld=3.9)
        print(curve.final())
    """
    data: DataFrame

    def __init__(self):
        self.data = pd.DataFrame({c: pd.Series(dtype="int64" if c == "epoch" else "float64") for c in COLUMNS})

    def add(self, epoch: int, total: float, reconstruction: float, weight_decay: float, kld: float):
        """
        Append the record of a completed epoch.

        :param epoch: 1-based epoch number.
        :param total: Mean total training loss over the epoch.
        :param reconstruction: Mean reconstruction loss.
        :param weight_decay: Mean weight decay term.
        :param kld: Mean KL divergence.
        :return: None
        """
        self.data.loc[self.data.shape[0]] = [epoch, total, reconstruction, weight_decay, kld]

    def size(self) -> int:
        return self.data.shape[0]

    def __len__(self):
        return self.size()

    def get(self, index: int) -> Dict[str, float]:
        """
        Returns the record at the given index.

        :param index: Row index; negative values count from the end.
        :return: Mapping of column name to value.
        """
        row = self.data.iloc[index]
        return {c: (int(row[c]) if c == "epoch" else float(row[c])) for c in COLUMNS}

    def final(self) -> Dict[str, float]:
        """
        Returns the record of the last epoch.

        :raises ValueError: If the curve is empty.
        """
        if self.size() == 0:
            raise ValueError("Loss curve has no records")
        return self.get(-1)

    def column(self, name: str) -> np.ndarray:
        return self.data[name].to_numpy(dtype=np.float64)

    def moving_average(self, column: str = "total", window: int = 10) -> np.ndarray:
        """
        Trailing moving average over complete windows.

        :param column: Loss column.
        :param window: Number of epochs per window.
        :return: size() - window + 1 averages; empty when the curve is shorter than the window.
        """
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        values = self.column(column)
        if values.size < window:
            return np.zeros(0)
        return np.convolve(values, np.ones(window) / window, mode="valid")

    def is_trend_non_increasing(self, column: str = "total", window: int = 10, rtol: float = 1e-3) -> bool:
        """
        Returns if the moving average of a column never rises by more than `rtol` relative between windows.

        :param column: Loss column.
        :param window: Moving average window.
        :param rtol: Relative slack for round-off and sampling noise.
        """
        ma = self.moving_average(column, window)
        return bool(np.all(ma[1:] <= ma[:-1] * (1 + rtol)))

    def to_dict(self) -> Dict:
        return {"data": [self.get(i) for i in range(self.size())]}

    @classmethod
    def from_dict(cls, data: Dict) -> 'LossCurve':
        try:
            curve = cls()
            for entry in data["data"]:
                curve.add(entry["epoch"], entry["total"], entry["reconstruction"], entry["weight_decay"],
                          entry["kld"])
            return curve
        except KeyError as e:
            raise ValueError(f"Invalid key in dictionary: {e}")

    def to_csv(self, path: Path) -> None:
        rows = [[r[c] for c in COLUMNS] for r in (self.get(i) for i in range(self.size()))]
        write_csv(rows, COLUMNS, path)

    @classmethod
    def read_csv(cls, path: Path) -> 'LossCurve':
        """
        Reads a curve written by `to_csv`.

        :raises ValueError: If a column is missing.
        """
        df = pd.read_csv(path)
        missing = [c for c in COLUMNS if c not in df.columns]
        if missing:
            raise ValueError(f"Loss curve file {path} misses columns: {', '.join(missing)}")
        return cls.from_dict({"data": df[COLUMNS].to_dict(orient="records")})

    def plot_svg(self, path: Path, title: str = "Training loss") -> None:
        """
        Plots every loss component against the epoch and saves the figure as SVG.

        :param path: Destination file.
        :param title: Figure title.
        """
        plot_loss_curves({c: self for c in COLUMNS[1:]}, path, title=title, columns=COLUMNS[1:])

    def __str__(self):
        return (f"Epochs: {self.size()},\n"
                f"Data:\n{self.data}\n"
                )


def plot_loss_curves(curves: Dict[str, LossCurve], path: Path, title: str = "Training loss",
                     columns: Sequence[str] | None = None) -> None:
    """
    Plots one line per curve; the loss axis is logarithmic when every plotted value is positive.

    :param curves: Label to curve. With `columns`, labels are paired with the columns in order and
                   every line shows that column of its curve; without, every line shows the total.
    :param path: Destination SVG file.
    :param title: Figure title.
    :param columns: Column plotted per label.
    """
    fig = new_figure(600, 400)
    ax = fig.add_subplot(1, 1, 1)
    labels: List[str] = list(curves)
    positive = True
    for i, label in enumerate(labels):
        curve = curves[label]
        values = curve.column(columns[i] if columns is not None else "total")
        positive = positive and bool(np.all(values > 0))
        ax.plot(curve.column("epoch"), values, color=PALETTE[i % len(PALETTE)], label=label)
    if positive:
        ax.set_yscale("log")
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax.set_title(title)
    ax.legend()
    save_svg(fig, path)
