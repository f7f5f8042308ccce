from typing import Any, Dict, List, Sequence

from vaesynth.dataio.csvio import format_value


class TableFormatter:
    """
    Formats rows as a Markdown table with columns padded to the widest cell.

    Example usage:

    ```python
    fmt = TableFormatter({"class": "Class", "f1": "F1"})
    fmt.set_widths(rows)
    text = fmt.table(rows)
    ```
    """

    def __init__(self, column_names: Dict[str, str]):
        self._column_names = dict(column_names)
        self._widths = {key: max(len(name), 3) for key, name in self._column_names.items()}

    def set_widths(self, rows: Sequence[Dict[str, Any]]):
        for row in rows:
            for key in self._column_names:
                n = len(self.cell(row, key))
                if n > self._widths[key]:
                    self._widths[key] = n

    @staticmethod
    def cell(row: Dict[str, Any], key: str) -> str:
        value = row.get(key, "")
        return "n/a" if value is None else str(format_value(value))

    def header(self) -> str:
        names = " | ".join(f"{self._column_names[key]:<{self._widths[key]}}" for key in self._column_names)
        rule = " | ".join("-" * self._widths[key] for key in self._column_names)
        return f"| {names} |\n| {rule} |"

    def value(self, row: Dict[str, Any]) -> str:
        return "| " + " | ".join(f"{self.cell(row, key):<{self._widths[key]}}" for key in self._column_names) + " |"

    def values(self, rows: Sequence[Dict[str, Any]]) -> str:
        return "\n".join(self.value(row) for row in rows)

    def table(self, rows: Sequence[Dict[str, Any]]) -> str:
        self.set_widths(rows)
        return f"{self.header()}\n{self.values(rows)}" if rows else self.header()


def key_value_table(pairs: Dict[str, Any], key_name: str = "Quantity", value_name: str = "Value") -> str:
    rows = [{"key": k, "value": v} for k, v in pairs.items()]
    return TableFormatter({"key": key_name, "value": value_name}).table(rows)


def format_report(train_summary: Dict, generation: Dict, rotation: Dict, latent: Dict, metrics: Dict,
                  comparison: Dict | None = None) -> str:
    """
    Markdown summary of a pipeline run: training, generation, latent space and classifier metrics.

    Durations and timestamps are left out so the same artifacts always give the same text.
    """
    lines: List[str] = ["# vaesynth run report", ""]

    lines += ["## Training", ""]
    final = train_summary["final"]
    training = {"epochs": final["epoch"], "final total loss": final["total"],
                "final reconstruction loss": final["reconstruction"], "final weight decay": final["weight_decay"],
                "final KLD": final["kld"], "sum of squared parameters": train_summary["param_sum_square"]}
    test_loss = train_summary.get("test_loss")
    if test_loss:
        training["test reconstruction loss"] = test_loss["reconstruction"]
        training["test KLD"] = test_loss["kld"]
        training["test total loss"] = test_loss["total"]
    lines += [key_value_table(training), "", "![loss curve](loss_curve.svg)", ""]

    lines += ["## Generated datasets", ""]
    rows = []
    for method, report in (("vae", generation), ("rotation", rotation)):
        for name, counts in report["classes"].items():
            rows.append({"method": method, "class": name, "originals": counts["originals"],
                         "synthetics": counts["synthetics"], "total": counts["originals"] + counts["synthetics"]})
    fmt = TableFormatter({"method": "Method", "class": "Class", "originals": "Originals",
                          "synthetics": "Synthetics", "total": "Total"})
    lines += [fmt.table(rows), ""]

    lines += ["## Latent space", ""]
    lines += [key_value_table({"projection": latent["method"],
                               "separation ratio (latent means)": latent["separation_latent"],
                               "separation ratio (2-D projection)": latent["separation_projection"]}),
              "", "![latent projection](latent.svg)", ""]

    lines += ["## Classifier", ""]
    m = metrics["metrics"]
    rows = [{"class": c, "precision": v["precision"], "recall": v["recall"], "f1": v["f1"], "support": v["support"]}
            for c, v in m["classes"].items()]
    rows.append({"class": "macro average", "precision": m["macro_precision"], "recall": m["macro_recall"],
                 "f1": m["macro_f1"], "support": sum(v["support"] for v in m["classes"].values())})
    fmt = TableFormatter({"class": "Class", "precision": "Precision", "recall": "Recall", "f1": "F1-Score",
                          "support": "Support"})
    lines += [fmt.table(rows), "", f"Test accuracy: {format_value(float(m['accuracy']))}", ""]

    if comparison is not None:
        lines += ["## Traditional versus proposed loss", ""]
        rows = [{"run": name, **{k: v for k, v in values.items() if k in ("final_total", "test_total", "separation")}}
                for name, values in comparison.items()]
        fmt = TableFormatter({"run": "Run", "final_total": "Final training loss", "test_total": "Test loss",
                              "separation": "Separation ratio"})
        lines += [fmt.table(rows), "", "![comparison](comparison.svg)", ""]
    return "\n".join(lines)
