from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

FLOAT_FORMAT = ".9g"


def format_value(value: Any) -> Any:
    """Format floats with 9 significant digits; other values are returned unchanged."""
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(rows: Sequence[Sequence[Any]], header: Sequence[str], path: Path) -> None:
    """
    Write rows as CSV with LF line endings, quoting only where needed.

    :param rows: Rows of values; every row must have as many values as the header.
    :param header: Column names.
    :param path: Destination file.
    :raises ValueError: If a row does not have the arity of the header.
    """
    header = list(header)
    formatted = []
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"Row {i} has {len(row)} values, header has {len(header)}")
        formatted.append([format_value(v) for v in row])
    df = pd.DataFrame(formatted, columns=header, dtype=object)
    df.to_csv(path, index=False, lineterminator="\n")


def read_csv(path: Path) -> pd.DataFrame:
    """Read a CSV written by `write_csv`."""
    return pd.read_csv(path)
