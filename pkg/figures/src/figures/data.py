"""CSV ingestion for the solver's external table format.

The solver writes comma-separated tables with a single header row; empty
fields mean "not available" and are loaded as NaN.  This module is the only
place the figure code touches files, and it never writes to them.
"""

import csv

import numpy as np

__all__ = ["MissingColumnError", "Table", "read_table"]


class MissingColumnError(KeyError):
    """A requested column is absent from the CSV header."""

    def __init__(self, missing, available):
        self.missing = tuple(missing)
        self.available = tuple(available)
        super().__init__(
            f"missing column(s) {', '.join(self.missing)}; "
            f"available columns: {', '.join(self.available)}"
        )

    def __str__(self):  # KeyError quotes its argument; keep the message plain
        return self.args[0]


class Table:
    """Columnar view of one CSV file: header order plus float arrays."""

    def __init__(self, columns: dict):
        self.columns = {name: np.asarray(vals, dtype=float)
                        for name, vals in columns.items()}

    @property
    def names(self) -> tuple:
        return tuple(self.columns)

    @property
    def n_rows(self) -> int:
        return 0 if not self.columns else len(next(iter(self.columns.values())))

    def require(self, names) -> list:
        """Arrays for the named columns; raises MissingColumnError otherwise."""
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise MissingColumnError(missing, self.names)
        return [self.columns[n] for n in names]


def _parse_field(text: str) -> float:
    text = text.strip()
    if not text or text.lower() in ("nan", "null", "none"):
        return np.nan
    return float(text)


def read_table(path: str) -> Table:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(field.strip() for field in r)]
    if not rows:
        raise ValueError(f"{path}: no header row")
    header = [name.strip() for name in rows[0]]
    cols = {name: [] for name in header}
    for r in rows[1:]:
        if len(r) != len(header):
            raise ValueError(f"{path}: row has {len(r)} fields, header has "
                             f"{len(header)}")
        for name, field in zip(header, r):
            cols[name].append(_parse_field(field))
    return Table(cols)
