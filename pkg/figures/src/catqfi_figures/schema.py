"""Reading and validating the sweep CSV contract."""
from __future__ import annotations

import csv
from dataclasses import dataclass

EXPECTED_HEADER = ["experiment", "state", "alpha", "delta_alpha", "eta",
                   "chi", "lo_mag", "value", "value2"]


class SchemaError(Exception):
    """Input CSV does not match the sweep output contract."""


@dataclass(frozen=True)
class Row:
    experiment: str
    state: str
    alpha: float | None
    delta_alpha: float | None
    eta: float | None
    chi: float | None
    lo_mag: float | None
    value: float
    value2: float | None


def _num(text):
    return None if text == "" else float(text)


def read_rows(path):
    """Parse one sweep CSV into Row records, or raise SchemaError."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != EXPECTED_HEADER:
            raise SchemaError(
                f"{path}: header {','.join(header)!r} does not match the "
                "sweep contract")
        rows = []
        for k, rec in enumerate(reader, start=2):
            if len(rec) != len(EXPECTED_HEADER):
                raise SchemaError(
                    f"{path}:{k}: expected {len(EXPECTED_HEADER)} fields, "
                    f"got {len(rec)}")
            try:
                numbers = [_num(x) for x in rec[2:]]
            except ValueError as exc:
                raise SchemaError(f"{path}:{k}: {exc}") from None
            if numbers[5] is None:
                raise SchemaError(f"{path}:{k}: value column is empty")
            rows.append(Row(rec[0], rec[1], *numbers))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def require_experiment(rows, name, path):
    bad = {r.experiment for r in rows if r.experiment != name}
    if bad:
        raise SchemaError(
            f"{path}: expected {name!r} rows, found {sorted(bad)}")


def series(rows, state, x_field, y_field="value"):
    """(x, y) arrays for one state, in file order; empty state is an error."""
    import numpy as np

    pts = [(getattr(r, x_field), getattr(r, y_field))
           for r in rows if r.state == state]
    if not pts:
        raise SchemaError(f"no rows for state {state!r}")
    xs, ys = zip(*pts)
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
