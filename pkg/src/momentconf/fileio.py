"""CSV and JSON readers/writers used by the harness and CLI."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError
from .models import ConfoundedModel, Dataset


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Read a headered numeric CSV into (column names, float matrix).

    Raises:
        ParseError: missing header, ragged rows or non-numeric cells. Row
            numbers count the header as row 1.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        if not header or any(h == "" for h in header):
            raise ParseError("header row has empty column names", row=1)
        if len(set(header)) != len(header):
            raise ParseError("duplicate column names in header", row=1)
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(cell.strip() == "" for cell in raw):
                continue
            if len(raw) != len(header):
                raise ParseError(f"expected {len(header)} cells, found {len(raw)}", row=lineno)
            vals = []
            for name, cell in zip(header, raw):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric value {cell!r}", row=lineno, column=name) from None
                if not np.isfinite(v):
                    raise ParseError(f"non-finite value {cell!r}", row=lineno, column=name)
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path} has no data rows")
    return header, np.array(rows, dtype=float)


def load_dataset(path, target: str, drop: Sequence[str] = ()) -> Dataset:
    header, table = read_table(path)
    if target not in header:
        raise ParseError(f"target column {target!r} not found")
    missing = [d for d in drop if d not in header]
    if missing:
        raise ParseError(f"columns to drop not found: {missing}")
    if target in drop:
        raise ParseError("cannot drop the target column", column=target)
    keep = [i for i, h in enumerate(header) if h != target and h not in drop]
    if not keep:
        raise ParseError("no feature columns left")
    return Dataset(
        table[:, keep],
        table[:, header.index(target)],
        columns=[header[i] for i in keep],
        target=target,
    )


def write_dataset(data: Dataset, path, target: str = "y") -> None:
    names = data.columns or [f"x{j + 1}" for j in range(data.n)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([*names, data.target or target])
        for row, yv in zip(data.X, data.y):
            w.writerow([repr(float(v)) for v in row] + [repr(float(yv))])


def write_model(model: ConfoundedModel, path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2))


def read_model(path) -> ConfoundedModel:
    return ConfoundedModel.from_dict(json.loads(Path(path).read_text()))


def write_rows(path, fieldnames: Sequence[str], rows: Iterable[dict]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fieldnames))
        w.writeheader()
        for r in rows:
            w.writerow(r)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, default=_jsonable))


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")
