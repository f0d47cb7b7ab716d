"""Reading of the simulator's CSV schemas.

Files carry '#'-prefixed metadata lines, then one header row, then data.
All validation errors name the file (and line where applicable); nothing
is ever silently dropped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


class TableError(ValueError):
    """Malformed or unusable result file."""


@dataclass
class ResultTable:
    path: Path
    metadata: list[str]
    header: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> list[str]:
        if name not in self.header:
            raise TableError(
                f"{self.path}: missing column {name!r} (has {self.header})")
        idx = self.header.index(name)
        return [r[idx] for r in self.rows]

    def floats(self, name: str) -> list[float]:
        idx = self._index(name)
        out = []
        for i, row in enumerate(self.rows):
            try:
                out.append(float(row[idx]))
            except ValueError as exc:
                raise TableError(
                    f"{self.path}: row {i + 1}: bad {name!r} value "
                    f"{row[idx]!r}") from exc
        return out

    def _index(self, name: str) -> int:
        if name not in self.header:
            raise TableError(
                f"{self.path}: missing column {name!r} (has {self.header})")
        return self.header.index(name)

    def where(self, **filters: str) -> "ResultTable":
        """Rows whose named columns equal the given string values."""
        indices = {k: self._index(k) for k in filters}
        rows = [r for r in self.rows
                if all(r[indices[k]] == v for k, v in filters.items())]
        if not rows:
            raise TableError(
                f"{self.path}: no rows match {filters!r}")
        return ResultTable(self.path, self.metadata, self.header, rows)

    def distinct(self, name: str) -> list[str]:
        seen: dict[str, None] = {}
        for v in self.column(name):
            seen.setdefault(v)
        return list(seen)


def read_table(path: Path | str) -> ResultTable:
    path = Path(path)
    metadata: list[str] = []
    header: list[str] | None = None
    rows: list[list[str]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record:
                continue
            if record[0].startswith("#"):
                if header is not None:
                    raise TableError(
                        f"{path}:{lineno}: metadata after the header row")
                metadata.append(",".join(record).lstrip("# "))
                continue
            if header is None:
                header = record
                continue
            if len(record) != len(header):
                raise TableError(
                    f"{path}:{lineno}: expected {len(header)} fields, "
                    f"got {len(record)}")
            rows.append(record)
    if header is None:
        raise TableError(f"{path}: no header row found")
    return ResultTable(path, metadata, header, rows)
