"""CSV reading for figure generation.

Input files follow the simulator's canonical layout: ``# key=value`` comment
lines echoing the run configuration, one header row, then numeric rows.  This
module only reads; it never recomputes anything about the runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MissingColumnsError(ValueError):
    """Requested columns absent from the CSV."""

    def __init__(self, missing, path):
        self.missing = tuple(missing)
        super().__init__(f"{path}: missing column(s) {', '.join(self.missing)}")


@dataclass
class CsvTable:
    path: str
    columns: dict[str, np.ndarray]
    meta: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        first = next(iter(self.columns.values()), np.empty(0))
        return len(first)

    def require(self, *names: str) -> tuple[np.ndarray, ...]:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise MissingColumnsError(missing, self.path)
        return tuple(self.columns[n] for n in names)

    def meta_float(self, key: str) -> float | None:
        raw = self.meta.get(key)
        if raw is None:
            return None
        try:
            return float(raw)
        except ValueError:
            return None


def read_table(path: str) -> CsvTable:
    """Parse a canonical CSV into named float columns plus comment metadata."""
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, sep, value = body.partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append(line.split(","))
    if header is None or not rows:
        raise ValueError(f"{path}: no data rows")
    columns: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        try:
            columns[name] = np.array(
                [float(r[i]) if i < len(r) and r[i] != "" else np.nan for r in rows]
            )
        except ValueError as e:
            raise ValueError(f"{path}: non-numeric value in column {name!r} ({e})") from None
    return CsvTable(path=path, columns=columns, meta=meta)
