"""Run records and CSV data files written by the command line."""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from bangbang_rabi.config import SCHEMA_VERSION


@dataclass
class RunRecord:
    """Everything needed to reproduce one command: flags, parameters and the headline result.

    Wall-clock time lives only here, never in the CSV data files.
    """

    command: str
    argv: list[str]
    params: dict[str, Any]
    search: dict[str, Any] | None = None
    protocol: str | None = None
    result: dict[str, Any] = field(default_factory=dict)
    n_max: int | None = None
    wall_clock_seconds: float = 0.0
    invariants_ok: bool = True
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunRecord":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(
                f"Unsupported run record schema {version!r}, expected {SCHEMA_VERSION}"
            )
        return cls(**data)

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=4, ensure_ascii=False)
            f.write("\n")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "RunRecord":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # 17 significant digits round-trip every double.
        return format(value, ".17g")
    return str(value)


def write_csv(path: str | Path, fieldnames: list[str], rows: list[dict[str, Any]]) -> Path:
    """UTF-8 CSV with a header row; floats keep full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            missing = [name for name in fieldnames if name not in row]
            if missing:
                raise ValueError(f"Row is missing columns {missing}")
            writer.writerow({name: _format_cell(row[name]) for name in fieldnames})
    return path


def read_csv(path: str | Path) -> list[dict[str, float]]:
    """Read a numeric CSV written by write_csv."""
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(f)]
