"""CSV/JSON table writers and run manifests."""

from __future__ import annotations

import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        return float(format_value(value))
    return value


def render_csv(rows, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def render_json(rows, columns) -> str:
    data = [{c: _json_value(row[c]) for c in columns} for row in rows]
    return json.dumps(data, indent=1) + "\n"


def render(rows, columns, fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_csv(rows, columns)
    if fmt == "json":
        return render_json(rows, columns)
    raise ValueError(f"unknown format {fmt!r}")


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    version: str = __version__
    wall_clock_s: float = 0.0
    j_max_used: list[int] = field(default_factory=list)
    started: float = field(default_factory=time.time)

    def finish(self) -> None:
        self.wall_clock_s = time.time() - self.started

    def to_json(self) -> str:
        data = asdict(self)
        data.pop("started")
        return json.dumps(data, indent=1, sort_keys=True, default=str) + "\n"

    def write_beside(self, out_path: str | Path) -> Path:
        path = Path(str(out_path) + ".manifest.json")
        write_text(path, self.to_json())
        return path
