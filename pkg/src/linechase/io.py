"""Instance files (JSON) and CSV output."""

from __future__ import annotations

import csv
import json
import math
from typing import Iterable, Sequence

from .core import Instance
from .errors import InvalidInput
from .geometry import Line

FLOAT_FMT = "%.17g"


def _vector(obj, where: str, dim=None):
    if not isinstance(obj, list) or not obj:
        raise InvalidInput(f"{where}: expected a non-empty array of numbers")
    out = []
    for i, v in enumerate(obj):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise InvalidInput(f"{where}[{i}]: expected a finite number, got {v!r}")
        out.append(float(v))
    if dim is not None and len(out) != dim:
        raise InvalidInput(f"{where}: expected {dim} coordinates, got {len(out)}")
    return out


def _line(obj, where: str, dim: int) -> Line:
    if not isinstance(obj, dict):
        raise InvalidInput(f"{where}: expected an object with 'point' and 'dir'")
    for key in ("point", "dir"):
        if key not in obj:
            raise InvalidInput(f"{where}: missing field '{key}'")
    point = _vector(obj["point"], f"{where}.point", dim)
    d = _vector(obj["dir"], f"{where}.dir", dim)
    if not any(d):
        raise InvalidInput(f"{where}.dir: zero direction vector")
    return Line(point, d)


def instance_from_dict(obj) -> Instance:
    if not isinstance(obj, dict):
        raise InvalidInput("instance: expected a JSON object")
    for key in ("dim", "start", "lines"):
        if key not in obj:
            raise InvalidInput(f"instance: missing field '{key}'")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise InvalidInput(f"dim: expected an integer >= 2, got {dim!r}")
    start = _vector(obj["start"], "start", dim)
    init = obj.get("initial_line")
    init = None if init is None else _line(init, "initial_line", dim)
    if not isinstance(obj["lines"], list):
        raise InvalidInput("lines: expected an array")
    lines = [_line(l, f"lines[{i}]", dim) for i, l in enumerate(obj["lines"])]
    return Instance(start, lines, init)


def _line_dict(line: Line) -> dict:
    return {"point": line.base.tolist(), "dir": line.dir.tolist()}


def instance_to_dict(instance: Instance) -> dict:
    return {
        "dim": instance.dim,
        "start": instance.start.tolist(),
        "initial_line": None if instance.initial_line is None else _line_dict(instance.initial_line),
        "lines": [_line_dict(l) for l in instance.requests],
    }


def loads_instance(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    return instance_from_dict(obj)


def dumps_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=1)


def load_instance(path: str) -> Instance:
    with open(path) as fh:
        return loads_instance(fh.read())


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(instance) + "\n")


def fmt(v) -> str:
    if isinstance(v, float):
        return FLOAT_FMT % v
    return str(v)


def write_csv(fh, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
