"""Form files (TOML), trajectory and curve CSV."""

from __future__ import annotations

import csv
import os
import sys
from pathlib import Path
from typing import TextIO

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamics import Trajectory
from .errors import ExprError, TangentFormError
from .expr import parse
from .form import Curve, TangentForm
from .registry import REGISTRY, builtin


class FormFileError(TangentFormError):
    """A form file is missing, malformed or inconsistent."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def looks_like_path(ref: str) -> bool:
    return os.sep in ref or "/" in ref or ref.endswith(".toml")


def form_from_mapping(data: dict, source: str = "<mapping>") -> TangentForm:
    try:
        m = data["dimension"]
    except KeyError:
        raise FormFileError(f"{source}: missing 'dimension'") from None
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise FormFileError(f"{source}: dimension must be a positive integer, got {m!r}")
    version = data.get("version", 1)
    if version != 1:
        raise FormFileError(f"{source}: unsupported version {version!r}")
    comps = data.get("components", data)
    omega0 = comps.get("omega0", "0")
    omega = comps.get("omega", ["0"] * m)
    omegabar = comps.get("omegabar", ["0"] * m)
    for key, arr in (("omega", omega), ("omegabar", omegabar)):
        if not isinstance(arr, list) or not all(isinstance(s, str) for s in arr):
            raise FormFileError(f"{source}: '{key}' must be an array of expression strings")
        if len(arr) != m:
            raise FormFileError(f"{source}: '{key}' has {len(arr)} entries but dimension is {m}")
    if not isinstance(omega0, str):
        raise FormFileError(f"{source}: 'omega0' must be an expression string")
    entries = [("omega0", omega0), *((f"omega[{i}]", e) for i, e in enumerate(omega)),
               *((f"omegabar[{i}]", e) for i, e in enumerate(omegabar))]
    for key, text in entries:
        try:
            parse(text, m)
        except ExprError as exc:
            err = type(exc)(f"{source}{_line_of(source, text)}: {key}: {exc}")
            err.pos = exc.pos
            raise err from None
    return TangentForm.from_text(m, omega0, omega, omegabar, name=data.get("name"))


def _line_of(source: str, text: str) -> str:
    """':<line>' of the first line quoting ``text`` when ``source`` is a readable file."""
    try:
        lines = Path(source).read_text().splitlines()
    except OSError:
        return ""
    for k, line in enumerate(lines, 1):
        if f'"{text}"' in line or f"'{text}'" in line:
            return f":{k}"
    return ""


def load(ref: str) -> TangentForm:
    """A builtin name or the path of a TOML form file."""
    if not looks_like_path(ref) and not Path(ref).exists():
        try:
            return builtin(ref)
        except KeyError as exc:
            raise FormFileError(str(exc.args[0])) from None
    path = Path(ref)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise FormFileError(f"{ref}: no such file") from None
    except tomllib.TOMLDecodeError as exc:
        raise FormFileError(f"{ref}: {exc}") from None
    data.setdefault("name", path.stem)
    return form_from_mapping(data, str(path))


def min_speed_for(ref: str) -> float:
    entry = REGISTRY.get(ref)
    return entry.min_speed if entry else 0.0


# CSV -----------------------------------------------------------------------------

_BLOCKS = {
    "third_order": ("x", "y", "z"),
    "x_flow": ("x", "y", "p"),
    "y_flow": ("x", "p0_", "p1_"),
}


def trajectory_header(formulation: str, m: int) -> list[str]:
    blocks = _BLOCKS.get(formulation, ("x", "y"))
    return ["t"] + [f"{b}{i}" for b in blocks for i in range(1, m + 1)]


def write_trajectory(traj: Trajectory, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(trajectory_header(traj.formulation, traj.m))
    for t, row in zip(traj.times, traj.states):
        w.writerow([_fmt(t), *map(_fmt, row)])


def read_curve(path: str | Path, m: int) -> Curve:
    """Columns t, x1..xm (further columns are ignored); t must be uniform."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormFileError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    want = ["t"] + [f"x{i}" for i in range(1, m + 1)]
    if header[: m + 1] != want:
        raise FormFileError(f"{path}: expected leading columns {','.join(want)}, got {','.join(header[: m + 1])}")
    try:
        data = np.array([[float(v) for v in r[: m + 1]] for r in body if r])
    except ValueError as exc:
        raise FormFileError(f"{path}: {exc}") from None
    if len(data) < 5:
        raise FormFileError(f"{path}: a curve needs at least 5 rows")
    ts = data[:, 0]
    steps = np.diff(ts)
    if not np.allclose(steps, steps.mean(), rtol=1e-9, atol=0):
        raise FormFileError(f"{path}: time column is not uniform")
    return Curve(float(ts[0]), float(ts[-1]), data[:, 1:])
