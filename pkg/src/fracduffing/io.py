"""CSV reading/writing for trajectories and convergence reports.

Files are written whole (temp file + rename) with LF line endings and
17 significant digits, so a round trip recovers every float exactly.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from fracduffing.model import Trajectory
from fracduffing.verification import ConvergenceReport

__all__ = [
    "TRAJECTORY_HEADER",
    "CONVERGENCE_HEADER",
    "CSVFormatError",
    "fmt",
    "atomic_write_text",
    "trajectory_csv",
    "write_trajectory",
    "read_trajectory",
    "diff_csv",
    "convergence_csv",
]

TRAJECTORY_HEADER = ("t", "x", "y", "aux")
CONVERGENCE_HEADER = ("N", "h", "xi_efds", "p_efds", "xi_abm", "p_abm", "p2_efds", "p2_abm")


class CSVFormatError(ValueError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


def fmt(value: float | None) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(cells) for cells in rows)
    return "\n".join(lines) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    rows = (
        (fmt(t), fmt(x), fmt(y), fmt(a)) for t, x, y, a in zip(traj.t, traj.x, traj.y, traj.aux)
    )
    return _table(TRAJECTORY_HEADER, rows)


def write_trajectory(path, traj: Trajectory) -> None:
    atomic_write_text(path, trajectory_csv(traj))


def read_trajectory(path, scheme: str | None = None) -> Trajectory:
    """Parse a trajectory CSV. Malformed input raises :class:`CSVFormatError`
    with the offending line number."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise CSVFormatError(path, 1, "empty file")
    header = tuple(cell.strip() for cell in lines[0].split(","))
    if header != TRAJECTORY_HEADER:
        raise CSVFormatError(path, 1, f"expected header {','.join(TRAJECTORY_HEADER)}")
    data = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 4:
            raise CSVFormatError(path, lineno, f"expected 4 fields, got {len(cells)}")
        try:
            data.append([float(c) for c in cells])
        except ValueError as exc:
            raise CSVFormatError(path, lineno, str(exc)) from None
    if not data:
        raise CSVFormatError(path, 2, "no data rows")
    arr = np.array(data)
    if scheme is None:
        stem = path.stem
        scheme = stem.split("_", 1)[1] if stem.startswith("trajectory_") else stem
    return Trajectory(t=arr[:, 0], x=arr[:, 1], y=arr[:, 2], aux=arr[:, 3], scheme=scheme)


def diff_csv(a: Trajectory, b: Trajectory) -> str:
    if len(a) != len(b):
        raise ValueError("trajectories have different lengths")
    rows = ((fmt(t), fmt(d)) for t, d in zip(a.t, np.abs(a.x - b.x)))
    return _table(("t", "abs_dx"), rows)


def convergence_csv(report: ConvergenceReport) -> str:
    rows = []
    for row in report.rows:
        rows.append(
            (
                str(row.N),
                fmt(row.h),
                fmt(row.xi.get("efds")),
                fmt(row.p.get("efds")),
                fmt(row.xi.get("abm")),
                fmt(row.p.get("abm")),
                fmt(row.p2.get("efds")),
                fmt(row.p2.get("abm")),
            )
        )
    return _table(CONVERGENCE_HEADER, rows)
