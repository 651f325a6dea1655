"""CSV readers and writers. Floats are written with 17 significant digits."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .classical import Trajectory
from .params import SnyderParams


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


TRAJECTORY_HEADER = ("t", "q", "p", "invariant")


def trajectory_rows(traj: Trajectory):
    return zip(traj.times, traj.q, traj.p, traj.invariant)


def write_trajectory(path, traj: Trajectory) -> Path:
    return write_csv(path, TRAJECTORY_HEADER, trajectory_rows(traj))


def read_trajectory(path, params: SnyderParams, source: str = "integrated") -> Trajectory:
    """Load a ``t,q,p,invariant`` file; raises NonUniformSampling on irregular times."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header {header!r}")
        data = np.array([[float(x) for x in row[:3]] for row in reader])
    return Trajectory.from_samples(data[:, 0], data[:, 1], data[:, 2], params, source)


def write_matrix_coo(path, fm) -> Path:
    return write_csv(path, ("i", "j", "value"), fm.nonzeros())
