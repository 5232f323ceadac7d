"""Named time series and their CSV form.

CSV files carry a header row and fixed column order (time first); floats are
written with 17 significant digits so re-reading reproduces the in-memory
values exactly, and writes go through a temp file + rename so output files
are never half-written.
"""

import os
import tempfile
from dataclasses import dataclass

import numpy as np


@dataclass
class TimeSeries:
    name: str
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have the same shape")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("time stamps must be strictly increasing")

    def window(self, t0: float, t1: float) -> "TimeSeries":
        mask = (self.times >= t0) & (self.times <= t1)
        return TimeSeries(self.name, self.times[mask], self.values[mask])

    def __eq__(self, other):
        return (isinstance(other, TimeSeries) and self.name == other.name
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values))


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_timeseries(series: TimeSeries, path: str):
    """Atomic CSV write (write to temp file, then rename into place)."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(f"time,{series.name}\n")
            for t, v in zip(series.times, series.values):
                fh.write(f"{_fmt(t)},{_fmt(v)}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_timeseries(path: str) -> TimeSeries:
    with open(path, "r") as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 2 or header[0] != "time":
            raise ValueError(f"{path}: expected header 'time,<channel>'")
        times, values = [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, v = line.split(",")
            times.append(float(t))
            values.append(float(v))
    return TimeSeries(header[1], np.array(times), np.array(values))
