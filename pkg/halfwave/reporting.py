"""Deterministic JSON and CSV output of reports and profiles."""

import csv
import io
import json
import logging
import math
import sys
from typing import Optional, Sequence

import numpy as np

from halfwave.config import RunConfig
from halfwave.spectral_core import STEREOGRAPHIC_LINE, CircleGrid, SphereField, stereographic_lift_array

logger = logging.getLogger(__name__)

PROFILE_HEADER = ["theta", "x", "q1", "q2", "q3"]
SNAPSHOT_HEADER = ["theta", "q1", "q2", "q3"]


def to_jsonable(data):
    """Convert numpy values to plain Python; complex numbers become [re, im].

    Raises:
        ValueError: for NaN or infinite values.
    """
    if hasattr(data, "to_dict"):
        return to_jsonable(data.to_dict())
    if isinstance(data, dict):
        return {str(key): to_jsonable(value) for key, value in data.items()}
    if isinstance(data, (list, tuple, np.ndarray)):
        return [to_jsonable(value) for value in data]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (complex, np.complexfloating)):
        return [to_jsonable(float(data.real)), to_jsonable(float(data.imag))]
    if isinstance(data, (float, np.floating)):
        value = float(data)
        if not math.isfinite(value):
            raise ValueError(f"Cannot serialize the non-finite value {value}.")
        return value
    return data


def dumps(data) -> str:
    return json.dumps(to_jsonable(data), indent=4, sort_keys=True, allow_nan=False) + "\n"


def save_to_file(data, file_name: str):
    """Save data to a JSON file."""
    with open(file_name, "w") as f:
        f.write(dumps(data))


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(header: Sequence[str], rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(value) for value in row])
    return buffer.getvalue()


def write_csv(file_name: str, header: Sequence[str], rows):
    with open(file_name, "w", newline="") as f:
        f.write(csv_text(header, rows))


def snapshot_rows(field: SphereField) -> list:
    theta = field.grid.theta
    return [[float(theta[j])] + [float(q) for q in field.values[j]] for j in range(field.grid.n_points)]


def load_profile_csv(file_name: str) -> SphereField:
    """Read a profile written with PROFILE_HEADER back into a SphereField on the line chart."""
    with open(file_name, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != PROFILE_HEADER:
            raise ValueError(f"Expected the header {PROFILE_HEADER} in '{file_name}', got {header}.")
        rows = [[float(cell) for cell in row] for row in reader if row]
    data = np.array(rows)
    mismatch = np.angle(np.exp(1j * (stereographic_lift_array(data[:, 1]) - data[:, 0])))
    if np.max(np.abs(mismatch)) > 1e-9:
        raise ValueError(f"The x column of '{file_name}' does not match its theta column.")
    grid = CircleGrid(data.shape[0], offset=float(data[0, 0]))
    return SphereField(data[:, 2:5], grid, STEREOGRAPHIC_LINE)


def emit_report(report, config: RunConfig, rows=None, header: Optional[Sequence[str]] = None) -> Optional[str]:
    """Write a report in the configured format to config.out, or to stdout when no path is set.

    Args:
        report: a dict or an object with to_dict().
        config: the run configuration.
        rows: CSV rows, required when the format is csv.
        header: CSV header matching the rows.

    Returns:
        The path written, or None for stdout.
    """
    if config.format == "csv":
        if rows is None or header is None:
            raise ValueError(f"The '{config.command}' command has no CSV form; use --format json.")
        text = csv_text(header, rows)
    else:
        text = dumps(report)
    if config.out is None:
        sys.stdout.write(text)
        return None
    with open(config.out, "w", newline="") as f:
        f.write(text)
    logger.info("Wrote %s report to %s", config.command, config.out)
    return config.out
