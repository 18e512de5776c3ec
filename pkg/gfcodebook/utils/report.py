"""
Report Output Utilities for gfcodebook.

JSON and CSV emission of analysis rows. Numbers are formatted once, at the
configured precision, and both formats carry the same values: CSV writes the
formatted strings, JSON the floats parsed back from them.
"""

import csv
import io
import json
import logging
import sys

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")

# Values below this magnitude are written in scientific notation.
SCIENTIFIC_BELOW = 1e-4


def format_value(value, precision=4):
    """Format one cell: integers verbatim, small floats as 6.5028e-05, others fixed-point."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if value != 0 and abs(value) < SCIENTIFIC_BELOW:
            return f"{value:.{precision}e}"
        return f"{value:.{precision}f}"
    return str(value)


def rounded(value, precision=4):
    """The number a formatted cell stands for (None and non-numbers pass through)."""
    if isinstance(value, (float, np.floating)):
        return float(format_value(value, precision))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _round_tree(data, precision):
    if isinstance(data, dict):
        return {k: _round_tree(v, precision) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_round_tree(v, precision) for v in data]
    return rounded(data, precision)


def render(rows, fmt="json", precision=4):
    """
    Render report rows as text.

    Args:
        rows: A dict or a list of dicts. CSV only writes scalar columns.
        fmt: "json" or "csv".
        precision: Decimal places for floats.

    Returns:
        str
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if fmt == "json":
        return json.dumps(_round_tree(rows, precision), indent=2) + "\n"

    rows = [rows] if isinstance(rows, dict) else list(rows)
    columns = []
    for row in rows:
        for key, value in row.items():
            if key not in columns and not isinstance(value, (dict, list, tuple)):
                columns.append(key)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: format_value(row.get(k), precision) for k in columns})
    return buffer.getvalue()


def write_report(rows, fmt="json", out=None, precision=4):
    """Write rendered rows to a path, or stdout when out is None."""
    text = render(rows, fmt, precision)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.info("Wrote %s report to %s", fmt, out)
    return text
