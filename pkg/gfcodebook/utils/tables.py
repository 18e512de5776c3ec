"""
Published Parameter Tables for gfcodebook.

The (N, K, I_max, I_W, ratio) rows published for both constructions, and
their regeneration. Each published cell is compared with the recomputed value
to within one unit of its last printed digit; rows whose cells disagree are
flagged rather than trusted.
"""

import logging
from dataclasses import dataclass

from gfcodebook.core.analysis import ratio_report
from gfcodebook.core.errors import ParameterError
from gfcodebook.core.field import DEFAULT_BUDGET, TowerParams

logger = logging.getLogger(__name__)

CELLS = ("N", "K", "imax", "welch", "ratio")


@dataclass(frozen=True)
class PublishedRow:
    """One printed table row; cells are kept as the printed strings."""
    section: int
    index: int
    p: int
    t: int
    s: int
    cells: tuple

    @property
    def params(self):
        return TowerParams(self.p, self.t, self.s)

    def published(self):
        return dict(zip(CELLS, self.cells))


def _rows(section, data):
    return tuple(PublishedRow(section, i + 1, p, t, s, tuple(cells.split()))
                 for i, (p, t, s, cells) in enumerate(data))


# Construction I rows.
SECTION_2 = _rows(2, [
    (3, 2, 2, "80 36 0.1667 0.1244 1.3399"),
    (19, 1, 2, "360 171 0.0683 0.0555 1.2310"),
    (179, 1, 2, "32040 15931 0.006 0.0056 1.0748"),
    (3, 5, 2, "59048 29403 0.0044 0.0041 1.0642"),
    (3, 7, 2, "4782968 2390391 0.00046724 0.00045746 1.0214"),
    (5, 3, 2, "244140625 121101500 6.5028e-05 6.541e-05 1.0080"),
    (7, 3, 4, "1.19158e+20 9.5511e+19 7.2670e-11 7.2459e-11 1.0029"),
    (5, 4, 4, "2.3283e+22 1.1623e+22 6.5746e-12 6.5641e-12 1.0016"),
    (19, 5, 2, "6.1311e+12 3.0655e+12 4.0412e-07 4.0386e-07 1.0006"),
])

# Construction II rows.
SECTION_3 = _rows(3, [
    (3, 2, 2, "6561 2952 0.0152 0.0137 1.1166"),
    (19, 1, 2, "130321 61902 0.0031 0.0029 1.0539"),
    (5, 2, 3, "244140625 11719500 6.9329e-05 6.6609e-05 1.0408"),
    (3, 3, 2, "531441 256230 0.0015 0.0014 1.0377"),
    (5, 3, 2, "244140625 121101500 6.5028e-05 6.410e-05 1.0080"),
    (3, 5, 2, "3.4868e+09 1.7362e+09 1.7075e-05 1.7005e-05 1.0041"),
    (7, 3, 4, "1.9158e+20 9.5511e+19 7.2670e-11 7.2459e-11 1.0029"),
    (3, 6, 2, "2.8243e+11 1.4102e+11 1.8868e-06 1.8843e-06 1.0014"),
    (13, 3, 2, "2.3298e+13 1.1644e+13 2.0736e-07 2.0727e-07 1.0005"),
])

TABLES = {2: ("I", SECTION_2), 3: ("II", SECTION_3)}


def published_rows(section, rows=None):
    """Rows of a table, optionally filtered by 1-based row numbers."""
    if section not in TABLES:
        raise ParameterError(f"table section must be one of {sorted(TABLES)}, got {section!r}")
    construction, table = TABLES[section]
    if rows:
        unknown = sorted(set(rows) - {row.index for row in table})
        if unknown:
            raise ParameterError(f"table {section} has no rows {unknown}")
        table = tuple(row for row in table if row.index in rows)
    return construction, table


def cell_tolerance(text):
    """One unit of the last printed digit, e.g. 1e-4 for '0.1667', 1e15 for '1.19158e+20'."""
    mantissa, _, exponent = text.lower().partition("e")
    decimals = len(mantissa.partition(".")[2])
    return 10.0 ** (int(exponent or 0) - decimals)


def cell_matches(text, value):
    """Compare a printed cell with a recomputed value; plain integers must match exactly."""
    if "." not in text and "e" not in text.lower():
        return int(text) == value
    return abs(float(text) - value) <= cell_tolerance(text) * (1 + 1e-9)


def regenerate_row(row, construction, budget=DEFAULT_BUDGET, workers=None):
    """
    Recompute one published row and compare every cell.

    The published I_max column is compared with the analytic bound; the
    empirical value is reported alongside when the row fits the budget.
    """
    report = ratio_report(row.params, construction, budget, workers=workers)
    recomputed = {
        "N": report.N,
        "K": report.K,
        "imax": report.imax_bound,
        "welch": report.welch,
        "ratio": report.ratio_bound_over_welch,
    }
    cells = {}
    for name, text in row.published().items():
        cells[name] = {"published": text, "recomputed": recomputed[name],
                       "match": cell_matches(text, recomputed[name])}
    mismatched = [name for name, cell in cells.items() if not cell["match"]]
    if mismatched:
        logger.warning("Table %d row %d %s: published %s disagree with recomputation",
                       row.section, row.index, row.params.label(), ", ".join(mismatched))
    return {
        "section": row.section,
        "row": row.index,
        "construction": construction,
        "p": row.p,
        "t": row.t,
        "s": row.s,
        "tier": report.tier,
        "imax_empirical": report.imax_empirical,
        "flagged": bool(mismatched),
        "mismatched": mismatched,
        "cells": cells,
    }


def regenerate_table(section, rows=None, budget=DEFAULT_BUDGET, workers=None, progress=None):
    """
    Regenerate a published table.

    Args:
        section: 2 (Construction I) or 3 (Construction II).
        rows: Optional 1-based row numbers.
        budget: Enumeration budget; larger rows are formula-only.
        workers: Thread count for the shift loops.
        progress: Optional callable taking a percentage.

    Returns:
        list of row dicts
    """
    construction, table = published_rows(section, rows)
    results = []
    for i, row in enumerate(table):
        results.append(regenerate_row(row, construction, budget, workers))
        if progress:
            progress(int(100 * (i + 1) / len(table)))
    return results


def flatten(result):
    """One flat row per regenerated table row, for CSV output."""
    flat = {k: v for k, v in result.items() if k not in ("cells", "mismatched")}
    for name, cell in result["cells"].items():
        flat[f"{name}_published"] = cell["published"]
        flat[f"{name}_recomputed"] = cell["recomputed"]
    flat["mismatched"] = " ".join(result["mismatched"])
    return flat
