"""
Export
======
Plain-text tables, CSV and JSON renderings of solver results.

CSV is RFC 4180 style with "\\n" line endings; JSON is one object with a
"records" array. Both are deterministic for identical inputs.
"""

import csv
import io
import json
import math
from typing import Dict, List, Sequence

import numpy as np

from ..core.greens import GreensResult
from ..core.spectrum import LevelRecord

LEVEL_COLUMNS = ("system", "level", "E_cf", "E_D", "E_S", "rel_err")


def format_cell(key: str, value, digits: int = 10) -> str:
    """Energies with fixed ``digits`` decimals, relative errors in exponent form."""
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value)
    if isinstance(value, float):
        if key.startswith("rel_err") or key.endswith("diff"):
            return f"{value:.3e}"
        return f"{value:.{digits}f}"
    return str(value)


def rows_to_csv(columns: Sequence[str], rows: Sequence[Dict], digits: int = 10) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(key, row.get(key), digits) for key in columns])
    return buffer.getvalue()


def rows_to_table(columns: Sequence[str], rows: Sequence[Dict], digits: int = 10) -> str:
    """Right-aligned text table."""
    cells = [list(columns)] + [[format_cell(key, row.get(key), digits) for key in columns]
                               for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(columns))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(line, widths)) for line in cells]
    return "\n".join(lines) + "\n"


def _strict_json(value):
    """Non-finite floats become null; bare NaN is not valid JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _strict_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_strict_json(item) for item in value]
    return value


def records_to_json(records: Sequence[Dict]) -> str:
    payload = _strict_json({"records": list(records)})
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def _level_row(record: LevelRecord) -> Dict:
    return {
        "system": record.system,
        "level": record.label,
        "E_cf": record.E_cf,
        "E_D": record.E_D,
        "E_S": record.E_S,
        "rel_err": record.rel_err,
        "status": "ok" if record.passed else "FAIL",
    }


def levels_to_table(records: Sequence[LevelRecord], digits: int = 10) -> str:
    return rows_to_table(LEVEL_COLUMNS + ("status",), [_level_row(r) for r in records], digits)


def levels_to_csv(records: Sequence[LevelRecord], digits: int = 10) -> str:
    return rows_to_csv(LEVEL_COLUMNS, [_level_row(r) for r in records], digits)


def levels_to_json(records: Sequence[LevelRecord]) -> str:
    return records_to_json([r.to_dict() for r in records])


def levels_from_json(text: str) -> List[LevelRecord]:
    return [LevelRecord.from_dict(item) for item in json.loads(text)["records"]]


def green_to_json(result: GreensResult, **extra) -> str:
    record = result.to_dict()
    record.update(extra)
    return records_to_json([record])


def green_to_csv(result: GreensResult) -> str:
    """Green's matrix only, one matrix row per CSV row."""
    matrix = result.green_matrix
    as_text = (lambda v: repr(complex(v))) if np.iscomplexobj(matrix) else (lambda v: repr(float(v)))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([f"col{j}" for j in range(matrix.shape[1])])
    writer.writerows([[as_text(v) for v in row] for row in matrix])
    return buffer.getvalue()


def green_to_table(result: GreensResult, digits: int = 10) -> str:
    lines = [f"rank N = {result.rank}   binding = {result.energy.binding}   eta = {result.eta}"]
    for row in result.green_matrix:
        lines.append("  ".join(f"{v:+.{digits}e}" for v in row))
    if result.cf is not None:
        lines.append(f"CF converged: {result.cf.converged} ({result.cf.terms_used} terms, "
                     f"residual {result.cf.residual:.1e})")
    else:
        lines.append("CF not needed: D = 0, the operator is diagonal")
    lines.append(f"det = {result.det_inverse:.6e}   condition = {result.condition:.3e}")
    return "\n".join(lines) + "\n"


def samples_to_csv(radii: np.ndarray, values: np.ndarray) -> str:
    """Sampled function with columns r, value at full precision."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("r", "value"))
    writer.writerows([[repr(float(r)), repr(float(v))] for r, v in zip(radii, values)])
    return buffer.getvalue()
