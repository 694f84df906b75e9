import json
import math

import pytest

from src.core.spectrum import TABLE_ONE, PoleSearchConfig, table1
from src.utils.export import levels_from_json, levels_to_json, records_to_json


def reject_constant(name):
    raise ValueError(f"non-standard JSON constant {name}")


@pytest.fixture(scope="module")
def failed_rows():
    return table1(config=PoleSearchConfig(max_terms=1), rows=TABLE_ONE[:2])


def test_failed_rows_serialize_as_null(failed_rows):
    text = levels_to_json(failed_rows)
    assert "NaN" not in text
    records = json.loads(text, parse_constant=reject_constant)["records"]
    assert all(r["E_cf"] is None and r["rel_err"] is None for r in records)
    assert all(r["error"] for r in records)


def test_failed_rows_read_back_as_nan(failed_rows):
    restored = levels_from_json(levels_to_json(failed_rows))
    assert all(math.isnan(r.E_cf) and math.isnan(r.rel_err) for r in restored)
    assert all(r.flagged for r in restored)
    assert [r.E_D for r in restored] == [r.E_D for r in failed_rows]


def test_nested_non_finite_values():
    text = records_to_json([{"condition": float("inf"), "matrix": [1.0, float("nan")]}])
    (record,) = json.loads(text, parse_constant=reject_constant)["records"]
    assert record == {"condition": None, "matrix": [1.0, None]}
