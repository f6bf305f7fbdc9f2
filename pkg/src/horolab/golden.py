"""Access to the shipped calibration constants and golden sieve values."""

from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources

GOLDEN_CSV = "golden.csv"
CALIBRATION_JSON = "calibration.json"


def data_path(name: str):
    return resources.files("horolab") / "data" / name


@lru_cache(maxsize=None)
def calibration() -> dict:
    with data_path(CALIBRATION_JSON).open() as fh:
        return json.load(fh)


@lru_cache(maxsize=None)
def golden_rows() -> tuple[dict, ...]:
    with data_path(GOLDEN_CSV).open() as fh:
        return tuple(csv.DictReader(fh))


def golden_lookup(op: str, R: float, k: int) -> dict:
    """The golden row for (op, R, k) with its numeric fields as floats."""
    for row in golden_rows():
        if row["op"] == op and float(row["R"]) == float(R) and int(row["k"]) == int(k):
            return {key: (val if key == "op" else float(val)) for key, val in row.items()}
    raise KeyError((op, R, k))
