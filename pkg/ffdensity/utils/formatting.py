"""Output formatting: exact rationals, JSON lines, tables"""
import json
import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping

import pandas as pd

from ffdensity.exceptions import UsageError

logger = logging.getLogger(__name__)


def format_rational(value: Fraction) -> str:
    """Always `num/den`, including integers (`2/1`)"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"Malformed rational {text!r}") from e
    return value


def dumps(record: Mapping[str, Any]) -> str:
    """Compact, key-order preserving JSON for one output line"""
    return json.dumps(record, separators=(",", ":"), ensure_ascii=False)


def json_lines(records: Iterable[Mapping[str, Any]]) -> str:
    return "\n".join(dumps(r) for r in records)


def render_table(records: List[Dict[str, Any]]) -> str:
    """Plain-text table of records via pandas"""
    if not records:
        return "(empty)"
    frame = pd.DataFrame.from_records(records)
    return frame.to_string(index=False)


def render_mapping(record: Mapping[str, Any]) -> str:
    rows = [{"key": k, "value": v if not isinstance(v, (list, dict)) else dumps_value(v)}
            for k, v in record.items()]
    return render_table(rows)


def dumps_value(value: Any) -> str:
    return json.dumps(value, separators=(",", ":"), ensure_ascii=False)
