"""JSON codecs for measures, sections, operators and reports."""

import json
import math
from fractions import Fraction
from numbers import Integral, Rational
from typing import Any, Dict, List, Union

import numpy as np

from .exceptions import OperatorError, ValidationError
from .groupoid import FiniteAction
from .invariant_measure import ChiSection, InvariantMeasure
from .modular import DensitySection, OperatorMatrix, from_entries
from .types import Report
from .valuation import OrbitFunction, Valuation


def parse_number(value: Union[int, float, str]) -> Union[int, float, Fraction]:
    """Read a weight: JSON numbers as they are, strings like "1/2" as exact fractions."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        try:
            parsed = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot read {value!r} as a number")
        return int(parsed) if parsed.denominator == 1 else parsed
    raise ValueError(f"expected a number, got {value!r}")


def encode_number(value: Any) -> Any:
    """Fractions become "p/q" strings, complex numbers {"re", "im"}, numpy scalars plain Python."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, Rational):
        return int(value) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return {'re': _float(value.real), 'im': _float(value.imag)}
    if isinstance(value, (float, np.floating)):
        return _float(float(value))
    return value


def _float(x: float) -> Any:
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (InvariantMeasure, ChiSection, Valuation, OrbitFunction, DensitySection)):
        return encode_values(obj)
    return encode_number(obj)


def encode_values(obj: Union[InvariantMeasure, ChiSection, Valuation, OrbitFunction, DensitySection]) -> Dict[str, Any]:
    """{representative: value} for any of the keyed value types."""
    values = obj.weights if isinstance(obj, (InvariantMeasure, Valuation)) else obj.values
    return {key: encode_number(values[key]) for key in sorted(values)}


def encode_operator(a: OperatorMatrix, carrier: str) -> Dict[str, Any]:
    """{carrier, entries: [[x, y, re, im], ...]} with zero entries omitted."""
    X = a.carrier
    entries: List[List[Any]] = []
    for i, j in np.argwhere(a.data != 0):
        value = complex(a.data[i, j])
        entries.append([X.elements[i], X.elements[j], value.real, value.imag])
    return {'carrier': carrier, 'entries': sorted(entries)}


def decode_operator(data: Dict[str, Any], X: FiniteAction) -> OperatorMatrix:
    """The operator of a ``{carrier, entries}`` mapping on X; errors point into ``/entries``."""
    try:
        return from_entries(X, [list(row) for row in data.get('entries', [])])
    except ValidationError as e:
        raise e.at("/entries")
    except OperatorError as e:
        raise ValidationError(str(e), path="/entries") from e


def dump_report(report: Report) -> str:
    """Canonical JSON: sorted keys, checks sorted by name, shortest round-trip floats."""
    canonical = dict(report)
    canonical['checks'] = sorted(report['checks'], key=lambda c: c['name'])
    return json.dumps(to_jsonable(canonical), sort_keys=True, indent=2, ensure_ascii=False)
