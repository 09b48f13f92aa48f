from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from mpmath import mpf, nstr, workdps

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence
    from typing import TextIO

DECIMAL_DIGITS = 15


def fraction_str(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def decimal_str(value: Fraction | int | float | mpf, digits: int = DECIMAL_DIGITS) -> str:
    with workdps(digits + 10):
        if isinstance(value, Fraction):
            value = mpf(value.numerator) / value.denominator
        return nstr(mpf(value), digits)


def exact_and_decimal(value: Fraction | int) -> dict[str, str]:
    return {"exact": fraction_str(value), "decimal": decimal_str(Fraction(value))}


def dump_json(metadata: Mapping[str, Any], data: Mapping[str, Any], stream: TextIO) -> None:
    """Writes `{"metadata": ..., "data": ...}` with a stable layout"""
    json.dump({"metadata": metadata, "data": data}, stream, indent=2, ensure_ascii=False)
    stream.write("\n")


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    stream: TextIO,
    metadata: Mapping[str, Any] | None = None,
) -> None:
    """Metadata goes to leading `# key=value` lines, the table follows"""
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}={value}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fraction_str(x) if isinstance(x, Fraction) else x for x in row])
