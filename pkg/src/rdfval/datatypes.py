"""Lexical validation and value mapping for the supported XSD core types.

``is_valid_for_datatype`` is total: datatypes outside the supported set
validate as true (conservative non-flagging; catalog lint reports them).
"""
from __future__ import annotations

import re
from fractions import Fraction

from .terms import (
    Iri,
    Literal,
    RDF_LANGSTRING,
    XSD_ANY_URI,
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_GYEAR,
    XSD_INTEGER,
    XSD_NON_NEGATIVE_INTEGER,
    XSD_STRING,
)

_INTEGER_RE = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_RE = re.compile(r"^[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)$")
_DOUBLE_RE = re.compile(
    r"^(?:[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?|[+-]?INF|NaN)$"
)
_TIMEZONE = r"(?:Z|[+-](?:0[0-9]|1[0-4]):[0-5][0-9])?"
_DATE_RE = re.compile(r"^(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})" + _TIMEZONE + "$")
_TIME_RE = re.compile(
    r"^([0-9]{2}):([0-9]{2}):([0-9]{2})(\.[0-9]+)?" + _TIMEZONE + "$"
)
_GYEAR_RE = re.compile(r"^-?(?:[1-9][0-9]{3,}|0[0-9]{3})" + _TIMEZONE + "$")
_ANY_URI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')

_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def _valid_date_fields(year: int, month: int, day: int) -> bool:
    if month < 1 or month > 12 or day < 1:
        return False
    limit = _DAYS_IN_MONTH[month - 1]
    if month == 2 and _is_leap(year):
        limit = 29
    return day <= limit


def _valid_date(lexical: str) -> bool:
    m = _DATE_RE.match(lexical)
    if m is None:
        return False
    return _valid_date_fields(int(m.group(1)), int(m.group(2)), int(m.group(3)))


def _valid_datetime(lexical: str) -> bool:
    if "T" not in lexical:
        return False
    date_part, time_part = lexical.split("T", 1)
    m = re.match(r"^(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})$", date_part)
    if m is None:
        return False
    if not _valid_date_fields(int(m.group(1)), int(m.group(2)), int(m.group(3))):
        return False
    t = _TIME_RE.match(time_part)
    if t is None:
        return False
    hh, mm, ss = int(t.group(1)), int(t.group(2)), int(t.group(3))
    if hh == 24:
        # XSD permits 24:00:00 as the zero instant of the next day only.
        return mm == 0 and ss == 0 and (t.group(4) is None or set(t.group(4)[1:]) == {"0"})
    return hh <= 23 and mm <= 59 and ss <= 59


def is_valid_for_datatype(lexical: str, datatype: Iri) -> bool:
    """True iff lexical conforms to the datatype's lexical space.

    Unsupported datatypes return true (the function stays total); the
    negative-sign rule rejects any minus sign for nonNegativeInteger, so
    "-0" is invalid even though its numeric value is zero.
    """
    if datatype == XSD_STRING or datatype == RDF_LANGSTRING:
        return True
    if datatype == XSD_BOOLEAN:
        return lexical in ("true", "false", "1", "0")
    if datatype == XSD_INTEGER:
        return _INTEGER_RE.match(lexical) is not None
    if datatype == XSD_NON_NEGATIVE_INTEGER:
        return _INTEGER_RE.match(lexical) is not None and not lexical.startswith("-")
    if datatype == XSD_DECIMAL:
        return _DECIMAL_RE.match(lexical) is not None
    if datatype == XSD_DOUBLE:
        return _DOUBLE_RE.match(lexical) is not None
    if datatype == XSD_DATE:
        return _valid_date(lexical)
    if datatype == XSD_DATETIME:
        return _valid_datetime(lexical)
    if datatype == XSD_GYEAR:
        return _GYEAR_RE.match(lexical) is not None
    if datatype == XSD_ANY_URI:
        return _ANY_URI_BAD.search(lexical) is None
    return True


SUPPORTED_DATATYPES = frozenset(
    {
        XSD_STRING,
        XSD_BOOLEAN,
        XSD_INTEGER,
        XSD_NON_NEGATIVE_INTEGER,
        XSD_DECIMAL,
        XSD_DOUBLE,
        XSD_DATE,
        XSD_DATETIME,
        XSD_GYEAR,
        XSD_ANY_URI,
    }
)

_NUMERIC_DATATYPES = frozenset(
    {XSD_INTEGER, XSD_NON_NEGATIVE_INTEGER, XSD_DECIMAL, XSD_DOUBLE}
)
_TEMPORAL_DATATYPES = frozenset({XSD_DATE, XSD_DATETIME, XSD_GYEAR})


def numeric_value(lit: Literal) -> int | Fraction | float | None:
    """Numeric value of a literal, or None when it has none.

    Promotion follows integer → decimal → double; integers and decimals map
    to exact Python numbers so comparisons never lose precision.
    """
    if lit.datatype not in _NUMERIC_DATATYPES:
        return None
    text = lit.lexical
    if lit.datatype in (XSD_INTEGER, XSD_NON_NEGATIVE_INTEGER):
        if _INTEGER_RE.match(text) is None:
            return None
        value = int(text)
        if lit.datatype == XSD_NON_NEGATIVE_INTEGER and text.startswith("-"):
            return None
        return value
    if lit.datatype == XSD_DECIMAL:
        if _DECIMAL_RE.match(text) is None:
            return None
        return Fraction(text)
    if _DOUBLE_RE.match(text) is None:
        return None
    if text in ("INF", "+INF"):
        return float("inf")
    if text == "-INF":
        return float("-inf")
    if text == "NaN":
        return float("nan")
    return float(text)


def temporal_key(lit: Literal) -> tuple | None:
    """Sortable key for date/dateTime/gYear literals, or None if invalid."""
    if lit.datatype not in _TEMPORAL_DATATYPES:
        return None
    text = lit.lexical
    if lit.datatype == XSD_GYEAR:
        if _GYEAR_RE.match(text) is None:
            return None
        year = int(re.match(r"^-?[0-9]+", text).group(0))
        return (year, 1, 1, 0, 0, Fraction(0))
    if lit.datatype == XSD_DATE:
        m = _DATE_RE.match(text)
        if m is None or not _valid_date(text):
            return None
        return (int(m.group(1)), int(m.group(2)), int(m.group(3)), 0, 0, Fraction(0))
    if not _valid_datetime(text):
        return None
    date_part, time_part = text.split("T", 1)
    dm = re.match(r"^(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})$", date_part)
    tm = _TIME_RE.match(time_part)
    seconds = Fraction(tm.group(3) + (tm.group(4) or ""))
    return (
        int(dm.group(1)),
        int(dm.group(2)),
        int(dm.group(3)),
        int(tm.group(1)),
        int(tm.group(2)),
        seconds,
    )
