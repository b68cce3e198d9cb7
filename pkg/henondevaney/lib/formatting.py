"""
Provides basic formatting and parsing utilities for the command-line client.
"""
import csv
import io
import json
import math
import re
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import numpy as np

from henondevaney.common import UsageError
from henondevaney.dynamics.coding import WordStatus, make_word

# Fixed CSV headers, one per table kind.
CSV_HEADERS = {
    'orbit': ['time', 'x', 'y'],
    'code': ['t', 's_i', 's_j'],
    'curves': ['family', 'level', 'branch', 'side', 't', 'x', 'y'],
    'boole': ['k', 'x', 'symbol'],
}

_RATIONAL_REGEX = re.compile(r'^\s*([+-]?\d+)\s*/\s*(\d+)\s*$')


def rational_str(value):
    """
    Fractions as "p/q" in lowest terms (just "p" when q = 1); floats as their
    shortest round-trip decimal.
    """
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return '%d/%d' % (value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_scalar(s):
    """
    s: "p/q", an integer or a decimal ("0.25", "-1.5e-3")
    Returns the exact Fraction it denotes.
    """
    s = s.strip().replace('−', '-')
    match = _RATIONAL_REGEX.match(s)
    if match:
        numerator, denominator = int(match.group(1)), int(match.group(2))
        if denominator == 0:
            raise UsageError('Zero denominator in %s' % s)
        return Fraction(numerator, denominator)
    try:
        value = Decimal(s)
    except InvalidOperation:
        raise UsageError('Invalid number: %s, expected p/q or a decimal' % s)
    if not value.is_finite():
        raise UsageError('Invalid number: %s, expected a finite value' % s)
    return Fraction(value)


def parse_point(s):
    """
    s: "x,y"
    Returns (Fraction, Fraction).
    """
    tokens = s.split(',')
    if len(tokens) != 2:
        raise UsageError('Invalid point: %s, expected x,y' % s)
    return tuple(parse_scalar(token) for token in tokens)


def parse_word(s, status=WordStatus.TRUNCATED):
    """
    s: comma- or space-separated signed run lengths, e.g. "3,-2" or "1 -4".
    Returns a CoordinateWord; an empty string is the empty word.
    """
    tokens = [token for token in re.split(r'[,\s]+', s.strip()) if token]
    try:
        entries = [int(token.replace('−', '-')) for token in tokens]
    except ValueError:
        raise UsageError('Invalid word: %s, expected integers like 3,-2' % s)
    return make_word(entries, status)


def parse_box(s):
    """
    s: "x_lo,x_hi,y_lo,y_hi"
    """
    tokens = s.split(',')
    if len(tokens) != 4:
        raise UsageError('Invalid box: %s, expected x_lo,x_hi,y_lo,y_hi' % s)
    return tuple(float(parse_scalar(token)) for token in tokens)


def jsonable(obj):
    """
    Recursively convert a structure of dicts, lists, tuples, Fractions, numpy
    scalars and complex numbers into plain JSON values. Rationals become "p/q"
    strings.
    """
    if isinstance(obj, dict):
        return {str(key): jsonable(value) for key, value in obj.items()}
    if hasattr(obj, 'to_dict'):
        return jsonable(obj.to_dict())
    if isinstance(obj, (list, tuple)):
        return [jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isinf(value):
            return '+inf' if value > 0 else '-inf'
        if math.isnan(value):
            return 'nan'
        return value
    if isinstance(obj, complex):
        return {'re': obj.real, 'im': obj.imag}
    return obj


def pretty_json(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=4, separators=(',', ': '))


def csv_table(kind, rows):
    """
    Render rows (sequences matching CSV_HEADERS[kind]) as CSV text with the
    fixed header for the table kind.
    """
    if kind not in CSV_HEADERS:
        raise UsageError('No CSV layout for %s' % kind)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(CSV_HEADERS[kind])
    for row in rows:
        writer.writerow([rational_str(cell) if cell is not None else '' for cell in row])
    return out.getvalue()
