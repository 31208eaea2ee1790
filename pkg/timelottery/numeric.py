"""
Numeric backends.

Every value type is built in one of two modes. ``FLOAT`` stores IEEE doubles and
compares rates with a relative tolerance. ``EXACT`` stores ``Fraction`` values
built from the decimal text of the input, so ``0.1`` is exactly 1/10 and every
comparison is exact.
"""

import math
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from typing import TypeAlias

from timelottery.errors import ValidationError

Number: TypeAlias = float | Fraction

# Relative tolerance for indifference between two rates (float mode only).
INDIFFERENCE_REL_TOL = 1e-9
# Relative tolerance for merging outcome keys and for probability sums.
MERGE_REL_TOL = 1e-12
PROBABILITY_SUM_TOL = 1e-12


class NumericMode(str, Enum):
    FLOAT = "float64"
    EXACT = "exact"


def coerce(value: object, mode: NumericMode) -> Number:
    """
    Converts an int, float, Fraction, Decimal or numeric string to the backend type.

    Floats become fractions through their shortest repr, so a value typed as
    ``0.7`` is 7/10 rather than the binary neighbour of 0.7.
    """
    if isinstance(value, bool):
        raise ValidationError(f"Expected a number, got boolean {value!r}")
    try:
        if mode is NumericMode.EXACT:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, float):
                if not math.isfinite(value):
                    raise ValueError(value)
                return Fraction(repr(value))
            if isinstance(value, (int, Decimal)):
                return Fraction(value)
            if isinstance(value, str):
                return Fraction(value.strip())
        else:
            if isinstance(value, (int, float, Fraction, Decimal)):
                result = float(value)
            elif isinstance(value, str):
                result = float(Fraction(value.strip()))
            else:
                raise TypeError(type(value).__name__)
            if not math.isfinite(result):
                raise ValueError(value)
            return result
    except (ValueError, TypeError, ZeroDivisionError) as e:
        raise ValidationError(f"Not a finite number: {value!r}") from e
    raise ValidationError(f"Not a finite number: {value!r}")


def rates_equal(a: Number, b: Number, mode: NumericMode) -> bool:
    """Indifference rule: exact equality, or relative difference ≤ 1e-9 for floats."""
    if mode is NumericMode.EXACT:
        return a == b
    return math.isclose(a, b, rel_tol=INDIFFERENCE_REL_TOL, abs_tol=0.0)


def keys_equal(a: Number, b: Number, mode: NumericMode) -> bool:
    if mode is NumericMode.EXACT:
        return a == b
    return math.isclose(a, b, rel_tol=MERGE_REL_TOL, abs_tol=0.0)


def sums_to_one(total: Number, mode: NumericMode) -> bool:
    if mode is NumericMode.EXACT:
        return total == 1
    return abs(total - 1.0) <= PROBABILITY_SUM_TOL


def zero(mode: NumericMode) -> Number:
    return Fraction(0) if mode is NumericMode.EXACT else 0.0


def one(mode: NumericMode) -> Number:
    return Fraction(1) if mode is NumericMode.EXACT else 1.0


def total(values, mode: NumericMode) -> Number:
    """Sums backend values; floats go through math.fsum."""
    if mode is NumericMode.EXACT:
        return sum(values, Fraction(0))
    return math.fsum(values)


def format_number(value: Number) -> float | str:
    """JSON form of a backend value: floats stay floats, fractions become 'n/d'."""
    if isinstance(value, Fraction):
        return str(value)
    return value
