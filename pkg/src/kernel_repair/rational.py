"""Small helpers for exact rational arithmetic.

All coordinates, distances, and masses in this package are exact
``fractions.Fraction`` values.  Floats are accepted at API boundaries and
converted to their exact binary value; decimal strings such as ``"0.3"`` or
``"3/10"`` convert to the exact decimal/rational they denote.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DomainError


def as_fraction(x) -> Fraction:
    """Convert ``x`` to an exact Fraction.

    Accepts int, Fraction, str ("0.3", "3/10", "-1/2"), and finite float
    (converted to its exact binary value, not rounded to decimal).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x) or math.isnan(x):
            raise DomainError(f"cannot convert {x!r} to an exact rational")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational literal: {x!r}") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def frac_str(x) -> str:
    """Canonical string form used in files and reports ("3/10", "1", "inf")."""
    if x == math.inf:
        return "inf"
    f = as_fraction(x)
    return str(f)
