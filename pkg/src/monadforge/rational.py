"""Exact rational scalars, including the point at infinity used by test functions.

Every quantity in the library is an exact ``fractions.Fraction``; there are no
floating-point numbers and no tolerances anywhere.  ``ExtRat`` adjoins ``+inf``
to the nonnegative rationals with the usual conventions of lower-semicontinuous
analysis: ``a + inf = inf`` and ``0 * inf = 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[int, str, Fraction]


def rat(x: RationalLike) -> Fraction:
    """Coerce ints and 'p/q' strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    """Render a Fraction as 'p/q' (or 'p' when the denominator is 1)."""
    return str(x)


class ExtRat:
    """A finite nonnegative rational or +inf, with a total order."""

    __slots__ = ("finite",)

    def __init__(self, value: RationalLike | None = None):
        if value is None:
            object.__setattr__(self, "finite", None)
        else:
            v = rat(value)
            if v < 0:
                raise ValueError(f"ExtRat must be nonnegative, got {v}")
            object.__setattr__(self, "finite", v)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ExtRat is immutable")

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    def __add__(self, other: "ExtRat") -> "ExtRat":
        other = ext(other)
        if self.is_infinite or other.is_infinite:
            return INF
        return ExtRat(self.finite + other.finite)

    __radd__ = __add__

    def __mul__(self, other) -> "ExtRat":
        other = ext(other)
        # 0 * inf = 0, matching the integration convention.
        if (self.finite == 0 and not self.is_infinite) or (
            other.finite == 0 and not other.is_infinite
        ):
            return ZERO
        if self.is_infinite or other.is_infinite:
            return INF
        return ExtRat(self.finite * other.finite)

    __rmul__ = __mul__

    def _cmp_key(self):
        return (1, Fraction(0)) if self.is_infinite else (0, self.finite)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (ExtRat, Fraction, int)):
            return NotImplemented
        return self._cmp_key() == ext(other)._cmp_key()

    def __lt__(self, other) -> bool:
        return self._cmp_key() < ext(other)._cmp_key()

    def __le__(self, other) -> bool:
        return self._cmp_key() <= ext(other)._cmp_key()

    def __gt__(self, other) -> bool:
        return ext(other)._cmp_key() < self._cmp_key()

    def __ge__(self, other) -> bool:
        return ext(other)._cmp_key() <= self._cmp_key()

    def __hash__(self):
        return hash(("ExtRat", self.finite))

    def __repr__(self):
        return "inf" if self.is_infinite else rat_str(self.finite)

    __str__ = __repr__


def ext(x) -> ExtRat:
    if isinstance(x, ExtRat):
        return x
    if x is None:
        return INF
    return ExtRat(x)


INF = ExtRat(None)
ZERO = ExtRat(0)
ONE = ExtRat(1)


def ext_sum(values) -> ExtRat:
    total = ZERO
    for v in values:
        total = total + ext(v)
    return total


def ext_min(values) -> ExtRat:
    it = iter(values)
    try:
        best = ext(next(it))
    except StopIteration:
        raise ValueError("ext_min of empty sequence") from None
    for v in it:
        v = ext(v)
        if v < best:
            best = v
    return best


def ext_max(values) -> ExtRat:
    it = iter(values)
    try:
        best = ext(next(it))
    except StopIteration:
        raise ValueError("ext_max of empty sequence") from None
    for v in it:
        v = ext(v)
        if best < v:
            best = v
    return best
