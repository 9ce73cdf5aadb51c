"""Exact scalars of the form a + b*s, with a, b Gaussian rationals and s**2 = 2.

Every coefficient appearing in the boundary-symbol computations lives in this
ring: the only irrationality required is the square root of 2 (frame
normalizations), and all residue arithmetic stays inside Q(i)[s]/(s^2 - 2).
"""

from __future__ import annotations

import math
from fractions import Fraction

_SQRT2 = math.sqrt(2.0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


class ScalarExt:
    """Element a + b*s of Q(i) extended by s = sqrt(2).

    Stored as four rationals: re/im of a and re/im of b.  Instances are
    immutable; equality is exact; division is total on nonzero elements
    (the ring is a field).
    """

    __slots__ = ("ar", "ai", "br", "bi")

    def __init__(self, ar=0, ai=0, br=0, bi=0):
        object.__setattr__(self, "ar", _frac(ar))
        object.__setattr__(self, "ai", _frac(ai))
        object.__setattr__(self, "br", _frac(br))
        object.__setattr__(self, "bi", _frac(bi))

    def __setattr__(self, name, value):
        raise AttributeError("ScalarExt is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def coerce(x) -> "ScalarExt":
        if isinstance(x, ScalarExt):
            return x
        if isinstance(x, (int, Fraction)):
            return ScalarExt(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ScalarExt")

    # -- ring structure ----------------------------------------------------

    def __add__(self, other):
        o = ScalarExt.coerce(other)
        return ScalarExt(self.ar + o.ar, self.ai + o.ai, self.br + o.br, self.bi + o.bi)

    __radd__ = __add__

    def __sub__(self, other):
        o = ScalarExt.coerce(other)
        return ScalarExt(self.ar - o.ar, self.ai - o.ai, self.br - o.br, self.bi - o.bi)

    def __rsub__(self, other):
        return ScalarExt.coerce(other) - self

    def __neg__(self):
        return ScalarExt(-self.ar, -self.ai, -self.br, -self.bi)

    def __mul__(self, other):
        o = ScalarExt.coerce(other)
        # (a1 + b1 s)(a2 + b2 s) = (a1 a2 + 2 b1 b2) + (a1 b2 + b1 a2) s
        ar = self.ar * o.ar - self.ai * o.ai + 2 * (self.br * o.br - self.bi * o.bi)
        ai = self.ar * o.ai + self.ai * o.ar + 2 * (self.br * o.bi + self.bi * o.br)
        br = self.ar * o.br - self.ai * o.bi + self.br * o.ar - self.bi * o.ai
        bi = self.ar * o.bi + self.ai * o.br + self.br * o.ai + self.bi * o.ar
        return ScalarExt(ar, ai, br, bi)

    __rmul__ = __mul__

    def inv(self) -> "ScalarExt":
        """Multiplicative inverse; raises ZeroDivisionError on zero."""
        # (a + b s)(a - b s) = a^2 - 2 b^2 =: d in Q(i)
        dr = self.ar * self.ar - self.ai * self.ai - 2 * (self.br * self.br - self.bi * self.bi)
        di = 2 * self.ar * self.ai - 4 * self.br * self.bi
        nrm = dr * dr + di * di
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero ScalarExt")
        # 1/d = (dr - i di)/|d|^2, then multiply by the s-conjugate a - b s
        er, ei = dr / nrm, -di / nrm
        return ScalarExt(
            self.ar * er - self.ai * ei,
            self.ar * ei + self.ai * er,
            -(self.br * er - self.bi * ei),
            -(self.br * ei + self.bi * er),
        )

    def __truediv__(self, other):
        return self * ScalarExt.coerce(other).inv()

    def __rtruediv__(self, other):
        return ScalarExt.coerce(other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- involutions and predicates ----------------------------------------

    def conj(self) -> "ScalarExt":
        """Complex conjugate (s is real, so only i flips sign)."""
        return ScalarExt(self.ar, -self.ai, self.br, -self.bi)

    def is_zero(self) -> bool:
        return self.ar == 0 and self.ai == 0 and self.br == 0 and self.bi == 0

    def is_real(self) -> bool:
        return self.ai == 0 and self.bi == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = ScalarExt.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.ar, self.ai, self.br, self.bi) == (o.ar, o.ai, o.br, o.bi)

    def __hash__(self):
        return hash((self.ar, self.ai, self.br, self.bi))

    # -- numeric export ------------------------------------------------------

    def to_complex(self) -> complex:
        return complex(
            float(self.ar) + _SQRT2 * float(self.br),
            float(self.ai) + _SQRT2 * float(self.bi),
        )

    def __repr__(self):
        def fmt(re, im):
            return f"({re}{'+' if im >= 0 else ''}{im}i)"

        parts = []
        if self.ar or self.ai:
            parts.append(fmt(self.ar, self.ai))
        if self.br or self.bi:
            parts.append(fmt(self.br, self.bi) + "*s")
        return " + ".join(parts) if parts else "0"


ZERO = ScalarExt(0)
ONE = ScalarExt(1)
I = ScalarExt(0, 1)
SQRT2 = ScalarExt(0, 0, 1, 0)
INV_SQRT2 = ScalarExt(0, 0, Fraction(1, 2), 0)


def rational(p, q=1) -> ScalarExt:
    return ScalarExt(Fraction(p, q))


def gaussian(re, im=0) -> ScalarExt:
    return ScalarExt(_frac(re), _frac(im))
