"""Exact contour integrals (1/2pi) of rational symbols in the conormal variable.

The integrands are rational in xi_1 with poles only at xi_1 = +- iR.  The
positively oriented contour encloses +iR, the negatively oriented one -iR;
orientation is part of the side, not a caller flag.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from math import factorial

from .scalars import I, ScalarExt
from .symbols import PolySymbol, RationalBoundarySymbol


class ContourSide(Enum):
    """Which family of poles is enclosed, with the matching orientation."""

    PLUS = 1    # encloses xi_1 = +iR, positively oriented
    MINUS = -1  # encloses xi_1 = -iR, negatively oriented

    @property
    def sign(self) -> int:
        return self.value


def _substitute_pole(poly: PolySymbol, side: int) -> PolySymbol:
    return poly.subs_xi1_iR(side)


def residue_at_pole(
    sym: RationalBoundarySymbol, side: ContourSide
) -> RationalBoundarySymbol:
    """(1/2pi) times the contour integral of ``sym`` over the chosen contour.

    Equals +i times the residue at +iR for the positive side and -i times the
    residue at -iR for the negative side.  Higher-order poles go through the
    derivative formula.  The result is xi_1-free.
    """
    s = side.sign
    n = sym.n
    out_terms = []
    for poly, a, b, c in sym.terms:
        # pole order at the enclosed point and the surviving opposite factor
        order = a if s > 0 else b
        other = b if s > 0 else a
        if order == 0:
            continue  # no pole on this side: zero contribution
        # g(xi_1) = poly * (opposite factor)^-other; differentiate order-1 times
        pieces = [(poly, other)]  # list of (polynomial, extra opposite power)
        for _ in range(order - 1):
            nxt = {}
            for q, m in pieces:
                dq = q.dxi(1)
                if not dq.is_zero():
                    key = m
                    nxt[key] = dq if key not in nxt else nxt[key] + dq
                if m:
                    down = q.scale(Fraction(-m))
                    key = m + 1
                    nxt[key] = down if key not in nxt else nxt[key] + down
            pieces = [(q, m) for m, q in nxt.items()]
        inv_fact = Fraction(1, factorial(order - 1))
        # orientation: +i Res at +iR, -i Res at -iR
        orient = I if s > 0 else -I
        for q, m in pieces:
            at_pole = _substitute_pole(q, s)
            if at_pole.is_zero():
                continue
            # opposite factor at the pole: (xi_1 +- iR) -> 2 s i R
            denom_scalar = (ScalarExt(0, 2 * s)) ** m  # (2 s i)^m
            coeff = orient * denom_scalar.inv() * inv_fact
            out_terms.append((at_pole.scale(coeff), 0, 0, c + m))
    return RationalBoundarySymbol(n, sym.rows, sym.cols, out_terms, sym.reduce_r)
