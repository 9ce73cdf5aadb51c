"""Exact matrix-valued symbol arithmetic with radial and parabolic bookkeeping.

Symbols live over the fiber cotangent coordinates xi_1 .. xi_{2n} of a complex
n-dimensional model, together with a formal positive radius R subject to the
rewrite R^2 -> xi_2^2 + ... + xi_{2n}^2.  Exponent tuples have length 2n + 1,
the last slot holding the R power.  xi_1 is the conormal variable; xi_{n+1}
(index n) is the contact covariable carrying parabolic weight 2, the remaining
boundary variables carry weight 1.

Two layers are provided:

* ``PolySymbol`` -- finitely supported map from exponent tuples to sparse
  ``FiberOperator`` coefficients.
* ``RationalBoundarySymbol`` -- sums of terms P * (xi_1 - iR)^-a
  (xi_1 + iR)^-b R^-c, closed under the ring operations, with exact equality.

Symbols restricted to a contact ray replace xi_{n+1} by -+R and turn off the
R^2 rewrite (the radius and the contact covariable coincide there).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fiber import FiberOperator
from .scalars import I, ScalarExt


class ZeroSymbolError(ValueError):
    """Raised when an order or principal part of the zero symbol is requested."""


@dataclass(frozen=True)
class OrderProfile:
    """Classical order plus the two Heisenberg-face orders of a lifted symbol."""

    classical: int
    upper: int
    lower: int


def _zero_exps(n: int) -> tuple:
    return (0,) * (2 * n + 1)


def monomial_exps(n: int, powers: dict) -> tuple:
    """Exponent tuple from a map {variable index (1-based) or 'R': power}."""
    e = [0] * (2 * n + 1)
    for key, p in powers.items():
        if key == "R":
            e[2 * n] = p
        else:
            if not 1 <= key <= 2 * n:
                raise ValueError(f"variable index {key} out of range")
            e[key - 1] = p
    return tuple(e)


class PolySymbol:
    """Matrix-valued polynomial in (xi, R) with exact sparse coefficients."""

    __slots__ = ("n", "rows", "cols", "terms", "reduce_r")

    def __init__(self, n: int, rows: int, cols: int, terms=None, reduce_r: bool = True):
        self.n = n
        self.rows = rows
        self.cols = cols
        self.reduce_r = reduce_r
        self.terms = {}
        if terms:
            for exps, coeff in terms.items():
                if not coeff.is_zero():
                    self.terms[tuple(exps)] = coeff
        self._normalize_r()

    # -- construction helpers ----------------------------------------------

    @staticmethod
    def zero(n: int, rows: int, cols: int, reduce_r: bool = True) -> "PolySymbol":
        return PolySymbol(n, rows, cols, reduce_r=reduce_r)

    @staticmethod
    def constant(n: int, coeff: FiberOperator, reduce_r: bool = True) -> "PolySymbol":
        return PolySymbol(
            n, coeff.rows, coeff.cols, {_zero_exps(n): coeff}, reduce_r=reduce_r
        )

    @staticmethod
    def monomial(n: int, powers: dict, coeff: FiberOperator, reduce_r=True) -> "PolySymbol":
        return PolySymbol(
            n, coeff.rows, coeff.cols, {monomial_exps(n, powers): coeff}, reduce_r=reduce_r
        )

    @staticmethod
    def variable(n: int, idx: int, dim: int = 1, reduce_r: bool = True) -> "PolySymbol":
        """The scalar symbol xi_idx (1-based) times the identity of size dim."""
        return PolySymbol.monomial(n, {idx: 1}, FiberOperator.identity(dim), reduce_r)

    # -- canonical form -----------------------------------------------------

    def _normalize_r(self):
        """Rewrite R^2 -> sum of boundary squares until every R power is 0/1."""
        if not self.reduce_r:
            return
        npos = 2 * self.n
        pending = [e for e in self.terms if e[npos] >= 2]
        while pending:
            exps = pending.pop()
            coeff = self.terms.pop(exps, None)
            if coeff is None:
                continue
            base = list(exps)
            base[npos] -= 2
            for j in range(1, npos):  # boundary variables xi_2 .. xi_{2n}
                e2 = list(base)
                e2[j] += 2
                key = tuple(e2)
                cur = self.terms.get(key)
                new = coeff if cur is None else cur + coeff
                if new.is_zero():
                    self.terms.pop(key, None)
                else:
                    self.terms[key] = new
                    if key[npos] >= 2:
                        pending.append(key)

    def _check_compat(self, other: "PolySymbol"):
        if self.n != other.n or self.reduce_r != other.reduce_r:
            raise ValueError("incompatible symbol rings")

    # -- ring operations ------------------------------------------------------

    def __add__(self, other: "PolySymbol") -> "PolySymbol":
        self._check_compat(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shape mismatch in symbol sum")
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            cur = out.get(exps)
            new = coeff if cur is None else cur + coeff
            if new.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = new
        return PolySymbol(self.n, self.rows, self.cols, out, self.reduce_r)

    def __sub__(self, other: "PolySymbol") -> "PolySymbol":
        return self + (-other)

    def __neg__(self) -> "PolySymbol":
        return PolySymbol(
            self.n, self.rows, self.cols,
            {e: -c for e, c in self.terms.items()}, self.reduce_r,
        )

    def __matmul__(self, other: "PolySymbol") -> "PolySymbol":
        self._check_compat(other)
        if self.cols != other.rows:
            raise ValueError("matrix dimension mismatch in symbol product")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 @ c2
                if prod.is_zero():
                    continue
                cur = out.get(exps)
                out[exps] = prod if cur is None else cur + prod
        return PolySymbol(self.n, self.rows, other.cols, out, self.reduce_r)

    def scale(self, c) -> "PolySymbol":
        return PolySymbol(
            self.n, self.rows, self.cols,
            {e: coeff.scale(c) for e, coeff in self.terms.items()}, self.reduce_r,
        )

    def mul_scalar_poly(self, other: "PolySymbol") -> "PolySymbol":
        """Multiply by a 1x1 polynomial symbol, keeping this matrix shape."""
        self._check_compat(other)
        if (other.rows, other.cols) != (1, 1):
            raise ValueError("scalar-poly multiplier must be 1x1")
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                prod = c1.scale(c2.entry(0, 0))
                if prod.is_zero():
                    continue
                cur = out.get(exps)
                out[exps] = prod if cur is None else cur + prod
        return PolySymbol(self.n, self.rows, self.cols, out, self.reduce_r)

    def left_mul(self, mat: FiberOperator) -> "PolySymbol":
        return PolySymbol(
            self.n, mat.rows, self.cols,
            {e: mat @ c for e, c in self.terms.items()}, self.reduce_r,
        )

    def right_mul(self, mat: FiberOperator) -> "PolySymbol":
        return PolySymbol(
            self.n, self.rows, mat.cols,
            {e: c @ mat for e, c in self.terms.items()}, self.reduce_r,
        )

    def adjoint(self) -> "PolySymbol":
        """Entrywise conjugate transpose; xi and R are treated as real."""
        return PolySymbol(
            self.n, self.cols, self.rows,
            {e: c.adjoint() for e, c in self.terms.items()}, self.reduce_r,
        )

    # -- calculus -------------------------------------------------------------

    def dxi(self, idx: int) -> "PolySymbol":
        """Partial derivative in xi_idx (1-based)."""
        pos = idx - 1
        out = {}
        for exps, coeff in self.terms.items():
            p = exps[pos]
            if p == 0:
                continue
            e2 = list(exps)
            e2[pos] -= 1
            key = tuple(e2)
            scaled = coeff.scale(p)
            cur = out.get(key)
            out[key] = scaled if cur is None else cur + scaled
        return PolySymbol(self.n, self.rows, self.cols, out, self.reduce_r)

    def subs_xi1_iR(self, sign: int) -> "PolySymbol":
        """Substitute xi_1 -> sign * i * R."""
        out = {}
        factor = I if sign > 0 else -I
        npos = 2 * self.n
        for exps, coeff in self.terms.items():
            p = exps[0]
            e2 = list(exps)
            e2[0] = 0
            e2[npos] += p
            key = tuple(e2)
            scaled = coeff.scale(factor**p)
            cur = out.get(key)
            new = scaled if cur is None else cur + scaled
            out[key] = new
        return PolySymbol(self.n, self.rows, self.cols, out, self.reduce_r)

    def restrict_ray(self, side: int) -> "PolySymbol":
        """Restrict to the contact ray: xi'' -> 0, xi_{n+1} -> -side * R.

        On the positive ray (side +1) the radius equals -xi_{n+1}; the result
        lives in the ring without the R^2 rewrite.
        """
        out = {}
        n, npos = self.n, 2 * self.n
        for exps, coeff in self.terms.items():
            if any(exps[j] for j in range(1, npos) if j != n):
                continue  # xi'' monomials vanish on the ray
            p = exps[n]
            e2 = list(exps)
            e2[n] = 0
            e2[npos] += p
            if side > 0 and p % 2 == 1:
                coeff = -coeff
            key = tuple(e2)
            cur = out.get(key)
            new = coeff if cur is None else cur + coeff
            out[key] = new
        return PolySymbol(self.n, self.rows, self.cols, out, reduce_r=False)

    # -- structure queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("PolySymbol is unhashable")

    def radial_degrees(self):
        return {sum(e) for e in self.terms}

    def radial_order(self) -> int:
        if self.is_zero():
            raise ZeroSymbolError("zero symbol has no radial order")
        return max(self.radial_degrees())

    def xi1_degree(self) -> int:
        return max((e[0] for e in self.terms), default=0)

    def eval_num(self, xi, R):
        """Numeric evaluation; xi is a length-2n array (complex allowed)."""
        import numpy as np

        out = np.zeros((self.rows, self.cols), dtype=complex)
        npos = 2 * self.n
        for exps, coeff in self.terms.items():
            val = complex(R) ** exps[npos]
            for j in range(npos):
                if exps[j]:
                    val *= complex(xi[j]) ** exps[j]
            out += val * coeff.to_numpy()
        return out

    def __repr__(self):
        return f"PolySymbol(n={self.n}, {self.rows}x{self.cols}, {len(self.terms)} terms)"


def norm_sq_symbol(n: int, dim: int = 1, boundary: bool = False) -> PolySymbol:
    """|xi|^2 (or |xi'|^2 if boundary) times the identity of size dim."""
    ident = FiberOperator.identity(dim)
    terms = {}
    start = 1 if boundary else 0
    for j in range(start, 2 * n):
        terms[monomial_exps(n, {j + 1: 2})] = ident
    return PolySymbol(n, dim, dim, terms)


class RationalBoundarySymbol:
    """Sum of terms P(xi, R) (xi_1 - iR)^-a (xi_1 + iR)^-b R^-c.

    The type covers both the interior symbols (rational in xi_1, poles on the
    imaginary axis at +-iR) and their boundary values (a = b = 0, xi_1-free).
    Equality is exact, decided by clearing denominators inside the quotient
    ring where R^2 equals the boundary norm square.
    """

    __slots__ = ("n", "rows", "cols", "terms", "reduce_r")

    def __init__(self, n, rows, cols, terms=None, reduce_r=True):
        self.n = n
        self.rows = rows
        self.cols = cols
        self.reduce_r = reduce_r
        self.terms = []
        if terms:
            for poly, a, b, c in terms:
                if a < 0 or b < 0 or c < 0:
                    raise ValueError("pole orders must be nonnegative")
                if not poly.is_zero():
                    self.terms.append((poly, a, b, c))
        self._merge()

    def _merge(self):
        buckets = {}
        for poly, a, b, c in self.terms:
            key = (a, b, c)
            cur = buckets.get(key)
            buckets[key] = poly if cur is None else cur + poly
        self.terms = [
            (poly, a, b, c)
            for (a, b, c), poly in sorted(buckets.items())
            if not poly.is_zero()
        ]

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def from_poly(poly: PolySymbol, a=0, b=0, c=0) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(
            poly.n, poly.rows, poly.cols, [(poly, a, b, c)], poly.reduce_r
        )

    @staticmethod
    def zero(n, rows, cols, reduce_r=True) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(n, rows, cols, None, reduce_r)

    # -- ring operations --------------------------------------------------------

    def _check_compat(self, other):
        if self.n != other.n or self.reduce_r != other.reduce_r:
            raise ValueError("incompatible symbol rings")

    def __add__(self, other: "RationalBoundarySymbol") -> "RationalBoundarySymbol":
        self._check_compat(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shape mismatch in symbol sum")
        return RationalBoundarySymbol(
            self.n, self.rows, self.cols, self.terms + other.terms, self.reduce_r
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RationalBoundarySymbol(
            self.n, self.rows, self.cols,
            [(-p, a, b, c) for p, a, b, c in self.terms], self.reduce_r,
        )

    def __matmul__(self, other: "RationalBoundarySymbol") -> "RationalBoundarySymbol":
        self._check_compat(other)
        out = []
        for p1, a1, b1, c1 in self.terms:
            for p2, a2, b2, c2 in other.terms:
                out.append((p1 @ p2, a1 + a2, b1 + b2, c1 + c2))
        return RationalBoundarySymbol(self.n, self.rows, other.cols, out, self.reduce_r)

    def scale(self, c) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(
            self.n, self.rows, self.cols,
            [(p.scale(c), a, b, cc) for p, a, b, cc in self.terms], self.reduce_r,
        )

    def left_mul(self, mat: FiberOperator) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(
            self.n, mat.rows, self.cols,
            [(p.left_mul(mat), a, b, c) for p, a, b, c in self.terms], self.reduce_r,
        )

    def right_mul(self, mat: FiberOperator) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(
            self.n, self.rows, mat.cols,
            [(p.right_mul(mat), a, b, c) for p, a, b, c in self.terms], self.reduce_r,
        )

    def adjoint(self) -> "RationalBoundarySymbol":
        """Conjugate transpose; conjugation swaps the two pole factors."""
        return RationalBoundarySymbol(
            self.n, self.cols, self.rows,
            [(p.adjoint(), b, a, c) for p, a, b, c in self.terms], self.reduce_r,
        )

    def restrict_ray(self, side: int) -> "RationalBoundarySymbol":
        return RationalBoundarySymbol(
            self.n, self.rows, self.cols,
            [(p.restrict_ray(side), a, b, c) for p, a, b, c in self.terms],
            reduce_r=False,
        )

    # -- exact predicates ------------------------------------------------------

    def _cleared_numerator(self) -> PolySymbol:
        """Numerator after clearing all denominators over a common power."""
        if not self.terms:
            return PolySymbol.zero(self.n, self.rows, self.cols, self.reduce_r)
        A = max(a for _, a, _, _ in self.terms)
        B = max(b for _, _, b, _ in self.terms)
        C = max(c for _, _, _, c in self.terms)
        ident = FiberOperator.identity(1)
        d_pole = PolySymbol(
            self.n, 1, 1,
            {
                monomial_exps(self.n, {1: 1}): ident,
                monomial_exps(self.n, {"R": 1}): ident.scale(-I),
            },
            self.reduce_r,
        )
        e_pole = PolySymbol(
            self.n, 1, 1,
            {
                monomial_exps(self.n, {1: 1}): ident,
                monomial_exps(self.n, {"R": 1}): ident.scale(I),
            },
            self.reduce_r,
        )
        r_poly = PolySymbol(
            self.n, 1, 1, {monomial_exps(self.n, {"R": 1}): ident}, self.reduce_r
        )
        total = PolySymbol.zero(self.n, self.rows, self.cols, self.reduce_r)
        for poly, a, b, c in self.terms:
            scalar = PolySymbol.constant(self.n, ident, self.reduce_r)
            for _ in range(A - a):
                scalar = scalar @ d_pole
            for _ in range(B - b):
                scalar = scalar @ e_pole
            for _ in range(C - c):
                scalar = scalar @ r_poly
            total = total + poly.mul_scalar_poly(scalar)
        return total

    def is_zero(self) -> bool:
        if not self.terms:
            return True
        return self._cleared_numerator().is_zero()

    def canonical(self) -> "RationalBoundarySymbol":
        """Collapse to a single term over the common denominator.

        Idempotent; used for stable dumps.  Equality of canonical forms is
        plain term-by-term polynomial equality.
        """
        if not self.terms:
            return self
        A = max(a for _, a, _, _ in self.terms)
        B = max(b for _, _, b, _ in self.terms)
        C = max(c for _, _, _, c in self.terms)
        num = self._cleared_numerator()
        if num.is_zero():
            return RationalBoundarySymbol.zero(self.n, self.rows, self.cols, self.reduce_r)
        return RationalBoundarySymbol(
            self.n, self.rows, self.cols, [(num, A, B, C)], self.reduce_r
        )

    def __eq__(self, other):
        if not isinstance(other, RationalBoundarySymbol):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("RationalBoundarySymbol is unhashable")

    # -- orders ----------------------------------------------------------------

    def radial_order(self) -> int:
        if not self.terms:
            raise ZeroSymbolError("zero symbol has no radial order")
        return max(p.radial_order() - (a + b + c) for p, a, b, c in self.terms)

    def extended_orders(self) -> OrderProfile:
        """Order triple of the lift of a boundary symbol h(xi')/R^c.

        Requires a xi_1-free, pole-free symbol whose terms share one radial
        order.  The parabolic order counts xi_{n+1} and R with weight 2 and
        the remaining boundary variables with weight 1.
        """
        if not self.terms:
            raise ZeroSymbolError("zero symbol has no order profile")
        n, npos = self.n, 2 * self.n
        classical = set()
        parabolic = []
        for poly, a, b, c in self.terms:
            if a or b:
                raise ValueError("not lift-classifiable: interior poles present")
            for exps in poly.terms:
                if exps[0]:
                    raise ValueError("not lift-classifiable: depends on xi_1")
                rad = sum(exps) - c
                par = (
                    sum(exps[j] for j in range(1, npos) if j != n)
                    + 2 * exps[n] + 2 * exps[npos] - 2 * c
                )
                classical.add(rad)
                parabolic.append(par)
        if len(classical) != 1:
            raise ValueError("not lift-classifiable: mixed radial homogeneity")
        m = max(parabolic)
        return OrderProfile(classical.pop(), m, m)

    # -- evaluation ---------------------------------------------------------------

    def eval_num(self, xi, R):
        import numpy as np

        out = np.zeros((self.rows, self.cols), dtype=complex)
        xi1 = complex(xi[0])
        d = xi1 - 1j * R
        e = xi1 + 1j * R
        for poly, a, b, c in self.terms:
            out += poly.eval_num(xi, R) / (d**a * e**b * complex(R) ** c)
        return out

    def __repr__(self):
        return (
            f"RationalBoundarySymbol(n={self.n}, {self.rows}x{self.cols}, "
            f"{len(self.terms)} terms)"
        )


# -- parabolic expansion and Heisenberg principal parts -------------------------


def _half_binom(p: Fraction, t: int) -> Fraction:
    out = Fraction(1)
    for i in range(t):
        out *= p - i
    for i in range(1, t + 1):
        out /= i
    return out


def _monomial_graded_parts(n, exps, c, side, depth_grades):
    """Parabolic expansion of one monomial xi''^alpha xi_{n+1}^j R^(e-c).

    Substitutes xi_{n+1} = -side |eta0|/2 and R = (|eta0|/2)(1 + 4u)^(1/2)
    with u = |eta'|^2/eta0^2, and yields (grade, eta0_exp, eta_exps, q_exp,
    Fraction factor) contributions; q_exp counts folded powers of |eta'|^2.
    """
    npos = 2 * n
    j = exps[n]
    p = exps[npos] - c  # net R power, may be negative
    front = Fraction((-side) ** (j % 2), 2**j) / (Fraction(2) ** p)
    eta_exps = [0] * (2 * (n - 1))
    for jj in range(1, npos):
        if jj == n or exps[jj] == 0:
            continue
        if 1 <= jj <= n - 1:  # xi_{j+1} -> eta_j
            eta_exps[jj - 1] = exps[jj]
        else:  # xi_{j+n+1} -> eta_{j+n-1}
            eta_exps[jj - 2] = exps[jj]
    w1 = sum(eta_exps)
    top_grade = w1 + 2 * j + 2 * p
    half = Fraction(p, 2)
    for t in range(depth_grades):
        coeff = front * _half_binom(half, t) * Fraction(4**t)
        if coeff == 0:
            continue
        yield top_grade - 2 * t, j + p - 2 * t, tuple(eta_exps), t, coeff


def _unfold_bucket(n, bucket):
    """Expand folded |eta'|^2 powers; returns {eta0_exp: {eta_exps: coeff}}."""
    k = 2 * (n - 1)
    out = {}

    def add(e0, exps, coeff):
        layer = out.setdefault(e0, {})
        cur = layer.get(exps)
        new = coeff if cur is None else cur + coeff
        if new.is_zero():
            layer.pop(exps, None)
        else:
            layer[exps] = new

    def expand(e0, exps, q, coeff):
        if q == 0:
            add(e0, exps, coeff)
            return
        for j in range(k):
            e2 = list(exps)
            e2[j] += 2
            expand(e0, tuple(e2), q - 1, coeff)

    for (e0, eta, q), coeff in bucket.items():
        expand(e0, eta, q, coeff)
    return {e0: layer for e0, layer in out.items() if layer}


def parabolic_parts(sym: RationalBoundarySymbol, side: int, depth: int):
    """Graded parabolic expansion of a boundary symbol on one Heisenberg face.

    Returns a list of (grade, parts) in descending grade, keeping the first
    ``depth`` grades with a nonvanishing aggregate.  ``parts`` maps an |eta0|
    exponent to a map {eta' exponent tuple: FiberOperator}.  Only even grade
    gaps occur.  The descent is a bounded search; symbols vanishing through
    more than ~24 consecutive grades are reported as zero.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    if not sym.terms:
        raise ZeroSymbolError("zero symbol has no parabolic expansion")
    n = sym.n
    grades = {}
    max_extra = depth + 24
    for poly, a, b, c in sym.terms:
        if a or b:
            raise ValueError("interior poles present; restrict to the boundary first")
        for exps, coeff in poly.terms.items():
            if exps[0]:
                raise ValueError("boundary symbols cannot depend on xi_1")
            for grade, e0, eta, q, frac in _monomial_graded_parts(
                n, exps, c, side, max_extra
            ):
                key = (e0, eta, q)
                bucket = grades.setdefault(grade, {})
                cur = bucket.get(key)
                add = coeff.scale(frac)
                new = add if cur is None else cur + add
                if new.is_zero():
                    bucket.pop(key, None)
                else:
                    bucket[key] = new
    out = []
    for grade in sorted(grades, reverse=True):
        parts = _unfold_bucket(n, grades[grade])
        if parts:
            out.append((grade, parts))
        if len(out) == depth:
            break
    return out


def heisenberg_principal(sym: RationalBoundarySymbol, side: int):
    """Leading parabolic part of a boundary symbol on the given face.

    Returns (grade, parts) with parts as in :func:`parabolic_parts`.
    """
    parts = parabolic_parts(sym, side, 1)
    if not parts:
        raise ZeroSymbolError("symbol vanishes to all computed parabolic orders")
    return parts[0]


def isotropic_at_eta0_one(parts: dict) -> dict:
    """Merge the |eta0| layers of a principal part at |eta0| = 1."""
    out = {}
    for layer in parts.values():
        for exps, coeff in layer.items():
            cur = out.get(exps)
            new = coeff if cur is None else cur + coeff
            if new.is_zero():
                out.pop(exps, None)
            else:
                out[exps] = new
    return out
