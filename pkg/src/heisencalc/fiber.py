"""Exterior-algebra fiber on k letters tensored with a trivial rank-r factor.

The fiber carries the normalized anti-holomorphic basis forms indexed by
strictly increasing multi-indices in [1, k].  Interior and wedge operators are
normalized so that each dual pair satisfies e_j eps_j + eps_j e_j = Id exactly.
Matrices are sparse maps over a fixed basis order: degrees ascending,
lexicographic within a degree, rank slot fastest.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .scalars import ONE, ScalarExt

FormIndex = tuple  # strictly increasing tuple of letters in [1, k]


def _sign_below(form: FormIndex, j: int) -> int:
    """Parity of the transposition count moving letter j past the smaller letters."""
    c = sum(1 for i in form if i < j)
    return -1 if c % 2 else 1


def interior_action(form: FormIndex, j: int):
    """Contract with letter j: returns (sign, reduced form) or None."""
    if j not in form:
        return None
    out = tuple(i for i in form if i != j)
    return _sign_below(form, j), out


def wedge_action(form: FormIndex, j: int):
    """Wedge with letter j: returns (sign, extended form) or None."""
    if j in form:
        return None
    out = tuple(sorted(form + (j,)))
    return _sign_below(form, j), out


class FiberBasis:
    """Ordered basis of the exterior fiber on k letters with rank-r slots."""

    def __init__(self, k: int, r: int = 1):
        if k < 0 or r < 1:
            raise ValueError("need k >= 0 and r >= 1")
        self.k = k
        self.r = r
        self.forms = tuple(
            form for q in range(k + 1) for form in combinations(range(1, k + 1), q)
        )
        self.form_pos = {f: p for p, f in enumerate(self.forms)}
        self.dim = len(self.forms) * r
        self.even_positions = tuple(
            self.index(f, s) for f in self.forms if len(f) % 2 == 0 for s in range(r)
        )
        self.odd_positions = tuple(
            self.index(f, s) for f in self.forms if len(f) % 2 == 1 for s in range(r)
        )

    def index(self, form: FormIndex, slot: int = 0) -> int:
        return self.form_pos[form] * self.r + slot

    def element(self, pos: int):
        return self.forms[pos // self.r], pos % self.r

    def degree_positions(self, q: int):
        return tuple(
            self.index(f, s) for f in self.forms if len(f) == q for s in range(self.r)
        )

    def __repr__(self):
        return f"FiberBasis(k={self.k}, r={self.r}, dim={self.dim})"


class FiberElement:
    """Finitely supported fiber vector: (form, slot) -> ScalarExt."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: FiberBasis, coeffs=None):
        self.basis = basis
        self.coeffs = {}
        if coeffs:
            for key, val in coeffs.items():
                v = ScalarExt.coerce(val)
                if not v.is_zero():
                    self.coeffs[key] = v

    def __add__(self, other: "FiberElement") -> "FiberElement":
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            cur = out.get(key)
            new = val if cur is None else cur + val
            if new.is_zero():
                out.pop(key, None)
            else:
                out[key] = new
        return FiberElement(self.basis, out)

    def scale(self, c) -> "FiberElement":
        c = ScalarExt.coerce(c)
        return FiberElement(
            self.basis, {k: c * v for k, v in self.coeffs.items()}
        )

    def degree_component(self, q: int) -> "FiberElement":
        return FiberElement(
            self.basis,
            {(f, s): v for (f, s), v in self.coeffs.items() if len(f) == q},
        )

    def apply(self, op: "FiberOperator") -> "FiberElement":
        out = {}
        for (form, slot), val in self.coeffs.items():
            col = self.basis.index(form, slot)
            for (i, j), w in op.data.items():
                if j != col:
                    continue
                key = self.basis.element(i)
                cur = out.get(key)
                new = w * val if cur is None else cur + w * val
                out[key] = new
        return FiberElement(self.basis, out)

    def __eq__(self, other):
        if not isinstance(other, FiberElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"FiberElement({len(self.coeffs)} terms)"


class FiberOperator:
    """Sparse exact matrix over a FiberBasis-ordered basis (or any fixed basis).

    Entries are ScalarExt; zero entries are never stored.  Shapes may be
    rectangular (restrictions between parity sub-bases).
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data=None):
        self.rows = rows
        self.cols = cols
        self.data = {}
        if data:
            for key, val in data.items():
                v = ScalarExt.coerce(val)
                if not v.is_zero():
                    self.data[key] = v

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(dim: int) -> "FiberOperator":
        return FiberOperator(dim, dim, {(i, i): ONE for i in range(dim)})

    @staticmethod
    def zero(rows: int, cols: int = None) -> "FiberOperator":
        return FiberOperator(rows, cols if cols is not None else rows)

    @staticmethod
    def scalar(value) -> "FiberOperator":
        return FiberOperator(1, 1, {(0, 0): ScalarExt.coerce(value)})

    @staticmethod
    def diag(values) -> "FiberOperator":
        values = list(values)
        return FiberOperator(
            len(values), len(values), {(i, i): v for i, v in enumerate(values)}
        )

    @staticmethod
    def from_action(basis: FiberBasis, action) -> "FiberOperator":
        """Build a matrix from a map form -> (sign, form) | None, slot-diagonal."""
        data = {}
        for f in basis.forms:
            res = action(f)
            if res is None:
                continue
            sign, g = res
            for s in range(basis.r):
                data[(basis.index(g, s), basis.index(f, s))] = ScalarExt.coerce(sign)
        return FiberOperator(basis.dim, basis.dim, data)

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "FiberOperator") -> "FiberOperator":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in fiber-operator sum")
        out = dict(self.data)
        for key, val in other.data.items():
            cur = out.get(key)
            new = val if cur is None else cur + val
            if new.is_zero():
                out.pop(key, None)
            else:
                out[key] = new
        res = FiberOperator(self.rows, self.cols)
        res.data = out
        return res

    def __sub__(self, other: "FiberOperator") -> "FiberOperator":
        return self + (-other)

    def __neg__(self) -> "FiberOperator":
        res = FiberOperator(self.rows, self.cols)
        res.data = {k: -v for k, v in self.data.items()}
        return res

    def __matmul__(self, other: "FiberOperator") -> "FiberOperator":
        if self.cols != other.rows:
            raise ValueError(
                f"dimension mismatch: ({self.rows}x{self.cols}) @ ({other.rows}x{other.cols})"
            )
        by_row = {}
        for (i, j), v in other.data.items():
            by_row.setdefault(i, []).append((j, v))
        out = {}
        for (i, k), v in self.data.items():
            for j, w in by_row.get(k, ()):
                key = (i, j)
                cur = out.get(key)
                new = v * w if cur is None else cur + v * w
                out[key] = new
        res = FiberOperator(self.rows, other.cols)
        res.data = {k: v for k, v in out.items() if not v.is_zero()}
        return res

    def scale(self, c) -> "FiberOperator":
        c = ScalarExt.coerce(c)
        res = FiberOperator(self.rows, self.cols)
        if not c.is_zero():
            res.data = {k: c * v for k, v in self.data.items()}
        return res

    def adjoint(self) -> "FiberOperator":
        res = FiberOperator(self.cols, self.rows)
        res.data = {(j, i): v.conj() for (i, j), v in self.data.items()}
        return res

    def transpose(self) -> "FiberOperator":
        res = FiberOperator(self.cols, self.rows)
        res.data = {(j, i): v for (i, j), v in self.data.items()}
        return res

    def trace(self) -> ScalarExt:
        t = ScalarExt(0)
        for (i, j), v in self.data.items():
            if i == j:
                t = t + v
        return t

    def restrict(self, row_positions, col_positions) -> "FiberOperator":
        rmap = {p: i for i, p in enumerate(row_positions)}
        cmap = {p: i for i, p in enumerate(col_positions)}
        res = FiberOperator(len(rmap), len(cmap))
        res.data = {
            (rmap[i], cmap[j]): v
            for (i, j), v in self.data.items()
            if i in rmap and j in cmap
        }
        return res

    # -- predicates / export -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, FiberOperator):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and (self - other).is_zero()
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.data.items())))

    def entry(self, i: int, j: int) -> ScalarExt:
        return self.data.get((i, j), ScalarExt(0))

    def to_numpy(self):
        import numpy as np

        out = np.zeros((self.rows, self.cols), dtype=complex)
        for (i, j), v in self.data.items():
            out[i, j] = v.to_complex()
        return out

    def __repr__(self):
        return f"FiberOperator({self.rows}x{self.cols}, nnz={len(self.data)})"


# -- the standard operators ---------------------------------------------------


def interior_op(basis: FiberBasis, j: int) -> FiberOperator:
    """Degree-lowering contraction e_j; e_j^2 = 0 and e_j eps_j + eps_j e_j = Id."""
    if not 1 <= j <= basis.k:
        raise ValueError(f"letter index {j} out of range [1, {basis.k}]")
    return FiberOperator.from_action(basis, lambda f: interior_action(f, j))


def wedge_op(basis: FiberBasis, j: int) -> FiberOperator:
    """Degree-raising wedge eps_j, the adjoint of interior_op(basis, j)."""
    if not 1 <= j <= basis.k:
        raise ValueError(f"letter index {j} out of range [1, {basis.k}]")
    return FiberOperator.from_action(basis, lambda f: wedge_action(f, j))


def degree_projector(basis: FiberBasis, q: int) -> FiberOperator:
    if not 0 <= q <= basis.k:
        raise ValueError(f"degree {q} out of range [0, {basis.k}]")
    data = {(p, p): ONE for p in basis.degree_positions(q)}
    return FiberOperator(basis.dim, basis.dim, data)


def parity_projector(basis: FiberBasis, parity: str) -> FiberOperator:
    """Chirality projector: sum of degree projectors of the given parity."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    pos = basis.even_positions if parity == "even" else basis.odd_positions
    return FiberOperator(basis.dim, basis.dim, {(p, p): ONE for p in pos})


@dataclass(frozen=True)
class SpinorSplit:
    """Slot bases for the boundary block structure of one spinor parity.

    slot1 always collects the even-degree fiber positions, slot2 the odd ones;
    the tangential/normal labels attach to slots according to the parity.
    """

    parity: str
    slot1: tuple
    slot2: tuple
    tangential: tuple
    normal: tuple


def split_normal_tangential(basis: FiberBasis, parity: str) -> SpinorSplit:
    """Tangential/normal decomposition of the boundary spinors of one parity.

    A form of the ambient fiber decomposes against the conormal letter; the
    coefficient spaces are both fibers on the boundary letters, one of each
    chirality.  For even spinors the tangential part is even, for odd spinors
    the tangential part is odd.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    slot1 = basis.even_positions
    slot2 = basis.odd_positions
    if parity == "even":
        return SpinorSplit(parity, slot1, slot2, tangential=slot1, normal=slot2)
    return SpinorSplit(parity, slot1, slot2, tangential=slot2, normal=slot1)
