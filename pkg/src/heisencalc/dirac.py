"""Concrete boundary symbols of the flat Dirac complex at a boundary point.

Everything here is exact: the first-order symbol and its tangential part, the
leading terms of the inverse's symbol, the boundary-value (Calderon) symbols
obtained by contour integration, the classical boundary conditions, and the
block operators built from them, together with the classical ellipticity
report and the bookkeeping audit for the discarded lower-order terms.

Block matrices are written over the two chirality slots of the boundary
fiber: slot 1 carries the even-degree forms, slot 2 the odd-degree ones; the
tangential/normal labels attach to slots according to the spinor parity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .fiber import FiberBasis, FiberOperator, degree_projector
from .residues import ContourSide, residue_at_pole
from .scalars import I, INV_SQRT2, ScalarExt
from .symbols import PolySymbol, RationalBoundarySymbol, monomial_exps


def other_parity(parity: str) -> str:
    return "odd" if parity == "even" else "even"


def side_label(side: int) -> str:
    return "plus" if side > 0 else "minus"


@dataclass
class GeometryData:
    """Model data at the base point: complex dimension, twist rank, Hessian.

    ``b`` is the complex n x n matrix of the second-order defining-function
    coefficients; entries are (re, im) pairs of rationals.  The quadratic form
    it induces on the real cotangent variables is built by :meth:`b_form`.
    """

    n: int
    r: int = 1
    b: tuple = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("complex dimension must be at least 2")
        if self.r < 1:
            raise ValueError("twist rank must be at least 1")
        if self.b is None:
            zero = (Fraction(0), Fraction(0))
            self.b = tuple(tuple(zero for _ in range(self.n)) for _ in range(self.n))
        else:
            if len(self.b) != self.n or any(len(row) != self.n for row in self.b):
                raise ValueError("b must be an n x n matrix")
            self.b = tuple(
                tuple(
                    (Fraction(re), Fraction(im))
                    for re, im in (entry for entry in row)
                )
                for row in self.b
            )

    @cached_property
    def basis(self) -> FiberBasis:
        return FiberBasis(self.n - 1, self.r)

    @cached_property
    def slot_dims(self):
        return len(self.basis.even_positions), len(self.basis.odd_positions)

    def b_real_matrix(self):
        """The 2n x 2n real symmetric matrix of the Hessian quadratic form."""
        n = self.n
        out = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
        for j in range(n):
            for k in range(n):
                re, im = self.b[j][k]
                out[j][k] += re
                out[j][k + n] += -im
                out[j + n][k] += -im
                out[j + n][k + n] += -re
        return out


class Block2:
    """2x2 block container; entries must share the ring operations."""

    __slots__ = ("a11", "a12", "a21", "a22")

    def __init__(self, a11, a12, a21, a22):
        self.a11, self.a12, self.a21, self.a22 = a11, a12, a21, a22

    def __add__(self, other):
        return Block2(
            self.a11 + other.a11, self.a12 + other.a12,
            self.a21 + other.a21, self.a22 + other.a22,
        )

    def __sub__(self, other):
        return Block2(
            self.a11 - other.a11, self.a12 - other.a12,
            self.a21 - other.a21, self.a22 - other.a22,
        )

    def __matmul__(self, other):
        return Block2(
            self.a11 @ other.a11 + self.a12 @ other.a21,
            self.a11 @ other.a12 + self.a12 @ other.a22,
            self.a21 @ other.a11 + self.a22 @ other.a21,
            self.a21 @ other.a12 + self.a22 @ other.a22,
        )

    def map(self, fn):
        return Block2(fn(self.a11), fn(self.a12), fn(self.a21), fn(self.a22))

    def scale(self, c):
        return self.map(lambda x: x.scale(c))

    def right_const(self, const: "Block2"):
        """Compose on the right with a block of constant fiber operators."""
        return Block2(
            self.a11.right_mul(const.a11) + self.a12.right_mul(const.a21),
            self.a11.right_mul(const.a12) + self.a12.right_mul(const.a22),
            self.a21.right_mul(const.a11) + self.a22.right_mul(const.a21),
            self.a21.right_mul(const.a12) + self.a22.right_mul(const.a22),
        )

    def left_const(self, const: "Block2"):
        return Block2(
            self.a11.left_mul(const.a11) + self.a21.left_mul(const.a12),
            self.a12.left_mul(const.a11) + self.a22.left_mul(const.a12),
            self.a11.left_mul(const.a21) + self.a21.left_mul(const.a22),
            self.a12.left_mul(const.a21) + self.a22.left_mul(const.a22),
        )

    def entries(self):
        return {"11": self.a11, "12": self.a12, "21": self.a21, "22": self.a22}


def _restrict_poly(poly: PolySymbol, rows, cols) -> PolySymbol:
    return PolySymbol(
        poly.n, len(rows), len(cols),
        {e: c.restrict(rows, cols) for e, c in poly.terms.items()}, poly.reduce_r,
    )


def _ident_poly(geom: GeometryData, dim: int) -> PolySymbol:
    return PolySymbol.constant(geom.n, FiberOperator.identity(dim))


def _scalar_poly(geom: GeometryData, powers: dict, value=1) -> PolySymbol:
    return PolySymbol.monomial(geom.n, powers, FiberOperator.scalar(value))


def dd_symbol(geom: GeometryData) -> PolySymbol:
    """Tangential first-order symbol on the full boundary fiber.

    Linear in the weight-one variables, built from contraction/wedge pairs;
    self-adjoint, and its square is |xi''|^2 times the identity.
    """
    from .fiber import interior_op, wedge_op

    n, basis = geom.n, geom.basis
    terms = {}

    def put(powers, coeff):
        key = monomial_exps(n, powers)
        cur = terms.get(key)
        terms[key] = coeff if cur is None else cur + coeff

    for j in range(2, n + 1):
        e = interior_op(basis, j - 1)
        w = wedge_op(basis, j - 1)
        # (i xi_j + xi_{n+j}) e_j - (i xi_j - xi_{n+j}) eps_j
        put({j: 1}, e.scale(I) - w.scale(I))
        put({n + j: 1}, e + w)
    return PolySymbol(n, basis.dim, basis.dim, terms)


def d1_blocks(geom: GeometryData, parity: str) -> Block2:
    """First-order symbol of the chiral half of the complex, in slot blocks."""
    n, basis = geom.n, geom.basis
    even, odd = basis.even_positions, basis.odd_positions
    dd = dd_symbol(geom)
    dd_eo = _restrict_poly(dd, even, odd)   # odd -> even
    dd_oe = _restrict_poly(dd, odd, even)   # even -> odd
    ident_e = FiberOperator.identity(len(even))
    ident_o = FiberOperator.identity(len(odd))

    def conormal(ident, i_sign, c_sign):
        # (i_sign * i * xi_1 + c_sign * xi_{n+1}) Id / sqrt(2)
        xi1_part = PolySymbol.monomial(n, {1: 1}, ident.scale(I * i_sign))
        ct_part = PolySymbol.monomial(n, {n + 1: 1}, ident.scale(c_sign))
        return (xi1_part + ct_part).scale(INV_SQRT2)

    if parity == "even":
        return Block2(
            conormal(ident_e, 1, -1),
            dd_eo.scale(INV_SQRT2),
            dd_oe.scale(-1).scale(INV_SQRT2),
            conormal(ident_o, -1, -1),
        )
    if parity == "odd":
        return Block2(
            conormal(ident_e, -1, -1),
            dd_eo.scale(-1).scale(INV_SQRT2),
            dd_oe.scale(INV_SQRT2),
            conormal(ident_o, 1, -1),
        )
    raise ValueError("parity must be 'even' or 'odd'")


def sigma1_dt(geom: GeometryData, parity: str, side: int) -> Block2:
    """Boundary isomorphism between the chiral halves, as slot-diagonal blocks.

    Acts by +side/sqrt(2) on the tangential part and -side/sqrt(2) on the
    normal part; the slot placement follows the parity.
    """
    de, do = geom.slot_dims
    tang = ScalarExt(side) * INV_SQRT2
    norm = ScalarExt(-side) * INV_SQRT2
    s1 = tang if parity == "even" else norm
    s2 = norm if parity == "even" else tang
    return Block2(
        FiberOperator.identity(de).scale(s1),
        FiberOperator.zero(de, do),
        FiberOperator.zero(do, de),
        FiberOperator.identity(do).scale(s2),
    )


def b_quadform(geom: GeometryData) -> PolySymbol:
    """The scalar quadratic form of the Hessian data in the xi variables."""
    n = geom.n
    B = geom.b_real_matrix()
    terms = {}
    for j in range(2 * n):
        for k in range(2 * n):
            if B[j][k] == 0:
                continue
            exps = [0] * (2 * n + 1)
            exps[j] += 1
            exps[k] += 1
            key = tuple(exps)
            coeff = FiberOperator.scalar(B[j][k])
            cur = terms.get(key)
            terms[key] = coeff if cur is None else cur + coeff
    return PolySymbol(n, 1, 1, terms)


def b_gradient_pairing(geom: GeometryData, d1: Block2) -> Block2:
    """<B xi, grad_xi d1> with the Hessian matrix acting on the gradient."""
    n = geom.n
    B = geom.b_real_matrix()
    zero = Block2(
        PolySymbol.zero(n, d1.a11.rows, d1.a11.cols),
        PolySymbol.zero(n, d1.a12.rows, d1.a12.cols),
        PolySymbol.zero(n, d1.a21.rows, d1.a21.cols),
        PolySymbol.zero(n, d1.a22.rows, d1.a22.cols),
    )
    total = zero
    for j in range(2 * n):
        lin_terms = {}
        for k in range(2 * n):
            if B[j][k] == 0:
                continue
            lin_terms[monomial_exps(n, {k + 1: 1})] = FiberOperator.scalar(B[j][k])
        if not lin_terms:
            continue
        lin = PolySymbol(n, 1, 1, lin_terms)
        dj = d1.map(lambda p: p.dxi(j + 1).mul_scalar_poly(lin))
        total = total + dj
    return total


def q_minus1(geom: GeometryData, parity: str) -> Block2:
    """Leading symbol of the inverse for the given projector parity.

    Uses the first-order symbol of the opposite chirality over |xi|^2.
    """
    d1 = d1_blocks(geom, other_parity(parity))
    return d1.map(
        lambda p: RationalBoundarySymbol.from_poly(p.scale(2), a=1, b=1)
    )


def q_minus2c_pieces(geom: GeometryData, parity: str):
    """The order -2 correction from the boundary change of coordinates.

    Returns (curvature_free, hessian_part): the first is the piece surviving
    on the contact ray, the second collects the Hessian-dependent terms.
    """
    n = geom.n
    d1 = d1_blocks(geom, other_parity(parity))
    xi1 = _scalar_poly(geom, {1: 1})
    lead_coeff = ScalarExt(0, 4 * (1 - n))  # 4 i (1 - n)
    curvature_free = d1.map(
        lambda p: RationalBoundarySymbol.from_poly(
            p.mul_scalar_poly(xi1).scale(lead_coeff), a=2, b=2
        )
    )
    bq = b_quadform(geom)
    xi1_bq = bq.mul_scalar_poly(xi1)
    term_bb = d1.map(
        lambda p: RationalBoundarySymbol.from_poly(
            p.mul_scalar_poly(xi1_bq).scale(ScalarExt(0, 8)), a=3, b=3
        )
    )
    grad = b_gradient_pairing(geom, d1)
    term_grad = grad.map(
        lambda p: RationalBoundarySymbol.from_poly(
            p.mul_scalar_poly(xi1).scale(ScalarExt(0, -4)), a=2, b=2
        )
    )
    return curvature_free, term_bb + term_grad


def q_minus2c(geom: GeometryData, parity: str) -> Block2:
    free, hess = q_minus2c_pieces(geom, parity)
    return free + hess


def q_minus2c_hessian_on_ray(geom: GeometryData, parity: str, side: int) -> Block2:
    """Hessian part of the order -2 correction, restricted to a contact ray.

    Restriction is a ring map, so restricting the factors before multiplying
    agrees with restricting the assembled symbol; the factors collapse to a
    handful of monomials in the conormal variable and the radius, which keeps
    the residue checks cheap.
    """
    n = geom.n
    d1 = d1_blocks(geom, other_parity(parity)).map(lambda p: p.restrict_ray(side))
    bq = b_quadform(geom).restrict_ray(side)
    xi1 = PolySymbol.monomial(
        n, {1: 1}, FiberOperator.scalar(1), reduce_r=False
    )
    xi1_bq = bq.mul_scalar_poly(xi1)
    term_bb = d1.map(
        lambda p: RationalBoundarySymbol.from_poly(
            p.mul_scalar_poly(xi1_bq).scale(ScalarExt(0, 8)), a=3, b=3
        )
    )
    B = geom.b_real_matrix()
    d1_full = d1_blocks(geom, other_parity(parity))
    zero = d1.map(lambda p: PolySymbol.zero(n, p.rows, p.cols, reduce_r=False))
    grad = zero
    for j in range(2 * n):
        lin_terms = {}
        for k in range(2 * n):
            if B[j][k] == 0:
                continue
            lin_terms[monomial_exps(n, {k + 1: 1})] = FiberOperator.scalar(B[j][k])
        if not lin_terms:
            continue
        lin = PolySymbol(n, 1, 1, lin_terms).restrict_ray(side)
        if lin.is_zero():
            continue
        dj = d1_full.map(
            lambda p: p.dxi(j + 1).restrict_ray(side).mul_scalar_poly(lin)
        )
        grad = grad + dj
    term_grad = grad.map(
        lambda p: RationalBoundarySymbol.from_poly(
            p.mul_scalar_poly(xi1).scale(ScalarExt(0, -4)), a=2, b=2
        )
    )
    return term_bb + term_grad


def calderon_contour(qsym: Block2, side: int, sigma1: Block2) -> Block2:
    """Blockwise contour integral followed by the boundary isomorphism."""
    contour = ContourSide.PLUS if side > 0 else ContourSide.MINUS
    res = qsym.map(lambda s: residue_at_pole(s, contour))
    return res.right_const(sigma1)


def calderon_p0(geom: GeometryData, side: int, parity: str) -> Block2:
    """Principal boundary-projection symbol for the given side and parity."""
    return calderon_contour(
        q_minus1(geom, parity), side, sigma1_dt(geom, parity, side)
    )


def calderon_pm1_diag(geom: GeometryData, side: int, parity: str) -> Block2:
    """Order -1 diagonal correction along the contact directions."""
    free, _ = q_minus2c_pieces(geom, parity)
    return calderon_contour(free, side, sigma1_dt(geom, parity, side))


def calderon_packaged(geom: GeometryData, side: int, parity: str) -> Block2:
    """Principal symbol plus the order -1 diagonal correction."""
    return calderon_p0(geom, side, parity) + calderon_pm1_diag(geom, side, parity)


# -- boundary conditions ---------------------------------------------------------


@dataclass(frozen=True)
class SzegoSlot:
    """Placement of the (possibly generalized) projector inside one slot."""

    degree: int        # fiber degree carrying the projector
    complement: bool   # slot holds (1 - S) instead of S
    rest: int          # 0 or 1: fill on the other degrees of the slot


@dataclass(frozen=True)
class BoundaryCondition:
    """Block description of the subelliptic boundary projector.

    Exactly one slot carries the projector; the other is a constant 0 or Id.
    """

    side: int
    parity: str
    n: int
    szego_block: int        # 1 or 2
    szego: SzegoSlot
    other_fill: int         # 0 or 1 on the complementary slot

    @property
    def conjugate(self) -> bool:
        return self.side < 0


def boundary_projector(geom: GeometryData, side: int, parity: str) -> BoundaryCondition:
    """The boundary condition blocks for one side/parity (n-parity aware)."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    n = geom.n
    if side > 0:
        if parity == "even":
            return BoundaryCondition(side, parity, n, 1, SzegoSlot(0, False, 0), 1)
        return BoundaryCondition(side, parity, n, 1, SzegoSlot(0, True, 1), 0)
    top = n - 1
    if n % 2 == 0:
        if parity == "even":
            return BoundaryCondition(side, parity, n, 2, SzegoSlot(top, True, 1), 0)
        return BoundaryCondition(side, parity, n, 2, SzegoSlot(top, False, 0), 1)
    if parity == "even":
        return BoundaryCondition(side, parity, n, 1, SzegoSlot(top, False, 0), 1)
    return BoundaryCondition(side, parity, n, 1, SzegoSlot(top, True, 1), 0)


def boundary_condition_fiber_blocks(
    geom: GeometryData, cond: BoundaryCondition, szego_fiber: FiberOperator = None
) -> Block2:
    """Constant fiber-operator blocks of the boundary condition.

    ``szego_fiber`` is the operator placed in the projector slot (restricted
    to the slot's degree); passing None uses the classical off-ray value 0.
    """
    basis = geom.basis
    even, odd = basis.even_positions, basis.odd_positions
    slots = {1: even, 2: odd}
    sz_positions = slots[cond.szego_block]
    dim_sz = len(sz_positions)
    deg_proj = degree_projector(basis, cond.szego.degree).restrict(
        sz_positions, sz_positions
    )
    if szego_fiber is None:
        s_op = FiberOperator.zero(dim_sz)
    else:
        s_op = szego_fiber
    if cond.szego.complement:
        core = deg_proj - s_op
    else:
        core = s_op
    rest = FiberOperator.identity(dim_sz) - deg_proj
    block_sz = core + rest.scale(cond.szego.rest)
    other_positions = slots[3 - cond.szego_block]
    block_other = FiberOperator.identity(len(other_positions)).scale(cond.other_fill)
    if cond.szego_block == 1:
        b11, b22 = block_sz, block_other
    else:
        b11, b22 = block_other, block_sz
    return Block2(
        b11,
        FiberOperator.zero(b11.rows, b22.cols),
        FiberOperator.zero(b22.rows, b11.cols),
        b22,
    )


def _const_to_symbol_block(geom: GeometryData, const: Block2) -> Block2:
    def lift(mat):
        return RationalBoundarySymbol.from_poly(PolySymbol.constant(geom.n, mat))

    return const.map(lift)


def identity_symbol_block(geom: GeometryData) -> Block2:
    de, do = geom.slot_dims
    return _const_to_symbol_block(
        geom,
        Block2(
            FiberOperator.identity(de),
            FiberOperator.zero(de, do),
            FiberOperator.zero(do, de),
            FiberOperator.identity(do),
        ),
    )


def T_classical(geom: GeometryData, side: int, parity: str) -> Block2:
    """Classical order-zero symbol of the comparison operator off the ray."""
    p0 = calderon_p0(geom, side, parity)
    cond = boundary_projector(geom, side, parity)
    rp_const = boundary_condition_fiber_blocks(geom, cond, szego_fiber=None)
    complement = Block2(
        FiberOperator.identity(rp_const.a11.rows) - rp_const.a11,
        -rp_const.a12,
        -rp_const.a21,
        FiberOperator.identity(rp_const.a22.rows) - rp_const.a22,
    )
    ident = identity_symbol_block(geom)
    return p0.left_const(rp_const) + (ident - p0).left_const(complement)


def classical_ellipticity_report(
    geom: GeometryData, side: int, parity: str, seed: int = 0, points: int = 100
):
    """Numeric invertibility audit of the classical symbol off the contact ray.

    Compares the determinant with the closed form
    ((R + side*xi_{n+1})^2 + |xi''|^2)^(2^(n-2) r) / (2R)^(2^(n-1) r)
    at random points on the unit sphere, and follows a sequence approaching
    the degenerate ray.
    """
    import random as _random

    import numpy as np

    n, r = geom.n, geom.r
    T = T_classical(geom, side, parity)
    rng = _random.Random(seed)
    half = 2 ** (n - 2) * r if n >= 2 else r
    full = 2 ** (n - 1) * r
    max_err = 0.0
    min_det = float("inf")

    def eval_T(xi_prime):
        R = float(np.sqrt(sum(x * x for x in xi_prime)))
        xi = np.zeros(2 * n)
        xi[1:] = xi_prime
        blocks = T.entries()
        top = np.hstack([blocks["11"].eval_num(xi, R), blocks["12"].eval_num(xi, R)])
        bot = np.hstack([blocks["21"].eval_num(xi, R), blocks["22"].eval_num(xi, R)])
        return np.vstack([top, bot]), xi, R

    for _ in range(points):
        v = np.array([rng.gauss(0, 1) for _ in range(2 * n - 1)])
        v /= np.linalg.norm(v)
        mat, xi, R = eval_T(v)
        det = np.linalg.det(mat)
        xnp1 = xi[n]
        xi_dd_sq = R * R - xnp1 * xnp1
        closed = ((R + side * xnp1) ** 2 + xi_dd_sq) ** half / (2 * R) ** full
        max_err = max(max_err, abs(det - closed))
        min_det = min(min_det, abs(det))
    ray_dets = []
    for eps in (0.5, 0.1, 0.02, 0.004):
        xi_prime = np.zeros(2 * n - 1)
        xi_prime[n - 1] = -side * np.sqrt(1 - eps * eps)  # contact covariable
        xi_prime[0] = eps
        mat, _, _ = eval_T(xi_prime)
        ray_dets.append(abs(np.linalg.det(mat)))
    return {
        "closed_form_max_error": max_err,
        "min_abs_det_off_ray": min_det,
        "ray_approach_dets": ray_dets,
        "degenerates_on_ray": all(
            ray_dets[i + 1] < ray_dets[i] for i in range(len(ray_dets) - 1)
        )
        and ray_dets[-1] < 1e-4,
        "invertible_off_ray": min_det > 1e-6,
    }


# -- order audit of discarded terms ---------------------------------------------


def _shape_symbol(geom: GeometryData, xi1_pow: int, contact_pow: int,
                  tangential_pow: int, denom_half: int) -> RationalBoundarySymbol:
    n = geom.n
    powers = {}
    if xi1_pow:
        powers[1] = xi1_pow
    if contact_pow:
        powers[n + 1] = contact_pow
    if tangential_pow:
        powers[2] = tangential_pow
    poly = PolySymbol.monomial(n, powers, FiberOperator.scalar(1))
    return RationalBoundarySymbol.from_poly(poly, a=denom_half, b=denom_half)


def audit_discarded_shapes(geom: GeometryData):
    """Classify the residues of every discarded term shape.

    Returns a list of records; each carries the worst-case diagonal variant
    (pure contact powers) and the off-diagonal variant (one tangential
    factor), with their Heisenberg orders after contour integration, and the
    bounds they must satisfy (-4 on diagonal, -2 off diagonal).
    """
    records = []

    def classify(sym):
        orders = []
        for contour in (ContourSide.PLUS, ContourSide.MINUS):
            res = residue_at_pole(sym, contour)
            if res.is_zero():
                continue
            orders.append(res.extended_orders().upper)
        return max(orders) if orders else None

    def record(family, params, diag_sym, off_sym):
        diag = classify(diag_sym)
        off = classify(off_sym)
        records.append(
            {
                "family": family,
                "params": params,
                "diag_order": diag,
                "off_order": off,
                "diag_ok": diag is None or diag <= -4,
                "off_ok": off is None or off <= -2,
            }
        )

    # lower-order symbol terms: h_l(xi) / |xi|^(2(k+j)), k >= 2
    for k in (2, 3):
        for j in (0, 1):
            record(
                "tail_odd", {"k": k, "j": j},
                _shape_symbol(geom, 0, 2 * j + 1, 0, k + j),
                _shape_symbol(geom, 0, 2 * j, 1, k + j),
            )
            record(
                "tail_even", {"k": k, "j": j},
                _shape_symbol(geom, 0, 2 * j, 0, k + j),
                _shape_symbol(geom, 0, max(2 * j - 1, 0), 1 if j else 1, k + j),
            )
    # change-of-variables terms from the leading symbol:
    # xi_1^l h_{1+2j} / |xi|^(2(1+j+l')), 2 <= l <= l'
    for l in (2, 3):
        for lp in (l, l + 1):
            for j in (0, 1):
                record(
                    "chvar_lead", {"l": l, "l'": lp, "j": j},
                    _shape_symbol(geom, l, 2 * j + 1, 0, 1 + j + lp),
                    _shape_symbol(geom, l, 2 * j, 1, 1 + j + lp),
                )
    # residual shapes: xi_1^l h / |xi|^(2(k+l'+m)) with k >= 2 (and k=1, l>=2)
    for k, lmin in ((1, 2), (2, 1), (3, 1)):
        for l in (lmin, lmin + 1):
            for m in (0, 1):
                lp = l
                record(
                    "residual_even_h", {"k": k, "l": l, "m": m},
                    _shape_symbol(geom, l, 2 * m, 0, k + lp + m),
                    _shape_symbol(geom, l, max(2 * m - 1, 0), 1 if m else 1, k + lp + m),
                )
                if k >= 2:
                    record(
                        "residual_odd_h", {"k": k, "l": l, "m": m},
                        _shape_symbol(geom, l, 2 * m + 1, 0, k + lp + m),
                        _shape_symbol(geom, l, 2 * m, 1, k + lp + m),
                    )
    return records


# -- named symbol registry (for dumps) --------------------------------------------


def symbol_registry(geom: GeometryData):
    """Published selector names for symbol dumps.

    The inverse-symbol entries use the even-parity projector route.
    """
    reg = {}
    reg["dd"] = lambda: dd_symbol(geom)
    for parity in ("even", "odd"):
        reg[f"d1_{parity}"] = lambda p=parity: d1_blocks(geom, p)
    reg["q_m1"] = lambda: q_minus1(geom, "even")
    reg["q_m2c"] = lambda: q_minus2c(geom, "even")
    for side in (1, -1):
        for parity in ("even", "odd"):
            key = f"{side_label(side)}_{parity}"
            reg[f"p0_{key}"] = lambda s=side, p=parity: calderon_p0(geom, s, p)
            reg[f"pm1_{key}"] = lambda s=side, p=parity: calderon_pm1_diag(geom, s, p)
            reg[f"Tcl_{key}"] = lambda s=side, p=parity: T_classical(geom, s, p)
    return reg
