import random
from fractions import Fraction

import numpy as np
import pytest

from heisencalc.dirac import (
    Block2,
    GeometryData,
    T_classical,
    audit_discarded_shapes,
    b_quadform,
    boundary_condition_fiber_blocks,
    boundary_projector,
    calderon_p0,
    calderon_packaged,
    calderon_pm1_diag,
    classical_ellipticity_report,
    d1_blocks,
    dd_symbol,
    other_parity,
    q_minus1,
    q_minus2c,
    q_minus2c_pieces,
    sigma1_dt,
    symbol_registry,
)
from heisencalc.fiber import FiberOperator, degree_projector
from heisencalc.residues import ContourSide, residue_at_pole
from heisencalc.scalars import ScalarExt
from heisencalc.symbols import PolySymbol, RationalBoundarySymbol


def random_b(rng, n):
    return tuple(
        tuple(
            (Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
             Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
            for _ in range(n)
        )
        for _ in range(n)
    )


def block_is_zero(block: Block2) -> bool:
    return all(entry.is_zero() for entry in block.entries().values())


def scalar_bnd(n, powers, value=1, c=0):
    return RationalBoundarySymbol.from_poly(
        PolySymbol.monomial(n, powers, FiberOperator.scalar(value)), c=c
    )


def diag_scalar_rbs(geom, slot_dim, poly):
    return RationalBoundarySymbol.from_poly(
        PolySymbol(
            geom.n, slot_dim, slot_dim,
            {e: FiberOperator.identity(slot_dim).scale(c.entry(0, 0))
             for e, c in poly.terms.items()},
        ),
        c=1,
    )


def r_plus_minus_contact(geom, sign):
    """(R + sign*xi_{n+1}) / 2 as a 1x1 polynomial."""
    n = geom.n
    return (
        PolySymbol.monomial(n, {"R": 1}, FiberOperator.scalar(1))
        + PolySymbol.monomial(n, {n + 1: 1}, FiberOperator.scalar(sign))
    ).scale(Fraction(1, 2))


def dd_slot_blocks(geom):
    dd = dd_symbol(geom)
    even, odd = geom.basis.even_positions, geom.basis.odd_positions
    eo = PolySymbol(
        geom.n, len(even), len(odd),
        {e: c.restrict(even, odd) for e, c in dd.terms.items()},
    )
    oe = PolySymbol(
        geom.n, len(odd), len(even),
        {e: c.restrict(odd, even) for e, c in dd.terms.items()},
    )
    return eo, oe


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dd_square_is_norm_squared(n):
    geom = GeometryData(n=n)
    dd = dd_symbol(geom)
    ident = FiberOperator.identity(dd.rows)
    expected = PolySymbol.zero(n, dd.rows, dd.cols)
    for j in range(2, n + 1):
        for v in (j, n + j):
            expected = expected + PolySymbol.monomial(n, {v: 2}, ident)
    assert dd @ dd == expected


def test_dd_self_adjoint_and_vanishes_at_zero():
    geom = GeometryData(n=3)
    dd = dd_symbol(geom)
    assert dd.adjoint() == dd
    assert dd.eval_num(np.zeros(6), 0.0) == pytest.approx(np.zeros((4, 4)))


def test_d1_sample_values_n2():
    geom = GeometryData(n=2)
    d1e = d1_blocks(geom, "even")
    s = 1 / np.sqrt(2)
    xi = np.array([1.0, 0, 0, 0])
    assert d1e.a11.eval_num(xi, 0)[0, 0] == pytest.approx(1j * s)
    assert d1e.a22.eval_num(xi, 0)[0, 0] == pytest.approx(-1j * s)
    xi = np.array([0, 0, 1.0, 0])
    assert d1e.a11.eval_num(xi, 0)[0, 0] == pytest.approx(-s)
    assert d1e.a22.eval_num(xi, 0)[0, 0] == pytest.approx(-s)


@pytest.mark.parametrize("n", [2, 3])
def test_d1_parity_block_exchange(n):
    """The diagonal blocks swap between the two chiral symbols."""
    geom = GeometryData(n=n)
    d1e = d1_blocks(geom, "even")
    d1o = d1_blocks(geom, "odd")
    # conormal/contact parts: [even]_11 carries (i xi_1 - xi_{n+1}),
    # matching [odd]_22 on the other slot; compare scalar profiles.
    xi = np.array([1.0, 0.5, -0.25, 2.0, 0.75, -1.5][: 2 * n])
    e11 = d1e.a11.eval_num(xi, 0)
    o22 = d1o.a22.eval_num(xi, 0)
    assert e11[0, 0] == pytest.approx(o22[0, 0])
    e22 = d1e.a22.eval_num(xi, 0)
    o11 = d1o.a11.eval_num(xi, 0)
    assert e22[0, 0] == pytest.approx(o11[0, 0])


def test_b_quadform_example():
    ident = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(0)))
    geom = GeometryData(
        n=2,
        b=(((1, 0), (0, 0)), ((0, 0), (1, 0))),
    )
    bq = b_quadform(geom)
    pt = np.array([1.0, 2.0, 3.0, 4.0])
    assert bq.eval_num(pt, 0)[0, 0] == pytest.approx(1 + 4 - 9 - 16)


def test_q_symbols_trivial_hessian():
    geom = GeometryData(n=3)
    free, hess = q_minus2c_pieces(geom, "even")
    assert block_is_zero(hess)
    assert not block_is_zero(free)
    q2 = q_minus2c(geom, "even")
    for entry in q2.entries().values():
        assert entry.radial_order() == -2
    q1 = q_minus1(geom, "even")
    for entry in q1.entries().values():
        assert entry.radial_order() == -1


def test_sigma1_values_and_composition():
    geom = GeometryData(n=3)
    s_plus_even = sigma1_dt(geom, "even", 1)
    v = 1 / np.sqrt(2)
    # even parity: slot1 tangential (+), slot2 normal (-)
    assert s_plus_even.a11.to_numpy()[0, 0] == pytest.approx(v)
    assert s_plus_even.a22.to_numpy()[0, 0] == pytest.approx(-v)
    # odd parity on the minus side: slot1 normal (+ for side -), slot2 tangential (-)
    s_minus_odd = sigma1_dt(geom, "odd", -1)
    assert s_minus_odd.a11.to_numpy()[0, 0] == pytest.approx(v)
    assert s_minus_odd.a22.to_numpy()[0, 0] == pytest.approx(-v)
    # composing the even/+ and odd/- isomorphisms gives +(1/2) Id, while
    # pairing even/+ with odd/+ gives -(1/2) Id slotwise
    prod = s_plus_even.a11 @ sigma1_dt(geom, "odd", -1).a11
    assert prod.to_numpy()[0, 0] == pytest.approx(0.5)
    prod2 = s_plus_even.a11 @ sigma1_dt(geom, "odd", 1).a11
    assert prod2.to_numpy()[0, 0] == pytest.approx(-0.5)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("side", [1, -1])
@pytest.mark.parametrize("parity", ["even", "odd"])
def test_calderon_principal_idempotent(n, side, parity):
    geom = GeometryData(n=n)
    p0 = calderon_p0(geom, side, parity)
    assert block_is_zero((p0 @ p0) - p0)


@pytest.mark.parametrize("n", [2, 3])
def test_calderon_principal_block_form(n):
    """The principal boundary symbol in its packaged half-diagonal form."""
    geom = GeometryData(n=n)
    de, do = geom.slot_dims
    dd_eo, dd_oe = dd_slot_blocks(geom)
    half = Fraction(1, 2)
    cases = {
        (1, "even"): (-1, 1, 1),   # (sign of xi_{n+1} in a11, a22, sign of dd)
        (1, "odd"): (1, -1, 1),
        (-1, "even"): (1, -1, -1),
        (-1, "odd"): (-1, 1, -1),
    }
    for (side, parity), (s11, s22, sdd) in cases.items():
        p0 = calderon_p0(geom, side, parity)
        a11_exp = diag_scalar_rbs(geom, de, r_plus_minus_contact(geom, s11))
        a22_exp = diag_scalar_rbs(geom, do, r_plus_minus_contact(geom, s22))
        assert p0.a11 == a11_exp
        assert p0.a22 == a22_exp
        a12_exp = RationalBoundarySymbol.from_poly(
            dd_eo.scale(Fraction(sdd, 2)), c=1
        )
        a21_exp = RationalBoundarySymbol.from_poly(
            dd_oe.scale(Fraction(sdd, 2)), c=1
        )
        assert p0.a12 == a12_exp
        assert p0.a21 == a21_exp


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("parity", ["even", "odd"])
def test_order_minus_one_correction(n, parity):
    """Diagonal correction is -side (n-1)/(2R) Id on both blocks."""
    geom = GeometryData(n=n)
    de, do = geom.slot_dims
    for side in (1, -1):
        pm1 = calderon_pm1_diag(geom, side, parity)
        for dim, entry in ((de, pm1.a11), (do, pm1.a22)):
            expected = RationalBoundarySymbol.from_poly(
                PolySymbol.constant(
                    geom.n,
                    FiberOperator.identity(dim).scale(
                        ScalarExt(Fraction(-side * (n - 1), 2))
                    ),
                ),
                c=1,
            )
            assert entry == expected
        assert pm1.a12.is_zero() and pm1.a21.is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_subprincipal_identity(n):
    """Contour of the curvature-free order -2 piece equals the derivative form."""
    geom = GeometryData(n=n)
    for parity in ("even", "odd"):
        d1 = d1_blocks(geom, other_parity(parity))
        free, _ = q_minus2c_pieces(geom, parity)
        for contour in (ContourSide.PLUS, ContourSide.MINUS):
            res = free.map(lambda s: residue_at_pole(s, contour))
            expected = d1.map(
                lambda p: RationalBoundarySymbol.from_poly(
                    p.dxi(1).scale(ScalarExt(0, -(n - 1))), c=1
                )
            )
            assert block_is_zero(res - expected)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hessian_terms_vanish_on_contact_ray(n):
    rng = random.Random(100 + n)
    for _ in range(3):
        geom = GeometryData(n=n, b=random_b(rng, n))
        for parity in ("even", "odd"):
            _, hess = q_minus2c_pieces(geom, parity)
            for side, contour in ((1, ContourSide.PLUS), (-1, ContourSide.MINUS)):
                ray = hess.map(lambda s: s.restrict_ray(side))
                assert residue_at_pole(ray.a11, contour).is_zero()
                assert residue_at_pole(ray.a22, contour).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_hessian_ray_fast_path_matches_full_restriction(n):
    """Restricting the factors first agrees with restricting the product."""
    from heisencalc.dirac import q_minus2c_hessian_on_ray

    rng = random.Random(50 + n)
    geom = GeometryData(n=n, b=random_b(rng, n))
    for parity in ("even", "odd"):
        _, hess = q_minus2c_pieces(geom, parity)
        for side in (1, -1):
            slow = hess.map(lambda s: s.restrict_ray(side))
            fast = q_minus2c_hessian_on_ray(geom, parity, side)
            assert block_is_zero(slow - fast)


def test_pm1_is_hessian_independent_on_ray():
    """Order -1 diagonal term along the ray ignores the Hessian data."""
    rng = random.Random(5)
    n = 2
    geom_b = GeometryData(n=n, b=random_b(rng, n))
    geom_0 = GeometryData(n=n)
    for side, contour in ((1, ContourSide.PLUS), (-1, ContourSide.MINUS)):
        for parity in ("even", "odd"):
            q2_b = q_minus2c(geom_b, parity)
            q2_0 = q_minus2c(geom_0, parity)
            sig = sigma1_dt(geom_0, parity, side)
            full_b = q2_b.map(lambda s: residue_at_pole(s, contour)).right_const(sig)
            full_0 = q2_0.map(lambda s: residue_at_pole(s, contour)).right_const(sig)
            diff = full_b - full_0
            assert diff.a11.restrict_ray(side).is_zero()
            assert diff.a22.restrict_ray(side).is_zero()


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("r", [1, 2])
def test_T_classical_displayed_forms(n, r):
    geom = GeometryData(n=n, r=r)
    de, do = geom.slot_dims
    dd_eo, dd_oe = dd_slot_blocks(geom)
    cases = {
        (1, "even"): -1,  # sign of dd in the (1,2) block; diag uses R + side*xi
        (1, "odd"): 1,
        (-1, "even"): 1,
        (-1, "odd"): -1,
    }
    for (side, parity), sdd in cases.items():
        T = T_classical(geom, side, parity)
        diag = r_plus_minus_contact(geom, side)
        assert T.a11 == diag_scalar_rbs(geom, de, diag)
        assert T.a22 == diag_scalar_rbs(geom, do, diag)
        assert T.a12 == RationalBoundarySymbol.from_poly(
            dd_eo.scale(Fraction(sdd, 2)), c=1
        )
        assert T.a21 == RationalBoundarySymbol.from_poly(
            dd_oe.scale(Fraction(-sdd, 2)), c=1
        )


@pytest.mark.parametrize("n", [2, 3])
def test_T_equals_projector_combination(n):
    """The comparison symbol is R'p + (1-R')(1-p) with classical R'."""
    geom = GeometryData(n=n)
    from heisencalc.dirac import identity_symbol_block

    for side in (1, -1):
        for parity in ("even", "odd"):
            p0 = calderon_p0(geom, side, parity)
            ident = identity_symbol_block(geom)
            cond = boundary_projector(geom, side, parity)
            rp = boundary_condition_fiber_blocks(geom, cond, None)
            lhs = T_classical(geom, side, parity)
            rhs = p0.left_const(rp) + (ident - p0).left_const(
                Block2(
                    FiberOperator.identity(rp.a11.rows) - rp.a11,
                    -rp.a12,
                    -rp.a21,
                    FiberOperator.identity(rp.a22.rows) - rp.a22,
                )
            )
            assert block_is_zero(lhs - rhs)


def test_boundary_projector_placements():
    geom4 = GeometryData(n=4)  # n even
    cond = boundary_projector(geom4, -1, "even")
    assert cond.szego_block == 2 and cond.szego.degree == 3
    assert cond.szego.complement and cond.other_fill == 0
    geom3 = GeometryData(n=3)  # n odd
    cond = boundary_projector(geom3, -1, "even")
    assert cond.szego_block == 1 and cond.szego.degree == 2
    assert not cond.szego.complement and cond.other_fill == 1
    cond = boundary_projector(geom3, 1, "even")
    assert cond.szego_block == 1 and cond.szego.degree == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_boundary_projector_idempotent_for_idempotent_slot(n):
    geom = GeometryData(n=n)
    basis = geom.basis
    for side in (1, -1):
        for parity in ("even", "odd"):
            cond = boundary_projector(geom, side, parity)
            slots = {1: basis.even_positions, 2: basis.odd_positions}
            sz_pos = slots[cond.szego_block]
            proj = degree_projector(basis, cond.szego.degree).restrict(sz_pos, sz_pos)
            for s_op in (FiberOperator.zero(len(sz_pos)), proj):
                blocks = boundary_condition_fiber_blocks(geom, cond, s_op)
                sq = Block2(
                    blocks.a11 @ blocks.a11, blocks.a11 @ blocks.a12,
                    blocks.a21 @ blocks.a11, blocks.a22 @ blocks.a22,
                )
                assert sq.a11 == blocks.a11
                assert sq.a22 == blocks.a22


def test_classical_off_ray_blocks():
    geom = GeometryData(n=3)
    for side in (1, -1):
        even = boundary_condition_fiber_blocks(
            geom, boundary_projector(geom, side, "even"), None
        )
        assert even.a11.is_zero()
        assert even.a22 == FiberOperator.identity(even.a22.rows)
        odd = boundary_condition_fiber_blocks(
            geom, boundary_projector(geom, side, "odd"), None
        )
        assert odd.a11 == FiberOperator.identity(odd.a11.rows)
        assert odd.a22.is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_ellipticity_report(n):
    geom = GeometryData(n=n)
    for side in (1, -1):
        for parity in ("even", "odd"):
            rep = classical_ellipticity_report(geom, side, parity, seed=11, points=25)
            assert rep["closed_form_max_error"] <= 1e-10
            assert rep["invertible_off_ray"]
            assert rep["degenerates_on_ray"]


def test_order_audit_all_shapes_pass():
    geom = GeometryData(n=3)
    records = audit_discarded_shapes(geom)
    assert records
    for rec in records:
        assert rec["diag_ok"], rec
        assert rec["off_ok"], rec


def test_symbol_registry_names():
    geom = GeometryData(n=2)
    reg = symbol_registry(geom)
    for name in ("d1_even", "d1_odd", "dd", "q_m1", "q_m2c",
                 "p0_plus_even", "pm1_minus_odd", "Tcl_minus_odd"):
        assert name in reg
        obj = reg[name]()
        assert obj is not None
