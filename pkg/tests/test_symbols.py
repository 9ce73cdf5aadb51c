import math
from fractions import Fraction

import numpy as np
import pytest

from heisencalc.fiber import FiberOperator
from heisencalc.scalars import ScalarExt
from heisencalc.symbols import (
    OrderProfile,
    PolySymbol,
    RationalBoundarySymbol,
    ZeroSymbolError,
    heisenberg_principal,
    isotropic_at_eta0_one,
    norm_sq_symbol,
    parabolic_parts,
)

N = 2  # complex dimension for most scalar-symbol tests


def scalar_mono(n, powers, value=1):
    return PolySymbol.monomial(n, powers, FiberOperator.scalar(value))


def test_difference_of_squares_reduces():
    # (xi_1 - iR)(xi_1 + iR) = xi_1^2 + R^2 -> |xi|^2
    d = scalar_mono(N, {1: 1}) + scalar_mono(N, {"R": 1}, ScalarExt(0, -1))
    e = scalar_mono(N, {1: 1}) + scalar_mono(N, {"R": 1}, ScalarExt(0, 1))
    assert d @ e == norm_sq_symbol(N)


def test_r_parity_reduction():
    # R^3 == R * |xi'|^2 after the rewrite
    r3 = scalar_mono(N, {"R": 3})
    boundary_sq = sum(
        (scalar_mono(N, {j: 2, "R": 1}) for j in range(2, 2 * N + 1)),
        PolySymbol.zero(N, 1, 1),
    )
    assert r3 == boundary_sq


def test_radial_order_examples():
    xi1 = RationalBoundarySymbol.from_poly(scalar_mono(N, {1: 1}), a=1, b=1)
    assert xi1.radial_order() == -1
    const = RationalBoundarySymbol.from_poly(
        PolySymbol.constant(N, FiberOperator.identity(3))
    )
    assert const.radial_order() == 0
    with pytest.raises(ZeroSymbolError):
        RationalBoundarySymbol.zero(N, 1, 1).radial_order()


def test_rational_equality_via_cross_multiplication():
    # xi_2 / R == xi_2 * R / |xi'|^2
    lhs = RationalBoundarySymbol.from_poly(scalar_mono(N, {2: 1}), c=1)
    rhs = RationalBoundarySymbol.from_poly(scalar_mono(N, {2: 1, "R": 1}), c=2)
    assert lhs == rhs
    assert not (lhs - rhs + lhs).is_zero()


def test_extended_orders_pure_contact_power():
    n = 3
    # xi_{n+1} / |xi'|^2: radial -1; parabolic 2 - 4 = -2
    sym = RationalBoundarySymbol.from_poly(scalar_mono(n, {n + 1: 1}), c=2)
    assert sym.extended_orders() == OrderProfile(-1, -2, -2)


def test_extended_orders_worst_case_family():
    n = 3
    # xi_{n+1}^(2j+1) / |xi'|^(2k+2j-1) has parabolic order 4 - 4k
    for k in (2, 3):
        for j in (0, 1):
            sym = RationalBoundarySymbol.from_poly(
                scalar_mono(n, {n + 1: 2 * j + 1}), c=2 * k + 2 * j - 1
            )
            prof = sym.extended_orders()
            assert prof.classical == 2 - 2 * k
            assert prof.upper == prof.lower == 4 - 4 * k
    # the stated example: k=2, j=0 gives order -4
    sym = RationalBoundarySymbol.from_poly(scalar_mono(n, {n + 1: 1}), c=3)
    assert sym.extended_orders().upper == -4


def test_extended_orders_inverse_radius():
    sym = RationalBoundarySymbol.from_poly(
        PolySymbol.constant(N, FiberOperator.scalar(1)), c=1
    )
    assert sym.extended_orders() == OrderProfile(-1, -2, -2)


def test_extended_orders_product_additivity():
    n = 3
    rng_cases = [
        ({2: 1}, 1),
        ({n + 1: 1}, 2),
        ({2: 2, n + 1: 1}, 3),
    ]
    syms = [
        RationalBoundarySymbol.from_poly(scalar_mono(n, pw), c=c)
        for pw, c in rng_cases
    ]
    for x in syms:
        for y in syms:
            px, py, pxy = x.extended_orders(), y.extended_orders(), (x @ y).extended_orders()
            assert pxy.classical == px.classical + py.classical
            assert pxy.upper == px.upper + py.upper


def numeric_parabolic_fit(sym, side, eta_prime, powers=(6.0, 8.0)):
    """Numeric grading oracle: evaluate along a parabolic ray and fit the order."""
    n = sym.n
    vals = []
    for lam_pow in powers:
        lam = math.exp(lam_pow / 4.0)
        xi = np.zeros(2 * n)
        # eta0 = lam^2 on the +face: xi_{n+1} = -side*lam^2/2
        xi[n] = -side * lam**2 / 2.0
        for j in range(1, n):
            xi[j] = lam * eta_prime[j - 1]
            xi[j + n] = lam * eta_prime[j - 1 + (n - 1)]
        R = math.sqrt(sum(xi[k] ** 2 for k in range(1, 2 * n)))
        vals.append(sym.eval_num(xi, R)[0, 0])
    order = (math.log(abs(vals[1])) - math.log(abs(vals[0]))) / (
        (powers[1] - powers[0]) / 4.0
    )
    return order, vals


def principal_value_at(n, grade_parts, side, eta_prime, lam):
    """Evaluate a principal part numerically at |eta0| = lam^2, eta' = lam*eta'."""
    grade, parts = grade_parts
    total = 0.0 + 0.0j
    e0val = lam**2
    for e0, layer in parts.items():
        for exps, coeff in layer.items():
            mono = np.prod(
                [(lam * eta_prime[j]) ** e for j, e in enumerate(exps) if e]
            ) if any(exps) else 1.0
            total += (e0val**e0) * mono * coeff.to_numpy()[0, 0]
    return total


@pytest.mark.parametrize("side", [1, -1])
def test_heisenberg_principal_matches_numeric_grading(side):
    n = 2
    cases = [
        # xi_{n+1}^2 / |xi'|^2
        RationalBoundarySymbol.from_poly(scalar_mono(n, {n + 1: 2}), c=2),
        # 1/|xi'|
        RationalBoundarySymbol.from_poly(
            PolySymbol.constant(n, FiberOperator.scalar(1)), c=1
        ),
        # xi_2 / |xi'|^2  (weight-one numerator)
        RationalBoundarySymbol.from_poly(scalar_mono(n, {2: 1}), c=2),
        # (|xi'| + xi_{n+1}) / 2|xi'|: leading parts cancel on the +face
        RationalBoundarySymbol.from_poly(
            scalar_mono(n, {"R": 1}, Fraction(1, 2))
            + scalar_mono(n, {n + 1: 1}, Fraction(1, 2)),
            c=1,
        ),
    ]
    eta_prime = [0.73, -0.41]
    for sym in cases:
        grade, parts = heisenberg_principal(sym, side)
        lam = 40.0
        lead = principal_value_at(n, (grade, parts), side, eta_prime, lam)
        xi = np.zeros(2 * n)
        xi[n] = -side * lam**2 / 2.0
        xi[1] = lam * eta_prime[0]
        xi[3] = lam * eta_prime[1]
        R = math.sqrt(sum(xi[k] ** 2 for k in range(1, 2 * n)))
        exact = sym.eval_num(xi, R)[0, 0]
        # relative agreement at large parameter: principal term dominates
        assert abs(exact - lead) <= 2e-3 * max(abs(exact), abs(lead), 1e-30)


def test_principal_of_cancelling_combination_is_subleading():
    # |xi'| + xi_{n+1} on the positive face: leading term |eta'|^2/eta0
    n = 2
    sym = RationalBoundarySymbol.from_poly(
        scalar_mono(n, {"R": 1}) + scalar_mono(n, {n + 1: 1})
    )
    grade, parts = heisenberg_principal(sym, 1)
    assert grade == 0  # |eta'|^2 / eta0 is parabolically of degree 0
    assert set(parts) == {-1}
    layer = parts[-1]
    assert layer == {
        (2, 0): FiberOperator.scalar(1),
        (0, 2): FiberOperator.scalar(1),
    }
    # on the negative face the same symbol has principal -eta0 (grade 2)
    grade_m, parts_m = heisenberg_principal(sym, -1)
    assert grade_m == 2
    assert parts_m == {1: {(0, 0): FiberOperator.scalar(1)}}


def test_parabolic_expand_even_gaps_and_leading():
    n = 2
    inv_sq = RationalBoundarySymbol.from_poly(
        PolySymbol.constant(n, FiberOperator.scalar(1)), c=2
    )
    parts = parabolic_parts(inv_sq, 1, 3)
    grades = [g for g, _ in parts]
    assert grades[0] == -4
    assert all((grades[i] - grades[i + 1]) % 2 == 0 for i in range(len(grades) - 1))
    assert all((grades[0] - g) % 2 == 0 for g in grades)
    # leading coefficient: (|eta0|/2)^-2
    lead = parts[0][1]
    assert lead == {-2: {(0, 0): FiberOperator.scalar(4)}}


def test_parabolic_expand_numeric_cross_check():
    # partial sums converge to the true value with the expected rate
    n = 2
    inv = RationalBoundarySymbol.from_poly(
        PolySymbol.constant(n, FiberOperator.scalar(1)), c=2
    )
    parts = parabolic_parts(inv, 1, 4)
    eta_prime = [0.3, -0.2]
    lam = 25.0
    xi = np.zeros(4)
    xi[2] = -(lam**2) / 2.0
    xi[1] = lam * eta_prime[0]
    xi[3] = lam * eta_prime[1]
    R = math.sqrt(sum(xi[k] ** 2 for k in range(1, 4)))
    exact = inv.eval_num(xi, R)[0, 0]
    approx = sum(
        principal_value_at(n, (g, p), 1, eta_prime, lam) for g, p in parts
    )
    assert abs(exact - approx) <= 1e-8 * abs(exact)


def test_zero_symbol_has_no_principal():
    n = 2
    with pytest.raises(ZeroSymbolError):
        heisenberg_principal(RationalBoundarySymbol.zero(n, 1, 1), 1)


def test_dimension_mismatch_raises():
    a = PolySymbol.constant(N, FiberOperator.identity(2))
    b = PolySymbol.constant(N, FiberOperator.identity(3))
    with pytest.raises(ValueError):
        a @ b
    with pytest.raises(ValueError):
        a + b


def test_canonicalization_idempotent():
    n = 2
    sym = RationalBoundarySymbol.from_poly(scalar_mono(n, {2: 1}), a=1, b=2, c=1) \
        + RationalBoundarySymbol.from_poly(scalar_mono(n, {1: 1}), a=2, b=1) \
        + RationalBoundarySymbol.from_poly(
            PolySymbol.constant(n, FiberOperator.scalar(1))
        )
    once = sym.canonical()
    twice = once.canonical()
    assert len(once.terms) == 1
    assert len(twice.terms) == 1
    p1, a1, b1, c1 = once.terms[0]
    p2, a2, b2, c2 = twice.terms[0]
    assert (a1, b1, c1) == (a2, b2, c2)
    assert (p1 - p2).is_zero()
    assert once == sym


def test_radial_order_additivity():
    n = 2
    syms = [
        RationalBoundarySymbol.from_poly(scalar_mono(n, {1: 1}), a=1, b=1),
        RationalBoundarySymbol.from_poly(scalar_mono(n, {2: 2, 3: 1}), c=1),
        RationalBoundarySymbol.from_poly(
            PolySymbol.constant(n, FiberOperator.scalar(3)), a=2, b=2
        ),
    ]
    for x in syms:
        for y in syms:
            assert (x @ y).radial_order() == x.radial_order() + y.radial_order()


def test_isotropic_merge():
    n = 2
    sym = RationalBoundarySymbol.from_poly(
        scalar_mono(n, {n + 1: 2}), c=2
    )
    grade, parts = heisenberg_principal(sym, 1)
    iso = isotropic_at_eta0_one(parts)
    assert iso == {(0, 0): FiberOperator.scalar(Fraction(1, 1))}
