"""Named verification checks run by the batch front end.

Each check returns (max_error, parameters, witness): witness is None on
success and a small description of the first failure otherwise.  Exact
symbolic checks report error 0.0 or 1.0.  Numeric checks are deterministic
given the per-check random generator.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .dirac import (
    GeometryData,
    audit_discarded_shapes,
    calderon_p0,
    classical_ellipticity_report,
    d1_blocks,
    dd_symbol,
    other_parity,
    q_minus2c_pieces,
)
from .fiber import FiberBasis, interior_action, wedge_action
from .fock import (
    CombinedSpace,
    FockSpace,
    IsotropicPolySymbol,
    harmonic_oscillator,
    ladder_ops,
    moyal_product,
    overlap_and_relating,
    szego_model_projector,
    vacuum_state,
    weyl_quantize,
)
from .fiber import FiberOperator
from .models import (
    assemble_models,
    build_context,
    composition_residual,
    degree_diagonal,
    idempotence_residuals,
    invert_model,
)
from .residues import ContourSide, residue_at_pole
from .symbols import PolySymbol


def _fail(where, **info):
    return 1.0, {}, {"where": where, **info}


def check_fiber_identities(cfg, rng):
    """Dual pairs, anticommutation and the degree-count identities, exactly."""
    k = cfg.n - 1
    basis = FiberBasis(k)

    def compose(act1, j1, act2, j2, form):
        step = act2(form, j2)
        if step is None:
            return None
        s2, g = step
        step = act1(g, j1)
        if step is None:
            return None
        s1, out = step
        return s1 * s2, out

    for form in basis.forms:
        for j in range(1, k + 1):
            # dual pair: e_j w_j + w_j e_j = Id on every basis form
            terms = {}
            for first, second in ((interior_action, wedge_action),
                                  (wedge_action, interior_action)):
                res = compose(first, j, second, j, form)
                if res is not None:
                    s, g = res
                    terms[g] = terms.get(g, 0) + s
            if terms != {form: 1}:
                return _fail("dual-pair", form=list(form), j=j)
            for l in range(1, k + 1):
                if l == j:
                    continue
                for a1, a2 in (
                    (interior_action, interior_action),
                    (wedge_action, wedge_action),
                    (interior_action, wedge_action),
                ):
                    lhs = compose(a1, j, a2, l, form)
                    rhs = compose(a2, l, a1, j, form)
                    if lhs is None and rhs is None:
                        continue
                    if lhs is None or rhs is None:
                        return _fail("anticommutation", form=list(form), j=j, l=l)
                    if lhs[0] != -rhs[0] or lhs[1] != rhs[1]:
                        return _fail("anticommutation", form=list(form), j=j, l=l)
        # degree counts: sum_j w_j e_j = deg, sum_j e_j w_j = k - deg
        down = up = 0
        for j in range(1, k + 1):
            if compose(wedge_action, j, interior_action, j, form) is not None:
                down += 1
            if compose(interior_action, j, wedge_action, j, form) is not None:
                up += 1
        if down != len(form) or up != k - len(form):
            return _fail("degree-count", form=list(form))
    return 0.0, {"letters": k, "forms": len(basis.forms)}, None


def check_dd_square(cfg, rng):
    """The tangential symbol squares to |xi''|^2 exactly and is self-adjoint."""
    geom = cfg.geometry()
    n = geom.n
    dd = dd_symbol(geom)
    ident = FiberOperator.identity(dd.rows)
    expected = PolySymbol.zero(n, dd.rows, dd.cols)
    for j in range(2, n + 1):
        for v in (j, n + j):
            expected = expected + PolySymbol.monomial(n, {v: 2}, ident)
    if not (dd @ dd == expected):
        return _fail("square")
    if not (dd.adjoint() == dd):
        return _fail("self-adjoint")
    return 0.0, {"n": n}, None


def check_calderon_principal(cfg, rng):
    """Principal boundary projection: exact idempotence for all side/parity."""
    geom = cfg.geometry()
    for side in cfg.sides:
        for parity in cfg.parities:
            p0 = calderon_p0(geom, side, parity)
            diff = (p0 @ p0) - p0
            if not all(e.is_zero() for e in diff.entries().values()):
                return _fail("idempotence", side=side, parity=parity)
    return 0.0, {"n": geom.n, "cases": len(cfg.sides) * len(cfg.parities)}, None


def _random_b(rng, n):
    return tuple(
        tuple(
            (Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
             Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
            for _ in range(n)
        )
        for _ in range(n)
    )


def check_calderon_subprincipal(cfg, rng, samples: int = 4):
    """Order -1 term identity and the exact ray vanishing of Hessian terms."""
    from .dirac import q_minus2c_hessian_on_ray
    from .scalars import ScalarExt
    from .symbols import RationalBoundarySymbol

    n = cfg.n
    base = cfg.geometry()
    # curvature-free identity: independent of the Hessian data
    for parity in cfg.parities:
        d1 = d1_blocks(base, other_parity(parity))
        free, _ = q_minus2c_pieces(base, parity)
        for side in cfg.sides:
            contour = ContourSide.PLUS if side > 0 else ContourSide.MINUS
            res = free.map(lambda s: residue_at_pole(s, contour))
            expected = d1.map(
                lambda p: RationalBoundarySymbol.from_poly(
                    p.dxi(1).scale(ScalarExt(0, -(n - 1))), c=1
                )
            )
            diff = res - expected
            if not all(e.is_zero() for e in diff.entries().values()):
                return _fail("derivative-form", parity=parity, side=side)
    bs = [base.b] + [_random_b(rng, n) for _ in range(samples)]
    for b in bs:
        geom = GeometryData(n=n, r=cfg.r, b=b)
        for parity in cfg.parities:
            for side in cfg.sides:
                contour = ContourSide.PLUS if side > 0 else ContourSide.MINUS
                ray = q_minus2c_hessian_on_ray(geom, parity, side)
                if not residue_at_pole(ray.a11, contour).is_zero():
                    return _fail("ray-vanishing-11", parity=parity, side=side)
                if not residue_at_pole(ray.a22, contour).is_zero():
                    return _fail("ray-vanishing-22", parity=parity, side=side)
    return 0.0, {"n": n, "hessians": len(bs)}, None


def check_order_audit(cfg, rng):
    """Discarded term shapes classify below the required Heisenberg orders."""
    geom = cfg.geometry()
    records = audit_discarded_shapes(geom)
    for rec in records:
        if not (rec["diag_ok"] and rec["off_ok"]):
            return _fail("shape-bound", family=rec["family"], params=rec["params"],
                         diag=rec["diag_order"], off=rec["off_order"])
    return 0.0, {"n": geom.n, "shapes": len(records)}, None


def check_classical_ellipticity(cfg, rng, points: int = 100):
    """Determinant of the order-zero comparison symbol off the contact ray."""
    geom = cfg.geometry()
    worst = 0.0
    for side in cfg.sides:
        for parity in cfg.parities:
            rep = classical_ellipticity_report(
                geom, side, parity, seed=rng.randint(0, 10**9), points=points
            )
            worst = max(worst, rep["closed_form_max_error"])
            if not rep["invertible_off_ray"]:
                return _fail("min-det", side=side, parity=parity,
                             min_det=rep["min_abs_det_off_ray"])
            if not rep["degenerates_on_ray"]:
                return _fail("ray-degeneration", side=side, parity=parity,
                             dets=rep["ray_approach_dets"])
    return worst, {"n": geom.n, "points": points}, None


def check_ladder_oscillator(cfg, rng):
    """Commutation relations and the two oscillator identities."""
    modes = cfg.n - 1
    space = FockSpace(modes, cfg.N)
    cols = space.interior_indices(2)
    worst = 0.0
    H = harmonic_oscillator(space).mat
    acc1 = np.zeros_like(H)
    acc2 = np.zeros_like(H)
    for j in range(1, modes + 1):
        cj, cj_star = ladder_ops(space, j)
        acc1 += cj_star.mat @ cj.mat
        acc2 += cj.mat @ cj_star.mat
        for k in range(1, modes + 1):
            ck, ck_star = ladder_ops(space, k)
            comm = cj.mat @ ck_star.mat - ck_star.mat @ cj.mat
            target = -2.0 * np.eye(space.dim) if j == k else 0.0
            worst = max(worst, float(np.max(np.abs((comm - target)[:, cols]))))
    worst = max(worst, float(np.max(np.abs((acc1 - modes * np.eye(space.dim) - H)[:, cols]))))
    worst = max(worst, float(np.max(np.abs((acc2 + modes * np.eye(space.dim) - H)[:, cols]))))
    return worst, {"modes": modes, "N": cfg.N}, None


def check_quantization_consistency(cfg, rng, max_total_degree: int = 3):
    """Star product composed through quantization equals operator product."""
    modes = cfg.n - 1
    space = FockSpace(modes, cfg.N)
    monos = []
    for deg in range(max_total_degree + 1):
        for combo in combinations_with_replacement(range(2 * modes), deg):
            e = [0] * (2 * modes)
            for pos in combo:
                e[pos] += 1
            monos.append(tuple(e))
    quantized = {}
    worst = 0.0
    for sign in (1, -1):
        for e in monos:
            quantized[(sign, e)] = weyl_quantize(
                space, IsotropicPolySymbol.monomial(modes, e, FiberOperator.scalar(1)),
                sign,
            ).mat
    for sign in (1, -1):
        for ea in monos:
            for eb in monos:
                total = sum(ea) + sum(eb)
                if total > max_total_degree:
                    continue
                prod = moyal_product(
                    IsotropicPolySymbol.monomial(modes, ea, FiberOperator.scalar(1)),
                    IsotropicPolySymbol.monomial(modes, eb, FiberOperator.scalar(1)),
                    sign,
                )
                lhs = weyl_quantize(space, prod, sign).mat
                rhs = quantized[(sign, ea)] @ quantized[(sign, eb)]
                cols = space.interior_indices(total)
                worst = max(worst, float(np.max(np.abs((lhs - rhs)[:, cols]))))
    return worst, {"modes": modes, "N": cfg.N, "monomials": len(monos)}, None


def check_dirac_square(cfg, rng):
    """Squared Dirac model equals the occupation/degree diagonal."""
    geom = cfg.geometry()
    worst = 0.0
    for side in cfg.sides:
        ctx = build_context(geom, cfg.N, side)
        target = np.diag(degree_diagonal(geom, ctx.space, side))
        cols = ctx.combined.interior_indices(2)
        sq = ctx.d_full @ ctx.d_full
        worst = max(worst, float(np.max(np.abs((sq - target)[:, cols]))))
    return worst, {"n": geom.n, "N": cfg.N}, None


def check_model_inverses(cfg, rng):
    """Classical-slot model inverses: two-sided residual, zero block, grids."""
    geom = cfg.geometry()
    worst = 0.0
    for side in cfg.sides:
        ctx = build_context(geom, cfg.N, side)
        for parity in cfg.parities:
            models = assemble_models(ctx, parity)
            worst = max(worst, models["T"].meta["assembly_residual"])
            worst = max(worst, max(idempotence_residuals(ctx, models).values()))
            U = invert_model(ctx, parity)
            if U.blocks[U.meta["zero_block"]] is not None:
                return _fail("zero-block", side=side, parity=parity)
            expected_zero = (2, 2) if (side > 0 or geom.n % 2 == 1) else (1, 1)
            if U.meta["zero_block"] != expected_zero:
                return _fail("zero-block-position", side=side, parity=parity)
            worst = max(worst, composition_residual(ctx, U, models["T"]))
    return worst, {"n": geom.n, "N": cfg.N}, None


def check_generalized_szego(cfg, rng):
    """Deformed-vacuum pairing, relating identity and corrected inverses."""
    worst = 0.0
    # one-mode canonical pair: trace of the product equals 4/5
    one_mode = CombinedSpace(FockSpace(1, 48), FiberBasis(1))
    p1 = szego_model_projector(one_mode, "classical")
    p2 = szego_model_projector(one_mode, "generalized", taus=[4.0])
    res = overlap_and_relating(p1, p2)
    worst = max(worst, abs(res["trace"] - 0.8))
    worst = max(
        worst, float(np.max(np.abs(p1.mat @ res["p21"].mat - p1.mat)))
    )
    # config widths: trace equals the squared overlap, projector laws hold
    modes = cfg.n - 1
    space = FockSpace(modes, max(cfg.N, 16))
    combined = CombinedSpace(space, FiberBasis(modes, cfg.r))
    pc = szego_model_projector(combined, "classical")
    pg = szego_model_projector(combined, "generalized", taus=list(cfg.tau))
    v1 = vacuum_state(space, [1.0] * modes)
    v2 = vacuum_state(space, list(cfg.tau))
    pair = overlap_and_relating(pc, pg)
    worst = max(worst, abs(pair["trace"] - float(v1 @ v2) ** 2))
    worst = max(worst, float(np.max(np.abs(pc.mat @ pair["p21"].mat - pc.mat))))
    for p in (pc, pg):
        worst = max(worst, float(np.max(np.abs(p.mat @ p.mat - p.mat))))
        worst = max(worst, float(np.max(np.abs(p.mat.conj().T - p.mat))))
    # generalized inverses for the configured widths and exact tau = 1 reduction
    geom = cfg.geometry()
    for side in cfg.sides:
        ctx = build_context(geom, cfg.N, side)
        for parity in cfg.parities:
            mg = assemble_models(ctx, parity, szego="generalized", taus=list(cfg.tau))
            Ug = invert_model(ctx, parity, szego="generalized", taus=list(cfg.tau))
            worst = max(worst, composition_residual(ctx, Ug, mg["T"]))
            U1 = invert_model(ctx, parity, szego="generalized",
                              taus=[1.0] * (geom.n - 1))
            Ucl = invert_model(ctx, parity)
            for key, mat in U1.blocks.items():
                other = Ucl.blocks[key]
                if mat is None or other is None:
                    if mat is not other:
                        return _fail("width-one-reduction", side=side, parity=parity)
                    continue
                worst = max(worst, float(np.max(np.abs(mat - other))))
    return worst, {"n": cfg.n, "N": cfg.N, "tau": list(cfg.tau)}, None


# name -> (function, anchor, pinned tolerance or None for the config default)
REGISTRY = {
    "fiber_identities": (check_fiber_identities, "fiber-dual-pair-and-degree-count", None),
    "dd_square": (check_dd_square, "tangential-symbol-square", None),
    "calderon_principal": (check_calderon_principal, "boundary-projection-idempotence", None),
    "calderon_subprincipal": (check_calderon_subprincipal, "boundary-projection-order-minus-one", None),
    "order_audit": (check_order_audit, "discarded-term-order-bounds", None),
    "classical_ellipticity": (check_classical_ellipticity, "comparison-symbol-invertibility", 1e-10),
    "ladder_oscillator": (check_ladder_oscillator, "ladder-commutation-and-oscillator", 1e-10),
    "quantization_consistency": (check_quantization_consistency, "star-product-vs-composition", 1e-8),
    "dirac_square": (check_dirac_square, "dirac-model-square", 1e-10),
    "model_inverses": (check_model_inverses, "comparison-model-inverses", 1e-8),
    "generalized_szego": (check_generalized_szego, "deformed-vacuum-corrections", 1e-8),
}
