"""Deterministic JSON and LaTeX emission for symbols and model operators."""

from __future__ import annotations

import numpy as np

from .dirac import Block2
from .fiber import FiberOperator
from .scalars import ScalarExt
from .symbols import PolySymbol, RationalBoundarySymbol


def scalar_to_json(x: ScalarExt) -> dict:
    return {
        "re_a": str(x.ar), "im_a": str(x.ai),
        "re_b": str(x.br), "im_b": str(x.bi),
    }


def fiber_to_json(mat: FiberOperator):
    zero = scalar_to_json(ScalarExt(0))
    out = [[zero] * mat.cols for _ in range(mat.rows)]
    for (i, j), v in sorted(mat.data.items()):
        out[i][j] = scalar_to_json(v)
    return out


def poly_to_json(poly: PolySymbol) -> dict:
    return {
        ",".join(map(str, exps)): fiber_to_json(coeff)
        for exps, coeff in sorted(poly.terms.items())
    }


def rbs_to_json(sym: RationalBoundarySymbol) -> dict:
    sym = sym.canonical()
    return {
        "vars": 2 * sym.n,
        "shape": [sym.rows, sym.cols],
        "terms": [
            {"poly": poly_to_json(poly), "pole_orders": [a, b, c]}
            for poly, a, b, c in sym.terms
        ],
    }


def block_to_json(block: Block2) -> dict:
    out = {}
    for key, entry in block.entries().items():
        if isinstance(entry, RationalBoundarySymbol):
            out[f"block_{key}"] = rbs_to_json(entry)
        elif isinstance(entry, PolySymbol):
            out[f"block_{key}"] = rbs_to_json(RationalBoundarySymbol.from_poly(entry))
        else:
            raise TypeError(f"cannot dump block entry of type {type(entry)}")
    return out


def dump_json(obj) -> dict:
    if isinstance(obj, Block2):
        return block_to_json(obj)
    if isinstance(obj, PolySymbol):
        return rbs_to_json(RationalBoundarySymbol.from_poly(obj))
    if isinstance(obj, RationalBoundarySymbol):
        return rbs_to_json(obj)
    raise TypeError(f"cannot dump object of type {type(obj)}")


# -- LaTeX ---------------------------------------------------------------------------


def _scalar_latex(x: ScalarExt) -> str:
    def cpart(re, im):
        if im == 0:
            return str(re)
        if re == 0:
            return f"{im} i"
        sign = "+" if im > 0 else "-"
        return f"{re} {sign} {abs(im)} i"

    a = cpart(x.ar, x.ai)
    b = cpart(x.br, x.bi)
    if x.br == 0 and x.bi == 0:
        return a
    if x.ar == 0 and x.ai == 0:
        return f"({b})\\sqrt{{2}}"
    return f"({a}) + ({b})\\sqrt{{2}}"


def _mono_latex(n: int, exps) -> str:
    parts = []
    for j in range(2 * n):
        e = exps[j]
        if e == 1:
            parts.append(f"\\xi_{{{j + 1}}}")
        elif e > 1:
            parts.append(f"\\xi_{{{j + 1}}}^{{{e}}}")
    e = exps[2 * n]
    if e == 1:
        parts.append("R")
    elif e > 1:
        parts.append(f"R^{{{e}}}")
    return " ".join(parts) if parts else "1"


def _entry_poly_latex(n: int, entries) -> str:
    # entries: list of (exps, ScalarExt)
    if not entries:
        return "0"
    parts = []
    for exps, coeff in sorted(entries):
        parts.append(f"\\left({_scalar_latex(coeff)}\\right) {_mono_latex(n, exps)}")
    return " + ".join(parts)


def rbs_to_latex(sym: RationalBoundarySymbol) -> str:
    sym = sym.canonical()
    terms_tex = []
    for poly, a, b, c in sym.terms:
        rows = []
        for i in range(sym.rows):
            cells = []
            for j in range(sym.cols):
                entries = [
                    (exps, coeff.entry(i, j))
                    for exps, coeff in poly.terms.items()
                    if not coeff.entry(i, j).is_zero()
                ]
                cells.append(_entry_poly_latex(sym.n, entries))
            rows.append(" & ".join(cells))
        body = "\\begin{pmatrix}" + " \\\\ ".join(rows) + "\\end{pmatrix}"
        denom_parts = []
        if a:
            denom_parts.append(f"(\\xi_1 - i R)^{{{a}}}" if a > 1 else "(\\xi_1 - i R)")
        if b:
            denom_parts.append(f"(\\xi_1 + i R)^{{{b}}}" if b > 1 else "(\\xi_1 + i R)")
        if c:
            denom_parts.append(f"R^{{{c}}}" if c > 1 else "R")
        if denom_parts:
            terms_tex.append(f"\\frac{{{body}}}{{{' '.join(denom_parts)}}}")
        else:
            terms_tex.append(body)
    return " + ".join(terms_tex) if terms_tex else "0"


def dump_latex(obj) -> str:
    if isinstance(obj, Block2):
        rows = []
        ent = obj.entries()
        for rkeys in (("11", "12"), ("21", "22")):
            cells = []
            for key in rkeys:
                e = ent[key]
                if isinstance(e, PolySymbol):
                    e = RationalBoundarySymbol.from_poly(e)
                cells.append(rbs_to_latex(e))
            rows.append(" & ".join(cells))
        return "\\begin{pmatrix}" + " \\\\ ".join(rows) + "\\end{pmatrix}"
    if isinstance(obj, PolySymbol):
        return rbs_to_latex(RationalBoundarySymbol.from_poly(obj))
    if isinstance(obj, RationalBoundarySymbol):
        return rbs_to_latex(obj)
    raise TypeError(f"cannot render object of type {type(obj)}")


def model_block_to_json(op) -> dict:
    """Dense dump of a block model operator with its order grid."""
    blocks = {}
    for (i, j), mat in sorted(op.blocks.items()):
        key = f"{i}{j}"
        if mat is None:
            blocks[key] = None
        else:
            arr = np.asarray(mat)
            blocks[key] = [
                [[float(np.real(v)), float(np.imag(v))] for v in row] for row in arr
            ]
    return {
        "blocks": blocks,
        "orders": {f"{i}{j}": o for (i, j), o in sorted(op.orders.items())},
        "side": op.side,
        "parity": op.parity,
        "n": op.n,
        "meta": {k: v for k, v in sorted(op.meta.items()) if not callable(v)},
    }
