"""Truncated Fock/Hermite realization of the isotropic model calculus.

Operators act on occupation states of n-1 oscillator modes truncated at total
occupation N, optionally tensored with the exterior fiber.  Entries involve
square roots, so this layer is floating point; identities are asserted on
interior states, i.e. far enough below the cutoff that compositions do not
leak past it.  The symbol side (isotropic polynomials and their star product)
stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .fiber import FiberBasis, FiberOperator, degree_projector
from .scalars import I, ScalarExt


class FockSpace:
    """Occupation basis of ``modes`` oscillators with total occupation <= N."""

    def __init__(self, modes: int, cutoff: int):
        if modes < 1 or cutoff < 0:
            raise ValueError("need modes >= 1 and cutoff >= 0")
        self.modes = modes
        self.cutoff = cutoff
        states = []

        def build(prefix, remaining):
            if len(prefix) == modes:
                states.append(tuple(prefix))
                return
            for k in range(remaining + 1):
                build(prefix + [k], remaining - k)

        build([], cutoff)
        self.states = tuple(sorted(states, key=lambda m: (sum(m), m)))
        self.index = {m: i for i, m in enumerate(self.states)}
        self.dim = len(self.states)
        self._mono_cache = {}

    def interior_indices(self, depth: int):
        return [i for i, m in enumerate(self.states) if sum(m) <= self.cutoff - depth]

    def __repr__(self):
        return f"FockSpace(modes={self.modes}, cutoff={self.cutoff}, dim={self.dim})"


class CombinedSpace:
    """Fock factor tensored with the exterior fiber; Fock index is major."""

    def __init__(self, fock: FockSpace, fiber: FiberBasis):
        self.fock = fock
        self.fiber = fiber
        self.dim = fock.dim * fiber.dim

    def flat(self, occ_idx: int, fiber_pos: int) -> int:
        return occ_idx * self.fiber.dim + fiber_pos

    def interior_indices(self, depth: int):
        out = []
        fdim = self.fiber.dim
        for i in self.fock.interior_indices(depth):
            out.extend(range(i * fdim, i * fdim + fdim))
        return out

    def slot_indices(self, fiber_positions):
        out = []
        for i in range(self.fock.dim):
            out.extend(self.flat(i, p) for p in fiber_positions)
        return out

    def __repr__(self):
        return f"CombinedSpace({self.fock!r}, fiber_dim={self.fiber.dim})"


@dataclass
class FockOperator:
    """Dense operator with declared model order and composition depth."""

    mat: np.ndarray
    space: object
    order: int = None
    depth: int = 0

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        order = None
        if self.order is not None and other.order is not None:
            order = self.order + other.order
        return FockOperator(
            self.mat @ other.mat, self.space, order, self.depth + other.depth
        )

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.mat.conj().T, self.space, self.order, self.depth)

    def interior_residual(self, target: np.ndarray, depth: int = None) -> float:
        """Max column norm of (self - target) over interior basis states."""
        d = self.depth if depth is None else depth
        cols = self.space.interior_indices(d)
        diff = self.mat[:, cols] - target[:, cols]
        return float(np.max(np.abs(diff))) if len(cols) else 0.0


# -- ladder operators and the oscillator -----------------------------------------


def ladder_ops(space: FockSpace, j: int):
    """Raising/lowering pair for mode j (1-based), normalized to [C, C*] = -2.

    The raising operator C adds one quantum with weight sqrt(2 m_j + 2); its
    adjoint C* removes one with weight sqrt(2 m_j).  The commutation relations
    [C_j, C_k*] = -2 delta_jk hold on states two levels below the cutoff.
    """
    if not 1 <= j <= space.modes:
        raise ValueError(f"mode index {j} out of range [1, {space.modes}]")
    pos = j - 1
    c = np.zeros((space.dim, space.dim))
    for m, i in space.index.items():
        if sum(m) + 1 <= space.cutoff:
            up = list(m)
            up[pos] += 1
            c[space.index[tuple(up)], i] = sqrt(2.0 * m[pos] + 2.0)
    create = FockOperator(c, space, order=1, depth=1)
    annihilate = FockOperator(c.T.copy(), space, order=1, depth=1)
    return create, annihilate


def harmonic_oscillator(space: FockSpace) -> FockOperator:
    """Diagonal oscillator with eigenvalue 2|m| + modes on each state."""
    diag = np.array([2.0 * sum(m) + space.modes for m in space.states])
    return FockOperator(np.diag(diag), space, order=2, depth=0)


def number_diagonal(space: FockSpace) -> np.ndarray:
    return np.array([float(sum(m)) for m in space.states])


# -- isotropic polynomial symbols --------------------------------------------------


class IsotropicPolySymbol:
    """Polynomial in the 2k weight-one variables with exact matrix coefficients.

    Variables are ordered (w_1..w_k, phi_1..phi_k).  Coefficients are
    FiberOperator matrices (1x1 for scalar symbols); the star product below is
    exact on this class.
    """

    __slots__ = ("k", "rows", "cols", "terms")

    def __init__(self, k: int, rows: int, cols: int, terms=None):
        self.k = k
        self.rows = rows
        self.cols = cols
        self.terms = {}
        if terms:
            for exps, coeff in terms.items():
                if not coeff.is_zero():
                    self.terms[tuple(exps)] = coeff

    @staticmethod
    def constant(k: int, coeff: FiberOperator) -> "IsotropicPolySymbol":
        return IsotropicPolySymbol(k, coeff.rows, coeff.cols, {(0,) * (2 * k): coeff})

    @staticmethod
    def monomial(k: int, exps, coeff: FiberOperator) -> "IsotropicPolySymbol":
        return IsotropicPolySymbol(k, coeff.rows, coeff.cols, {tuple(exps): coeff})

    @staticmethod
    def variable(k: int, pos: int, dim: int = 1) -> "IsotropicPolySymbol":
        e = [0] * (2 * k)
        e[pos] = 1
        return IsotropicPolySymbol.monomial(k, e, FiberOperator.identity(dim))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            new = c if cur is None else cur + c
            if new.is_zero():
                out.pop(e, None)
            else:
                out[e] = new
        return IsotropicPolySymbol(self.k, self.rows, self.cols, out)

    def __sub__(self, other):
        return self + other.scale(ScalarExt(-1))

    def scale(self, c) -> "IsotropicPolySymbol":
        return IsotropicPolySymbol(
            self.k, self.rows, self.cols,
            {e: coeff.scale(c) for e, coeff in self.terms.items()},
        )

    def pointwise(self, other: "IsotropicPolySymbol") -> "IsotropicPolySymbol":
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 @ c2
                if prod.is_zero():
                    continue
                cur = out.get(e)
                out[e] = prod if cur is None else cur + prod
        return IsotropicPolySymbol(self.k, self.rows, other.cols, out)

    def deriv(self, pos: int) -> "IsotropicPolySymbol":
        out = {}
        for exps, coeff in self.terms.items():
            p = exps[pos]
            if not p:
                continue
            e = list(exps)
            e[pos] -= 1
            out[tuple(e)] = coeff.scale(p)
        return IsotropicPolySymbol(self.k, self.rows, self.cols, out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, IsotropicPolySymbol):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"IsotropicPolySymbol(k={self.k}, {len(self.terms)} terms)"


def norm_sq_isotropic(k: int, dim: int = 1) -> IsotropicPolySymbol:
    out = IsotropicPolySymbol(k, dim, dim)
    ident = FiberOperator.identity(dim)
    for pos in range(2 * k):
        e = [0] * (2 * k)
        e[pos] = 2
        out = out + IsotropicPolySymbol.monomial(k, e, ident)
    return out


def moyal_product(
    a: IsotropicPolySymbol, b: IsotropicPolySymbol, sign: int
) -> IsotropicPolySymbol:
    """Star product matching operator composition under the quantization maps.

    Finite bidifferential series, exact for polynomial symbols; the parameter
    is i/2 for the + quantization and -i/2 for the - quantization.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = a.k
    c_unit = I * Fraction(sign, 2)
    max_deg = min(a.degree(), b.degree())
    out = IsotropicPolySymbol(k, a.rows, b.cols)

    def multi_indices(total, length):
        if length == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in multi_indices(total - head, length - 1):
                yield (head,) + rest

    for order in range(max_deg + 1):
        factor = c_unit**order
        for split in range(order + 1):
            # |beta| = split over w-derivatives of a, |gamma| = order - split
            for beta in multi_indices(split, k):
                for gamma in multi_indices(order - split, k):
                    da = a
                    db = b
                    denom = 1
                    for j in range(k):
                        for _ in range(beta[j]):
                            da = da.deriv(j)          # d/dw_j on a
                            db = db.deriv(k + j)      # d/dphi_j on b
                        for _ in range(gamma[j]):
                            da = da.deriv(k + j)      # d/dphi_j on a
                            db = db.deriv(j)          # d/dw_j on b
                        denom *= _fact(beta[j]) * _fact(gamma[j])
                    if da.is_zero() or db.is_zero():
                        continue
                    sgn = -1 if sum(gamma) % 2 else 1
                    coeff = factor * Fraction(sgn, denom)
                    out = out + da.pointwise(db).scale(coeff)
    return out


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# -- Weyl quantization ---------------------------------------------------------------


def _generator_matrices(space: FockSpace, sign: int):
    """Position and momentum matrices for each mode under the chosen map."""
    gens = []
    for j in range(1, space.modes + 1):
        create, annihilate = ladder_ops(space, j)
        w = (create.mat + annihilate.mat) / 2.0
        phi = sign * 1j * (create.mat - annihilate.mat) / 2.0
        gens.append(w)
        gens.append(phi)
    # reorder: all w's first, then all phi's
    ws = gens[0::2]
    phis = gens[1::2]
    return ws + phis


def _quantize_monomial(space: FockSpace, exps: tuple, sign: int) -> np.ndarray:
    """Symmetrized (Weyl) quantization of one monomial, cached per space.

    Peels one generator at a time through the symmetric product; peeling order
    does not matter because the commutators are central.
    """
    key = (sign, exps)
    cached = space._mono_cache.get(key)
    if cached is not None:
        return cached
    if not any(exps):
        out = np.eye(space.dim, dtype=complex)
    else:
        pos = max(p for p, e in enumerate(exps) if e)
        reduced = list(exps)
        reduced[pos] -= 1
        inner = _quantize_monomial(space, tuple(reduced), sign)
        g = _generator_matrices(space, sign)[pos]
        out = (inner @ g + g @ inner) / 2.0
    space._mono_cache[key] = out
    return out


def weyl_quantize(
    space: FockSpace, sym: IsotropicPolySymbol, sign: int,
    fiber: FiberBasis = None, max_degree: int = 4,
):
    """Weyl quantization of a polynomial symbol on the truncated basis.

    Normalized so the constant symbol quantizes to the identity; the linear
    combinations w_j -+ i phi_j map to the raising/lowering pair according to
    the sign, and |eta'|^2 maps to the oscillator.  Coefficients of size > 1
    tensor the result into the combined Fock x fiber space.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if sym.degree() > max_degree:
        raise ValueError(f"symbol degree {sym.degree()} exceeds supported {max_degree}")
    if sym.k != space.modes:
        raise ValueError("mode count mismatch")
    scalar = sym.rows == 1 and sym.cols == 1
    depth = sym.degree()
    if scalar:
        out = np.zeros((space.dim, space.dim), dtype=complex)
        for exps, coeff in sym.terms.items():
            out += coeff.entry(0, 0).to_complex() * _quantize_monomial(space, exps, sign)
        return FockOperator(out, space, order=depth, depth=depth)
    if fiber is None:
        raise ValueError("matrix-valued symbols need the fiber basis")
    combined = CombinedSpace(space, fiber)
    out = np.zeros((combined.dim, combined.dim), dtype=complex)
    for exps, coeff in sym.terms.items():
        out += np.kron(_quantize_monomial(space, exps, sign), coeff.to_numpy())
    return FockOperator(out, combined, order=depth, depth=depth)


# -- vacua and model projectors ---------------------------------------------------


def _mode_vacuum_coeffs(tau, cutoff: int) -> np.ndarray:
    """Hermite coefficients of the width-tau Gaussian in one mode, unnormalized."""
    if tau <= 0:
        raise ValueError("width must be positive")
    c = np.zeros(cutoff + 1)
    c[0] = 1.0
    ratio = (1.0 - tau) / (1.0 + tau)
    for m in range(1, cutoff):
        c[m + 1] = c[m - 1] * sqrt(m / (m + 1.0)) * ratio
    return c


def vacuum_state(space: FockSpace, taus) -> np.ndarray:
    """Normalized expansion of the product Gaussian with the given widths.

    Width 1 in every mode gives the ground state exactly; only even
    occupations appear for any widths.
    """
    taus = list(taus)
    if len(taus) != space.modes:
        raise ValueError("need one width per mode")
    per_mode = [_mode_vacuum_coeffs(t, space.cutoff) for t in taus]
    v = np.zeros(space.dim)
    for m, i in space.index.items():
        prod = 1.0
        for j, mj in enumerate(m):
            prod *= per_mode[j][mj]
        v[i] = prod
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("vacuum projects to zero at this truncation")
    return v / norm


def szego_model_projector(
    combined: CombinedSpace, kind: str, taus=None
) -> FockOperator:
    """Vacuum projector tensored with the degree-0 slot (or top slot).

    ``kind`` is one of 'classical', 'conjugate', 'generalized'; the
    generalized version uses the deformed vacuum widths ``taus``.
    """
    space, fiber = combined.fock, combined.fiber
    if kind == "classical":
        v = vacuum_state(space, [1.0] * space.modes)
        deg = 0
    elif kind == "conjugate":
        v = vacuum_state(space, [1.0] * space.modes)
        deg = fiber.k
    elif kind == "generalized":
        if taus is None:
            raise ValueError("generalized projector needs widths")
        v = vacuum_state(space, taus)
        deg = 0
    else:
        raise ValueError("kind must be classical, conjugate or generalized")
    p_fock = np.outer(v, v)
    p_fiber = degree_projector(fiber, deg).to_numpy().real
    return FockOperator(np.kron(p_fock, p_fiber), combined, order=0, depth=0)


def overlap_and_relating(p1: FockOperator, p2: FockOperator):
    """Trace pairing of two rank-one model projectors and the relating operator.

    The trace equals the squared overlap of the underlying vacua (computed per
    fiber slot when the projectors carry one); the relating operator is
    p2 p1 / trace and reproduces p1 on the left.
    """
    raw = float(np.real(np.trace(p2.mat @ p1.mat)))
    slot_rank = max(1, int(round(float(np.real(np.trace(p1.mat))))))
    tr = raw / slot_rank
    if tr <= 1e-14:
        raise ValueError("degenerate overlap between the two vacua")
    p21 = FockOperator(p2.mat @ p1.mat / tr, p1.space, order=0, depth=0)
    return {"trace": tr, "p21": p21}
