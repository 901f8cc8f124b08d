"""Adjoint calculus for second-order operators on a segment.

Everything here is coefficient-level algebra: the formal adjoint, the
self-adjointness conditions, commutation of two operators through the
coefficient system of LD - DL, and the normality decomposition
L = L0 + L1 into self-adjoint and skew-adjoint parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .catalog import DiffOp
from .expalg import ExpPoly

DEFAULT_TOL = 1e-10


def adjoint(op: DiffOp) -> DiffOp:
    """Formal adjoint: conj(a) u'' + (2 conj(a)' - conj(b)) u' +
    (conj(a)'' - conj(b)' + conj(c)) u."""
    ref = op.reparametrized()
    ab, bb, cb = ref.a.conjugate(), ref.b.conjugate(), ref.c.conjugate()
    return DiffOp(ab, 2 * ab.diff() - bb, ab.diff(2) - bb.diff() + cb)


def is_self_adjoint(op: DiffOp, tol: float = 1e-12) -> bool:
    """Checks Im a = 0, Re b = a', Im c = (1/2) Im b' as exact identities
    (after affine reparametrization for non-reference segments)."""
    ref = op.reparametrized()
    scale = max(ref.a.max_coeff(), ref.b.max_coeff(), ref.c.max_coeff(), 1.0)
    cond1 = ref.a.imag_part()
    cond2 = ref.b.real_part() - ref.a.diff()
    cond3 = ref.c.imag_part() - 0.5 * ref.b.diff().imag_part()
    return all(
        f.with_hint(scale).is_zero(tol) for f in (cond1, cond2, cond3)
    )


def _rel_residual(lhs: ExpPoly, rhs: ExpPoly) -> float:
    scale = max(lhs.max_coeff(), rhs.max_coeff(), 1e-300)
    return (lhs - rhs).max_coeff() / scale


def _coeff_vectors(fs: list[ExpPoly]) -> np.ndarray:
    """Stack the functions on a common (exponent, degree) coordinate grid."""
    slots: list[tuple[complex, int]] = []
    for f in fs:
        for lam, p in f.terms:
            for i in range(len(p)):
                key = (lam, i)
                if not any(abs(lam - l0) <= 1e-12 and i == i0 for l0, i0 in slots):
                    slots.append(key)
    out = np.zeros((len(fs), len(slots)), dtype=complex)
    for r, f in enumerate(fs):
        for lam, p in f.terms:
            for i, c in enumerate(p):
                for s, (l0, i0) in enumerate(slots):
                    if i == i0 and abs(lam - l0) <= 1e-12:
                        out[r, s] = c
                        break
    return out


def _fit_multiple(target: ExpPoly, base: ExpPoly):
    """Least-squares alpha with target ~ alpha * base over coefficient space."""
    vecs = _coeff_vectors([target, base])
    vt, vb = vecs[0], vecs[1]
    denom = np.vdot(vb, vb)
    if abs(denom) < 1e-300:
        return 0j, float(np.linalg.norm(vt))
    alpha = np.vdot(vb, vt) / denom
    resid = np.linalg.norm(vt - alpha * vb) / max(np.linalg.norm(vt), 1e-300)
    return complex(alpha), float(resid)


@dataclass(frozen=True)
class OpPairTest:
    L: DiffOp
    D: DiffOp
    residuals: tuple  # four relations of the coefficient system
    commutes: bool
    alpha: complex        # leading-coefficient multiple, A ~ alpha a
    alpha_residual: float
    beta: complex         # beta a ~ (B - alpha b)^2
    beta_residual: float


def commute_ops(L: DiffOp, D: DiffOp, tol: float = DEFAULT_TOL) -> OpPairTest:
    """Coefficient system equivalent to LD = DL for Du = A u'' + B u' + C u."""
    a, b, c = L.a, L.b, L.c
    A, B, C = D.a, D.b, D.c
    r1 = _rel_residual(a * A.diff(), A * a.diff())
    r2 = _rel_residual(2 * a * B.diff() + b * A.diff(),
                       2 * A * b.diff() + B * a.diff())
    r3 = _rel_residual(a * B.diff(2) + 2 * a * C.diff() + b * B.diff(),
                       A * b.diff(2) + 2 * A * c.diff() + B * b.diff())
    r4 = _rel_residual(a * C.diff(2) + b * C.diff(),
                       A * c.diff(2) + B * c.diff())
    residuals = (r1, r2, r3, r4)
    alpha, alpha_res = _fit_multiple(A, a)
    gap = B - alpha * b
    beta, beta_res = _fit_multiple(gap * gap, a)
    return OpPairTest(L, D, residuals, max(residuals) <= tol,
                      alpha, alpha_res, beta, beta_res)


def compose(L: DiffOp, D: DiffOp) -> tuple:
    """Coefficient functions of the fourth-order product LD, ordered from
    u'''' down to u."""
    a, b, c = L.a, L.b, L.c
    A, B, C = D.a, D.b, D.c
    c4 = a * A
    c3 = a * (2 * A.diff() + B) + b * A
    c2 = a * (A.diff(2) + 2 * B.diff() + C) + b * (A.diff() + B) + c * A
    c1 = a * (B.diff(2) + 2 * C.diff()) + b * (B.diff() + C) + c * B
    c0 = a * C.diff(2) + b * C.diff() + c * C
    return (c4, c3, c2, c1, c0)


def normality_commutator_coeffs(op: DiffOp) -> tuple:
    """Coefficients of L L* - L* L as a fourth-order operator (reference
    coordinates); identically zero exactly for normal operators."""
    ref = op.reparametrized()
    adj = adjoint(ref)
    fwd = compose(ref, adj)
    bwd = compose(adj, ref)
    return tuple(f - g for f, g in zip(fwd, bwd))


def is_normal_via_composition(op: DiffOp, tol: float = DEFAULT_TOL) -> bool:
    ref = op.reparametrized()
    scale = max(
        max(f.max_coeff() for f in compose(ref, adjoint(ref))),
        1e-300,
    )
    return all(
        d.max_coeff() <= tol * scale for d in normality_commutator_coeffs(op)
    )


@dataclass(frozen=True)
class NormalityDecomposition:
    selfadjoint_part: DiffOp
    skew_part: DiffOp
    pair_test: OpPairTest
    alpha_rescale: float
    already_self_adjoint: bool
    final_conditions: dict = field(default_factory=dict)


def _halved(op: DiffOp, other: DiffOp, sign: float) -> DiffOp:
    return DiffOp(
        0.5 * (op.a + sign * other.a),
        0.5 * (op.b + sign * other.b),
        0.5 * (op.c + sign * other.c),
    )


def is_normal(op: DiffOp, tol: float = DEFAULT_TOL):
    """(normal?, decomposition).  Normality holds exactly when the
    self-adjoint part commutes with the skew-adjoint part."""
    ref = op.reparametrized()
    alpha_rescale = 0.0
    im_a = ref.a.imag_part()
    re_a = ref.a.real_part()
    if not im_a.with_hint(ref.a.max_coeff()).is_zero(1e-12):
        alpha, resid = _fit_multiple(im_a, re_a)
        if resid < 1e-9 and abs(alpha.imag) < 1e-9:
            # rotate by (1 - i alpha) so the leading coefficient becomes real
            alpha_rescale = float(alpha.real)
            ref = ref.scaled(1 - 1j * alpha_rescale)
    adj = adjoint(ref)
    L0 = _halved(ref, adj, +1.0)
    L1 = _halved(ref, adj, -1.0)
    test = commute_ops(L0, L1, tol)
    sa = all(f.max_coeff() <= 1e-12 * max(ref.a.max_coeff(), ref.b.max_coeff(),
                                          ref.c.max_coeff(), 1.0)
             for f in (L1.a, L1.b, L1.c))
    final: dict = {}
    if test.commutes and not sa:
        final = _final_form_conditions(L0, L1)
    return test.commutes, NormalityDecomposition(
        L0, L1, test, alpha_rescale, sa, final
    )


def _final_form_conditions(L0: DiffOp, L1: DiffOp) -> dict:
    """Structure checks for normal-but-not-self-adjoint operators: the skew
    part is first order, its leading coefficient squares to a multiple of a,
    and the remaining scalar relations hold up to free real/imaginary
    constants (fitted at the segment midpoint)."""
    out: dict = {}
    out["skew_first_order"] = L1.a.max_coeff() <= 1e-12 * max(L0.a.max_coeff(), 1.0)
    gamma_sq, resid = _fit_multiple(L1.b * L1.b, L0.a)
    out["gamma_sq"] = gamma_sq
    out["skew_coeff_squares_to_a"] = resid <= 1e-9
    amid = L0.a.eval(0.0)
    out["a_real"] = abs(L0.a.imag_part().max_coeff()) <= 1e-12 * max(L0.a.max_coeff(), 1.0)
    out["a_midpoint_positive"] = amid.real > 0
    # Re c1 = (1/2) C1' (skew-adjointness of the first-order part), constant free
    gap = L1.c.real_part() - 0.5 * L1.b.real_part().diff()
    const = gap.eval(0.0)
    out["skew_zero_order_real_part"] = (
        (gap - ExpPoly.constant(const)).max_coeff()
        <= 1e-9 * max(L1.c.max_coeff(), 1.0)
    )
    return out


def random_operator(rng: np.random.Generator, max_terms: int = 2) -> DiffOp:
    """Random small operator for battery tests (not normal in general)."""
    def rnd_exppoly():
        terms = []
        for _ in range(rng.integers(1, max_terms + 1)):
            lam = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            deg = int(rng.integers(1, 3))
            coeffs = rng.uniform(-1, 1, deg) + 1j * rng.uniform(-1, 1, deg)
            terms.append((lam, coeffs))
        return ExpPoly(terms)

    return DiffOp(rnd_exppoly() + ExpPoly.constant(2.0), rnd_exppoly(), rnd_exppoly())
