"""Three independent certifications of commutation.

* the pointwise residual identity in (y, z) that is equivalent to the
  operator commutation after integration by parts,
* the discretized operator commutator built from quadrature matrices,
* the vanishing boundary flux that justifies the principal-value reading
  for kernels with a simple pole.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .catalog import CommutingPair, DiffOp
from .errors import IllConditionedError, PoleHitError
from .expalg import ExpPoly
from .kernels import KernelSpec

POLE_EXCLUDE = 0.05
MAX_COLLOCATION = 200


# ---------------------------------------------------------------------------
# quadrature rules


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    a: complex
    b: complex
    t: np.ndarray
    w: np.ndarray

    @classmethod
    def gauss(cls, a: complex, b: complex, n: int) -> "QuadratureRule":
        t, w = leggauss(n)
        return cls(complex(a), complex(b), t, w)

    @classmethod
    def composite(cls, a: complex, b: complex, n: int, breaks=()) -> "QuadratureRule":
        """Panelled Gauss rule with panel boundaries at the given points of
        the segment (used to integrate across interior singularities of the
        integrand; not suitable for global polynomial differentiation)."""
        a, b = complex(a), complex(b)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        xis = sorted(
            ((complex(p) - mid) / half).real
            for p in breaks
            if abs(((complex(p) - mid) / half).imag) < 1e-9
            and -1 + 1e-9 < ((complex(p) - mid) / half).real < 1 - 1e-9
        )
        edges = [-1.0] + xis + [1.0]
        tg, wg = leggauss(n)
        ts, ws = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            pm, ph = 0.5 * (lo + hi), 0.5 * (hi - lo)
            ts.append(pm + tg * ph)
            ws.append(wg * ph)
        return cls(a, b, np.concatenate(ts), np.concatenate(ws))

    @property
    def mid(self) -> complex:
        return 0.5 * (self.a + self.b)

    @property
    def half(self) -> complex:
        return 0.5 * (self.b - self.a)

    @property
    def points(self) -> np.ndarray:
        return self.mid + self.t * self.half

    def norm(self, values: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.w * np.abs(values) ** 2) * abs(self.half)))

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.sum(self.w * f * np.conj(g)) * abs(self.half))


# ---------------------------------------------------------------------------
# pointwise commutation residuals


def _r1_terms(kernel: KernelSpec, op: DiffOp, y: complex, z: complex):
    k0, k1, k2 = kernel.jet(z, 2)
    x = y + z
    ap = op.a.diff()
    t1 = (op.a.eval(x) - op.a.eval(y)) * k2
    t2 = (2 * ap.eval(y) + op.b.eval(x) - op.b.eval(y)) * k1
    t3 = (op.c.eval(x) - op.c.eval(y) + op.b.diff().eval(y) - ap.diff().eval(y)) * k0
    return t1, t2, t3


def residue_R1(kernel: KernelSpec, op: DiffOp, y: complex, z: complex) -> complex:
    """Left-hand side of the pointwise commutation identity for one operator."""
    return sum(_r1_terms(kernel, op, y, z))


def _r2_terms(kernel: KernelSpec, op1: DiffOp, op2: DiffOp, y: complex, z: complex):
    k0, k1, k2 = kernel.jet(z, 2)
    x = y + z
    a1p = op1.a.diff()
    t1 = (op2.a.eval(x) - op1.a.eval(y)) * k2
    t2 = (2 * a1p.eval(y) + op2.b.eval(x) - op1.b.eval(y)) * k1
    t3 = (op2.c.eval(x) - op1.c.eval(y)
          + op1.b.diff().eval(y) - a1p.diff().eval(y)) * k0
    return t1, t2, t3


def residue_R2(kernel: KernelSpec, op1: DiffOp, op2: DiffOp,
               y: complex, z: complex) -> complex:
    """Intertwining variant of the identity; reduces to ``residue_R1`` when
    both operators carry the same coefficients."""
    return sum(_r2_terms(kernel, op1, op2, y, z))


@dataclass(frozen=True)
class ResidueGrid:
    max_abs: float
    max_relative: float
    rows: tuple  # (y, z, |F|) triples


def residue_grid(pair: CommutingPair, ny: int = 20, nz: int = 20,
                 exclude: float = POLE_EXCLUDE) -> ResidueGrid:
    """Max of the commutation residual over a tensor grid: y sweeps the input
    segment, the shift z sweeps the difference set against the output segment
    (the segment itself for single-segment pairs).  Points within ``exclude``
    of a genuine kernel pole are skipped."""
    src = pair.op
    tgt = pair.op_target if pair.op_target is not None else pair.op
    ys = src.midpoint + np.linspace(-1, 1, ny) * src.halfspan
    xs = tgt.midpoint + np.linspace(-1, 1, nz) * tgt.halfspan
    Z = xs[:, None] - ys[None, :]
    radius = float(np.abs(Z).max()) + 1.0
    poles = pair.kernel.true_poles_within(radius)
    valid = np.ones(Z.shape, dtype=bool)
    for p in poles:
        valid &= np.abs(Z - p) >= exclude

    k0 = np.zeros(Z.shape, dtype=complex)
    k1 = np.zeros(Z.shape, dtype=complex)
    k2 = np.zeros(Z.shape, dtype=complex)
    k0[valid], k1[valid], k2[valid] = pair.kernel.dvals_many(Z[valid], 2)
    a1, b1, c1 = src.a, src.b, src.c
    a2, b2, c2 = tgt.a, tgt.b, tgt.c
    a1p = a1.diff()
    aY, bY, cY = a1.eval_many(ys), b1.eval_many(ys), c1.eval_many(ys)
    apY = a1p.eval_many(ys)
    bpY = b1.diff().eval_many(ys)
    appY = a1p.diff().eval_many(ys)
    aX, bX, cX = a2.eval_many(xs), b2.eval_many(xs), c2.eval_many(xs)

    T1 = (aX[:, None] - aY[None, :]) * k2
    T2 = (2 * apY[None, :] + bX[:, None] - bY[None, :]) * k1
    T3 = (cX[:, None] - cY[None, :] + (bpY - appY)[None, :]) * k0
    F = np.where(valid, T1 + T2 + T3, 0)
    # pointwise relative residual with a soft floor so that grid corners where
    # the identity degenerates (all terms ~ roundoff) do not produce 0/0 noise
    scale_pt = np.abs(T1) + np.abs(T2) + np.abs(T3)
    floor = 1e-3 * max(scale_pt[valid].max(), 1e-300) if valid.any() else 1.0
    rel = np.where(valid, np.abs(F) / (scale_pt + floor), 0.0)
    max_abs = float(np.abs(F).max())
    rows = tuple(
        (ys[j], Z[i, j], abs(F[i, j]))
        for i in range(nz) for j in range(ny) if valid[i, j]
    )
    return ResidueGrid(max_abs, float(rel.max()), rows)


# ---------------------------------------------------------------------------
# dense discretizations


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray
    source: QuadratureRule
    target: QuadratureRule

    def __matmul__(self, u: np.ndarray) -> np.ndarray:
        return self.entries @ u


def _bary_weights(rule: QuadratureRule) -> np.ndarray:
    t, w = rule.t, rule.w
    lam = np.sqrt((1 - t ** 2) * w)
    lam[1::2] *= -1
    return lam


def diffmat(rule: QuadratureRule) -> np.ndarray:
    """Spectral differentiation matrix on the rule's mapped nodes."""
    t = rule.t
    lam = _bary_weights(rule)
    dt = t[:, None] - t[None, :] + np.eye(len(t))
    D = (lam[None, :] / lam[:, None]) / dt
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D / rule.half


def interpmat(rule: QuadratureRule, xi: np.ndarray) -> np.ndarray:
    """Barycentric interpolation from the rule's nodes to reference points xi."""
    t = rule.t
    lam = _bary_weights(rule)
    P = np.zeros((len(xi), len(t)), dtype=complex)
    for i, x in enumerate(np.asarray(xi, dtype=complex)):
        d = x - t
        hit = np.flatnonzero(np.abs(d) < 1e-14)
        if hit.size:
            P[i, hit[0]] = 1.0
            continue
        c = lam / d
        P[i, :] = c / c.sum()
    return P


def _pv_log(xi: complex) -> complex:
    """Integral of 1/(xi - t) over t in (-1, 1); principal value on the cut."""
    if abs(xi.imag) < 1e-13:
        x = xi.real
        if abs(abs(x) - 1.0) < 1e-12:
            raise PoleHitError("output point sits on a logarithmic singularity")
        if abs(x) < 1:
            return math.log((1 + x) / (1 - x))
    return cmath.log((xi + 1) / (xi - 1))


def discretize_K(kernel: KernelSpec, source: QuadratureRule,
                 target: QuadratureRule) -> DenseOperator:
    """Quadrature (Nystrom) matrix of the convolution operator.

    When a genuine kernel pole lands on (or next to) the integration path for
    some output point, the pole part is subtracted and integrated with the
    closed-form principal-value logarithm; the anchor for the subtraction is
    the projected output point when it falls inside the input segment and the
    nearest endpoint when it falls just outside (no extrapolation).
    """
    x = target.points
    y = source.points
    Z = x[:, None] - y[None, :]
    wh = source.w * source.half
    radius = float(np.abs(Z).max()) + 1.0
    poles = kernel.true_poles_within(radius)
    if not poles or min(np.abs(Z - p).min() for p in poles) > POLE_EXCLUDE:
        return DenseOperator(kernel.eval_many(Z) * wh[None, :], source, target)

    residues = {}
    for p in poles:
        residues[p] = kernel.local_series(p, 4, pole_center=True)[0]

    D = None
    A = np.empty(Z.shape, dtype=complex)
    for i in range(len(x)):
        zrow = Z[i]
        p = min(poles, key=lambda q: np.abs(zrow - q).min())
        if np.abs(zrow - p).min() > POLE_EXCLUDE:
            A[i, :] = kernel.eval_many(zrow) * wh
            continue
        # project the output point through the pole onto the input segment
        xi = (x[i] - p - source.mid) / source.half
        if abs(xi.imag) > 1e-12:
            A[i, :] = kernel.eval_many(zrow) * wh  # pole off the path
            continue
        if abs(abs(xi.real) - 1.0) < 1e-12:
            raise PoleHitError("output point sits on a logarithmic singularity")
        anchor = xi if abs(xi.real) < 1 else complex(np.sign(xi.real))
        r = residues[p]
        A[i, :] = _smooth_values(kernel, zrow, p, r) * wh
        row = np.zeros(len(y), dtype=complex)
        coll = np.abs(zrow - p) < 1e-12
        row[~coll] = wh[~coll] / (zrow[~coll] - p)
        A[i, :] += r * row
        P = interpmat(source, np.array([anchor]))[0]
        A[i, :] += r * (_pv_log(xi) - row.sum()) * P
        if coll.any():
            # the subtracted integrand tends to -u' at the coincident node;
            # differentiate on the input nodes
            j = int(np.flatnonzero(coll)[0])
            if D is None:
                D = diffmat(source)
            A[i, :] -= r * wh[j] * D[j, :]
    return DenseOperator(A, source, target)


def _smooth_values(kernel: KernelSpec, Z: np.ndarray, p: complex,
                   r: complex) -> np.ndarray:
    """Values of kernel(z) - r/(z - p), series-safe near the pole."""
    flat = Z.ravel()
    out = np.empty(flat.shape, dtype=complex)
    near = np.abs(flat - p) < 1e-3
    if (~near).any():
        out[~near] = kernel.eval_many(flat[~near]) - r / (flat[~near] - p)
    if near.any():
        _, coeffs = kernel.local_series(p, 10, pole_center=True)
        for idx in np.nonzero(near)[0]:
            s = flat[idx] - p
            out[idx] = complex(np.polynomial.polynomial.polyval(s, coeffs))
    return out.reshape(Z.shape)


def discretize_L(op: DiffOp, rule: QuadratureRule,
                 basis_size: int | None = None) -> DenseOperator:
    """Collocation matrix of the operator on the rule's nodes via polynomial
    spectral differentiation."""
    if basis_size is not None and basis_size < 4:
        raise ValueError("basis_size must be at least 4")
    if len(rule.t) > MAX_COLLOCATION:
        raise IllConditionedError(
            f"differentiation matrices unreliable beyond {MAX_COLLOCATION} nodes"
        )
    pts = rule.points
    D = diffmat(rule)
    D2 = D @ D
    A = (op.a.eval_many(pts)[:, None] * D2
         + op.b.eval_many(pts)[:, None] * D
         + np.diag(op.c.eval_many(pts)))
    return DenseOperator(A, rule, rule)


DEFAULT_TEST_BATTERY = (
    lambda t: np.ones_like(t),
    lambda t: t,
    lambda t: t ** 2,
    lambda t: np.exp(t),
    lambda t: np.exp(-4 * t ** 2),
)


def commutator_norm(pair: CommutingPair, n: int, test_fns=None) -> float:
    """max over test functions of ||K L u - L_out K u|| / ||u|| at resolution n.

    Test functions are callables of the reference variable on (-1, 1).
    """
    src_op = pair.op
    tgt_op = pair.op_target if pair.op_target is not None else pair.op
    source = QuadratureRule.gauss(*src_op.segment, n)
    target = QuadratureRule.gauss(*tgt_op.segment, n)
    K = discretize_K(pair.kernel, source, target)
    Ls = discretize_L(src_op, source)
    Lt = discretize_L(tgt_op, target)
    fns = DEFAULT_TEST_BATTERY if test_fns is None else test_fns
    worst = 0.0
    for fn in fns:
        u = np.asarray(fn(source.t), dtype=complex)
        v = K.entries @ (Ls.entries @ u) - Lt.entries @ (K.entries @ u)
        worst = max(worst, target.norm(v) / max(source.norm(u), 1e-300))
    return worst


# ---------------------------------------------------------------------------
# boundary flux for singular kernels


def phi_boundary_term(kernel: KernelSpec, op: DiffOp, u: ExpPoly,
                      x: float, eps: float) -> complex:
    """Boundary flux of the principal-value integration by parts at radius
    eps around the output point x; tends to 0 as eps -> 0 for commuting
    pairs with a simple-pole kernel."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= min(abs(x - e) for e in op.segment):
        raise ValueError("eps must stay below the distance to the endpoints")
    kp0, kp1 = kernel.jet(eps, 1)
    km0, km1 = kernel.jet(-eps, 1)
    a, b = op.a, op.b
    ap = a.diff()
    up = u.diff()
    xm, xp = x - eps, x + eps
    da_m = a.eval(xm) - a.eval(x)
    da_p = a.eval(xp) - a.eval(x)
    phi = kp0 * (da_m * up.eval(xm) + (b.eval(xm) - b.eval(x) - ap.eval(xm)) * u.eval(xm))
    phi -= km0 * (da_p * up.eval(xp) + (b.eval(xp) - b.eval(x) - ap.eval(xp)) * u.eval(xp))
    phi += kp1 * u.eval(xm) * da_m
    phi -= km1 * u.eval(xp) * da_p
    return phi


def phi_slope(kernel: KernelSpec, op: DiffOp, u: ExpPoly, x: float,
              eps_values=(1e-2, 1e-3, 1e-4)) -> float:
    """Log-log slope of |phi| against eps (cancellation order of the flux)."""
    eps = np.asarray(eps_values, dtype=float)
    vals = np.array(
        [abs(phi_boundary_term(kernel, op, u, x, e)) for e in eps]
    )
    vals = np.maximum(vals, 1e-300)
    slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
    return float(slope)
