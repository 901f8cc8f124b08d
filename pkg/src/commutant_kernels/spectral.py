"""Eigen and singular-value pipelines for the cataloged pairs.

The differential operator is discretized by Galerkin projection onto
orthonormal Legendre polynomials of the segment; boundedness at the
degenerate endpoints (where the leading coefficient vanishes) is the
implicit boundary condition, so no constraints are imposed.  A dense
quadrature (Nystrom) eigendecomposition acts as the brute-force oracle
for everything the commutation transfers to the integral operator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.polynomial import legendre as npleg

from .catalog import CommutingPair, DiffOp, classify_regularity
from .errors import IllConditionedError, NoConvergenceError, RankCollapseError
from .verifier import DenseOperator, QuadratureRule, discretize_K, discretize_L

MAX_BASIS = 200
MAX_DENSE = 512
SIGMA_FLOOR = 1e-13


def legendre_basis(t: np.ndarray, size: int, derivatives: int = 0):
    """Values (and optionally derivatives) of the first ``size`` orthonormal
    Legendre polynomials at reference points t."""
    t = np.asarray(t, dtype=float)
    norm = np.sqrt((2 * np.arange(size) + 1) / 2.0)
    tables = []
    V = npleg.legvander(t, size - 1) * norm[None, :]
    tables.append(V)
    for d in range(1, derivatives + 1):
        Vd = np.zeros_like(V)
        for j in range(size):
            coeff = np.zeros(j + 1)
            coeff[j] = norm[j]
            Vd[:, j] = npleg.legval(t, npleg.legder(coeff, d)) if j >= d else 0.0
        tables.append(Vd)
    return tables if derivatives else tables[0]


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigvecs: np.ndarray  # (basis_size, n_modes) coefficients, Legendre basis
    residuals: np.ndarray
    basis_size: int
    segment: tuple
    selfadjoint: bool


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(vec)))
    ph = vec[i] / abs(vec[i]) if vec[i] != 0 else 1.0
    return vec / ph


def solve_L_eigen(op: DiffOp, basis_size: int = 96) -> Spectrum:
    """Galerkin eigendecomposition of the operator on its segment."""
    if basis_size > MAX_BASIS:
        raise IllConditionedError(f"basis_size capped at {MAX_BASIS}")
    ref = op.reparametrized()
    nq = basis_size + 32
    tq, wq = npleg.leggauss(nq)
    V, V1, V2 = legendre_basis(tq, basis_size, derivatives=2)
    av = ref.a.eval_many(tq)
    bv = ref.b.eval_many(tq)
    cv = ref.c.eval_many(tq)
    L_of_basis = av[:, None] * V2 + bv[:, None] * V1 + cv[:, None] * V
    W = wq[:, None]
    A = V.T @ (W * L_of_basis)
    B = V.T @ (W * V)
    herm = np.linalg.norm(A - A.conj().T) <= 1e-10 * max(np.linalg.norm(A), 1e-300)
    try:
        vals, vecs = scipy.linalg.eig(A, B)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergenceError(str(exc)) from exc
    order = np.argsort(vals.real if herm else np.abs(vals))
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        nrm = np.sqrt(abs(np.vdot(v, B @ v)))
        vecs[:, j] = _phase_fix(v / nrm)

    # independent residual check through the collocation discretization
    ncol = min(basis_size + 33, 200)
    rule = QuadratureRule.gauss(-1.0, 1.0, ncol)
    Lcol = discretize_L(ref, rule)
    Vc = legendre_basis(rule.t, basis_size)
    vals_at_nodes = Vc @ vecs
    res = np.empty(len(vals))
    for j in range(len(vals)):
        v = vals_at_nodes[:, j]
        res[j] = rule.norm(Lcol.entries @ v - vals[j] * v) / max(rule.norm(v), 1e-300)
    return Spectrum(vals, vecs, res, basis_size, op.segment, herm)


def k_spectrum_from_L(pair: CommutingPair, spectrum: Spectrum, n: int = 128,
                      modes: int = 5):
    """Transfer eigenfunctions of the differential operator to the integral
    operator: Rayleigh values kappa and proportionality residuals."""
    if pair.is_two_segment:
        raise ValueError("spectrum transfer applies to single-segment pairs")
    rule = QuadratureRule.gauss(*pair.op.segment, n)
    K = discretize_K(pair.kernel, rule, rule)
    V = legendre_basis(rule.t, spectrum.basis_size)
    kappas, residuals = [], []
    for j in range(min(modes, spectrum.eigvecs.shape[1])):
        phi = V @ spectrum.eigvecs[:, j]
        Kphi = K.entries @ phi
        kappa = rule.inner(Kphi, phi) / rule.inner(phi, phi)
        kappas.append(kappa)
        residuals.append(rule.norm(Kphi - kappa * phi) / rule.norm(phi))
    return kappas, residuals


@dataclass(frozen=True, eq=False)
class SvdResult:
    sigmas: np.ndarray
    left_coeffs: np.ndarray   # output-side functions, Legendre basis of target
    right_coeffs: np.ndarray  # input-side functions, Legendre basis of source
    cross_residuals: np.ndarray
    normal_eq_residuals: np.ndarray
    eigenvalues: np.ndarray   # shared differential eigenvalues, sigma order
    gram_residual: float
    regular: bool
    warning: str = ""


def svd_pipeline(pair: CommutingPair, basis_size: int = 96, n: int = 128,
                 modes: int = 5) -> SvdResult:
    """Singular triples of the two-segment operator via the shared
    differential eigenbasis, cross-checked against the output-side operator
    and the normal equations."""
    if not pair.is_two_segment:
        raise ValueError("the SVD pipeline needs a two-segment pair")
    reg = classify_regularity(pair)
    warning = "" if reg.regular else (
        "singular configuration: output endpoints meet logarithmic "
        "singularities; discreteness is not guaranteed"
    )
    spec = solve_L_eigen(pair.op, basis_size)
    consider = min(modes + 10, spec.eigvecs.shape[1])
    source = QuadratureRule.gauss(*pair.op.segment, n)
    # the transformed output can carry logarithmic points strictly inside the
    # output segment (pole +- source endpoint); panel the norm quadrature there
    target = QuadratureRule.composite(*pair.op_target.segment, n, reg.log_points)
    K = discretize_K(pair.kernel, source, target)
    Vs = legendre_basis(source.t, basis_size)
    Vt = legendre_basis(target.t, basis_size)

    U = Vs @ spec.eigvecs[:, :consider]
    for j in range(consider):
        U[:, j] /= source.norm(U[:, j])
    KU = K.entries @ U
    sig = np.array([target.norm(KU[:, j]) for j in range(consider)])
    order = np.argsort(-sig)[:modes]
    sig_sel = sig[order]
    if np.any(sig_sel < SIGMA_FLOOR):
        raise RankCollapseError(
            f"requested {modes} modes but sigma falls below {SIGMA_FLOOR}"
        )
    Usel = U[:, order]
    Vsel = KU[:, order] / sig_sel[None, :]
    chis = spec.eigenvalues[order]

    rule_t = QuadratureRule.gauss(-1.0, 1.0, min(n, 200))
    Lt = discretize_L(pair.op_target.reparametrized(), rule_t)
    Vt_col = legendre_basis(rule_t.t, basis_size)
    cross = np.empty(len(order))
    left_coeffs = np.empty((basis_size, len(order)), dtype=complex)
    right_coeffs = spec.eigvecs[:, order].copy()
    for j in range(len(order)):
        coeffs = Vt.T @ (target.w[:, None] * Vsel)[:, j]
        left_coeffs[:, j] = coeffs
        vcol = Vt_col @ coeffs
        cross[j] = rule_t.norm(Lt.entries @ vcol - chis[j] * vcol) / max(
            rule_t.norm(vcol), 1e-300
        )

    # normal equations K*K u = sigma^2 u in the quadrature-weighted metric
    Ds = np.sqrt(source.w * abs(source.half))
    Dt = np.sqrt(target.w * abs(target.half))
    M = Dt[:, None] * K.entries * (1.0 / Ds)[None, :]
    normal_eq = np.empty(len(order))
    for j in range(len(order)):
        ut = Ds * Usel[:, j]
        resid = M.conj().T @ (M @ ut) - sig_sel[j] ** 2 * ut
        normal_eq[j] = np.linalg.norm(resid) / max(sig_sel[j] ** 2, 1e-300)

    G = np.array(
        [[source.inner(Usel[:, i], Usel[:, j]) for j in range(len(order))]
         for i in range(len(order))]
    )
    gram = float(np.abs(G - np.eye(len(order))).max())
    return SvdResult(sig_sel, left_coeffs, right_coeffs, cross, normal_eq,
                     chis, gram, reg.regular, warning)


@dataclass(frozen=True, eq=False)
class OracleResult:
    kind: str
    values: np.ndarray
    vectors: np.ndarray | None = None


def dense_oracle(K: DenseOperator, kind: str = "auto") -> OracleResult:
    """Brute-force eigen/SVD of the quadrature-weighted matrix
    W_out^{1/2} K W_in^{1/2} (similarity that makes discrete values
    approximate the continuous operator's)."""
    n_t, n_s = K.entries.shape
    if max(n_t, n_s) > MAX_DENSE:
        raise IllConditionedError(f"dense oracle capped at {MAX_DENSE}")
    Ds = np.sqrt(K.source.w * abs(K.source.half))
    Dt = np.sqrt(K.target.w * abs(K.target.half))
    M = Dt[:, None] * K.entries * (1.0 / Ds)[None, :]
    try:
        if kind == "svd" or (kind == "auto" and n_t != n_s):
            vals = np.linalg.svd(M, compute_uv=False)
            return OracleResult("svd", vals)
        herm = np.linalg.norm(M - M.conj().T) <= 1e-12 * max(np.linalg.norm(M), 1e-300)
        if herm:
            vals = np.linalg.eigvalsh(M)[::-1]
        else:
            vals = np.linalg.eigvals(M)
            vals = vals[np.argsort(-np.abs(vals))]
        return OracleResult("eig", vals)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergenceError(str(exc)) from exc
