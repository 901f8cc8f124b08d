"""Difference kernels of the form  k(z) = e^{tau z} * numerator(z) / denominator(z).

The admissible denominators are 1, z and sinh(lam*z/2); every pole of such a
kernel is simple.  Evaluation is series-based near denominator zeros so that
removable singularities and Laurent data come out of one code path.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
import numpy as np

from .errors import PoleHitError
from .expalg import ExpPoly

SERIES_RADIUS = 1e-3
POLE_TOL = 1e-12
REMOVABLE_REL = 1e-9

DENOM_ONE = "one"
DENOM_Z = "z"
DENOM_SINH_HALF = "sinh_half"


@dataclass(frozen=True)
class Denominator:
    kind: str
    lam: complex = 0j

    def __post_init__(self):
        if self.kind not in (DENOM_ONE, DENOM_Z, DENOM_SINH_HALF):
            raise ValueError(f"unknown denominator kind {self.kind!r}")
        if self.kind == DENOM_SINH_HALF and abs(self.lam) == 0:
            raise ValueError("sinh_half denominator requires lam != 0")

    @classmethod
    def one(cls) -> "Denominator":
        return cls(DENOM_ONE)

    @classmethod
    def z(cls) -> "Denominator":
        return cls(DENOM_Z)

    @classmethod
    def sinh_half(cls, lam: complex) -> "Denominator":
        return cls(DENOM_SINH_HALF, complex(lam))

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if self.kind == DENOM_ONE:
            return np.ones_like(zs)
        if self.kind == DENOM_Z:
            return zs
        return np.sinh(0.5 * self.lam * zs)

    def deriv_eval_many(self, zs: np.ndarray, order: int) -> np.ndarray:
        zs = np.asarray(zs, dtype=complex)
        if self.kind == DENOM_ONE:
            return np.ones_like(zs) if order == 0 else np.zeros_like(zs)
        if self.kind == DENOM_Z:
            if order == 0:
                return zs
            return np.ones_like(zs) if order == 1 else np.zeros_like(zs)
        h = 0.5 * self.lam
        base = np.sinh(h * zs) if order % 2 == 0 else np.cosh(h * zs)
        return (h ** order) * base

    def taylor(self, center: complex, order: int, exact_zero: bool = False) -> np.ndarray:
        """Series coefficients of the denominator around ``center``.  With
        ``exact_zero`` the constant term is pinned to 0 (center is a zero)."""
        out = np.zeros(order + 1, dtype=complex)
        if self.kind == DENOM_ONE:
            out[0] = 1
            return out
        if self.kind == DENOM_Z:
            out[0] = 0 if exact_zero else center
            if order >= 1:
                out[1] = 1
            return out
        h = 0.5 * self.lam
        s0, c0 = cmath.sinh(h * center), cmath.cosh(h * center)
        if exact_zero:
            s0 = 0j
            c0 = 1.0 if abs(c0 - 1) < abs(c0 + 1) else -1.0  # cosh(i pi n) = (-1)^n
        for m in range(order + 1):
            base = s0 if m % 2 == 0 else c0
            out[m] = base * h ** m / math.factorial(m)
        return out

    def zero_step(self) -> complex | None:
        """Lattice generator of the denominator's zero set, when periodic."""
        if self.kind == DENOM_SINH_HALF:
            return 2j * cmath.pi / self.lam
        return None

    def nearest_zero(self, z: complex) -> complex | None:
        if self.kind == DENOM_ONE:
            return None
        if self.kind == DENOM_Z:
            return 0j
        step = self.zero_step()
        n = round((z * step.conjugate()).real / abs(step) ** 2)
        candidates = [m * step for m in (n - 1, n, n + 1)]
        return min(candidates, key=lambda w: abs(z - w))

    def zeros_within(self, radius: float) -> list[complex]:
        if self.kind == DENOM_ONE:
            return []
        if self.kind == DENOM_Z:
            return [0j]
        step = self.zero_step()
        nmax = int(radius / abs(step)) + 1
        return [n * step for n in range(-nmax, nmax + 1)]


def _series_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Power-series quotient, den[0] != 0, truncated to len(num)."""
    n = len(num)
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        acc = num[m]
        for j in range(1, m + 1):
            if j < len(den):
                acc -= den[j] * out[m - j]
        out[m] = acc / den[0]
    return out


@dataclass(frozen=True)
class LaurentSeries:
    """Expansion of a kernel at 0 in both coefficient conventions.

    ``factorial`` holds k_n = n! * c_n for the analytic part sum c_n z^n;
    ``plain`` holds the coefficients of z*k(z), whose leading entry is the
    residue at 0.
    """

    pole_coeff: complex
    factorial: tuple
    plain: tuple

    @property
    def active_convention(self) -> str:
        scale = max([abs(self.pole_coeff)] + [abs(c) for c in self.factorial], default=0.0)
        return "plain" if abs(self.pole_coeff) > 1e-12 * max(scale, 1e-300) else "factorial"


@dataclass(frozen=True)
class KernelSpec:
    numerator: ExpPoly
    denom: Denominator
    tau: complex = 0j

    # -- series machinery ----------------------------------------------------

    def _num_taylor(self, center: complex, order: int) -> np.ndarray:
        """Series of e^{tau z} * numerator(z) around ``center``."""
        base = self.numerator.translate(center).taylor(order)
        if self.tau == 0:
            return base
        gauge = np.array(
            [self.tau ** m / math.factorial(m) for m in range(order + 1)], dtype=complex
        )
        out = np.convolve(base, gauge)[: order + 1]
        return out * cmath.exp(self.tau * center)

    def local_series(self, center: complex, order: int, pole_center: bool = False):
        """(pole_coeff, analytic coefficients) of k around ``center``.

        With ``pole_center`` the denominator is treated as having an exact
        simple zero at ``center``; the returned coefficients then describe
        k(center+s) = pole_coeff/s + sum coeffs[m] s^m.
        """
        nterms = max(8, order + 6)
        num = self._num_taylor(center, nterms)
        den = self.denom.taylor(center, nterms, exact_zero=pole_center)
        if pole_center:
            quot = _series_div(num, den[1:])
            return quot[0], quot[1:]
        return 0j, _series_div(num, den)

    def jet(self, z: complex, order: int = 2) -> tuple:
        """(k(z), k'(z), ..., k^{(order)}(z)) with series-safe handling of
        removable singularities; raises PoleHitError at a genuine pole."""
        z = complex(z)
        zero = self.denom.nearest_zero(z)
        if zero is not None and abs(z - zero) < SERIES_RADIUS:
            pole, coeffs = self.local_series(zero, order + 8, pole_center=True)
            s = z - zero
            scale = max(np.abs(coeffs).max(), abs(pole), 1e-300)
            removable = abs(pole) <= REMOVABLE_REL * scale
            if abs(s) < POLE_TOL:
                if not removable:
                    raise PoleHitError(f"kernel has a pole at z={zero}")
                return tuple(
                    math.factorial(j) * coeffs[j] for j in range(order + 1)
                )
            out = []
            for j in range(order + 1):
                acc = sum(
                    math.perm(m, j) * coeffs[m] * s ** (m - j)
                    for m in range(j, len(coeffs))
                )
                acc += pole * (-1) ** j * math.factorial(j) * s ** (-(j + 1))
                out.append(acc)
            return tuple(out)
        _, coeffs = self.local_series(z, order, pole_center=False)
        return tuple(math.factorial(j) * coeffs[j] for j in range(order + 1))

    def eval(self, z: complex) -> complex:
        return self.jet(z, 0)[0]

    def dvals_many(self, zs: np.ndarray, order: int = 2) -> list[np.ndarray]:
        """Vectorized [k, k', ..., k^{(order)}] over an array of points.

        Points within ``SERIES_RADIUS`` of a denominator zero fall back to the
        pointwise series jet.
        """
        if order > 2:
            raise ValueError("vectorized path supports order <= 2")
        zs = np.asarray(zs, dtype=complex)
        flat = zs.ravel()
        near = np.zeros(flat.shape, dtype=bool)
        if self.denom.kind != DENOM_ONE:
            for i, z in enumerate(flat):
                zero = self.denom.nearest_zero(z)
                near[i] = abs(z - zero) < SERIES_RADIUS
        outs = [np.zeros(flat.shape, dtype=complex) for _ in range(order + 1)]
        far = ~near
        if far.any():
            zf = flat[far]
            gauge = np.exp(self.tau * zf)
            nvals = [self.numerator.eval_many(zf)]
            dn = self.numerator
            for _ in range(order):
                dn = dn.diff()
                nvals.append(dn.eval_many(zf))
            dvals = [self.denom.deriv_eval_many(zf, j) for j in range(order + 1)]
            N, D = nvals[0], dvals[0]
            outs[0][far] = gauge * N / D
            if order >= 1:
                N1, D1 = nvals[1], dvals[1]
                outs[1][far] = gauge * ((self.tau * N + N1) / D - N * D1 / D ** 2)
            if order >= 2:
                N1, D1 = nvals[1], dvals[1]
                N2, D2 = nvals[2], dvals[2]
                outs[2][far] = gauge * (
                    (self.tau ** 2 * N + 2 * self.tau * N1 + N2) / D
                    - (2 * (self.tau * N + N1) * D1 + N * D2) / D ** 2
                    + 2 * N * D1 ** 2 / D ** 3
                )
        for i in np.nonzero(near)[0]:
            vals = self.jet(flat[i], order)
            for j in range(order + 1):
                outs[j][i] = vals[j]
        return [o.reshape(zs.shape) for o in outs]

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        return self.dvals_many(zs, 0)[0]

    # -- Laurent data at the origin -------------------------------------------

    def laurent(self, order: int = 5) -> LaurentSeries:
        if order > 8:
            raise ValueError("laurent order capped at 8")
        pole_center = self.denom.kind != DENOM_ONE
        pole, coeffs = self.local_series(0j, order + 2, pole_center=pole_center)
        scale = max(np.abs(coeffs).max(), abs(pole), 1e-300)
        if abs(pole) <= REMOVABLE_REL * scale:
            pole = 0j
        factorial = tuple(math.factorial(m) * coeffs[m] for m in range(order + 1))
        plain = (pole,) + tuple(coeffs[: order])
        return LaurentSeries(pole, factorial, plain)

    def pole_residue(self) -> complex:
        return self.laurent(2).pole_coeff

    def pole_order_at_zero(self) -> int:
        return 0 if self.pole_residue() == 0 else 1

    def true_poles_within(self, radius: float) -> list[complex]:
        """Denominator zeros in |z| <= radius where the numerator does not
        vanish, i.e. the genuine simple poles of the kernel."""
        poles = []
        for z0 in self.denom.zeros_within(radius):
            pole, coeffs = self.local_series(z0, 4, pole_center=True)
            scale = max(np.abs(coeffs).max(), abs(pole), 1e-300)
            if abs(pole) > REMOVABLE_REL * scale:
                poles.append(z0)
        return poles

    def is_trivial(self) -> bool:
        """True when the kernel reduces to a finite combination of
        exponentials times polynomials (a finite-rank convolution operator)."""
        if self.denom.kind == DENOM_ONE:
            return True
        if self.denom.kind == DENOM_Z:
            scale = max(self.numerator.max_coeff(), 1e-300)
            return all(abs(p[0]) <= 1e-12 * scale for _, p in self.numerator.terms)
        step = self.denom.zero_step()
        scale = max(self.numerator.max_coeff(), 1e-300)
        for n in range(-6, 7):
            if abs(self.numerator.eval(n * step)) > 1e-9 * scale:
                return False
        return True

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "numerator": self.numerator.to_dict(),
            "denominator": {"kind": self.denom.kind},
            "tau": [self.tau.real, self.tau.imag],
        }
        if self.denom.kind == DENOM_SINH_HALF:
            d["denominator"]["lambda"] = [self.denom.lam.real, self.denom.lam.imag]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        dk = data["denominator"]
        if dk["kind"] == DENOM_SINH_HALF:
            den = Denominator.sinh_half(complex(dk["lambda"][0], dk["lambda"][1]))
        elif dk["kind"] == DENOM_Z:
            den = Denominator.z()
        else:
            den = Denominator.one()
        tau = complex(data["tau"][0], data["tau"][1])
        return cls(ExpPoly.from_dict(data["numerator"]), den, tau)

    def formula(self) -> str:
        num = self.numerator.formula("z")
        if self.denom.kind == DENOM_ONE:
            body = num
        elif self.denom.kind == DENOM_Z:
            body = f"[{num}] / z"
        else:
            l = self.denom.lam
            ls = f"{l.real:.6g}" if l.imag == 0 else f"({l.real:.6g}{l.imag:+.6g}j)"
            body = f"[{num}] / sinh({ls}*z/2)"
        if self.tau != 0:
            body = f"exp(({self.tau.real:.6g}{self.tau.imag:+.6g}j)*z) * {body}"
        return body
