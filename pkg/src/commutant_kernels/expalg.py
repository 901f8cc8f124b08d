"""Exact algebra for exponential polynomials  sum_j p_j(y) * exp(l_j * y).

This class of functions is closed under addition, multiplication,
differentiation and argument shifts, which is everything the commutation
identities require.  Hyperbolic and trigonometric helpers expand into
exponentials at construction time; there is no rewriting in the other
direction.

Coefficients are stored in ascending degree.  Exponents are kept pairwise
distinct (merge tolerance ``EXP_MERGE_TOL``) and sorted lexicographically by
(re, im) so that equal functions built along different routes compare equal
structurally whenever the arithmetic was exact.
"""
from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeCapError

EXP_MERGE_TOL = 1e-12
DEGREE_CAP = 8

_ComplexLike = complex | float | int


def _as_complex(value: _ComplexLike) -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex component: {value!r}")
    return z


def _strip(poly: list[complex]) -> list[complex]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_add(p: Sequence[complex], q: Sequence[complex]) -> list[complex]:
    out = list(p) + [0j] * (len(q) - len(p)) if len(q) > len(p) else list(p)
    for i, c in enumerate(q):
        out[i] += c
    return out


def _poly_mul(p: Sequence[complex], q: Sequence[complex]) -> list[complex]:
    out = [0j] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


class ExpPoly:
    """A finite sum of (complex polynomial) x (complex exponential) terms."""

    __slots__ = ("terms", "scale_hint")

    def __init__(self, terms: Iterable = (), scale_hint: float | None = None):
        cleaned: list[tuple[complex, list[complex]]] = []
        for exponent, poly in terms:
            lam = _as_complex(exponent)
            coeffs = _strip([_as_complex(c) for c in poly])
            if coeffs:
                cleaned.append((lam, coeffs))
        cleaned.sort(key=lambda t: (t[0].real, t[0].imag))
        merged: list[tuple[complex, list[complex]]] = []
        for lam, coeffs in cleaned:
            if merged and abs(lam - merged[-1][0]) <= EXP_MERGE_TOL:
                merged[-1] = (merged[-1][0], _poly_add(merged[-1][1], coeffs))
            else:
                merged.append((lam, coeffs))
        final = []
        for lam, coeffs in merged:
            coeffs = _strip(coeffs)
            if not coeffs:
                continue
            if len(coeffs) - 1 > DEGREE_CAP:
                raise DegreeCapError(
                    f"polynomial degree {len(coeffs) - 1} exceeds cap {DEGREE_CAP}"
                )
            final.append((lam, tuple(coeffs)))
        object.__setattr__(self, "terms", tuple(final))
        object.__setattr__(self, "scale_hint", scale_hint)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("ExpPoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "ExpPoly":
        return cls()

    @classmethod
    def constant(cls, c: _ComplexLike) -> "ExpPoly":
        return cls([(0j, [c])])

    @classmethod
    def poly(cls, coeffs: Sequence[_ComplexLike]) -> "ExpPoly":
        return cls([(0j, list(coeffs))])

    @classmethod
    def variable(cls) -> "ExpPoly":
        return cls([(0j, [0, 1])])

    @classmethod
    def exp(cls, lam: _ComplexLike, coeffs: Sequence[_ComplexLike] = (1,)) -> "ExpPoly":
        return cls([(lam, list(coeffs))])

    @classmethod
    def cosh(cls, lam: _ComplexLike) -> "ExpPoly":
        lam = _as_complex(lam)
        return cls([(lam, [0.5]), (-lam, [0.5])])

    @classmethod
    def sinh(cls, lam: _ComplexLike) -> "ExpPoly":
        lam = _as_complex(lam)
        return cls([(lam, [0.5]), (-lam, [-0.5])])

    @classmethod
    def cos(cls, omega: _ComplexLike) -> "ExpPoly":
        return cls.cosh(1j * _as_complex(omega))

    @classmethod
    def sin(cls, omega: _ComplexLike) -> "ExpPoly":
        return -1j * cls.sinh(1j * _as_complex(omega))

    # -- metadata ------------------------------------------------------------

    def max_coeff(self) -> float:
        return max((abs(c) for _, p in self.terms for c in p), default=0.0)

    def _hint(self) -> float:
        own = self.max_coeff()
        return max(own, self.scale_hint) if self.scale_hint is not None else own

    def with_hint(self, hint: float | None) -> "ExpPoly":
        return ExpPoly(self.terms, hint)

    def is_zero(self, tol: float = 1e-12) -> bool:
        """True when every coefficient is below tol (scaled by the recorded
        magnitude of whichever inputs produced this value, when present)."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        thr = tol * self.scale_hint if self.scale_hint is not None else tol
        return all(abs(c) <= thr for _, p in self.terms for c in p)

    def degree(self) -> int:
        return max((len(p) - 1 for _, p in self.terms), default=-1)

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        if not isinstance(other, ExpPoly):
            return NotImplemented
        hint = max(self._hint(), other._hint())
        return ExpPoly(self.terms + other.terms, hint)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly([(l, [-c for c in p]) for l, p in self.terms], self.scale_hint)

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            hint = max(self._hint(), other._hint())
            prods = []
            for l1, p1 in self.terms:
                for l2, p2 in other.terms:
                    prods.append((l1 + l2, _poly_mul(p1, p2)))
            return ExpPoly(prods, hint)
        z = _as_complex(other)
        return ExpPoly([(l, [c * z for c in p]) for l, p in self.terms], self.scale_hint)

    __rmul__ = __mul__

    def diff(self, order: int = 1) -> "ExpPoly":
        """Termwise derivative (p' + lam*p) e^{lam y}, applied ``order`` times."""
        f = self
        for _ in range(order):
            terms = []
            for lam, p in f.terms:
                dp = [i * c for i, c in enumerate(p)][1:]
                terms.append((lam, _poly_add(dp, [lam * c for c in p])))
            f = ExpPoly(terms, f._hint())
        return f

    def conjugate(self) -> "ExpPoly":
        """Complex conjugate as a function of a real variable."""
        return ExpPoly(
            [(l.conjugate(), [c.conjugate() for c in p]) for l, p in self.terms],
            self.scale_hint,
        )

    def real_part(self) -> "ExpPoly":
        return 0.5 * (self + self.conjugate())

    def imag_part(self) -> "ExpPoly":
        return (-0.5j) * (self - self.conjugate())

    # -- evaluation ----------------------------------------------------------

    def eval(self, y: _ComplexLike) -> complex:
        y = complex(y)
        total = 0j
        for lam, p in self.terms:
            horner = 0j
            for c in reversed(p):
                horner = horner * y + c
            total += horner * cmath.exp(lam * y)
        return total

    def eval_many(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=complex)
        total = np.zeros_like(ys)
        for lam, p in self.terms:
            horner = np.zeros_like(ys)
            for c in reversed(p):
                horner = horner * ys + c
            total += horner * np.exp(lam * ys)
        return total

    def translate(self, shift: _ComplexLike) -> "ExpPoly":
        """Exact shifted function y -> f(y + shift)."""
        z = _as_complex(shift)
        terms = []
        for lam, p in self.terms:
            n = len(p)
            q = [0j] * n
            for k, c in enumerate(p):
                zpow = 1.0 + 0j
                for j in range(k, -1, -1):
                    q[j] += c * math.comb(k, j) * zpow
                    zpow *= z
            scale = cmath.exp(lam * z)
            terms.append((lam, [scale * c for c in q]))
        return ExpPoly(terms, self._hint())

    def scale_arg(self, factor: _ComplexLike) -> "ExpPoly":
        """Exact substitution y -> factor * y."""
        h = _as_complex(factor)
        terms = []
        for lam, p in self.terms:
            hpow = 1.0 + 0j
            q = []
            for c in p:
                q.append(c * hpow)
                hpow *= h
            terms.append((lam * h, q))
        return ExpPoly(terms, self._hint())

    def compose_affine(self, mid: _ComplexLike, half: _ComplexLike) -> "ExpPoly":
        """Exact substitution y -> mid + half * t, returned in the variable t."""
        return self.translate(mid).scale_arg(half)

    def taylor(self, order: int) -> np.ndarray:
        """Maclaurin coefficients c_0..c_order of the function."""
        out = np.zeros(order + 1, dtype=complex)
        inv_fact = [1.0 / math.factorial(m) for m in range(order + 1)]
        for lam, p in self.terms:
            lam_pow = [1.0 + 0j]
            for _ in range(order):
                lam_pow.append(lam_pow[-1] * lam)
            for i, c in enumerate(p):
                if c == 0:
                    continue
                for m in range(i, order + 1):
                    out[m] += c * lam_pow[m - i] * inv_fact[m - i]
        return out

    # -- comparison / serialization -------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, ExpPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def structurally_close(self, other: "ExpPoly", tol: float = 1e-12) -> bool:
        """Same term layout with coefficients equal to within tol (absolute,
        scaled by the larger coefficient magnitude of the two operands)."""
        diff = self - other
        scale = max(self.max_coeff(), other.max_coeff(), 1.0)
        return all(abs(c) <= tol * scale for _, p in diff.terms for c in p)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"exp": [l.real, l.imag], "poly": [[c.real, c.imag] for c in p]}
                for l, p in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpPoly":
        return cls(
            (complex(t["exp"][0], t["exp"][1]),
             [complex(c[0], c[1]) for c in t["poly"]])
            for t in data["terms"]
        )

    def __repr__(self) -> str:
        return f"ExpPoly({self.formula()!r})"

    def formula(self, var: str = "y") -> str:
        if not self.terms:
            return "0"
        chunks = []
        for lam, p in self.terms:
            mono = []
            for i, c in enumerate(p):
                if c == 0:
                    continue
                cs = f"{c.real:.6g}" if c.imag == 0 else f"({c.real:.6g}{c.imag:+.6g}j)"
                mono.append(cs if i == 0 else f"{cs}*{var}" + (f"^{i}" if i > 1 else ""))
            body = " + ".join(mono) if mono else "0"
            if lam != 0:
                ls = f"{lam.real:.6g}" if lam.imag == 0 else f"({lam.real:.6g}{lam.imag:+.6g}j)"
                chunks.append(f"({body})*exp({ls}*{var})")
            else:
                chunks.append(f"({body})")
        return " + ".join(chunks)


def drop_constant(f: ExpPoly) -> ExpPoly:
    """Remove the additive constant (the degree-0 coefficient of the
    zero-exponent term); used for comparisons modulo a free constant."""
    terms = []
    for lam, p in f.terms:
        if lam == 0:
            p = (0j,) + tuple(p[1:])
        terms.append((lam, p))
    return ExpPoly(terms, f.scale_hint)
