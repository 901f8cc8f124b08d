import math

import numpy as np
import pytest

from commutant_kernels.catalog import (
    C2Item3Case, DiffOp, MainCase, Special2Case, build_pair,
)
from commutant_kernels.classifier import (
    TaylorData, classify, classify_regular, classify_singular, fit_kernel_ode,
    gauge_normalize, verify_candidate,
)
from commutant_kernels.errors import (
    ConventionMismatchError, PoleHitError, ZeroLeadingError,
)
from commutant_kernels.expalg import ExpPoly
from commutant_kernels.kernels import Denominator, KernelSpec

PI = math.pi


def analytic_main_kernel(lam, mu):
    """sinh(mu z) / (mu sinh(lam z / 2)) and its limits, built directly so
    that resonant parameter pairs (which the catalog rejects as finite-rank)
    can still be fed to the classifier."""
    lam, mu = complex(lam), complex(mu)
    num = ExpPoly.sinh(mu) * (1 / mu) if abs(mu) > 0 else ExpPoly.poly([0, 1])
    if abs(lam) > 0:
        return KernelSpec(lam * num, Denominator.sinh_half(lam))
    return KernelSpec(2 * num, Denominator.z())


class TestGaugeNormalize:
    def test_already_normalized(self):
        data = TaylorData(0, (1.0, 0.0, 0.3, 0.0, 0.1, 0.0), "factorial")
        out, tau = gauge_normalize(data)
        assert tau == 0
        assert out.coeffs == data.coeffs

    def test_exponential_times_pole(self):
        k = KernelSpec(ExpPoly.constant(1), Denominator.z(), tau=1.0)
        data = TaylorData.from_kernel(k, convention="plain")
        out, tau = gauge_normalize(data)
        assert abs(tau + 1.0) < 1e-12
        np.testing.assert_allclose(
            out.coeffs, [1, 0, 0, 0, 0, 0], atol=1e-12
        )

    def test_round_trip_gauge(self):
        pair = build_pair(MainCase(2.0, 1.3, 1.0, 0.0), tau=0.7, check=False)
        data = TaylorData.from_kernel(pair.kernel, convention="factorial")
        _, tau = gauge_normalize(data)
        assert abs(tau + 0.7) < 1e-10

    def test_zero_leading(self):
        with pytest.raises(ZeroLeadingError):
            gauge_normalize(TaylorData(0, (0, 1.0, 0, 0, 0), "factorial"))


class TestClassifyRegular:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 1j, 1 + 1j])
    @pytest.mark.parametrize("mu", [0.3, 0.8, 1.7, 0.6j, 1.1 + 0.4j])
    def test_round_trip_grid(self, lam, mu):
        kernel = analytic_main_kernel(lam, mu)
        data, tau = gauge_normalize(
            TaylorData.from_kernel(kernel, convention="factorial")
        )
        result = classify_regular(data)
        assert result.verdict == "regular_commuting"
        lam_c, mu_c = complex(lam), complex(mu)
        assert abs(result.params["lambda_sq"] - lam_c ** 2) <= 1e-8 * max(
            abs(lam_c) ** 2, 1.0)
        assert abs(result.params["mu_sq"] - mu_c ** 2) <= 1e-8 * max(
            abs(mu_c) ** 2, 1.0)
        assert abs(result.params["nu"] - (lam_c ** 2 / 4 - mu_c ** 2)) <= 1e-8

    def test_spec_grid_with_resonances(self):
        # the literal 5x5 grid contains ratios mu = m lam / 2; the kernel is
        # then a pure exponential combination.  mu = lam/2 collapses to a
        # constant (verdict: trivial); other resonances still classify.
        values = [0.5, 1.0, 2.0, 1j, 1 + 1j]
        for lam in values:
            for mu in values:
                kernel = analytic_main_kernel(lam, mu)
                data, _ = gauge_normalize(
                    TaylorData.from_kernel(kernel, convention="factorial")
                )
                result = classify_regular(data)
                if abs(complex(mu) - complex(lam) / 2) < 1e-12:
                    assert result.verdict == "trivial"
                else:
                    assert result.verdict == "regular_commuting"
                    assert abs(result.params["mu_sq"] - complex(mu) ** 2) <= 1e-8

    def test_constant_kernel_trivial(self):
        data = TaylorData(0, (1.0, 0, 0, 0, 0, 0), "factorial")
        assert classify_regular(data).verdict == "trivial"

    def test_k3_rejection(self):
        data = TaylorData(0, (1.0, 0, 0.5, 0.1, 0.2, 0), "factorial")
        assert classify_regular(data).verdict == "no_commutant"

    def test_k2_zero_with_higher_terms(self):
        data = TaylorData(0, (1.0, 0, 0, 0, 0.3, 0), "factorial")
        assert classify_regular(data).verdict == "no_commutant"

    def test_convention_guard(self):
        data = TaylorData(1.0, (1.0, 0, 0, 0, 0), "plain")
        with pytest.raises(ConventionMismatchError):
            classify_regular(data)

    def test_gauge_equivariance(self):
        base = analytic_main_kernel(1.2, 0.7)
        want = None
        for tau in (0.0, 0.5, -1.0, 0.8j):
            k = KernelSpec(base.numerator, base.denom, tau)
            result = classify(TaylorData.from_kernel(k, convention="factorial"))
            got = (result.verdict, result.params["lambda_sq"],
                   result.params["mu_sq"], result.params["nu"])
            if want is None:
                want = got
            else:
                assert got[0] == want[0]
                for a, b in zip(got[1:], want[1:]):
                    assert abs(a - b) < 1e-9
            assert abs(result.gauge_applied + tau) < 1e-10


class TestClassifySingular:
    def test_inv_sinh_case_a(self):
        k = KernelSpec(ExpPoly.constant(1), Denominator.sinh_half(2.0))
        data, _ = gauge_normalize(TaylorData.from_kernel(k, convention="plain"))
        result = classify_singular(data)
        assert result.verdict == "singular_candidate"
        assert result.params["case_ab"] == "A"
        assert abs(result.params["alpha1"]) < 1e-12

    def test_inv_z_degenerate_case_a(self):
        k = KernelSpec(ExpPoly.constant(1), Denominator.z())
        data, _ = gauge_normalize(TaylorData.from_kernel(k, convention="plain"))
        result = classify_singular(data)
        assert result.params["case_ab"] == "A"
        assert abs(result.params["constraints"]["k2"]) < 1e-12

    def test_case_b_from_nonzero_k3(self):
        data = TaylorData(1.0, (1.0, 0.0, 0.1, 0.05, 0.01, 0.0), "plain")
        result = classify_singular(data)
        assert result.params["case_ab"] == "B"
        assert abs(result.params["alpha1"] + 1080 * 0.05) < 1e-12

    def test_sine_eighth_kernel(self):
        pair = build_pair(MainCase(0.5j * PI, 0.125j * PI, 0.0, 1.0))
        data, _ = gauge_normalize(
            TaylorData.from_kernel(pair.kernel, convention="plain")
        )
        result = classify_singular(data)
        assert result.params["case_ab"] == "A"
        raw = TaylorData.from_kernel(pair.kernel, convention="plain")
        assert verify_candidate(raw, pair.op) <= 1e-10

    def test_convention_guard(self):
        data = TaylorData(0, (1.0, 0, 0, 0, 0), "factorial")
        with pytest.raises(ConventionMismatchError):
            classify_singular(data)


class TestVerifyCandidate:
    def test_own_pair_regular(self):
        pair = build_pair(MainCase(2.0, 1.3, 1.0, 0.0), check=False)
        data = TaylorData.from_kernel(pair.kernel, convention="factorial")
        assert verify_candidate(data, pair.op) <= 1e-10

    def test_first_order_relation_after_gauge(self):
        # with b = a' the lowest recursion level reduces to 2 k'(0) a'(y) = 0
        pair = build_pair(MainCase(1.5, 0.4, 1.0, 0.0), check=False)
        data = TaylorData.from_kernel(pair.kernel, convention="factorial")
        assert abs(data.coeffs[1]) < 1e-12
        a_p = pair.op.a.diff()
        gap = pair.op.b - a_p
        assert gap.is_zero(1e-14)

    def test_perturbed_c_detected(self):
        pair = build_pair(MainCase(2.0, 1.3, 1.0, 0.0), check=False)
        data = TaylorData.from_kernel(pair.kernel, convention="factorial")
        bad = DiffOp(pair.op.a, pair.op.b, pair.op.c * 1.1, pair.op.segment)
        assert verify_candidate(data, bad) >= 1e-3

    def test_perturbed_k4_detected(self):
        pair = build_pair(MainCase(2.0, 1.3, 1.0, 0.0), check=False)
        data = TaylorData.from_kernel(pair.kernel, convention="factorial")
        coeffs = list(data.coeffs)
        coeffs[4] *= 1 + 1e-3
        bad = TaylorData(0j, tuple(coeffs), "factorial")
        assert verify_candidate(bad, pair.op) >= 1e-6
        assert verify_candidate(data, pair.op) <= 1e-10

    def test_singular_own_pair(self):
        pair = build_pair(C2Item3Case(0.5j, 2.0))
        data = TaylorData.from_kernel(pair.kernel, convention="plain")
        assert verify_candidate(data, pair.op) <= 1e-10

    def test_singular_wrong_operator(self):
        pair = build_pair(C2Item3Case(0.5j, 2.0))
        other = build_pair(Special2Case(2.0, 1.0, 0.5))
        data = TaylorData.from_kernel(pair.kernel, convention="plain")
        assert verify_candidate(data, other.op) >= 1e-3


class TestKernelOde:
    def test_main_pair_satisfies(self):
        lam, mu = 2.0, 1.3
        kernel = analytic_main_kernel(lam, mu)
        nu = lam ** 2 / 4 - mu ** 2
        grid = np.linspace(0.1, 1.9, 50)
        assert fit_kernel_ode(kernel, lam, nu, grid) <= 1e-10

    def test_degenerate_lam_uses_bessel_form(self):
        c = 1.0
        kernel = analytic_main_kernel(0.0, 1j * c)
        nu = c ** 2
        grid = np.linspace(0.1, 1.9, 50)
        assert fit_kernel_ode(kernel, 0.0, nu, grid) <= 1e-10

    def test_wrong_nu_detected(self):
        c = 1.0
        kernel = analytic_main_kernel(0.0, 1j * c)
        grid = np.linspace(0.1, 1.9, 50)
        assert fit_kernel_ode(kernel, 0.0, c ** 2 + 0.1, grid) >= 1e-2

    def test_pole_on_grid(self):
        kernel = KernelSpec(ExpPoly.constant(1), Denominator.sinh_half(2.0))
        with pytest.raises(PoleHitError):
            fit_kernel_ode(kernel, 2.0, 0.5, [0.0])


class TestWireFormat:
    def test_taylor_data_round_trip(self):
        data = TaylorData(1.0 + 0.5j, (1.0, 0.2j, -0.3, 0, 0.1, 0), "plain")
        assert TaylorData.from_dict(data.to_dict()) == data

    def test_convention_conversion_round_trip(self):
        kernel = analytic_main_kernel(1.3, 0.6)
        fact = TaylorData.from_kernel(kernel, convention="factorial")
        plain = fact.converted("plain")
        assert plain.convention == "plain"
        assert abs(plain.coeffs[0]) == 0  # no pole
        back = plain.converted("factorial")
        np.testing.assert_allclose(back.coeffs, fact.coeffs[:len(back.coeffs)],
                                   rtol=1e-15)
        # matches the series computed directly in the other convention
        direct = TaylorData.from_kernel(kernel, convention="plain", order=6)
        np.testing.assert_allclose(plain.coeffs, direct.coeffs[:len(plain.coeffs)],
                                   rtol=1e-12, atol=1e-14)

    def test_pole_blocks_factorial_conversion(self):
        data = TaylorData(1.0, (1.0, 0, 0.2, 0, 0.1, 0), "plain")
        with pytest.raises(ConventionMismatchError):
            data.converted("factorial")

    def test_classification_dict(self):
        kernel = analytic_main_kernel(1.0, 0.4)
        result = classify(TaylorData.from_kernel(kernel, convention="factorial"))
        d = result.to_dict()
        assert d["verdict"] == "regular_commuting"
        assert "lambda_sq" in d["params"]
