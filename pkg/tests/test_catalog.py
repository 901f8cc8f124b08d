import math

import numpy as np
import pytest

from commutant_kernels.catalog import (
    C2Item1Case, C2Item2Case, C2Item3Case, C2Item4Case, DiffOp, MainCase,
    Special1Case, Special2Case, Special3Case, Special4Case, build_pair,
    case_from_dict, case_to_dict, classify_regularity, gauge_transform,
    make_pair, validate_pair,
)
from commutant_kernels.errors import DegenerateError, ParameterDomainError
from commutant_kernels.expalg import ExpPoly, drop_constant
from commutant_kernels.kernels import Denominator, KernelSpec
from commutant_kernels.verifier import residue_grid

PI = math.pi

# committed parameter grid: at least three points per case family
CATALOG_GRID = [
    MainCase(1.0, 0.4, 0.3, 1.0),
    MainCase(0.5j, 0.25, 1.0, 0.7),
    MainCase(1.0 + 0.5j, 0.8, 0.0, 1.0),
    MainCase(0.0, 1j, 0.5, 0.3),
    Special1Case(0, 0.7, 0.2),
    Special1Case(1, 1.0, -0.4),
    Special1Case(-2, 0.3j, 1.0),
    Special2Case(2.0, 1.0, 0.5),
    Special2Case(1.0j, 0.8, 0.3j),
    Special2Case(1.5, 0.0, 1.0),
    Special3Case(0.8, (1.0, 0, 0.5)),
    Special3Case(-0.5j, (-4.0, 0, 1.0)),
    Special3Case(1.2, (2.0, 0, -1.0)),
    Special4Case((0.3, -0.2, 1.0), 0.6),
    Special4Case((0.0, 1.0, 0.0), 0.4j),
    Special4Case((1.0, 0.5, 0.25), -0.3),
    C2Item1Case(0.5j * PI, 0.125j * PI, 0.0, 1.0, 1),
    C2Item1Case(1.0, 0.3, 0.2, 1.0, 1),
    C2Item1Case(0.8j, 0.4, 1.0, 0.5, -1),
    C2Item2Case(2.0, 1.0, 0.5j, 1),
    C2Item2Case(1.2j, 0.7, 0.0, 1),
    C2Item2Case(1.0, 2.0, -0.8j, -1),
    C2Item3Case(0.5j, 2.0),
    C2Item3Case(-1.0j, 0.5),
    C2Item3Case(0.25j, 3.0),
    C2Item4Case(0.4j, 0.5, 2.5),
    C2Item4Case(0.0, 0.0, 2.0),
    C2Item4Case(-0.6j, -3.0, -1.5),
]


class TestBuild:
    def test_grid_size(self):
        names = {}
        for case in CATALOG_GRID:
            names.setdefault(case.name, 0)
            names[case.name] += 1
        assert all(v >= 3 for v in names.values())
        assert len(CATALOG_GRID) >= 22

    @pytest.mark.parametrize("case", CATALOG_GRID, ids=lambda c: repr(c))
    def test_builds_and_commutes(self, case):
        pair = build_pair(case)
        assert residue_grid(pair, 10, 10).max_relative < 1e-10

    def test_sine_eighth_closed_forms(self):
        pair = build_pair(MainCase(0.5j * PI, 0.125j * PI, 0.0, 1.0))
        # a proportional to cos(pi y / 2)
        a_ratio = pair.op.a.eval(0.0) / 1.0
        for y in (0.3, -0.7, 0.99):
            want = a_ratio * math.cos(PI * y / 2)
            assert abs(pair.op.a.eval(y) - want) < 1e-13
        # c = -(3 pi^2 / 64) a
        resid = pair.op.c - (-3 * PI ** 2 / 64) * pair.op.a
        assert resid.is_zero(1e-12)
        # kernel proportional to 1 / sin(pi z / 8)
        for z in (0.5, 1.7, -2.5):
            ratio = pair.kernel.eval(z) * math.sin(PI * z / 8)
            assert abs(ratio - PI / 4) < 1e-12

    def test_double_limit(self):
        pair = build_pair(MainCase(0.0, 0.0, 0.0, 0.5))
        assert pair.kernel.denom == Denominator.z()
        assert abs(pair.kernel.eval(2.0) - 0.5) < 1e-14  # 1/z scaled by 2*alpha2
        assert pair.op.a == ExpPoly.poly([-0.5, 0, 0.5])
        assert pair.op.c.is_zero(0.0)

    def test_prolate_kernel(self):
        c = 1.3
        pair = build_pair(MainCase(0.0, 1j * c, 0.5, 0.0))
        for z in (0.4, 1.1, -1.9):
            want = math.sin(c * z) / (c * z)
            assert abs(pair.kernel.eval(z) - want) < 1e-13
        assert abs(pair.kernel.eval(0.0) - 1.0) < 1e-13

    def test_degenerate_rejections(self):
        with pytest.raises(DegenerateError):
            build_pair(MainCase(1.0, 0.4, 0.0, 0.0))
        with pytest.raises(DegenerateError):
            build_pair(MainCase(2.0, 1.0, 1.0, 0.0))  # trivial ratio of sinh
        with pytest.raises(DegenerateError):
            build_pair(Special2Case(1.0, 0.0, 0.0))

    def test_strip_restrictions(self):
        with pytest.raises(ParameterDomainError):
            build_pair(MainCase(1.2j * PI, 0.5, 1.0, 1.0))  # alpha1 != 0
        with pytest.raises(ParameterDomainError):
            build_pair(MainCase(1.2j * PI, 0.5, 0.0, 1.0))  # mu not (2m+1)lam/4
        with pytest.raises(ParameterDomainError):
            build_pair(MainCase(2.0j * PI, 0.25j * PI, 0.0, 1.0))  # |lam| = 2 pi
        # pi <= |lam| < 2 pi with the admissible mu passes
        lam = 1.2j * PI
        build_pair(MainCase(lam, 0.75 * lam, 0.0, 1.0))

    def test_special3_domain(self):
        with pytest.raises(ParameterDomainError):
            build_pair(Special3Case(0.0, (1.0, 0, 1.0)))
        with pytest.raises(ParameterDomainError):
            build_pair(Special3Case(1.0, (1.0, 0.5, 1.0)))  # p'(0) != 0
        with pytest.raises(ParameterDomainError):
            build_pair(C2Item4Case(0.4j, 2.0, 1.0))  # a >= b
        with pytest.raises(ParameterDomainError):
            build_pair(C2Item2Case(2.0, 1.0, 0.5, 1))  # beta not imaginary

    def test_main_structural_relations(self):
        # b = a' and c = (lam^2/4 - mu^2) a as exact coefficient identities
        for lam, mu in ((1.0, 0.4), (0.5j, 0.25), (0.0, 1j), (1 + 0.5j, 0.8)):
            pair = build_pair(MainCase(lam, mu, 0.3, 1.0), check=False)
            nu = complex(lam) ** 2 / 4 - complex(mu) ** 2
            assert (pair.op.b - pair.op.a.diff()).is_zero(1e-13)
            assert (pair.op.c - nu * pair.op.a).with_hint(
                pair.op.a.max_coeff()).is_zero(1e-13)

    def test_boundary_conditions_on_grid(self):
        for case in CATALOG_GRID:
            pair = build_pair(case)
            for entry in pair.op.boundary_residuals():
                assert entry["a_abs"] <= 1e-11
                assert entry["b_gap_abs"] <= 1e-11
            if pair.op_target is not None:
                for entry in pair.op_target.boundary_residuals():
                    assert entry["a_abs"] <= 1e-9
                    # the first-order gap at shifted endpoints is purely
                    # imaginary for the polynomial families; its real part
                    # must still vanish
                    assert entry["b_gap_real"] <= 1e-9


class TestDegenerations:
    def scale_match(self, op_special, op_main):
        """Structural equality of (a, b, c) modulo one common scale and an
        additive constant in c."""
        num = op_special.a.max_coeff()
        den = op_main.a.max_coeff()
        # fit the scale from the leading coefficients via evaluation
        y0 = 0.37
        s = op_special.a.eval(y0) / op_main.a.eval(y0)
        assert (op_special.a - s * op_main.a).with_hint(num).is_zero(1e-12)
        assert (op_special.b - s * op_main.b).with_hint(
            max(op_special.b.max_coeff(), 1.0)).is_zero(1e-12)
        dc = drop_constant(op_special.c - s * op_main.c)
        assert dc.with_hint(max(op_special.c.max_coeff(), 1.0)).is_zero(1e-12)

    def test_special1_alpha_eq_beta(self):
        m = 1
        special = build_pair(Special1Case(m, 0.6, 0.6))
        main = build_pair(MainCase(1j * PI, (2 * m + 1) / 4 * 1j * PI, 0.0, 1.0))
        self.scale_match(special.op, main.op)

    def test_special2_beta_zero(self):
        lam = 1.7
        special = build_pair(Special2Case(lam, 0.9, 0.0))
        main = build_pair(MainCase(lam, 0.0, 0.0, 1.0))
        self.scale_match(special.op, main.op)

    def test_special3_p_const(self):
        special = build_pair(Special3Case(0.7, (1.0,)))
        main = build_pair(MainCase(0.0, 0.0, 0.5, 0.5))
        self.scale_match(special.op, main.op)

    def test_special4_p_const_beta_zero(self):
        special = build_pair(Special4Case((1.0,), 0.0))
        main = build_pair(MainCase(0.0, 0.0, 0.5, 0.5))
        self.scale_match(special.op, main.op)


class TestGauge:
    def test_identity(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        same = gauge_transform(pair, 0.0)
        assert same.op.b == pair.op.b
        assert same.kernel.tau == pair.kernel.tau

    def test_leading_coefficient_unchanged(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        for tau in (0.5, -0.3j, 0.2 + 0.1j):
            assert gauge_transform(pair, tau).op.a == pair.op.a

    def test_commutation_preserved(self):
        pair = build_pair(Special2Case(2.0, 1.0, 0.5))
        before = residue_grid(pair).max_relative
        after = residue_grid(gauge_transform(pair, 0.7 - 0.2j)).max_relative
        assert before <= 1e-10 and after <= 1e-10

    def test_composition(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        t1, t2 = 0.3, -0.5j
        once = gauge_transform(pair, t1 + t2)
        twice = gauge_transform(gauge_transform(pair, t1), t2)
        for f, g in ((once.op.b, twice.op.b), (once.op.c, twice.op.c)):
            assert f.structurally_close(g, 1e-12)
        assert abs(once.kernel.tau - twice.kernel.tau) < 1e-15

    def test_zero_derivative_normalization(self):
        # pure-parameter kernels are even or odd, hence k'(0) = 0 (analytic
        # family) or a vanishing constant Laurent term (pole family) at tau=0
        ls = build_pair(MainCase(1.0, 0.4, 1.0, 0.0), check=False).kernel.laurent(3)
        assert abs(ls.factorial[1]) <= 1e-12 * max(abs(c) for c in ls.factorial)
        ls = build_pair(MainCase(1.0, 0.4, 0.0, 1.0)).kernel.laurent(3)
        assert abs(ls.plain[1]) <= 1e-12 * abs(ls.pole_coeff)
        # mixed parameters sit at the gauge offset -alpha1/alpha2 instead
        a1, a2 = 0.3, 1.0
        ls = build_pair(MainCase(1.0, 0.4, a1, a2)).kernel.laurent(3)
        assert abs(ls.plain[1] / ls.plain[0] - a1 / a2) < 1e-12


class TestValidate:
    def test_catalog_pairs_pass(self):
        for case in CATALOG_GRID[:6] + CATALOG_GRID[16:20]:
            rep = validate_pair(build_pair(case))
            assert rep.passed, (case, rep)

    def test_perturbed_boundary_fails(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        bad_op = DiffOp(pair.op.a + ExpPoly.constant(0.1), pair.op.b,
                        pair.op.c, pair.op.segment)
        bad = make_pair(pair.kernel, bad_op, check=False)
        rep = validate_pair(bad)
        assert not rep.passed
        assert any(abs(r["a_abs"] - 0.1) < 1e-12 for r in rep.boundary)

    def test_strip_flag_without_build(self):
        # assembled directly so the inadmissible parameters can be inspected
        lam = 1.2j * PI
        kernel = KernelSpec(
            lam * (ExpPoly.sinh(0.5) * 2 + ExpPoly.cosh(0.5)),
            Denominator.sinh_half(lam),
        )
        a = (ExpPoly.cosh(lam) + ExpPoly.constant(-np.cosh(lam))) * (1 / lam ** 2)
        op = DiffOp(a, a.diff(), (lam ** 2 / 4 - 0.25) * a)
        bad = make_pair(kernel, op, case=MainCase(lam, 0.5, 1.0, 1.0), check=False)
        rep = validate_pair(bad)
        assert not rep.strip_ok
        assert not rep.passed


class TestRegularity:
    def test_sine_eighth_regular(self):
        pair = build_pair(C2Item1Case(0.5j * PI, 0.125j * PI, 0.0, 1.0, 1))
        rep = classify_regularity(pair)
        assert rep.regular
        assert {round(w.real) for w in rep.witnesses} == {3, 5}

    def test_generic_item1_singular(self):
        pair = build_pair(C2Item1Case(1.0, 0.3, 0.2, 1.0, 1))
        rep = classify_regularity(pair)
        assert not rep.regular

    def test_item4_regular(self):
        pair = build_pair(C2Item4Case(0.4j, 0.5, 2.5))
        rep = classify_regularity(pair)
        assert rep.regular
        assert rep.witnesses == (0.5 + 0j, 2.5 + 0j)

    def test_single_segment_rejected(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        with pytest.raises(ValueError):
            classify_regularity(pair)


class TestWireFormat:
    @pytest.mark.parametrize("case", CATALOG_GRID[:1] + CATALOG_GRID[4:5]
                             + CATALOG_GRID[7:8] + CATALOG_GRID[10:11]
                             + CATALOG_GRID[13:14] + CATALOG_GRID[16:17]
                             + CATALOG_GRID[19:20] + CATALOG_GRID[22:23]
                             + CATALOG_GRID[25:26], ids=lambda c: c.name)
    def test_case_round_trip(self, case):
        back = case_from_dict(case_to_dict(case))
        assert case_to_dict(back) == case_to_dict(case)

    def test_pair_bundle(self):
        pair = build_pair(MainCase(1.0, 0.4, 0.3, 1.0))
        d = pair.to_dict()
        assert d["case"]["case"] == "Main"
        assert "formula" in d["kernel"]
        assert d["op_target"] is None
