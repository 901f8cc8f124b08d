"""Finite convolution operators commuting with second-order differential
operators: exact pair catalog, commutation certification, spectral and SVD
pipelines, and the inverse classification from kernel series data."""

from .expalg import ExpPoly, drop_constant
from .kernels import Denominator, KernelSpec, LaurentSeries
from .catalog import (
    C2Item1Case, C2Item2Case, C2Item3Case, C2Item4Case, CommutingPair, DiffOp,
    MainCase, RegularityReport, Special1Case, Special2Case, Special3Case,
    Special4Case, ValidationReport, build_pair, case_from_dict, case_to_dict,
    classify_regularity, gauge_transform, make_pair, validate_pair,
)
from .verifier import (
    DenseOperator, QuadratureRule, ResidueGrid, commutator_norm, discretize_K,
    discretize_L, phi_boundary_term, phi_slope, residue_R1, residue_R2,
    residue_grid,
)
from .spectral import (
    OracleResult, Spectrum, SvdResult, dense_oracle, k_spectrum_from_L,
    solve_L_eigen, svd_pipeline,
)
from .classifier import (
    ClassificationResult, TaylorData, classify, classify_regular,
    classify_singular, fit_kernel_ode, gauge_normalize, verify_candidate,
)
from .normality import (
    NormalityDecomposition, OpPairTest, adjoint, commute_ops, compose,
    is_normal, is_normal_via_composition, is_self_adjoint,
    normality_commutator_coeffs,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
