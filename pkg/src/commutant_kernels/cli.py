"""Command-line front end: scenario files in, JSON/CSV reports out.

Exit codes: 0 success, 2 scenario/parameter validation failure, 3 numerical
failure.  Outputs are deterministic for a fixed scenario.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import catalog as cat
from .classifier import TaylorData, classify, verify_candidate
from .errors import (CommutantError, ConventionMismatchError, DegenerateError,
                     IoFailureError, ParameterDomainError, ZeroLeadingError)
from .normality import is_normal, is_normal_via_composition, is_self_adjoint
from .spectral import dense_oracle, k_spectrum_from_L, solve_L_eigen, svd_pipeline
from .verifier import (QuadratureRule, commutator_norm, discretize_K, phi_slope,
                       residue_grid)
from .expalg import ExpPoly

SCHEMA = "commutant-kernels/1"

_VALIDATION_ERRORS = (
    ParameterDomainError, DegenerateError, ConventionMismatchError,
    ZeroLeadingError, ValueError, KeyError, json.JSONDecodeError,
    FileNotFoundError,
)


# ---------------------------------------------------------------------------
# deterministic rendering


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise IoFailureError("non-finite number in report")
    s = f"{x:.17g}"
    return s


def render_json(obj) -> str:
    """JSON text with floats printed to 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, complex):
        return render_json([obj.real, obj.imag])
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{render_json(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(render_json(v) for v in obj) + "]"
    raise IoFailureError(f"cannot serialize {type(obj)!r}")


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append(format_float(float(v)))
        lines.append(",".join(cells))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc


def emit_report(out_dir: Path, name: str, report: dict, tables: dict) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    jpath = out_dir / f"{name}_report.json"
    try:
        jpath.write_text(render_json({"schema": SCHEMA, **report}) + "\n")
    except OSError as exc:
        raise IoFailureError(str(exc)) from exc
    written.append(jpath)
    for tname, (header, rows) in tables.items():
        cpath = out_dir / f"{name}_{tname}.csv"
        write_csv(cpath, header, rows)
        written.append(cpath)
    return written


# ---------------------------------------------------------------------------
# scenarios


def load_scenario(path: str, args) -> dict:
    data = json.loads(Path(path).read_text())
    if "name" in data and not all(
        ch.isalnum() or ch in "-_." for ch in data["name"]
    ):
        raise ValueError(f"scenario name {data['name']!r} is not filesystem-safe")
    res = data.setdefault("resolutions", {})
    if args.basis is not None:
        res["basis"] = args.basis
    if args.quad is not None:
        res["quad"] = args.quad
    if args.tol is not None:
        data.setdefault("tolerances", {})["residue"] = args.tol
    res.setdefault("basis", 96)
    res.setdefault("quad", 128)
    res.setdefault("quad_list", [32, 64, res["quad"]])
    if res["basis"] > 200:
        raise ValueError("basis resolution exceeds the solver cap of 200")
    if res["quad"] > 512:
        raise ValueError("quad resolution exceeds the dense cap of 512")
    data.setdefault("modes", 5)
    data.setdefault("name", Path(path).stem)
    return data


def _pair_from_scenario(sc: dict) -> cat.CommutingPair:
    case = cat.case_from_dict(sc["case"])
    tau = sc["case"].get("tau") or sc.get("tau") or [0.0, 0.0]
    return cat.build_pair(case, tau=complex(tau[0], tau[1]))


def _complexrows(values) -> list:
    return [[v.real, v.imag] for v in values]


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (report, tables)


def run_catalog(sc: dict):
    pair = _pair_from_scenario(sc)
    rep = cat.validate_pair(pair)
    report = {
        "command": "catalog",
        "case": sc["case"],
        "pair": pair.to_dict(),
        "validation": {
            "passed": rep.passed,
            "strip_ok": rep.strip_ok,
            "gauge_ok": rep.gauge_ok,
            "nontrivial": rep.nontrivial,
            "pole_order": rep.pole_order,
            "residue_relative": rep.residue_relative,
            "boundary": [
                {"op": r["op"], "endpoint": [r["endpoint"].real, r["endpoint"].imag],
                 "a_abs": r["a_abs"], "b_gap_abs": r["b_gap_abs"],
                 "b_gap_real": r["b_gap_real"], "ok": r["ok"]}
                for r in rep.boundary
            ],
            "notes": list(rep.notes),
        },
    }
    return report, {}


def run_verify(sc: dict):
    pair = _pair_from_scenario(sc)
    grid = residue_grid(pair)
    tol = sc.get("tolerances", {}).get("residue", 1e-10)
    norms = {}
    for n in sc["resolutions"]["quad_list"]:
        norms[str(n)] = commutator_norm(pair, int(n))
    slope = None
    if pair.kernel.pole_residue() != 0:
        u = ExpPoly.poly([0.3, 1.0, 0.5])
        slope = phi_slope(pair.kernel, pair.op, u, 0.3)
    report = {
        "command": "verify",
        "case": sc["case"],
        "grid_residual_max": grid.max_abs,
        "grid_residual_relative": grid.max_relative,
        "residue_tolerance": tol,
        "residue_ok": grid.max_relative <= tol,
        "commutator_norms": norms,
        "phi_slope": slope,
    }
    rows = [
        [y.real, y.imag, z.real, z.imag, f] for (y, z, f) in grid.rows
    ]
    return report, {"residuals": (["y_re", "y_im", "z_re", "z_im", "abs_f"], rows)}


def run_spectrum(sc: dict):
    pair = _pair_from_scenario(sc)
    basis = sc["resolutions"]["basis"]
    quad = sc["resolutions"]["quad"]
    modes = sc["modes"]
    spec = solve_L_eigen(pair.op, basis)
    report = {
        "command": "spectrum",
        "case": sc["case"],
        "selfadjoint_matrix": spec.selfadjoint,
        "eigenvalues": _complexrows(spec.eigenvalues[:modes]),
        "residuals": list(spec.residuals[:modes]),
        "basis_size": basis,
    }
    rows = []
    if not pair.is_two_segment:
        kappas, kres = k_spectrum_from_L(pair, spec, quad, modes)
        report["kappa"] = _complexrows(kappas)
        report["kappa_residuals"] = list(kres)
        rule = QuadratureRule.gauss(*pair.op.segment, quad)
        oracle = dense_oracle(discretize_K(pair.kernel, rule, rule), "eig")
        report["oracle_eigenvalues"] = _complexrows(oracle.values[:modes])
        for n in range(modes):
            chi = spec.eigenvalues[n]
            rows.append([n, chi.real, chi.imag, kappas[n].real, kappas[n].imag,
                         kres[n]])
    else:
        for n in range(modes):
            chi = spec.eigenvalues[n]
            rows.append([n, chi.real, chi.imag, 0.0, 0.0, spec.residuals[n]])
    report["coefficients"] = [
        _complexrows(spec.eigvecs[:, j]) for j in range(min(modes, spec.eigvecs.shape[1]))
    ]
    header = ["n", "re_chi", "im_chi", "re_kappa", "im_kappa", "residual"]
    return report, {"modes": (header, rows)}


def run_svd(sc: dict):
    pair = _pair_from_scenario(sc)
    if not pair.is_two_segment:
        raise ParameterDomainError("svd needs a two-segment case")
    basis = sc["resolutions"]["basis"]
    quad = sc["resolutions"]["quad"]
    modes = sc["modes"]
    out = svd_pipeline(pair, basis, quad, modes)
    reg = cat.classify_regularity(pair)
    report = {
        "command": "svd",
        "case": sc["case"],
        "sigmas": list(out.sigmas),
        "eigenvalues": _complexrows(out.eigenvalues),
        "cross_residuals": list(out.cross_residuals),
        "normal_eq_residuals": list(out.normal_eq_residuals),
        "gram_residual": out.gram_residual,
        "regular": reg.regular,
        "witnesses": _complexrows(reg.witnesses),
        "warning": out.warning,
        "right_coefficients": [
            _complexrows(out.right_coeffs[:, j]) for j in range(out.right_coeffs.shape[1])
        ],
        "left_coefficients": [
            _complexrows(out.left_coeffs[:, j]) for j in range(out.left_coeffs.shape[1])
        ],
    }
    rows = [
        [n, out.sigmas[n], out.cross_residuals[n]] for n in range(len(out.sigmas))
    ]
    return report, {"sigmas": (["n", "sigma", "residual"], rows)}


def run_classify(sc: dict):
    if "data" in sc:
        data = TaylorData.from_dict(sc["data"])
    else:
        pair = _pair_from_scenario(sc)
        data = TaylorData.from_kernel(pair.kernel)
    result = classify(data)
    report = {"command": "classify", "input": data.to_dict(),
              "result": result.to_dict()}
    if "case" in sc and result.verdict in ("regular_commuting", "singular_candidate"):
        pair = _pair_from_scenario(sc)
        report["candidate_residual"] = verify_candidate(data, pair.op)
    return report, {}


def _op_from_scenario(sc: dict) -> cat.DiffOp:
    if "operator" in sc:
        return cat.DiffOp.from_dict(sc["operator"])
    return _pair_from_scenario(sc).op


def run_normality(sc: dict):
    op = _op_from_scenario(sc)
    normal, dec = is_normal(op)
    report = {
        "command": "normality",
        "self_adjoint": is_self_adjoint(op),
        "normal": normal,
        "normal_via_composition": is_normal_via_composition(op),
        "relation_residuals": list(dec.pair_test.residuals),
        "alpha": [dec.pair_test.alpha.real, dec.pair_test.alpha.imag],
        "alpha_residual": dec.pair_test.alpha_residual,
        "beta": [dec.pair_test.beta.real, dec.pair_test.beta.imag],
        "beta_residual": dec.pair_test.beta_residual,
        "alpha_rescale": dec.alpha_rescale,
        "skew_part_vanishes": dec.already_self_adjoint,
        "final_conditions": {
            k: ([v.real, v.imag] if isinstance(v, complex) else v)
            for k, v in dec.final_conditions.items()
        },
    }
    return report, {}


HANDLERS = {
    "catalog": run_catalog,
    "verify": run_verify,
    "spectrum": run_spectrum,
    "svd": run_svd,
    "classify": run_classify,
    "normality": run_normality,
}


def _list_catalog() -> str:
    lines = ["available cases:"]
    for name, domain in cat.CASE_DOMAINS.items():
        lines.append(f"  {name:10s} {domain}")
    return "\n".join(lines)


def run_one(command: str, scenario_path: str, args) -> int:
    try:
        sc = load_scenario(scenario_path, args)
        report, tables = HANDLERS[command](sc)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CommutantError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    out_dir = Path(args.out or os.environ.get("COMMUTANT_OUT", "out"))
    wanted = sc.get("outputs", ["json", "csv"])
    if "csv" not in wanted:
        tables = {}
    try:
        written = emit_report(out_dir, sc["name"], report, tables)
    except IoFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for p in written:
        print(p)
    return 0


def _worker(job):
    return run_one(*job)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="commutant",
        description="commuting kernel/differential-operator toolbox",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", action="append", default=[],
                       help="scenario JSON path (repeatable)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--basis", type=int, default=None)
        p.add_argument("--quad", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--jobs", type=int, default=1)
        if name == "catalog":
            p.add_argument("--list", action="store_true")
    args = parser.parse_args(argv)

    if args.command == "catalog" and getattr(args, "list", False):
        print(_list_catalog())
        return 0
    if not args.scenario:
        print("error: at least one --scenario is required", file=sys.stderr)
        return 2
    jobs = [(args.command, path, args) for path in args.scenario]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_worker, jobs))
    else:
        codes = [run_one(*j) for j in jobs]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())
