"""Command-line surface.

Subcommands mirror the library layers: check (exact verdict), extract
(optimal channel), scan (threshold sweeps with data files and figures),
bounds (analytic thresholds), classical (incoherent instances).

Exit codes are API: 0 passive or success, 1 non-passive, 2 input error,
3 solver non-convergence or total sweep failure, 4 precondition failure
(degenerate or rank-deficient ground state).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bounds import (
    frustration as frustration_report,
    spectral_data,
    threshold_population,
    threshold_temperature_bound,
)
from .classical import check_support_condition, solve_classical
from .config import DEFAULT, solver_tolerance
from .errors import CplpError, GroundStateError, ModelError
from .modelfile import (
    load_document,
    parse_classical_instance,
    parse_model,
    parse_scan_recipe,
    parse_state,
    split_terms,
)
from .passivity import check_passivity, extraction_operator
from .scan import chain_convergence, sweep_kappa, write_scan_csv, write_scan_json
from .sdp import solve_extraction, verify_certificate

EXIT_OK = 0
EXIT_NON_PASSIVE = 1
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3
EXIT_PRECONDITION = 4


def _json_default(obj):
    # numpy scalars leak out of verdict dataclasses; json refuses np.bool_
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))


def _fail(code: int, kind: str, message: str) -> int:
    _emit({"error": {"type": kind, "message": message}})
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_model_and_state(path, need_state: bool):
    doc = load_document(path)
    model = parse_model(doc.get("model"))
    state = None
    if need_state:
        if "state" not in doc:
            raise ModelError("document needs a 'state' object")
        state = parse_state(doc["state"], model)
    return doc, model, state


def cmd_check(args) -> int:
    try:
        _, model, state = _load_model_and_state(args.model_file, need_state=True)
        c = extraction_operator(state, model.h)
        report = check_passivity(c)
    except GroundStateError as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc))
    except CplpError as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    _emit(
        {
            "command": "check",
            "is_passive": report.is_passive,
            "lambda_min": report.lambda_min,
            "herm_residual": report.herm_residual,
            "epsilon": report.epsilon,
            "extraction_lower_bound": report.extraction_lower_bound,
            "borderline": report.borderline,
            "state_energy": c.state_energy,
            "energy_gauge": "as_given",
        }
    )
    return EXIT_OK if report.is_passive else EXIT_NON_PASSIVE


def cmd_extract(args) -> int:
    try:
        _, model, state = _load_model_and_state(args.model_file, need_state=True)
        c = extraction_operator(state, model.h)
        sol = solve_extraction(c, tol=args.tol)
        cert = verify_certificate(sol, c, tol=args.tol)
    except GroundStateError as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc))
    except (CplpError, ValueError) as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    if args.choi_out:
        choi = sol.choi.matrix
        with open(args.choi_out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "d_a": sol.choi.d_a,
                    "choi_real": np.real(choi).tolist(),
                    "choi_imag": np.imag(choi).tolist(),
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
    _emit(
        {
            "command": "extract",
            "state_energy": float(c.state_energy),
            "primal_value": float(sol.primal_value),
            "dual_value": float(sol.dual_value),
            "delta_e": float(sol.primal_value - c.state_energy),
            "gap": float(sol.gap),
            "slackness_residual": float(sol.slackness_residual),
            "iterations": int(sol.iterations),
            "converged": bool(sol.converged),
            "certificate": {
                "passed": bool(cert.passed),
                "primal_psd": bool(cert.primal_psd),
                "primal_marginal": bool(cert.primal_marginal),
                "dual_feasible": bool(cert.dual_feasible),
                "gap_ok": bool(cert.gap_ok),
                "slackness_ok": bool(cert.slackness_ok),
            },
            "energy_gauge": "as_given",
        }
    )
    return EXIT_OK if sol.converged else EXIT_NO_CONVERGENCE


def cmd_bounds(args) -> int:
    try:
        _, model, _ = _load_model_and_state(args.model_file, need_state=False)
        sd = spectral_data(model.h, model.space)
        p_star = threshold_population(sd)
        tb = threshold_temperature_bound(sd)
        terms = split_terms(model)
        fr = None
        if terms is not None:
            h_a, h_b, v = terms
            fr = frustration_report(model.h, h_a, h_b, v, model.space)
    except GroundStateError as exc:
        return _fail(EXIT_PRECONDITION, type(exc).__name__, str(exc))
    except CplpError as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    frustration_doc = None
    if fr is not None:
        frustration_doc = {
            "frustration_energy": fr.frustration_energy,
            "local_gap": fr.local_gap,
            "gap_ratio": None if np.isinf(fr.gap_ratio) else fr.gap_ratio,
            "schmidt_defect": fr.schmidt_defect,
            "rank_defect": fr.rank_defect,
        }
    _emit(
        {
            "command": "bounds",
            "p_star_bound": p_star,
            "t_bound": {
                "beta": tb.beta,
                "t": tb.t,
                "bracketed": tb.bracketed,
                "monotone": tb.monotone,
            },
            "frustration": frustration_doc,
            "energy_gauge": "ground_energy_zero",
        }
    )
    return EXIT_OK


def cmd_classical(args) -> int:
    try:
        doc = load_document(args.instance_file)
        inst = parse_classical_instance(doc)
    except CplpError as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    res = solve_classical(inst)
    cond = check_support_condition(inst)
    _emit(
        {
            "command": "classical",
            "delta_e": res.delta_e,
            "is_passive": res.is_passive,
            "optimal_targets": list(res.optimal_targets),
            "e_tilde": res.e_tilde.tolist(),
            "ordered": inst.ordered,
            "row_order": list(inst.row_order),
            "col_order": list(inst.col_order),
            "support_condition": {
                "applicable": cond.applicable,
                "holds": cond.holds,
                "witnesses": [list(w) for w in cond.witnesses],
            },
        }
    )
    return EXIT_OK if res.is_passive else EXIT_NON_PASSIVE


def _scan_outputs(base: Path, no_plot: bool):
    return base, base.with_suffix(".json"), None if no_plot else base.with_suffix(".png")


def cmd_scan(args) -> int:
    try:
        doc = load_document(args.recipe_file)
        recipe = parse_scan_recipe(doc)
    except CplpError as exc:
        return _fail(EXIT_INPUT, type(exc).__name__, str(exc))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path, json_path, png_path = _scan_outputs(out, args.no_plot)
    files = []

    if recipe.n_list is not None:
        report = chain_convergence(
            gamma=recipe.model.spec.gamma,
            kappa_grid=recipe.grid,
            n_list=recipe.n_list,
            field=recipe.model.spec.field,
            t_window=recipe.t_window,
            jobs=args.jobs,
        )
        all_nan = True
        curves = []
        for n, res in zip(report.n_list, report.results):
            if args.seed is not None:
                res.metadata["seed"] = args.seed
            per_n = csv_path.with_name(f"{csv_path.stem}_n{n}{csv_path.suffix}")
            write_scan_csv(res, per_n)
            files.append(str(per_n))
            curves.append(
                {
                    "n_sites": n,
                    "parameter_grid": list(res.parameter_grid),
                    "t_star": [None if np.isnan(v) else v for v in res.t_star],
                    "flags": list(res.flags),
                }
            )
            if not all(np.isnan(v) for v in res.t_star):
                all_nan = False
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "n_list": list(report.n_list),
                    "max_deltas": [None if np.isnan(v) else v for v in report.max_deltas],
                    "curves": curves,
                },
                fh,
                indent=2,
                sort_keys=True,
            )
            fh.write("\n")
        files.append(str(json_path))
        if png_path is not None:
            from .plotting import render_convergence

            render_convergence(report, png_path)
            files.append(str(png_path))
    else:
        res = sweep_kappa(
            recipe.model.spec,
            recipe.grid,
            t_window=recipe.t_window,
            generator=recipe.generator,
            with_bounds=recipe.with_bounds,
            jobs=args.jobs,
        )
        if args.seed is not None:
            res.metadata["seed"] = args.seed
        write_scan_csv(res, csv_path)
        write_scan_json(res, json_path)
        files.extend([str(csv_path), str(json_path)])
        if png_path is not None:
            from .plotting import render_scan

            render_scan(res, png_path)
            files.append(str(png_path))
        all_nan = all(np.isnan(v) for v in res.t_star)

    _emit({"command": "scan", "files": files, "total_failure": all_nan})
    return EXIT_NO_CONVERGENCE if all_nan else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cplp",
        description="Decide and quantify local energy extraction in bipartite systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="exact passivity verdict for a model+state")
    p_check.add_argument("model_file")
    p_check.set_defaults(fn=cmd_check)

    p_extract = sub.add_parser("extract", help="optimal extraction via the SDP")
    p_extract.add_argument("model_file")
    p_extract.add_argument("--tol", type=float, default=solver_tolerance())
    p_extract.add_argument("--choi-out", default=None)
    p_extract.set_defaults(fn=cmd_extract)

    p_scan = sub.add_parser("scan", help="threshold sweep from a recipe file")
    p_scan.add_argument("recipe_file")
    p_scan.add_argument("--out", required=True, help="CSV path; JSON/PNG go next to it")
    p_scan.add_argument("--jobs", type=int, default=None)
    p_scan.add_argument("--seed", type=int, default=None)
    p_scan.add_argument("--no-plot", action="store_true")
    p_scan.set_defaults(fn=cmd_scan)

    p_bounds = sub.add_parser("bounds", help="analytic thresholds and frustration")
    p_bounds.add_argument("model_file")
    p_bounds.set_defaults(fn=cmd_bounds)

    p_classical = sub.add_parser("classical", help="incoherent product-basis instance")
    p_classical.add_argument("instance_file")
    p_classical.set_defaults(fn=cmd_classical)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
