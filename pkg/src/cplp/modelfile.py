"""JSON documents describing models, states, sweeps, and classical instances.

One document format feeds every CLI subcommand.  A model is either a named
family with parameters or an explicit Hamiltonian matrix; a state is
thermal (T or beta, exactly one), an eigenmixture, or a rotated thermal
state.  Parse errors raise ModelError so the CLI can map them to its
input-error exit code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classical import ClassicalInstance, classical_instance
from .config import DEFAULT, Tolerances
from .errors import CplpError, ModelError
from .models import (
    SpinChainSpec,
    TwoQubitSpec,
    build_chain,
    build_two_qubit,
    chain_split,
    eigenmixture,
    rotated_thermal,
    two_qubit_split,
)
from .operators import (
    BipartiteSpace,
    DensityMatrix,
    HermitianOperator,
    gibbs,
    herm,
)

__all__ = [
    "ParsedModel",
    "ScanRecipe",
    "load_document",
    "parse_model",
    "parse_state",
    "parse_scan_recipe",
    "parse_classical_instance",
]

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])

_TWO_QUBIT_KEYS = {"form", "kappa", "omega", "gamma"}
_CHAIN_KEYS = {"n_sites", "kappa", "gamma", "field", "a_region"}


@dataclass(frozen=True)
class ParsedModel:
    """Hamiltonian plus its space and, for named families, the spec.

    spec is None for explicit-matrix models; operations needing a local/
    interaction decomposition (frustration reporting) are only available
    when a spec is present.
    """

    h: HermitianOperator
    space: BipartiteSpace
    spec: TwoQubitSpec | SpinChainSpec | None


@dataclass(frozen=True)
class ScanRecipe:
    """Everything a sweep needs, read from one JSON document."""

    model: ParsedModel
    param: str
    grid: tuple[float, ...]
    t_window: tuple[float, float]
    with_bounds: bool
    generator: HermitianOperator | None
    n_list: tuple[int, ...] | None


def load_document(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelError(f"{path}: top level must be a JSON object")
    return doc


def _as_matrix(node, name: str) -> np.ndarray:
    try:
        m = np.array(node, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelError(f"{name} is not a numeric matrix") from exc
    if m.ndim != 2:
        raise ModelError(f"{name} must be a 2-d matrix, got shape {m.shape}")
    return m


def _complex_matrix(node: dict, real_key: str, imag_key: str, name: str) -> np.ndarray:
    re = _as_matrix(node[real_key], f"{name}.{real_key}")
    mat = re.astype(complex)
    if imag_key in node:
        im = _as_matrix(node[imag_key], f"{name}.{imag_key}")
        if im.shape != re.shape:
            raise ModelError(f"{name}: real and imaginary parts differ in shape")
        mat = mat + 1j * im
    return mat


def parse_model(node, tol: Tolerances = DEFAULT) -> ParsedModel:
    if not isinstance(node, dict):
        raise ModelError("model must be a JSON object")
    if ("family" in node) == ("explicit" in node):
        raise ModelError("model needs exactly one of 'family' or 'explicit'")

    if "explicit" in node:
        ex = node["explicit"]
        if not isinstance(ex, dict) or "h_real" not in ex:
            raise ModelError("explicit model needs d_a, d_b, h_real (h_imag optional)")
        try:
            d_a, d_b = int(ex["d_a"]), int(ex["d_b"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError("explicit model needs integer d_a and d_b") from exc
        mat = _complex_matrix(ex, "h_real", "h_imag", "explicit")
        if mat.shape != (d_a * d_b, d_a * d_b):
            raise ModelError(
                f"h has shape {mat.shape}, expected {(d_a * d_b, d_a * d_b)}"
            )
        try:
            h = herm(mat, tol)
        except CplpError as exc:
            raise ModelError(f"explicit hamiltonian rejected: {exc}") from exc
        return ParsedModel(h=h, space=BipartiteSpace(d_a, d_b), spec=None)

    family = node["family"]
    params = node.get("params")
    if not isinstance(params, dict):
        raise ModelError("family model needs a 'params' object")
    try:
        if family == "two_qubit":
            unknown = set(params) - _TWO_QUBIT_KEYS
            if unknown:
                raise ModelError(f"unknown two_qubit params: {sorted(unknown)}")
            spec = TwoQubitSpec(**params)
            h, space = build_two_qubit(spec, tol)
        elif family == "chain":
            unknown = set(params) - _CHAIN_KEYS
            if unknown:
                raise ModelError(f"unknown chain params: {sorted(unknown)}")
            params = dict(params)
            if "a_region" in params:
                params["a_region"] = tuple(int(i) for i in params["a_region"])
            spec = SpinChainSpec(**params)
            h, space = build_chain(spec, tol)
        else:
            raise ModelError(f"unknown model family {family!r}")
    except (TypeError, CplpError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"cannot build {family} model: {exc}") from exc
    return ParsedModel(h=h, space=space, spec=spec)


def split_terms(model: ParsedModel):
    """Local/interaction decomposition, or None for explicit models."""
    if model.spec is None:
        return None
    if isinstance(model.spec, SpinChainSpec):
        return chain_split(model.spec)
    return two_qubit_split(model.spec)


def _beta_from(node: dict) -> float:
    has_t = "t" in node
    has_beta = "beta" in node
    if has_t == has_beta:
        raise ModelError("state needs exactly one of 't' or 'beta'")
    try:
        value = float(node["t"] if has_t else node["beta"])
    except (TypeError, ValueError) as exc:
        raise ModelError("temperature must be a number") from exc
    if not value > 0:
        raise ModelError("temperature must be positive")
    return 1.0 / value if has_t else value


def parse_generator(node, space: BipartiteSpace, tol: Tolerances = DEFAULT) -> HermitianOperator:
    if node == "sigma_xx":
        if space.dim != 4:
            raise ModelError("'sigma_xx' shorthand needs a two-qubit space")
        return herm(np.kron(_PAULI_X, _PAULI_X), tol)
    if isinstance(node, dict) and "g_real" in node:
        mat = _complex_matrix(node, "g_real", "g_imag", "generator")
        if mat.shape != (space.dim, space.dim):
            raise ModelError(f"generator shape {mat.shape} does not match dim {space.dim}")
        try:
            return herm(mat, tol)
        except CplpError as exc:
            raise ModelError(f"generator rejected: {exc}") from exc
    raise ModelError("generator must be 'sigma_xx' or {g_real, g_imag}")


def parse_state(
    node, model: ParsedModel, tol: Tolerances = DEFAULT
) -> DensityMatrix:
    if not isinstance(node, dict) or "kind" not in node:
        raise ModelError("state must be an object with a 'kind'")
    kind = node["kind"]
    try:
        if kind == "thermal":
            return gibbs(model.h, _beta_from(node), model.space, tol)
        if kind == "eigenmixture":
            if "populations" not in node:
                raise ModelError("eigenmixture state needs 'populations'")
            return eigenmixture(model.h, node["populations"], model.space, tol)
        if kind == "rotated_thermal":
            if "generator" not in node:
                raise ModelError("rotated_thermal state needs 'generator'")
            gen = parse_generator(node["generator"], model.space, tol)
            return rotated_thermal(model.h, _beta_from(node), gen, model.space, tol)
    except CplpError as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"cannot build state: {exc}") from exc
    raise ModelError(f"unknown state kind {kind!r}")


def _grid_from(node) -> tuple[float, ...]:
    if isinstance(node, Sequence) and not isinstance(node, (str, bytes)):
        grid = tuple(float(v) for v in node)
        if not grid:
            raise ModelError("grid cannot be empty")
        return grid
    if isinstance(node, dict):
        try:
            lo, hi, n = float(node["lo"]), float(node["hi"]), int(node["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError("grid object needs lo, hi, n") from exc
        if n < 1 or not (0 < lo <= hi):
            raise ModelError(f"invalid grid range {node}")
        spacing = node.get("spacing", "linear")
        if spacing == "linear":
            return tuple(float(v) for v in np.linspace(lo, hi, n))
        if spacing == "log":
            return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), n))
        raise ModelError(f"unknown grid spacing {spacing!r}")
    raise ModelError("grid must be a list or {lo, hi, n, spacing}")


def parse_scan_recipe(doc: dict, tol: Tolerances = DEFAULT) -> ScanRecipe:
    model = parse_model(doc.get("model"), tol)
    if model.spec is None:
        raise ModelError("sweeps need a named model family, not an explicit matrix")
    sweep = doc.get("sweep")
    if not isinstance(sweep, dict):
        raise ModelError("recipe needs a 'sweep' object")
    param = sweep.get("param")
    if param != "kappa":
        raise ModelError("only the 'kappa' parameter can be swept")
    grid = _grid_from(sweep.get("grid"))

    window = doc.get("t_window", [1e-2, 1e2])
    try:
        t_window = (float(window[0]), float(window[1]))
    except (TypeError, ValueError, IndexError) as exc:
        raise ModelError("t_window must be [lo, hi]") from exc
    if not (0 < t_window[0] < t_window[1]):
        raise ModelError(f"invalid t_window {window}")

    generator = None
    state = doc.get("state")
    if state is not None:
        if not isinstance(state, dict):
            raise ModelError("state must be an object")
        kind = state.get("kind", "thermal")
        if kind == "rotated_thermal":
            generator = parse_generator(state.get("generator"), model.space, tol)
        elif kind != "thermal":
            raise ModelError(f"sweeps support thermal states only, got {kind!r}")

    n_list = None
    if "n_list" in doc:
        if not isinstance(model.spec, SpinChainSpec):
            raise ModelError("n_list is only meaningful for chain models")
        try:
            n_list = tuple(int(n) for n in doc["n_list"])
        except (TypeError, ValueError) as exc:
            raise ModelError("n_list must be a list of integers") from exc
        if generator is not None:
            raise ModelError("rotated states are not supported in chain sweeps")

    return ScanRecipe(
        model=model,
        param=param,
        grid=grid,
        t_window=t_window,
        with_bounds=bool(doc.get("with_bounds", False)),
        generator=generator,
        n_list=n_list,
    )


def parse_classical_instance(doc: dict) -> ClassicalInstance:
    if "energies" not in doc or "populations" not in doc:
        raise ModelError("classical instance needs 'energies' and 'populations'")
    e = _as_matrix(doc["energies"], "energies")
    p = _as_matrix(doc["populations"], "populations")
    try:
        return classical_instance(e, p)
    except CplpError as exc:
        raise ModelError(f"invalid classical instance: {exc}") from exc
