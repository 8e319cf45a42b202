"""Parameter sweeps and threshold finding over thermal families.

The threshold temperature of a model is the edge of the low-temperature
passive region, located on the exact verdict by a coarse logarithmic scan
followed by bisection.  The verdict is presumed monotone in temperature
but never trusted: the coarse scan must show a single transition, and any
extra transitions are reported rather than discarded.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import CplpError, GroundStateError
from .models import SpinChainSpec, TwoQubitSpec, build_chain, build_two_qubit
from .operators import (
    BipartiteSpace,
    DensityMatrix,
    HermitianOperator,
    boltzmann_weights,
    density_matrix,
    eig_hermitian,
)
from .passivity import check_passivity, extraction_operator
from .bounds import spectral_data, threshold_temperature_bound

__all__ = [
    "ThermalModel",
    "ThresholdResult",
    "ScanResult",
    "ConvergenceReport",
    "thermal_model",
    "rotated_thermal_model",
    "threshold_temperature",
    "sweep_parameter",
    "sweep_kappa",
    "chain_convergence",
    "write_scan_csv",
    "write_scan_json",
]

DEFAULT_WINDOW = (1e-2, 1e2)
_COARSE_POINTS = 64
_BISECT_STEPS = 40
_BISECT_REL = 1e-9


class ThermalModel:
    """A Hamiltonian family member with cached spectral data.

    state(t) is the thermal state at temperature t, conjugated by the
    cached unitary when a rotation generator was supplied.  The cache makes
    repeated verdicts along a temperature scan cheap.
    """

    def __init__(
        self,
        h: HermitianOperator,
        space: BipartiteSpace,
        generator: HermitianOperator | None = None,
        label: str = "",
        tol: Tolerances = DEFAULT,
    ):
        if h.dim != space.dim:
            raise CplpError(
                f"hamiltonian dim {h.dim} does not match space {space.d_a}x{space.d_b}"
            )
        self.h = h
        self.space = space
        self.label = label
        self.tol = tol
        self._w, self._v = eig_hermitian(h, tol)
        if generator is None:
            self._u = None
        else:
            if generator.dim != h.dim:
                raise CplpError("rotation generator dimension mismatch")
            gw, gv = eig_hermitian(generator, tol)
            self._u = (gv * np.exp(1j * gw)) @ gv.conj().T

    def state(self, t: float) -> DensityMatrix:
        if not (t > 0):
            raise CplpError(f"temperature must be positive, got {t}")
        p = boltzmann_weights(self._w, 1.0 / t, self.tol)
        mat = (self._v * p) @ self._v.conj().T
        if self._u is not None:
            mat = self._u @ mat @ self._u.conj().T
        return density_matrix(mat, self.space, self.tol)

    def is_passive_at(self, t: float) -> bool:
        c = extraction_operator(self.state(t), self.h, self.tol)
        return check_passivity(c, self.tol).is_passive


def thermal_model(h, space, label: str = "", tol: Tolerances = DEFAULT) -> ThermalModel:
    return ThermalModel(h, space, generator=None, label=label, tol=tol)


def rotated_thermal_model(
    h, space, generator, label: str = "", tol: Tolerances = DEFAULT
) -> ThermalModel:
    return ThermalModel(h, space, generator=generator, label=label, tol=tol)


@dataclass(frozen=True)
class ThresholdResult:
    """Edge of the passive temperature region on a scanned window.

    t_star is None when no passive temperature was sampled.  flag is one of
    "bracketed", "ge_window" (passive on the whole window, t_star = upper
    edge as a lower bound), "no_passive_point", "non_passive_at_floor".
    transitions holds every coarse-grid bracket where the verdict flips, so
    a non-monotone family cannot hide behind its first transition.
    """

    t_star: float | None
    flag: str
    monotone: bool
    transitions: tuple[tuple[float, float], ...]
    window: tuple[float, float]


def threshold_temperature(
    model: ThermalModel,
    t_window: tuple[float, float] = DEFAULT_WINDOW,
    coarse_points: int = _COARSE_POINTS,
) -> ThresholdResult:
    """Locate the passive/non-passive transition temperature.

    Coarse log grid to find the first flip, then log-space bisection; the
    returned value brackets the verdict change to relative width 1e-9.
    """
    lo_t, hi_t = float(t_window[0]), float(t_window[1])
    if not (0 < lo_t < hi_t):
        raise CplpError(f"invalid temperature window {t_window}")
    grid = np.logspace(np.log10(lo_t), np.log10(hi_t), coarse_points)
    verdicts = [model.is_passive_at(t) for t in grid]
    transitions = tuple(
        (float(grid[i]), float(grid[i + 1]))
        for i in range(len(grid) - 1)
        if verdicts[i] != verdicts[i + 1]
    )
    monotone = len(transitions) <= 1

    if all(verdicts):
        return ThresholdResult(hi_t, "ge_window", monotone, transitions, (lo_t, hi_t))
    if not any(verdicts):
        return ThresholdResult(None, "no_passive_point", monotone, transitions, (lo_t, hi_t))
    if not verdicts[0]:
        # the cold edge itself fails: there is no passive prefix to bound
        return ThresholdResult(
            None, "non_passive_at_floor", False, transitions, (lo_t, hi_t)
        )

    first = next(i for i in range(len(grid) - 1) if verdicts[i] and not verdicts[i + 1])
    lo, hi = float(grid[first]), float(grid[first + 1])
    for _ in range(_BISECT_STEPS):
        if hi / lo - 1.0 < _BISECT_REL:
            break
        mid = float(np.sqrt(lo * hi))
        if model.is_passive_at(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(
        float(np.sqrt(lo * hi)), "bracketed", monotone, transitions, (lo_t, hi_t)
    )


@dataclass(frozen=True)
class ScanResult:
    """One threshold curve over a parameter grid.

    t_star and t_bound carry NaN where no value exists; flags carries the
    per-point ThresholdResult flag, "error:<Type>" for points that raised,
    and "no_bound" markers are implicit in a NaN t_bound.
    """

    parameter: str
    parameter_grid: tuple[float, ...]
    t_star: tuple[float, ...]
    t_bound: tuple[float, ...] | None
    flags: tuple[str, ...]
    monotonicity_verified: tuple[bool, ...]
    metadata: dict


def _scan_point(
    make_model: Callable[[float], ThermalModel],
    value: float,
    t_window: tuple[float, float],
    with_bounds: bool,
) -> tuple[float, float, str, bool]:
    try:
        model = make_model(value)
        res = threshold_temperature(model, t_window)
    except CplpError as exc:
        return float("nan"), float("nan"), f"error:{type(exc).__name__}", False
    t_star = res.t_star if res.t_star is not None else float("nan")
    t_bound = float("nan")
    if with_bounds:
        try:
            sd = spectral_data(model.h, model.space, model.tol)
            tb = threshold_temperature_bound(sd)
            if tb.bracketed:
                t_bound = tb.t
        except (GroundStateError, CplpError):
            pass
    return t_star, t_bound, res.flag, res.monotone


def sweep_parameter(
    make_model: Callable[[float], ThermalModel],
    parameter: str,
    grid: Sequence[float],
    t_window: tuple[float, float] = DEFAULT_WINDOW,
    with_bounds: bool = False,
    jobs: int | None = None,
    metadata: dict | None = None,
) -> ScanResult:
    """Threshold temperature at every grid value, in grid order.

    Points run in parallel worker threads (the heavy work is eigensolves,
    which release the interpreter lock); output order is grid order no
    matter which points finish first.  A failing point becomes NaN with an
    error flag instead of poisoning the sweep.
    """
    values = [float(v) for v in grid]
    workers = jobs if jobs and jobs > 0 else min(8, len(values)) or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(
            pool.map(
                lambda v: _scan_point(make_model, v, t_window, with_bounds), values
            )
        )
    meta = dict(metadata or {})
    meta.setdefault("t_window", [t_window[0], t_window[1]])
    meta.setdefault("coarse_points", _COARSE_POINTS)
    meta.setdefault("tolerances", vars(DEFAULT).copy())
    return ScanResult(
        parameter=parameter,
        parameter_grid=tuple(values),
        t_star=tuple(r[0] for r in rows),
        t_bound=tuple(r[1] for r in rows) if with_bounds else None,
        flags=tuple(r[2] for r in rows),
        monotonicity_verified=tuple(r[3] for r in rows),
        metadata=meta,
    )


def sweep_kappa(
    spec: TwoQubitSpec | SpinChainSpec,
    kappa_grid: Sequence[float],
    t_window: tuple[float, float] = DEFAULT_WINDOW,
    generator: HermitianOperator | None = None,
    with_bounds: bool = False,
    jobs: int | None = None,
) -> ScanResult:
    """Sweep the coupling strength of a built-in family."""

    def make_model(kappa: float) -> ThermalModel:
        s = replace(spec, kappa=kappa)
        if isinstance(s, SpinChainSpec):
            h, space = build_chain(s)
        else:
            h, space = build_two_qubit(s)
        return ThermalModel(h, space, generator=generator)

    fixed = vars(spec).copy()
    fixed.pop("kappa", None)
    meta = {
        "family": type(spec).__name__,
        "fixed": {k: list(v) if isinstance(v, tuple) else v for k, v in fixed.items()},
        "rotated": generator is not None,
    }
    return sweep_parameter(
        make_model, "kappa", kappa_grid, t_window, with_bounds, jobs, meta
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Threshold curves for growing chain length at fixed anisotropy.

    max_deltas[i] is the largest pointwise |t_star(n_list[i+1]) -
    t_star(n_list[i])| over the shared coupling grid, NaN-aware; flat
    deltas at large n are the finite-size convergence signal.
    """

    n_list: tuple[int, ...]
    results: tuple[ScanResult, ...]
    max_deltas: tuple[float, ...]


def chain_convergence(
    gamma: float,
    kappa_grid: Sequence[float],
    n_list: Sequence[int],
    field: float = 1.0,
    t_window: tuple[float, float] = DEFAULT_WINDOW,
    jobs: int | None = None,
) -> ConvergenceReport:
    """One threshold curve per chain length, plus successive differences."""
    ns = [int(n) for n in n_list]
    if any(n < 2 for n in ns):
        raise CplpError("chains need at least two sites")
    results = []
    for n in ns:
        spec = SpinChainSpec(n_sites=n, kappa=1.0, gamma=gamma, field=field, a_region=(1,))
        res = sweep_kappa(spec, kappa_grid, t_window, jobs=jobs)
        res.metadata["n_sites"] = n
        results.append(res)
    deltas = []
    for prev, cur in zip(results, results[1:]):
        a = np.asarray(prev.t_star)
        b = np.asarray(cur.t_star)
        ok = ~(np.isnan(a) | np.isnan(b))
        deltas.append(float(np.max(np.abs(a[ok] - b[ok]))) if np.any(ok) else float("nan"))
    return ConvergenceReport(
        n_list=tuple(ns), results=tuple(results), max_deltas=tuple(deltas)
    )


def _fmt(x: float) -> str:
    return "%.12g" % x


def write_scan_csv(result: ScanResult, path) -> None:
    """Fixed-schema CSV: parameter, t_star, t_bound, flags."""
    lines = ["parameter,t_star,t_bound,flags"]
    bounds = result.t_bound or tuple(float("nan") for _ in result.parameter_grid)
    for v, ts, tb, fl in zip(result.parameter_grid, result.t_star, bounds, result.flags):
        lines.append(f"{_fmt(v)},{_fmt(ts)},{_fmt(tb)},{fl}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _nan_to_null(values) -> list:
    return [None if np.isnan(v) else v for v in values]


def write_scan_json(result: ScanResult, path) -> None:
    """Full sweep record; content is a pure function of the inputs.

    Missing values become JSON null (NaN is not valid JSON).
    """
    doc = {
        "parameter": result.parameter,
        "parameter_grid": list(result.parameter_grid),
        "t_star": _nan_to_null(result.t_star),
        "t_bound": _nan_to_null(result.t_bound) if result.t_bound is not None else None,
        "flags": list(result.flags),
        "monotonicity_verified": list(result.monotonicity_verified),
        "metadata": result.metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
