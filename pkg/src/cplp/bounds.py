"""Analytic sufficient conditions for passivity of energy eigenmixtures.

Everything here works in the gauge with the ground energy at zero: the
population-transfer bookkeeping behind the bounds compares energies of
transitions out of the ground level, so raw spectra are shifted before any
formula is applied.  Verdict functions elsewhere are shift-invariant, so
the gauge affects reported bound values only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import CplpError, DimensionMismatch, GroundStateError
from .operators import (
    BipartiteSpace,
    DensityMatrix,
    HermitianOperator,
    eig_hermitian,
    partial_trace,
    schmidt_spectrum,
)

__all__ = [
    "SpectralData",
    "TemperatureBound",
    "FrustrationResult",
    "ShieldedRegionInputs",
    "ShieldedRegionReport",
    "spectral_data",
    "threshold_population",
    "threshold_temperature_bound",
    "frustration",
    "clustering_estimate",
    "shielded_region_check",
]


@dataclass(frozen=True)
class SpectralData:
    """Spectrum and per-level entanglement data, ground energy at zero.

    schmidt_mins / schmidt_maxs hold the smallest and largest squared
    Schmidt coefficient of each eigenvector (each level's coefficients sum
    to one).  For degenerate levels the values depend on the eigenbasis the
    solver returned; ground degeneracy is flagged so operations that need a
    unique ground state can refuse.
    """

    energies: np.ndarray
    schmidt_mins: np.ndarray
    schmidt_maxs: np.ndarray
    ground_degenerate: bool
    ground_full_rank: bool


@dataclass(frozen=True)
class TemperatureBound:
    """Largest temperature at which the population criterion certifies
    passivity of thermal states; valid whenever bracketed."""

    beta: float
    t: float
    bracketed: bool
    monotone: bool


@dataclass(frozen=True)
class FrustrationResult:
    frustration_energy: float
    local_gap: float
    gap_ratio: float
    schmidt_defect: float
    rank_defect: float


@dataclass(frozen=True)
class ShieldedRegionInputs:
    """Data for the buffered-region criterion on a lattice.

    spectral: data of the Hamiltonian on the acting region plus its buffer.
    decay_fn maps a distance to the correlation-decay envelope; boundary_fn
    maps the buffer distance to the size of the far boundary.  k_const,
    c1, c2 are the positive constants of the underlying locality estimates
    (c1 = 0 switches the locality term off).
    """

    spectral: SpectralData
    k_const: float
    c1: float
    c2: float
    decay_fn: Callable[[float], float]
    h_a_norm: float
    d_a: int
    boundary_fn: Callable[[float], float]
    distance: float


@dataclass(frozen=True)
class ShieldedRegionReport:
    lambda_l: float
    condition_holds: bool
    p0_bound: float
    beta_star_hint: float


_BISECT_WINDOW = (1e-3, 1e3)
_BISECT_STEPS = 60


def spectral_data(
    h: HermitianOperator, space: BipartiteSpace, tol: Tolerances = DEFAULT
) -> SpectralData:
    """Diagonalize and collect each eigenvector's Schmidt spectrum."""
    if h.dim != space.dim:
        raise DimensionMismatch(
            f"operator dim {h.dim} does not match space {space.d_a}x{space.d_b}"
        )
    w, v = eig_hermitian(h)
    energies = w - w[0]
    norm = max(1.0, float(np.max(np.abs(w))))
    mins = np.empty(len(w))
    maxs = np.empty(len(w))
    for i in range(len(w)):
        q = schmidt_spectrum(v[:, i], space)
        maxs[i] = q[0]
        # a level has full rank on A only if d_A coefficients are present
        mins[i] = q[-1] if space.d_a <= space.d_b else 0.0
    ground_degenerate = bool(len(w) > 1 and energies[1] < tol.deg * norm)
    ground_full_rank = bool(mins[0] > tol.rank)
    return SpectralData(
        energies=energies,
        schmidt_mins=mins,
        schmidt_maxs=maxs,
        ground_degenerate=ground_degenerate,
        ground_full_rank=ground_full_rank,
    )


def _require_usable_ground(sd: SpectralData) -> None:
    if sd.ground_degenerate:
        raise GroundStateError("ground level is degenerate")
    if not sd.ground_full_rank:
        raise GroundStateError("ground state does not have full Schmidt rank on A")


def _excited_cap(sd: SpectralData) -> float:
    vals = sd.energies[1:] * sd.schmidt_maxs[1:] ** 2
    cap = float(np.max(vals))
    if cap <= 0.0:
        raise CplpError("excited spectrum carries no weight; bound undefined")
    return cap


def _population_floor(gap_term: float, cap: float, lam: float) -> float:
    # shared between the direct criterion and its buffered-region variant so
    # that lam = 0 reproduces the direct value exactly
    return (1.0 + lam / cap) / (1.0 + gap_term / cap)


def threshold_population(sd: SpectralData) -> float:
    """Ground population above which every eigenmixture is passive."""
    _require_usable_ground(sd)
    gap_term = float(sd.energies[1]) * float(sd.schmidt_mins[0]) ** 2
    return _population_floor(gap_term, _excited_cap(sd), 0.0)


def _thermal_stats(energies: np.ndarray, beta: float) -> tuple[float, float]:
    """(mean energy, ground population) on the shifted spectrum."""
    weights = np.exp(-beta * energies)
    z = float(np.sum(weights))
    return float(np.dot(energies, weights)) / z, float(weights[0]) / z


def threshold_temperature_bound(sd: SpectralData) -> TemperatureBound:
    """Temperature below which thermal states are certified passive.

    Solves mean_energy(beta) = E1 * p0(beta) * q0_min^2 on a log grid; the
    left side dominates at high temperature and vanishes at low, so the
    crossing marks the edge of the certified region.
    """
    _require_usable_ground(sd)
    e1 = float(sd.energies[1])
    q2 = float(sd.schmidt_mins[0]) ** 2

    def margin(beta: float) -> float:
        mean, p0 = _thermal_stats(sd.energies, beta)
        return mean - e1 * p0 * q2

    lo, hi = _BISECT_WINDOW
    grid = np.logspace(np.log10(lo), np.log10(hi), 64)
    values = np.array([margin(b) for b in grid])
    monotone = bool(np.all(np.diff(values) <= 1e-12 * max(1.0, float(np.max(np.abs(values))))))
    if values[0] <= 0.0:
        # already certified at the hottest scanned temperature
        return TemperatureBound(beta=lo, t=1.0 / lo, bracketed=False, monotone=monotone)
    if values[-1] > 0.0:
        return TemperatureBound(beta=hi, t=1.0 / hi, bracketed=False, monotone=monotone)
    for _ in range(_BISECT_STEPS):
        mid = np.sqrt(lo * hi)
        if margin(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    beta = float(np.sqrt(lo * hi))
    return TemperatureBound(beta=beta, t=1.0 / beta, bracketed=True, monotone=monotone)


def frustration(
    h_total: HermitianOperator,
    h_a: HermitianOperator,
    h_b: HermitianOperator,
    v: HermitianOperator,
    space: BipartiteSpace,
    tol: Tolerances = DEFAULT,
) -> FrustrationResult:
    """Ground-energy mismatch of a local-plus-interaction decomposition.

    Returns the decomposition's frustration energy together with both sides
    of the entanglement consequence: frustration_energy / local_gap bounds
    1 - q0_max (and that bounds (d_A - 1) q0_min) from above.
    """
    if h_a.dim != space.d_a or h_b.dim != space.d_b or v.dim != space.dim:
        raise DimensionMismatch("decomposition dimensions do not match the space")
    assembled = (
        np.kron(h_a.mat, np.eye(space.d_b))
        + np.kron(np.eye(space.d_a), h_b.mat)
        + v.mat
    )
    scale = max(1.0, float(np.max(np.abs(h_total.mat))))
    if np.max(np.abs(assembled - h_total.mat)) > 1e-9 * scale:
        raise CplpError("h_total does not equal h_a + h_b + interaction")

    wa = np.linalg.eigvalsh(h_a.mat)
    wb = np.linalg.eigvalsh(h_b.mat)
    e0_local = float(wa[0]) + float(wb[0])
    e0_v = float(np.linalg.eigvalsh(v.mat)[0])
    w, vecs = eig_hermitian(h_total)
    e_f = float(w[0]) - e0_local - e0_v
    if e_f < -1e-9 * scale:
        raise CplpError(f"frustration energy {e_f:.3e} negative beyond tolerance")

    gap_a = float(wa[1] - wa[0]) if len(wa) > 1 else 0.0
    gap_b = float(wb[1] - wb[0]) if len(wb) > 1 else 0.0
    local_gap = max(gap_a, gap_b)
    q = schmidt_spectrum(vecs[:, 0], space)
    q0_max = float(q[0])
    q0_min = float(q[-1]) if space.d_a <= space.d_b else 0.0
    ratio = e_f / local_gap if local_gap > 0 else np.inf
    return FrustrationResult(
        frustration_energy=e_f,
        local_gap=local_gap,
        gap_ratio=ratio,
        schmidt_defect=1.0 - q0_max,
        rank_defect=(space.d_a - 1) * q0_min,
    )


def _sign_operator(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return (v * np.sign(w)) @ v.conj().T


def clustering_estimate(
    rho: DensityMatrix,
    region_split: BipartiteSpace,
    restarts: int = 5,
    seed: int = 0,
) -> float:
    """Lower bound on the strongest two-region correlation of a state.

    Alternating ascent over unit-norm Hermitian observables: for a fixed
    observable on one side the optimal partner is the sign function of the
    contracted correlation operator, with value equal to its trace norm.
    The result certifies correlations from below; it is not an upper bound.
    """
    if region_split.dim != rho.space.dim:
        raise DimensionMismatch("region split does not match state dimension")
    if rho.space.dim > 1024:
        raise CplpError("state too large for dense correlation estimation")
    d_a, d_b = region_split.d_a, region_split.d_b
    r_a = partial_trace(rho.op, region_split, "B").mat
    r_b = partial_trace(rho.op, region_split, "A").mat
    delta = rho.mat - np.kron(r_a, r_b)
    d4 = delta.reshape(d_a, d_b, d_a, d_b)

    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        g = rng.standard_normal((d_b, d_b)) + 1j * rng.standard_normal((d_b, d_b))
        n_obs = (g + g.conj().T) / 2.0
        n_obs /= max(1e-300, float(np.max(np.abs(np.linalg.eigvalsh(n_obs)))))
        value = 0.0
        for _ in range(200):
            contracted_a = np.einsum("bd,adcb->ac", n_obs, d4, optimize=True)
            m_obs = _sign_operator(contracted_a)
            contracted_b = np.einsum("ac,adcb->db", m_obs, d4, optimize=True)
            n_obs = _sign_operator(contracted_b)
            new = float(np.sum(np.abs(np.linalg.eigvalsh(contracted_b))))
            if value > 0 and abs(new - value) <= 1e-8 * value:
                value = new
                break
            value = new
        best = max(best, value)
    return best


def shielded_region_check(inputs: ShieldedRegionInputs) -> ShieldedRegionReport:
    """Criterion for passivity to survive an arbitrarily large far region.

    Compares the buffered system's gap-entanglement product against the
    correlation leakage lambda(l); when the condition holds, p0_bound is
    the ground population the buffered thermal state must reach, and
    beta_star_hint inverts it to an inverse temperature.
    """
    sd = inputs.spectral
    _require_usable_ground(sd)
    if inputs.k_const <= 0 or inputs.c1 < 0 or inputs.c2 <= 0:
        raise ValueError("constants must be positive (c1 may be zero)")
    if inputs.distance <= 0:
        raise ValueError("buffer distance must be positive")
    half = inputs.decay_fn(inputs.distance / 2.0)
    full = inputs.decay_fn(inputs.distance)
    if half < 0 or full < 0 or full > half + 1e-12:
        raise ValueError("decay envelope must be nonnegative and nonincreasing")

    lam = (
        inputs.k_const
        * inputs.d_a**2
        * inputs.h_a_norm
        * inputs.boundary_fn(inputs.distance)
        * (half + inputs.c1 * np.exp(-inputs.c2 * inputs.distance))
    )
    gap_term = float(sd.energies[1]) * float(sd.schmidt_mins[0]) ** 2
    condition = bool(gap_term > lam)
    cap = _excited_cap(sd)
    p0_bound = _population_floor(gap_term, cap, lam)

    hint = float("nan")
    if condition:
        lo, hi = _BISECT_WINDOW
        _, p_lo = _thermal_stats(sd.energies, lo)
        _, p_hi = _thermal_stats(sd.energies, hi)
        if p0_bound <= p_lo:
            hint = lo
        elif p0_bound >= p_hi:
            hint = hi
        else:
            for _ in range(_BISECT_STEPS):
                mid = np.sqrt(lo * hi)
                if _thermal_stats(sd.energies, mid)[1] < p0_bound:
                    lo = mid
                else:
                    hi = mid
            hint = float(np.sqrt(lo * hi))
    return ShieldedRegionReport(
        lambda_l=float(lam),
        condition_holds=condition,
        p0_bound=float(p0_bound),
        beta_star_hint=hint,
    )
