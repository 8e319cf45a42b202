"""Incoherent case: state and Hamiltonian diagonal in a product basis.

With both operators diagonal, a local channel only acts as a column-
stochastic relabeling of A's classical states, and the best channel is a
deterministic map (the objective is linear, so an extreme point wins).
Everything reduces to a matrix of conditional energies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidState

__all__ = [
    "ClassicalInstance",
    "ClassicalResult",
    "SupportCondition",
    "classical_instance",
    "solve_classical",
    "check_support_condition",
]

_TIE = 1e-12


@dataclass(frozen=True)
class ClassicalInstance:
    """Joint energies and populations over product labels (i, j).

    Rows and columns are permuted at construction toward the convention
    that energies increase along each index; `ordered` records whether
    that succeeded.  The permutations applied are kept so callers can map
    targets back to their original labels.
    """

    energies: np.ndarray
    populations: np.ndarray
    row_order: tuple[int, ...]
    col_order: tuple[int, ...]
    ordered: bool

    @property
    def d_a(self) -> int:
        return self.energies.shape[0]

    @property
    def d_b(self) -> int:
        return self.energies.shape[1]


@dataclass(frozen=True)
class ClassicalResult:
    """Optimal deterministic relabeling of A and its energy change.

    e_tilde[i, k] is the energy after sending label k to label i; the
    instance is passive exactly when keeping every label is optimal.
    """

    e_tilde: np.ndarray
    optimal_targets: tuple[int, ...]
    delta_e: float
    is_passive: bool


@dataclass(frozen=True)
class SupportCondition:
    """Necessary support pattern for passivity with strictly split energies.

    applicable is False when the instance could not be put in increasing
    order; the row-by-row comparison is only meaningful there.
    """

    holds: bool
    witnesses: tuple[tuple[int, int], ...]
    applicable: bool


def classical_instance(energies, populations) -> ClassicalInstance:
    """Validate and canonicalize a classical energy/population pair."""
    e = np.array(energies, dtype=float)
    p = np.array(populations, dtype=float)
    if e.ndim != 2 or e.shape[0] < 1 or e.shape[1] < 1:
        raise DimensionMismatch(f"energies must be a 2d matrix, got shape {e.shape}")
    if p.shape != e.shape:
        raise DimensionMismatch(
            f"populations shape {p.shape} does not match energies {e.shape}"
        )
    if np.any(p < -1e-12):
        raise InvalidState("negative population")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-10:
        raise InvalidState(f"populations sum to {total}, not 1")
    p = np.clip(p, 0.0, None)

    # sorting by marginal sums finds the increasing order whenever one
    # exists; both matrices are permuted together, which keeps the physics
    rows = tuple(int(i) for i in np.argsort(e.sum(axis=1), kind="stable"))
    cols = tuple(int(j) for j in np.argsort(e.sum(axis=0), kind="stable"))
    e = e[np.ix_(rows, cols)]
    p = p[np.ix_(rows, cols)]
    scale = max(1.0, float(np.max(np.abs(e))))
    ordered = bool(
        np.all(np.diff(e, axis=0) >= -1e-12 * scale)
        and np.all(np.diff(e, axis=1) >= -1e-12 * scale)
    )
    return ClassicalInstance(
        energies=e, populations=p, row_order=rows, col_order=cols, ordered=ordered
    )


def solve_classical(inst: ClassicalInstance) -> ClassicalResult:
    """Best deterministic local relabeling and its energy change.

    Ties in a column count for the current label, so borderline instances
    are reported passive (zero extraction) rather than relabeled for free.
    """
    e_tilde = inst.energies @ inst.populations.T
    scale = max(1.0, float(np.max(np.abs(e_tilde))))
    targets = []
    delta = 0.0
    for k in range(inst.d_a):
        col = e_tilde[:, k]
        lo = float(col.min())
        if col[k] <= lo + _TIE * scale:
            targets.append(k)
        else:
            targets.append(int(np.argmin(col)))
            delta += lo - float(col[k])
    passive = all(t == k for k, t in enumerate(targets))
    return ClassicalResult(
        e_tilde=e_tilde,
        optimal_targets=tuple(targets),
        delta_e=0.0 if passive else delta,
        is_passive=passive,
    )


def check_support_condition(inst: ClassicalInstance) -> SupportCondition:
    """Where may populations live if the instance is to be passive.

    For every label k > 0 and every j, either p[k, j] vanishes or the
    energies of rows k-1 and k agree at j; otherwise dropping k to k-1
    strictly helps somewhere.  Only meaningful in increasing order.
    """
    if not inst.ordered:
        return SupportCondition(holds=False, witnesses=(), applicable=False)
    e, p = inst.energies, inst.populations
    scale = max(1.0, float(np.max(np.abs(e))))
    witnesses = [
        (k, j)
        for k in range(1, inst.d_a)
        for j in range(inst.d_b)
        if p[k, j] > 1e-12 and abs(e[k - 1, j] - e[k, j]) > 1e-12 * scale
    ]
    return SupportCondition(
        holds=not witnesses, witnesses=tuple(witnesses), applicable=True
    )
