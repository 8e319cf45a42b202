"""Exact decision of local energy extraction.

A channel acting only on A changes the energy by tr[H (E_A (x) id_B) rho]
minus the starting energy.  That whole landscape compresses into one
Hermitian operator on A (x) A' (A' a copy of A):

    C[(a,alpha),(a',alpha')] = sum_{b,b''}
        rho_ptA[(a,b),(a',b'')] * H[(alpha,b''),(alpha',b)]

so the energy after any channel is tr[C E] with E the channel's Choi
operator (input slot A, output slot A', trace over A' equals identity).
No extraction is possible exactly when the candidate dual

    Y = ptrace_{A'}[ (d |phi><phi|) C ]   (|phi> maximally entangled)

is Hermitian and C - Herm(Y) (x) I is positive semidefinite.  The margin by
which positivity fails gives a guaranteed lower bound -eps * d_A on the
extractable energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, EnergyIdentityError
from .operators import (
    DensityMatrix,
    HermitianOperator,
    _pt_a_arr,
    herm,
)

__all__ = [
    "ExtractionOperator",
    "PassivityReport",
    "extraction_operator",
    "check_passivity",
    "extraction_bound",
]


@dataclass(frozen=True)
class ExtractionOperator:
    """Operator on A (x) A' whose pairing with Choi matrices gives post-channel energy.

    y_candidate is kept unsymmetrized: its hermiticity defect is itself part
    of the passivity verdict.
    """

    d_a: int
    matrix: HermitianOperator
    y_candidate: np.ndarray
    state_energy: float


@dataclass(frozen=True)
class PassivityReport:
    """Outcome of the exact check.

    lambda_min is the smallest eigenvalue of C - Herm(Y) (x) I; epsilon is
    its negative part, and -epsilon * d_A lower-bounds the optimal energy
    change.  borderline marks hermiticity defects within a factor 100 of
    the acceptance threshold.
    """

    is_passive: bool
    lambda_min: float
    herm_residual: float
    epsilon: float
    extraction_lower_bound: float
    borderline: bool


def extraction_operator(
    rho: DensityMatrix, h: HermitianOperator, tol: Tolerances = DEFAULT
) -> ExtractionOperator:
    """Build the extraction operator for a state and Hamiltonian.

    Validates the closure identity tr[C * d|phi><phi|] = tr[H rho] (the
    identity channel must reproduce the state energy); failure indicates an
    index-convention bug and aborts.
    """
    space = rho.space
    if h.dim != space.dim:
        raise DimensionMismatch(
            f"hamiltonian dimension {h.dim} does not match state space {space.d_a}x{space.d_b}"
        )
    d_a, d_b = space.d_a, space.d_b
    r4 = _pt_a_arr(rho.mat, d_a, d_b).reshape(d_a, d_b, d_a, d_b)
    h4 = h.mat.reshape(d_a, d_b, d_a, d_b)
    # C4[a, alpha, a', alpha'] = sum_{b, b''} r4[a, b, a', b''] h4[alpha, b'', alpha', b]
    c4 = np.einsum("abcd,edfb->aecf", r4, h4, optimize=True)
    c_mat = c4.reshape(d_a * d_a, d_a * d_a)
    # Y[i, j] = sum_a C4[a, a, j, i]
    y = np.einsum("aacd->dc", c4)

    state_energy = float(np.real(np.trace(rho.mat @ h.mat)))
    closure = float(np.real(np.einsum("aacc->", c4)))
    scale = max(1.0, float(np.max(np.abs(h.mat))), abs(state_energy))
    if abs(closure - state_energy) > 1e-9 * scale:
        raise EnergyIdentityError(
            f"identity-channel energy {closure!r} disagrees with tr[H rho] = {state_energy!r}"
        )
    return ExtractionOperator(d_a, herm(c_mat, tol), y, state_energy)


def check_passivity(c: ExtractionOperator, tol: Tolerances = DEFAULT) -> PassivityReport:
    """Exact verdict: no local channel extracts energy iff is_passive.

    The verdict needs both a Hermitian dual candidate and a PSD witness;
    epsilon is always evaluated on the symmetrized expression so the
    robustness bound stays valid either way.
    """
    y = c.y_candidate
    herm_residual = float(np.max(np.abs(y - y.conj().T)))
    y_sym = 0.5 * (y + y.conj().T)
    witness = c.matrix.mat - np.kron(y_sym, np.eye(c.d_a))
    lambda_min = float(np.linalg.eigvalsh(witness)[0])
    epsilon = max(0.0, -lambda_min)

    c_norm = float(np.max(np.abs(np.linalg.eigvalsh(c.matrix.mat))))
    herm_scale = max(1.0, float(np.max(np.abs(y))))
    herm_ok = herm_residual <= tol.herm * herm_scale
    borderline = (not herm_ok) and herm_residual <= 100.0 * tol.herm * herm_scale
    psd_ok = lambda_min >= -tol.psd * max(1.0, c_norm)
    return PassivityReport(
        is_passive=bool(herm_ok and psd_ok),
        lambda_min=lambda_min,
        herm_residual=herm_residual,
        epsilon=epsilon,
        extraction_lower_bound=-epsilon * c.d_a,
        borderline=borderline,
    )


def extraction_bound(c: ExtractionOperator, tol: Tolerances = DEFAULT) -> float:
    """Guaranteed lower bound on the optimal energy change: -epsilon * d_A."""
    return check_passivity(c, tol).extraction_lower_bound
