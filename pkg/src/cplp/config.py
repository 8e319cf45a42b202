"""Shared numerical tolerances.

Every numeric decision in the package (hermiticity acceptance, positivity
verdicts, spectral-degeneracy detection) goes through one Tolerances record
so the knobs live in a single place.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Tolerance knobs threaded through all numerical decisions.

    herm : relative bound on max|M - M^dag| when accepting a matrix as
           Hermitian, measured against the largest entry magnitude
    psd  : slack on smallest eigenvalues in positivity verdicts, scaled by
           max(1, operator norm)
    eig  : relative bound on eigendecomposition reconstruction error
    deg  : relative spectral-gap threshold below which a ground state is
           treated as degenerate
    rank : absolute floor below which a Schmidt weight counts as zero
    """

    herm: float = 1e-10
    psd: float = 1e-9
    eig: float = 1e-8
    deg: float = 1e-8
    rank: float = 1e-12


DEFAULT = Tolerances()

ENV_TOL = "CPLP_TOL"


def solver_tolerance(default: float = 1e-8) -> float:
    """Solver tolerance; the CPLP_TOL environment variable overrides `default`."""
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return default
    return float(raw)
