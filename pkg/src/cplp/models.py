"""Reference Hamiltonian families and state constructions.

Two families cover everything the scans need: a two-qubit block with three
coupling forms, and an open XY spin chain in a transverse field whose A
region is a prefix of sites.  Site 1 is the leftmost tensor factor, so a
prefix region lines up with the flat-index convention without any
permutation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import InvalidState, ModelError
from .operators import (
    BipartiteSpace,
    DensityMatrix,
    HermitianOperator,
    boltzmann_weights,
    density_matrix,
    eig_hermitian,
    herm,
)

__all__ = [
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "TwoQubitSpec",
    "SpinChainSpec",
    "build_two_qubit",
    "build_chain",
    "two_qubit_split",
    "chain_split",
    "eigenmixture",
    "rotated_thermal",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_ID2 = np.eye(2, dtype=complex)

TWO_QUBIT_FORMS = ("xy_symmetric", "xx_only", "anisotropic")
MAX_CHAIN_SITES = 12


@dataclass(frozen=True)
class TwoQubitSpec:
    """Two-qubit Hamiltonian parameters.

    form selects the coupling:
      xy_symmetric : omega/2 (Z1 + Z2) + kappa/2 (XX + YY)
      xx_only      : kappa XX
      anisotropic  : Z1 + Z2 + kappa ((1+gamma)/2 XX + (1-gamma)/2 YY)
    omega only enters xy_symmetric; gamma only enters anisotropic.
    """

    form: str
    kappa: float
    omega: float = 0.0
    gamma: float = 0.0


@dataclass(frozen=True)
class SpinChainSpec:
    """Open XY chain in a transverse field, sites numbered from 1.

    H = field * sum_l Z_l
        + kappa * sum_l [(1+gamma)/2 X_l X_{l+1} + (1-gamma)/2 Y_l Y_{l+1}]

    a_region must be a contiguous prefix (1, ..., m) with m < n_sites.
    """

    n_sites: int
    kappa: float
    gamma: float
    field: float = 1.0
    a_region: tuple[int, ...] = (1,)


def build_two_qubit(spec: TwoQubitSpec, tol: Tolerances = DEFAULT):
    """Returns (HermitianOperator, BipartiteSpace) for a two-qubit spec."""
    h_a, h_b, v = _two_qubit_terms(spec)
    h = np.kron(h_a, _ID2) + np.kron(_ID2, h_b) + v
    return herm(h, tol), BipartiteSpace(2, 2)


def _two_qubit_terms(spec: TwoQubitSpec):
    xx = np.kron(PAULI_X, PAULI_X)
    yy = np.kron(PAULI_Y, PAULI_Y).real.astype(complex)
    if spec.form == "xy_symmetric":
        h_a = 0.5 * spec.omega * PAULI_Z
        h_b = 0.5 * spec.omega * PAULI_Z
        v = 0.5 * spec.kappa * (xx + yy)
    elif spec.form == "xx_only":
        h_a = np.zeros((2, 2), dtype=complex)
        h_b = np.zeros((2, 2), dtype=complex)
        v = spec.kappa * xx
    elif spec.form == "anisotropic":
        h_a = PAULI_Z.copy()
        h_b = PAULI_Z.copy()
        v = spec.kappa * (0.5 * (1.0 + spec.gamma) * xx + 0.5 * (1.0 - spec.gamma) * yy)
    else:
        raise ModelError(f"unknown two-qubit form {spec.form!r}; pick one of {TWO_QUBIT_FORMS}")
    return h_a, h_b, v


def two_qubit_split(spec: TwoQubitSpec, tol: Tolerances = DEFAULT):
    """Local terms and interaction: (h_a on A, h_b on B, v on the full space)."""
    h_a, h_b, v = _two_qubit_terms(spec)
    return herm(h_a, tol), herm(h_b, tol), herm(v, tol)


def _embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """op acts on `site` (0-based) of an n-qubit register, identity elsewhere."""
    factors = [_ID2] * n
    factors[site] = op
    return reduce(np.kron, factors)


def _embed_pair(op4: np.ndarray, site: int, n: int) -> np.ndarray:
    factors: list[np.ndarray] = []
    i = 0
    while i < n:
        if i == site:
            factors.append(op4)
            i += 2
        else:
            factors.append(_ID2)
            i += 1
    return reduce(np.kron, factors)


def _validate_chain(spec: SpinChainSpec) -> int:
    n = spec.n_sites
    if n < 2 or n > MAX_CHAIN_SITES:
        raise ModelError(f"n_sites must be in [2, {MAX_CHAIN_SITES}], got {n}")
    m = len(spec.a_region)
    if tuple(spec.a_region) != tuple(range(1, m + 1)) or not (1 <= m < n):
        raise ModelError(
            f"a_region must be a prefix (1, ..., m) with m < n_sites, got {spec.a_region}"
        )
    return m


def _chain_coupling(spec: SpinChainSpec) -> np.ndarray:
    xx = np.kron(PAULI_X, PAULI_X)
    yy = np.kron(PAULI_Y, PAULI_Y).real.astype(complex)
    return spec.kappa * (0.5 * (1.0 + spec.gamma) * xx + 0.5 * (1.0 - spec.gamma) * yy)


def build_chain(spec: SpinChainSpec, tol: Tolerances = DEFAULT):
    """Returns (HermitianOperator, BipartiteSpace) for an open chain.

    The bipartition puts the a_region prefix on A and the rest on B.
    """
    m = _validate_chain(spec)
    n = spec.n_sites
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    for site in range(n):
        h += spec.field * _embed(PAULI_Z, site, n)
    bond = _chain_coupling(spec)
    for site in range(n - 1):
        h += _embed_pair(bond, site, n)
    return herm(h, tol), BipartiteSpace(2**m, 2 ** (n - m))


def chain_split(spec: SpinChainSpec, tol: Tolerances = DEFAULT):
    """(h_a, h_b, v): everything inside A, everything inside B, the cut bond.

    With a contiguous prefix region only the single bond (m, m+1) crosses
    the cut, so v is that bond embedded in the full space.
    """
    m = _validate_chain(spec)
    n = spec.n_sites
    bond = _chain_coupling(spec)

    dim_a = 2**m
    h_a = np.zeros((dim_a, dim_a), dtype=complex)
    for site in range(m):
        h_a += spec.field * _embed(PAULI_Z, site, m)
    for site in range(m - 1):
        h_a += _embed_pair(bond, site, m)

    nb = n - m
    dim_b = 2**nb
    h_b = np.zeros((dim_b, dim_b), dtype=complex)
    for site in range(nb):
        h_b += spec.field * _embed(PAULI_Z, site, nb)
    for site in range(nb - 1):
        h_b += _embed_pair(bond, site, nb)

    v = _embed_pair(bond, m - 1, n)
    return herm(h_a, tol), herm(h_b, tol), herm(v, tol)


def eigenmixture(
    h: HermitianOperator,
    populations,
    space: BipartiteSpace,
    tol: Tolerances = DEFAULT,
) -> DensityMatrix:
    """State diagonal in the eigenbasis of h with the given level populations.

    Populations follow ascending energy order.  On a degenerate spectrum the
    eigenbasis is not unique; the state is still built from the solver's
    basis but carries degenerate_basis=True and a warning is emitted.
    """
    p = np.asarray(populations, dtype=float)
    if p.ndim != 1 or p.size != h.dim:
        raise InvalidState(f"need {h.dim} populations, got shape {p.shape}")
    if np.any(p < -1e-12):
        raise InvalidState("negative population")
    if abs(p.sum() - 1.0) > 1e-10:
        raise InvalidState(f"populations sum to {p.sum()}, not 1")
    p = np.clip(p, 0.0, None)
    w, v = eig_hermitian(h, tol)
    scale = max(1.0, float(np.max(np.abs(w))))
    degenerate = bool(np.any(np.diff(w) < tol.deg * scale))
    if degenerate:
        warnings.warn(
            "degenerate spectrum: eigenmixture depends on the eigensolver's basis",
            stacklevel=2,
        )
    mat = (v * p) @ v.conj().T
    return density_matrix(mat, space, tol, degenerate_basis=degenerate)


def rotated_thermal(
    h: HermitianOperator,
    beta: float,
    generator: HermitianOperator,
    space: BipartiteSpace,
    tol: Tolerances = DEFAULT,
) -> DensityMatrix:
    """U exp(-beta h)/Z U^dag with U = exp(i * generator)."""
    if generator.dim != h.dim:
        raise InvalidState(
            f"generator dimension {generator.dim} does not match hamiltonian {h.dim}"
        )
    w, v = eig_hermitian(h, tol)
    p = boltzmann_weights(w, beta, tol)
    g_w, g_v = eig_hermitian(generator, tol)
    u = (g_v * np.exp(1j * g_w)) @ g_v.conj().T
    mat = u @ ((v * p) @ v.conj().T) @ u.conj().T
    return density_matrix(mat, space, tol)
