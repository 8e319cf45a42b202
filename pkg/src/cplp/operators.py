"""Dense complex linear algebra on bipartite Hilbert spaces.

The composite basis |i>_A |j>_B maps to flat index i * d_b + j.  Every
reshape, partial trace, partial transpose and channel construction in the
package relies on that one convention; the operator identities in the test
suite pin it down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, InvalidState, NotHermitian

__all__ = [
    "HermitianOperator",
    "BipartiteSpace",
    "DensityMatrix",
    "herm",
    "density_matrix",
    "tensor",
    "partial_trace",
    "partial_transpose_a",
    "eig_hermitian",
    "boltzmann_weights",
    "gibbs",
    "schmidt_spectrum",
    "op_norm",
    "trace_norm",
]


def _lock(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex, order="C")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HermitianOperator:
    """Square complex matrix certified Hermitian (within tolerance) at build time."""

    mat: np.ndarray
    residual: float

    @property
    def dim(self) -> int:
        return int(self.mat.shape[0])


@dataclass(frozen=True)
class BipartiteSpace:
    """Dimensions of a bipartite split; |i>_A |j>_B sits at flat index i*d_b + j."""

    d_a: int
    d_b: int

    def __post_init__(self) -> None:
        if self.d_a < 1 or self.d_b < 1:
            raise DimensionMismatch(
                f"bipartite dimensions must be >= 1, got ({self.d_a}, {self.d_b})"
            )

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive operator attached to a bipartite space.

    degenerate_basis marks states assembled from an eigenbasis that was not
    unique (degenerate spectrum), so downstream results may depend on the
    eigensolver's arbitrary choice.
    """

    space: BipartiteSpace
    op: HermitianOperator
    degenerate_basis: bool = False

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat


def herm(mat, tol: Tolerances = DEFAULT) -> HermitianOperator:
    """Validate and wrap a matrix as a HermitianOperator.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.
    tol : Tolerances
        max|M - M^dag| must stay below tol.herm relative to the largest
        entry magnitude, else NotHermitian is raised.
    """
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    residual = float(np.max(np.abs(m - m.conj().T)))
    scale = float(np.max(np.abs(m)))
    if residual > tol.herm * max(scale, 1e-300):
        raise NotHermitian(
            f"hermiticity residual {residual:.3e} above {tol.herm:.1e} * {scale:.3e}"
        )
    return HermitianOperator(_lock(m), residual)


def density_matrix(
    mat,
    space: BipartiteSpace,
    tol: Tolerances = DEFAULT,
    degenerate_basis: bool = False,
) -> DensityMatrix:
    """Validate trace one and positivity, then wrap as a DensityMatrix."""
    op = herm(mat, tol)
    if op.dim != space.dim:
        raise DimensionMismatch(
            f"operator dimension {op.dim} does not match space {space.d_a}x{space.d_b}"
        )
    tr = complex(np.trace(op.mat))
    if abs(tr - 1.0) > 1e-10:
        raise InvalidState(f"trace {tr} is not 1 within 1e-10")
    lam = float(np.linalg.eigvalsh(op.mat)[0])
    if lam < -tol.psd:
        raise InvalidState(f"smallest eigenvalue {lam:.3e} below -{tol.psd:.1e}")
    return DensityMatrix(space, op, degenerate_basis)


def tensor(x: HermitianOperator, y: HermitianOperator, tol: Tolerances = DEFAULT) -> HermitianOperator:
    """Kronecker product; index order matches the flat-index convention."""
    return herm(np.kron(x.mat, y.mat), tol)


# Raw-array helpers shared inside the package.  They assume the flat-index
# convention above and do no validation.

def _as4(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return mat.reshape(d_a, d_b, d_a, d_b)


def _ptrace_a_arr(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return np.einsum("abad->bd", _as4(mat, d_a, d_b))


def _ptrace_b_arr(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    return np.einsum("abcb->ac", _as4(mat, d_a, d_b))


def _pt_a_arr(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    # transpose the A indices only, in the computational basis
    return _as4(mat, d_a, d_b).transpose(2, 1, 0, 3).reshape(d_a * d_b, d_a * d_b)


def partial_trace(
    m: HermitianOperator, space: BipartiteSpace, which: str, tol: Tolerances = DEFAULT
) -> HermitianOperator:
    """Trace out one factor.

    Parameters
    ----------
    which : {"A", "B"}
        Factor to remove; the result lives on the other one.
    """
    if m.dim != space.dim:
        raise DimensionMismatch(
            f"operator dimension {m.dim} does not match space {space.d_a}x{space.d_b}"
        )
    w = which.upper()
    if w == "A":
        out = _ptrace_a_arr(m.mat, space.d_a, space.d_b)
    elif w == "B":
        out = _ptrace_b_arr(m.mat, space.d_a, space.d_b)
    else:
        raise InvalidState(f"which must be 'A' or 'B', got {which!r}")
    return herm(out, tol)


def partial_transpose_a(
    m: HermitianOperator, space: BipartiteSpace, tol: Tolerances = DEFAULT
) -> HermitianOperator:
    """Partial transpose on the A factor, computational basis."""
    if m.dim != space.dim:
        raise DimensionMismatch(
            f"operator dimension {m.dim} does not match space {space.d_a}x{space.d_b}"
        )
    return herm(_pt_a_arr(m.mat, space.d_a, space.d_b), tol)


def eig_hermitian(m: HermitianOperator, tol: Tolerances = DEFAULT):
    """Eigendecomposition with an explicit reconstruction check.

    Returns
    -------
    (w, v) : eigenvalues ascending, eigenvectors as columns of a unitary.
    """
    try:
        w, v = np.linalg.eigh(m.mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise InvalidState(f"eigensolver did not converge: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(w))))
    if m.dim <= 512:
        resid = float(np.max(np.abs((v * w) @ v.conj().T - m.mat)))
    else:
        # full reconstruction is O(dim^3); spot-check on a few vectors instead
        rng = np.random.default_rng(0)
        x = rng.standard_normal((m.dim, 4)) + 1j * rng.standard_normal((m.dim, 4))
        x /= np.linalg.norm(x, axis=0)
        resid = float(np.max(np.abs(m.mat @ x - (v * w) @ (v.conj().T @ x))))
    if resid > tol.eig * scale:
        raise InvalidState(f"eigendecomposition residual {resid:.3e} above {tol.eig:.1e} * {scale:.3e}")
    return w, v


def boltzmann_weights(energies, beta: float, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Normalized thermal weights for a real spectrum.

    beta = inf returns a uniform distribution over the ground eigenspace,
    with membership decided by the degeneracy tolerance.
    """
    e = np.asarray(energies, dtype=float)
    if e.ndim != 1 or e.size < 1:
        raise InvalidState(f"expected a 1-d spectrum, got shape {e.shape}")
    if beta < 0 or math.isnan(beta):
        raise InvalidState(f"inverse temperature must be >= 0, got {beta}")
    if math.isinf(beta):
        scale = max(1.0, float(np.max(np.abs(e))))
        w = (e - e.min() <= tol.deg * scale).astype(float)
    else:
        w = np.exp(-beta * (e - e.min()))
    return w / w.sum()


def gibbs(
    h: HermitianOperator, beta: float, space: BipartiteSpace, tol: Tolerances = DEFAULT
) -> DensityMatrix:
    """Thermal state exp(-beta h) / Z on the given space.

    The spectrum is shifted by its minimum before exponentiating, so large
    beta stays finite; beta = inf yields the uniform ground-eigenspace
    mixture.
    """
    w, v = eig_hermitian(h, tol)
    p = boltzmann_weights(w, beta, tol)
    mat = (v * p) @ v.conj().T
    return density_matrix(mat, space, tol)


def schmidt_spectrum(vec, space: BipartiteSpace, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Reduced-state eigenvalues of a pure bipartite vector, descending.

    The vector must be unit norm; the result has min(d_a, d_b) entries
    summing to one.
    """
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if v.size != space.dim:
        raise DimensionMismatch(
            f"vector length {v.size} does not match space {space.d_a}x{space.d_b}"
        )
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > 1e-8:
        raise InvalidState(f"vector norm {n} is not 1 within 1e-8")
    s = np.linalg.svd(v.reshape(space.d_a, space.d_b), compute_uv=False)
    q = s * s
    return np.sort(q)[::-1]


def op_norm(m: HermitianOperator) -> float:
    """Largest absolute eigenvalue."""
    w = np.linalg.eigvalsh(m.mat)
    return float(np.max(np.abs(w)))


def trace_norm(m: HermitianOperator) -> float:
    """Sum of absolute eigenvalues."""
    w = np.linalg.eigvalsh(m.mat)
    return float(np.sum(np.abs(w)))
