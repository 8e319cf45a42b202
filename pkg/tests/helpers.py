"""Independent oracles used across the test suite.

Everything here recomputes quantities along a different path than the
package (explicit loops instead of reshapes, Kraus application instead of
Choi contraction, exhaustive enumeration instead of optimization) so that a
shared bug cannot hide.
"""

from __future__ import annotations

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# loop-based bipartite index arithmetic
# ---------------------------------------------------------------------------

def flat(i: int, j: int, d_b: int) -> int:
    return i * d_b + j


def ptrace_loops(mat: np.ndarray, d_a: int, d_b: int, which: str) -> np.ndarray:
    """Partial trace by explicit summation over basis indices."""
    if which == "A":
        out = np.zeros((d_b, d_b), dtype=complex)
        for j in range(d_b):
            for jp in range(d_b):
                for i in range(d_a):
                    out[j, jp] += mat[flat(i, j, d_b), flat(i, jp, d_b)]
    elif which == "B":
        out = np.zeros((d_a, d_a), dtype=complex)
        for i in range(d_a):
            for ip in range(d_a):
                for j in range(d_b):
                    out[i, ip] += mat[flat(i, j, d_b), flat(ip, j, d_b)]
    else:
        raise ValueError(which)
    return out


def pt_a_loops(mat: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    out = np.zeros_like(mat)
    for i in range(d_a):
        for ip in range(d_a):
            for j in range(d_b):
                for jp in range(d_b):
                    out[flat(i, j, d_b), flat(ip, jp, d_b)] = mat[
                        flat(ip, j, d_b), flat(i, jp, d_b)
                    ]
    return out


def extraction_matrix_loops(rho: np.ndarray, h: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """Loop construction of the extraction operator on A x A'.

    C[(a,alpha),(a',alpha')] = sum_{b,b''} rho_pt[(a,b),(a',b'')] h[(alpha,b''),(alpha',b)]
    with rho_pt the partial transpose of rho on A.
    """
    rpt = pt_a_loops(rho, d_a, d_b)
    c = np.zeros((d_a * d_a, d_a * d_a), dtype=complex)
    for a in range(d_a):
        for al in range(d_a):
            for ap in range(d_a):
                for alp in range(d_a):
                    s = 0.0 + 0.0j
                    for b in range(d_b):
                        for bpp in range(d_b):
                            s += rpt[flat(a, b, d_b), flat(ap, bpp, d_b)] * h[
                                flat(al, bpp, d_b), flat(alp, b, d_b)
                            ]
                    c[a * d_a + al, ap * d_a + alp] = s
    return c


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2.0
    w = np.linalg.eigvalsh(h)
    top = float(np.max(np.abs(w)))
    if top > 0:
        h *= scale / top
    return h


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = rank or d
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(d: int, rng: np.random.Generator, env: int | None = None) -> np.ndarray:
    """Kraus operators of a random channel on C^d via a random isometry."""
    k = env or d
    g = rng.standard_normal((d * k, d)) + 1j * rng.standard_normal((d * k, d))
    q, _ = np.linalg.qr(g)  # isometry C^d -> C^d (x) C^k
    return q.reshape(d, k, d).transpose(1, 0, 2)  # (env, out, in)


def choi_from_kraus(kraus: np.ndarray) -> np.ndarray:
    """Choi matrix on input (x) output slots, trace over output slot = I."""
    # E4[i, m, j, n] = <m|E(|i><j|)|n> = sum_k K[k, m, i] conj(K[k, n, j])
    d = kraus.shape[2]
    e4 = np.einsum("kmi,knj->imjn", kraus, kraus.conj())
    return e4.reshape(d * d, d * d)


def apply_kraus(kraus: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("kmi,ij,knj->mn", kraus, x, kraus.conj())


def apply_kraus_to_a(kraus: np.ndarray, rho: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    r4 = rho.reshape(d_a, d_b, d_a, d_b)
    out = np.einsum("kmi,ibjc,knj->mbnc", kraus, r4, kraus.conj())
    return out.reshape(d_a * d_b, d_a * d_b)


# ---------------------------------------------------------------------------
# exhaustive classical optimum
# ---------------------------------------------------------------------------

def classical_brute_force(energies: np.ndarray, populations: np.ndarray) -> float:
    """Minimum energy change over all deterministic relabelings of A."""
    d_a = energies.shape[0]
    e_tilde = energies @ populations.T
    best = 0.0
    for f in itertools.product(range(d_a), repeat=d_a):
        val = sum(e_tilde[f[k], k] - e_tilde[k, k] for k in range(d_a))
        best = min(best, val)
    return best


# ---------------------------------------------------------------------------
# channel-as-superoperator quantities
# ---------------------------------------------------------------------------

def superop_trace(choi: np.ndarray, d: int) -> float:
    """Trace of the channel as a linear map on d x d matrices."""
    e4 = choi.reshape(d, d, d, d)
    return float(np.real(np.einsum("iijj->", e4)))


def sampled_one_one_norm(choi: np.ndarray, d: int, rng: np.random.Generator, samples: int = 1000) -> float:
    """Lower bound on the 1->1 norm of (id - E) from random pure dyads."""
    e4 = choi.reshape(d, d, d, d)
    best = 0.0
    for _ in range(samples):
        u = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        dyad = np.outer(u, v.conj())
        img = np.einsum("ij,imjn->mn", dyad, e4)
        diff = dyad - img
        val = float(np.sum(np.linalg.svd(diff, compute_uv=False)))
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# feasibility heuristic for the extraction program (second solver oracle)
# ---------------------------------------------------------------------------

def _project_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def _project_marginal(m: np.ndarray, d: int) -> np.ndarray:
    tr_out = np.einsum("imjm->ij", m.reshape(d, d, d, d))
    corr = (np.eye(d) - tr_out) / d
    return m + np.kron(corr, np.eye(d))


def project_feasible(m: np.ndarray, d: int, iters: int = 60) -> np.ndarray:
    """Dykstra projection onto {E >= 0, trace over output slot = I}."""
    x = m.copy()
    p = np.zeros_like(m)
    q = np.zeros_like(m)
    for _ in range(iters):
        y = _project_psd(x + p)
        p = x + p - y
        x = _project_marginal(y + q, d)
        q = y + q - x
    return x


def projected_gradient_value(c: np.ndarray, d: int, iters: int = 1500) -> float:
    """Approximate optimum of <C, E> over the feasible set by projected descent."""
    n = d * d
    e = np.eye(n, dtype=complex) / d
    lip = float(np.max(np.abs(np.linalg.eigvalsh(c))))
    step = 1.0 / max(lip, 1e-12)
    best = float(np.real(np.trace(c @ e)))
    for t in range(iters):
        e = project_feasible(e - step / np.sqrt(t + 1.0) * c, d, iters=40)
        val = float(np.real(np.trace(c @ e)))
        best = min(best, val)
    return best
