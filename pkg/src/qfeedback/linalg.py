"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Bipartite operators use the tensor ordering (in ⊗ out) throughout: the first
factor is the channel input system, the second the output system.
"""
from __future__ import annotations

import math

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-9
JACOBI_OFFDIAG_TOL = 1e-13
_MAX_SWEEPS = 60

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


class NotHermitianError(ValueError):
    """Raised when a matrix asserted Hermitian is not, within tolerance."""

    def __init__(self, i: int, j: int, deviation: float):
        self.i, self.j, self.deviation = i, j, deviation
        super().__init__(
            f"matrix is not Hermitian: |A[{i},{j}] - conj(A[{j},{i}])| = {deviation:.3e}"
        )


def as_matrix(a, dims=(2, 4)) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise ValueError(f"expected a square matrix of dimension in {dims}, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    """Raise :class:`NotHermitianError` naming the worst entry pair."""
    dev = np.abs(h - dagger(h))
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[i, j] > tol:
        raise NotHermitianError(int(i), int(j), float(dev[i, j]))


def _offdiag_norm(a: list[list[complex]]) -> float:
    n = len(a)
    return math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))


def eigh_jacobi(h, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a small Hermitian matrix by cyclic Jacobi sweeps.

    Each rotation first removes the phase of the pivot ``a[p][q]`` and then
    applies a real Givens rotation, so the working matrix stays Hermitian.
    Sweeps run until the off-diagonal Frobenius norm drops to 1e-13 (relative
    to the matrix norm when that exceeds one).

    Returns ``(values, vectors)`` with values ascending and eigenvectors as
    columns, so that ``h ≈ V diag(w) V†``.
    """
    m = as_matrix(h)
    check_hermitian(m, tol)
    n = m.shape[0]
    # Python lists beat numpy for 4x4 element-wise updates.
    a = [[complex(m[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        a[i][i] = complex(a[i][i].real, 0.0)
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    scale = max(1.0, float(np.linalg.norm(m)))
    threshold = JACOBI_OFFDIAG_TOL * scale

    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag  # e^{i phi}
                app, aqq = a[p][p].real, a[q][q].real
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # G restricted to (p, q): [[c, s], [-s*conj(phase), c*conj(phase)]]
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * phase.conjugate(), c * phase.conjugate()
                # a <- a G
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = akp * g_pp + akq * g_qp
                    a[k][q] = akp * g_pq + akq * g_qq
                # a <- G^† a
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = g_pp * apk + g_qp.conjugate() * aqk
                    a[q][k] = g_pq * apk + g_qq.conjugate() * aqk
                a[p][q] = a[q][p] = 0j
                a[p][p] = complex(a[p][p].real, 0.0)
                a[q][q] = complex(a[q][q].real, 0.0)
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = vkp * g_pp + vkq * g_qp
                    v[k][q] = vkp * g_pq + vkq * g_qq
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    return w[order], np.array(v, dtype=complex)[:, order]


def eig_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a 2x2 or 4x4 Hermitian matrix."""
    return eigh_jacobi(h, tol)[0]


def min_eig(h) -> float:
    return float(eig_hermitian(h)[0])


def is_psd(h, tol: float = PSD_TOL) -> tuple[bool, float]:
    """Return ``(min_eig >= -tol, min_eig)``."""
    lo = min_eig(h)
    return lo >= -tol, lo


def _as_bipartite(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 bipartite operator, got shape {m.shape}")
    return m.reshape(2, 2, 2, 2)  # [in, out, in', out']


def partial_trace(m, over: str = "out") -> np.ndarray:
    """Partial trace of a 4x4 (in ⊗ out) operator over ``"in"`` or ``"out"``."""
    t = _as_bipartite(m)
    if over == "out":
        return np.einsum("ikjk->ij", t)
    if over == "in":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"over must be 'in' or 'out', got {over!r}")


def partial_transpose_out(m) -> np.ndarray:
    """Transpose the second (out) tensor factor of a 4x4 operator."""
    t = _as_bipartite(m)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def max_abs(a) -> float:
    return float(np.max(np.abs(a)))


def phase_aligned_distance(a, b) -> float:
    """max|a - e^{iφ} b| with φ = arg Tr(b† a), the best-aligning global phase."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ov = np.vdot(b, a)
    phase = ov / abs(ov) if abs(ov) > 0 else 1.0
    return max_abs(a - phase * b)
