"""Single-qubit states, the two task inputs, Bloch geometry, fidelity and trace distance.

Pure states are length-2 complex arrays; mixed states are 2x2 density
matrices. Global phases of pure states are left alone; compare states through
:func:`fidelity` rather than amplitudes.
"""
from __future__ import annotations

import math

import numpy as np

from .linalg import HERMITIAN_TOL, I2, X, Y, Z, check_hermitian, eig_hermitian

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / math.sqrt(2)
KET_PLUS_I = np.array([1, 1j], dtype=complex) / math.sqrt(2)
KET_MINUS_I = np.array([1, -1j], dtype=complex) / math.sqrt(2)


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 <= theta <= math.pi / 2) or math.isnan(theta):
        raise ValueError(f"theta must lie in [0, pi/2], got {theta}")
    return theta


def prepare_input(theta: float, which: int) -> np.ndarray:
    """|ψ1> = cos(θ/2)|+> + sin(θ/2)|->, |ψ2> = cos(θ/2)|+> - sin(θ/2)|->.

    The two states straddle the equator in the x-z plane at latitude ±θ,
    with overlap <ψ1|ψ2> = cos θ.
    """
    theta = check_theta(theta)
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    sign = 1.0 if which == 1 else -1.0
    return math.cos(theta / 2) * KET_PLUS + sign * math.sin(theta / 2) * KET_MINUS


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def check_density(rho, tol: float = 1e-10) -> np.ndarray:
    """Validate a 2x2 density matrix (Hermitian, unit trace, PSD) and return it."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"density matrix must be 2x2, got {rho.shape}")
    check_hermitian(rho, HERMITIAN_TOL)
    if abs(np.trace(rho) - 1) > HERMITIAN_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    lo = eig_hermitian(rho)[0]
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def bloch(rho) -> np.ndarray:
    """Bloch vector (rx, ry, rz) with ρ = (I + rx X + ry Y + rz Z)/2."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ P).real for P in (X, Y, Z)])


def density_from_bloch(r) -> np.ndarray:
    rx, ry, rz = r
    return 0.5 * (I2 + rx * X + ry * Y + rz * Z)


def fidelity(psi, rho) -> float:
    """F(|ψ>, ρ) = <ψ|ρ|ψ>."""
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(np.vdot(psi, np.asarray(rho) @ psi)))


def trace_distance(rho1, rho2) -> float:
    """½ Tr|ρ1 - ρ2|, so orthogonal pure states sit at distance 1."""
    diff = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)
    return 0.5 * float(np.sum(np.abs(eig_hermitian(diff))))


def random_density(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random point in the Bloch ball."""
    while True:
        r = rng.uniform(-1, 1, size=3)
        if r @ r <= 1:
            return density_from_bloch(r)
