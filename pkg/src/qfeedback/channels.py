"""Quantum operations on one qubit: rotations, dephasing, weak measurement, Choi matrices.

Outcome labels follow the meter: outcome 0 is the meter reading 0 of the
two-qubit circuit in :func:`circuit_unitary`, and its signal operator is
``cos(χ/2)|+i><+i| + sin(χ/2)|-i><-i|``. In the projective limit χ = 0,
outcome 0 therefore leaves the signal in |+i>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import I2, PAULIS, X, Y, Z, dagger, max_abs, partial_trace
from .qstate import KET_MINUS_I, KET_PLUS_I, projector

TP_TOL = 1e-12
ZERO_PROB = 1e-14

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class KrausChannel:
    """CPTP map ρ ↦ Σ K ρ K†, validated for trace preservation on construction."""

    __slots__ = ("kraus_ops",)

    def __init__(self, kraus_ops: Sequence, tol: float = TP_TOL):
        ops = tuple(np.array(k, dtype=complex) for k in kraus_ops)
        if not ops or any(k.shape != (2, 2) for k in ops):
            raise ValueError("Kraus operators must be a non-empty list of 2x2 matrices")
        for k in ops:
            k.setflags(write=False)
        residual = tp_residual(ops)
        if residual > tol:
            raise ValueError(f"Kraus operators are not trace preserving (residual {residual:.3e})")
        self.kraus_ops = ops

    def __repr__(self) -> str:
        return f"KrausChannel(<{len(self.kraus_ops)} operators>)"

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __len__(self) -> int:
        return len(self.kraus_ops)

    def then(self, other: "KrausChannel") -> "KrausChannel":
        """Composition: apply ``self`` first, then ``other``."""
        return KrausChannel([b @ a for a in self.kraus_ops for b in other.kraus_ops])


@dataclass(frozen=True, eq=False)
class MeasurementPair:
    """Two-outcome measurement operators with M0†M0 + M1†M1 = I."""

    m0: np.ndarray
    m1: np.ndarray

    def __post_init__(self):
        residual = tp_residual((self.m0, self.m1))
        if residual > TP_TOL:
            raise ValueError(f"measurement is not complete (residual {residual:.3e})")

    @property
    def operators(self) -> tuple[np.ndarray, np.ndarray]:
        return self.m0, self.m1

    @property
    def effects(self) -> tuple[np.ndarray, np.ndarray]:
        return dagger(self.m0) @ self.m0, dagger(self.m1) @ self.m1


@dataclass(frozen=True, eq=False)
class Outcome:
    """One measurement branch; ``post_state`` is None when ``probability`` < 1e-14."""

    probability: float
    post_state: np.ndarray | None


def tp_residual(kraus_ops) -> float:
    total = sum(dagger(k) @ k for k in kraus_ops)
    return max_abs(total - I2)


def rotation(axis: str, angle: float) -> np.ndarray:
    """exp(-i·angle·P/2) for P the Pauli matrix named by ``axis``.

    ``rotation("z", a)`` turns the Bloch vector by +a about z (x towards y).
    """
    try:
        pauli = {"x": X, "y": Y, "z": Z}[axis.lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}") from None
    return math.cos(angle / 2) * I2 - 1j * math.sin(angle / 2) * pauli


def identity_channel() -> KrausChannel:
    return KrausChannel([I2])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel([u])


def check_p(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 0.5) or math.isnan(p):
        raise ValueError(f"p must lie in [0, 0.5], got {p}")
    return p


def check_chi(chi: float) -> float:
    chi = float(chi)
    if not (0.0 <= chi <= math.pi / 2) or math.isnan(chi):
        raise ValueError(f"chi must lie in [0, pi/2], got {chi}")
    return chi


def dephasing(p: float) -> KrausChannel:
    """ρ ↦ pZρZ + (1-p)ρ."""
    p = check_p(p)
    return KrausChannel([math.sqrt(1 - p) * I2, math.sqrt(p) * Z])


def preferred_ensemble(alpha: float) -> KrausChannel:
    """Random ±α rotation about z with equal weights; equals dephasing(sin²(α/2))."""
    s = 1 / math.sqrt(2)
    return KrausChannel([s * rotation("z", alpha), s * rotation("z", -alpha)])


def weak_measurement(chi: float) -> MeasurementPair:
    """Measurement diagonal in the Y eigenbasis with strength χ ∈ [0, π/2].

    χ = π/2 is no measurement (both operators I/√2); χ = 0 is the projective
    Y measurement, outcome 0 ↦ |+i>, outcome 1 ↦ |-i>.
    """
    chi = check_chi(chi)
    c, s = math.cos(chi / 2), math.sin(chi / 2)
    plus, minus = projector(KET_PLUS_I), projector(KET_MINUS_I)
    return MeasurementPair(c * plus + s * minus, s * plus + c * minus)


def measure(rho, pair: MeasurementPair) -> tuple[Outcome, Outcome]:
    rho = np.asarray(rho, dtype=complex)
    records = []
    for m in pair.operators:
        unnormalized = m @ rho @ dagger(m)
        prob = float(np.trace(unnormalized).real)
        post = unnormalized / prob if prob >= ZERO_PROB else None
        records.append(Outcome(prob, post))
    return tuple(records)


def circuit_unitary(chi: float) -> np.ndarray:
    """4x4 unitary on (signal ⊗ meter) realising the weak measurement.

    Meter rotated by Y_χ, then X_{π/2} on the signal, CNOT (signal controls
    meter) and X_{-π/2} on the signal.
    """
    chi = check_chi(chi)
    prep = np.kron(I2, rotation("y", chi))
    entangle = np.kron(rotation("x", -math.pi / 2), I2) @ CNOT @ np.kron(rotation("x", math.pi / 2), I2)
    return entangle @ prep


def circuit_induced_measurement(chi: float) -> MeasurementPair:
    """Signal operators K_m = <m|_meter U |0>_meter of :func:`circuit_unitary`."""
    u = circuit_unitary(chi).reshape(2, 2, 2, 2)  # [signal, meter, signal', meter']
    return MeasurementPair(u[:, 0, :, 0].copy(), u[:, 1, :, 0].copy())


def apply(channel: KrausChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ dagger(k) for k in channel.kraus_ops)


def choi(channel: KrausChannel) -> np.ndarray:
    """Υ = Σ_jk |j><k| ⊗ C(|j><k|), ordering (in ⊗ out), Tr Υ = 2."""
    omega = np.array([1, 0, 0, 1], dtype=complex)  # Σ_j |j>|j>
    ups = np.zeros((4, 4), dtype=complex)
    for k in channel.kraus_ops:
        v = np.kron(I2, k) @ omega
        ups += np.outer(v, v.conj())
    return ups


def apply_choi(upsilon, rho) -> np.ndarray:
    """C(ρ) = Tr_in[(ρᵀ ⊗ I) Υ]."""
    rho = np.asarray(rho, dtype=complex)
    return partial_trace(np.kron(rho.T, I2) @ np.asarray(upsilon), over="in")


def choi_distance(a: KrausChannel, b: KrausChannel) -> float:
    return max_abs(choi(a) - choi(b))


def pauli_expectation(upsilon, a: str, b: str) -> complex:
    """Tr[(P_a ⊗ P_b) Υ]."""
    return complex(np.trace(np.kron(PAULIS[a], PAULIS[b]) @ np.asarray(upsilon)))
