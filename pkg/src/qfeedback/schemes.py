"""Control schemes for the two-state dephasing task.

Every scheme exists twice: as a closed-form average fidelity and as an
explicit :class:`~qfeedback.channels.KrausChannel` whose fidelity is obtained
by density-matrix simulation in :func:`average_fidelity`. The closed forms
accept numpy arrays for ``p`` and ``theta`` (via the ``*_value`` helpers) so
that parameter sweeps vectorise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channels
from .channels import KrausChannel, check_chi, check_p, dephasing, rotation, weak_measurement
from .linalg import eigh_jacobi
from .qstate import KET0, KET1, check_theta, fidelity, prepare_input, projector

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class TaskParams:
    """Noise strength ``p`` ∈ [0, 0.5] and input half-angle ``theta`` ∈ [0, π/2]."""

    p: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "p", check_p(self.p))
        object.__setattr__(self, "theta", check_theta(self.theta))

    @property
    def r_x(self) -> float:
        """x component of either input's Bloch vector after the noise."""
        return (1 - 2 * self.p) * math.cos(self.theta)

    @property
    def one_minus_rx2(self) -> float:
        return float(one_minus_rx2(self.p, self.theta))

    def inputs(self) -> tuple[np.ndarray, np.ndarray]:
        return prepare_input(self.theta, 1), prepare_input(self.theta, 2)

    def noisy_inputs(self) -> tuple[np.ndarray, np.ndarray]:
        noise = dephasing(self.p)
        return tuple(noise(projector(psi)) for psi in self.inputs())


@dataclass(frozen=True)
class QuantumControlParams:
    chi: float
    eta: float

    def __post_init__(self):
        check_chi(self.chi)
        if not (0.0 <= self.eta <= HALF_PI):
            raise ValueError(f"eta must lie in [0, pi/2], got {self.eta}")


def one_minus_rx2(p, theta):
    """1 - r_x² written as sin²θ + 4p(1-p)cos²θ, exact near the noiseless corner."""
    return np.sin(theta) ** 2 + 4 * p * (1 - p) * np.cos(theta) ** 2


# --- simulation --------------------------------------------------------------


def average_fidelity(control: KrausChannel, task: TaskParams) -> float:
    """½ Σ_i <ψ_i| C[E_p(|ψ_i><ψ_i|)] |ψ_i>, by direct simulation."""
    total = 0.0
    for psi, noisy in zip(task.inputs(), task.noisy_inputs()):
        total += fidelity(psi, control(noisy))
    return 0.5 * total


def helstrom_success_simulated(task: TaskParams) -> float:
    """Success probability of guessing ψ1 on |0> and ψ2 on |1> after the noise."""
    rho1, rho2 = task.noisy_inputs()
    return 0.5 * float(np.real(rho1[0, 0])) + 0.5 * float(np.real(rho2[1, 1]))


# --- do nothing --------------------------------------------------------------


def do_nothing_value(p, theta):
    return 1 - p * np.cos(theta) ** 2


def do_nothing_fidelity(task: TaskParams) -> float:
    """F_N = 1 - p cos²θ."""
    return float(do_nothing_value(task.p, task.theta))


# --- discriminate and reprepare ---------------------------------------------


def helstrom_probability(theta: float) -> float:
    """½(1 + sin θ); independent of the noise strength."""
    return 0.5 * (1 + math.sin(check_theta(theta)))


def reprepare_states(variant: int, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """States prepared after reading |0> (guess ψ1) and |1> (guess ψ2).

    Variant 1 reprepares the guessed input itself. Variant 2 hedges towards
    the equator: amplitudes sqrt(½ ± sin²θ/(2γ)) with γ = sqrt(sin⁴θ + cos²θ).
    """
    theta = check_theta(theta)
    if variant == 1:
        return prepare_input(theta, 1), prepare_input(theta, 2)
    if variant == 2:
        s2 = math.sin(theta) ** 2
        gamma = math.sqrt(s2 * s2 + math.cos(theta) ** 2)
        bias = s2 / (2 * gamma)
        big, small = math.sqrt(0.5 + bias), math.sqrt(max(0.5 - bias, 0.0))
        return np.array([big, small], dtype=complex), np.array([small, big], dtype=complex)
    raise ValueError(f"variant must be 1 or 2, got {variant!r}")


def measure_and_prepare(projectors, states) -> KrausChannel:
    """B(ρ) = Σ_b Tr[ρ P_b] Q_b for rank-one P_b = |b><b|.

    Each Q_b is expanded in its eigenbasis, giving Kraus operators
    sqrt(λ_k)|v_k><b|: two per outcome, four in total.
    """
    ops = []
    for ket_b, q in zip(projectors, states):
        w, v = eigh_jacobi(q)
        for lam, vec in zip(w, v.T):
            ops.append(math.sqrt(max(lam, 0.0)) * np.outer(vec, np.conj(ket_b)))
    return KrausChannel(ops)


def dr_channel(variant: int, theta: float) -> KrausChannel:
    """Z-basis measurement followed by repreparation (an entanglement-breaking map)."""
    q0, q1 = reprepare_states(variant, theta)
    return measure_and_prepare((KET0, KET1), (projector(q0), projector(q1)))


def dr_value(variant: int, theta):
    s = np.sin(theta)
    if variant == 1:
        return 1 - 0.5 * (s**2 - s**3)
    if variant == 2:
        return 0.5 + 0.5 * np.sqrt(np.cos(theta) ** 2 + s**4)
    raise ValueError(f"variant must be 1 or 2, got {variant!r}")


def dr_fidelity(variant: int, theta: float) -> float:
    """F_DR1 = 1 - ½(sin²θ - sin³θ); F_DR2 = ½ + ½ sqrt(cos²θ + sin⁴θ)."""
    return float(dr_value(variant, check_theta(theta)))


# --- weak measurement and feedback ------------------------------------------


def eta_opt(task: TaskParams, chi: float) -> float:
    """Feedback angle with tan η = 1/(r_x tan χ), η ∈ [0, π/2].

    Rotating the outcome-0 state by -η and the outcome-1 state by +η about z
    puts both back in the x-z plane.
    """
    chi = check_chi(chi)
    if chi == HALF_PI:
        return 0.0
    rx = task.r_x
    if chi == 0.0 or rx == 0.0:
        return HALF_PI
    return math.atan2(math.cos(chi), rx * math.sin(chi))


def feedback_angles(eta: float) -> tuple[float, float]:
    """z-rotation angles applied after outcomes 0 and 1."""
    return -eta, eta


def quantum_control_channel(task: TaskParams, chi: float, eta: float | None = None) -> KrausChannel:
    """Weak Y measurement of strength χ followed by a z-rotation conditioned on the outcome."""
    pair = weak_measurement(chi)
    if eta is None:
        eta = eta_opt(task, chi)
    QuantumControlParams(chi, eta)
    ops = [rotation("z", angle) @ m for angle, m in zip(feedback_angles(eta), pair.operators)]
    return KrausChannel(ops)


def fqc_value(p, theta, chi):
    # 1 - (1 - r_x²)sin²χ, rewritten as cos²χ + r_x² sin²χ so it never cancels
    rx = (1 - 2 * p) * np.cos(theta)
    s = np.sin(chi)
    return 0.5 * (1 + np.sin(theta) ** 2 * s + np.cos(theta) * np.sqrt(np.cos(chi) ** 2 + (rx * s) ** 2))


def fqc(task: TaskParams, chi: float) -> float:
    """½[1 + sin²θ sin χ + cos θ sqrt(1 - (1 - r_x²) sin²χ)]."""
    return float(fqc_value(task.p, task.theta, check_chi(chi)))


def chi_opt_value(p, theta):
    p, theta = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(theta, dtype=float))
    omr = one_minus_rx2(p, theta)
    s4 = np.sin(theta) ** 4
    denom = omr * (omr * np.cos(theta) ** 2 + s4)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = np.where(denom > 0, s4 / np.where(denom > 0, denom, 1.0), 1.0)
    out = np.arcsin(np.sqrt(np.clip(arg, 0.0, 1.0)))
    return out if out.ndim else float(out)


def chi_opt(task: TaskParams) -> float:
    """Measurement strength maximising :func:`fqc`.

    π/2 (no measurement) when p = 0 or θ = π/2, 0 (projective) when θ = 0 < p.
    """
    if task.p == 0.0:
        return HALF_PI
    return float(chi_opt_value(task.p, task.theta))


def fqc_opt_value(p, theta):
    p, theta = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(theta, dtype=float))
    omr = one_minus_rx2(p, theta)
    s4 = np.sin(theta) ** 4
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(omr > 0, s4 / np.where(omr > 0, omr, 1.0), 0.0)
    out = np.where(omr > 0, 0.5 + 0.5 * np.sqrt(np.cos(theta) ** 2 + ratio), 1.0)
    return out if out.ndim else float(out)


def fqc_opt(task: TaskParams) -> float:
    """½ + ½ sqrt(cos²θ + sin⁴θ/(1 - r_x²)); 1 at the 0/0 point p = θ = 0."""
    return float(fqc_opt_value(task.p, task.theta))


def f_dif_value(p, theta):
    return fqc_opt_value(p, theta) - np.maximum(dr_value(2, theta), do_nothing_value(p, theta))


def f_dif(task: TaskParams) -> float:
    """Advantage of optimal weak-measurement feedback over the best classical scheme."""
    return float(f_dif_value(task.p, task.theta))


def scheme_channel(name: str, task: TaskParams, chi: float | None = None) -> KrausChannel:
    """Channel for ``nothing``, ``dr1``, ``dr2`` or ``qc`` (``chi`` defaults to χ_opt)."""
    if name == "nothing":
        return channels.identity_channel()
    if name in ("dr1", "dr2"):
        return dr_channel(int(name[-1]), task.theta)
    if name == "qc":
        return quantum_control_channel(task, chi_opt(task) if chi is None else chi)
    raise ValueError(f"unknown scheme {name!r}")
