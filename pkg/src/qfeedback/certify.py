"""Optimality certificates for the quantum and the entanglement-breaking schemes.

The average fidelity of a channel with Choi matrix Υ is Tr[RΥ]. Any Hermitian
M with M ⊗ I - R ⪰ 0 bounds that fidelity by Tr M over every CPTP map, since
Tr M - Tr[RΥ] = Tr[(M ⊗ I - R)Υ] ≥ 0 whenever Tr_out Υ = I. Restricting to
maps with positive partial transpose adds a multiplier on the Y ⊗ Y direction.
Nothing here solves an SDP: the closed-form dual points are built and their
feasibility is checked by eigensolve.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel, choi, pauli_expectation
from .linalg import (
    I2,
    PSD_TOL,
    X,
    Y,
    dagger,
    eig_hermitian,
    max_abs,
    min_eig,
    partial_trace,
    partial_transpose_out,
)
from .qstate import projector
from .schemes import (
    TaskParams,
    chi_opt,
    dr_channel,
    dr_value,
    fqc_opt,
    quantum_control_channel,
)

XX = np.kron(X, X)
X_IN = np.kron(X, I2)
YY = np.kron(Y, Y)
IDENTITY4 = np.eye(4, dtype=complex)


class CertificationError(RuntimeError):
    """A dual point failed its positivity check."""

    def __init__(self, name: str, min_eig: float, task: TaskParams):
        self.min_eig, self.task = min_eig, task
        super().__init__(
            f"{name} certificate infeasible at p={task.p!r}, theta={task.theta!r}: "
            f"min eigenvalue {min_eig:.3e}"
        )


def r_matrix(task: TaskParams) -> np.ndarray:
    """R = ½ Σ_i E_p(|ψ_i><ψ_i|) ⊗ |ψ_i><ψ_i|, ordering (in ⊗ out)."""
    noisy = task.noisy_inputs()
    return 0.5 * sum(np.kron(rho, projector(psi)) for rho, psi in zip(noisy, task.inputs()))


def r_symmetry_residuals(r) -> dict[str, float]:
    r = np.asarray(r)
    return {
        "hermitian": max_abs(r - dagger(r)),
        "transpose": max_abs(r - r.T),
        "xx": max_abs(XX @ r @ XX - r),
        "partial_transpose": max_abs(partial_transpose_out(r) - r),
    }


def objective(r, upsilon) -> float:
    """Tr[RΥ], the average fidelity of the channel with Choi matrix Υ."""
    return float(np.real(np.trace(np.asarray(r) @ np.asarray(upsilon))))


@dataclass(frozen=True)
class QuantumDualCertificate:
    """Dual point M = b0 I + bx X with feasibility matrix b0 I⊗I + bx X⊗I - R."""

    task: TaskParams
    b0: float
    bx: float
    min_eig_slack: float

    @property
    def bound(self) -> float:
        return 2 * self.b0

    @property
    def feasible(self) -> bool:
        return self.min_eig_slack >= -PSD_TOL

    def feasibility_matrix(self) -> np.ndarray:
        return self.b0 * IDENTITY4 + self.bx * X_IN - r_matrix(self.task)


@dataclass(frozen=True)
class ClassicalDualCertificate:
    """Dual point for PPT channels: a0 I⊗I + ax X⊗I + ay Y⊗Y - R ⪰ 0."""

    task: TaskParams
    a0: float
    ax: float
    ay: float
    min_eig_slack: float

    @property
    def bound(self) -> float:
        return 2 * self.a0

    @property
    def feasible(self) -> bool:
        return self.min_eig_slack >= -PSD_TOL

    def feasibility_matrix(self) -> np.ndarray:
        return self.a0 * IDENTITY4 + self.ax * X_IN + self.ay * YY - r_matrix(self.task)


def quantum_dual(task: TaskParams, *, b0_shift: float = 0.0, strict: bool = True) -> QuantumDualCertificate:
    """b0 = ¼ + ¼ sqrt(cos²θ + sin⁴θ/(1 - r_x²)), bx = r_x b0.

    At p = θ = 0 the ratio is 0/0 and the limit b0 = ½ is used. ``b0_shift``
    perturbs b0 to exercise the failure path.
    """
    omr = task.one_minus_rx2
    if omr > 0:
        b0 = 0.25 + 0.25 * math.sqrt(math.cos(task.theta) ** 2 + math.sin(task.theta) ** 4 / omr)
    else:
        b0 = 0.5
    b0 += b0_shift
    bx = task.r_x * b0
    slack = min_eig(b0 * IDENTITY4 + bx * X_IN - r_matrix(task))
    cert = QuantumDualCertificate(task, b0, bx, slack)
    if strict and not cert.feasible:
        raise CertificationError("quantum", slack, task)
    return cert


def classical_dual(task: TaskParams, *, a0_shift: float = 0.0, strict: bool = True) -> ClassicalDualCertificate:
    c, s = math.cos(task.theta), math.sin(task.theta)
    rx = task.r_x
    gamma = math.sqrt(c * c + s**4)
    a0 = 0.25 + 0.25 * gamma + a0_shift
    ax = rx / 4 + rx / 4 * c * c / gamma
    ay = -rx / 4 * c * s * s / gamma
    slack = min_eig(a0 * IDENTITY4 + ax * X_IN + ay * YY - r_matrix(task))
    cert = ClassicalDualCertificate(task, a0, ax, ay, slack)
    if strict and not cert.feasible:
        raise CertificationError("classical", slack, task)
    return cert


@dataclass(frozen=True)
class ChoiReport:
    psd_slack: float
    tp_residual: float
    ppt_slack: float
    equality_residuals: dict = field(default_factory=dict)

    @property
    def is_cptp(self) -> bool:
        return self.psd_slack >= -PSD_TOL and self.tp_residual <= 1e-10

    @property
    def is_ppt(self) -> bool:
        return self.ppt_slack >= -PSD_TOL


def verify_choi_constraints(upsilon) -> ChoiReport:
    """Positivity, trace preservation, PPT and the four Tr[(A ⊗ Y)Υ] residuals."""
    upsilon = np.asarray(upsilon, dtype=complex)
    return ChoiReport(
        psd_slack=min_eig(upsilon),
        tp_residual=max_abs(partial_trace(upsilon, "out") - I2),
        ppt_slack=min_eig(partial_transpose_out(upsilon)),
        equality_residuals={a: abs(pauli_expectation(upsilon, a, "Y")) for a in "IXYZ"},
    )


def ppt_slack(channel: KrausChannel) -> float:
    return float(eig_hermitian(partial_transpose_out(choi(channel)))[0])


# --- random channel oracle ---------------------------------------------------


def gram_schmidt(a: np.ndarray) -> np.ndarray:
    """Orthonormalise the columns of a square complex matrix (modified Gram-Schmidt)."""
    q = np.array(a, dtype=complex)
    n = q.shape[1]
    for j in range(n):
        for i in range(j):
            q[:, j] -= np.vdot(q[:, i], q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def random_channel(seed: int) -> KrausChannel:
    """Random qubit channel from an 8x8 unitary read as a dilation with a 4-level environment.

    The first two columns of the unitary form an isometry C² → C⁴ ⊗ C²; its
    four 2x2 row blocks are the Kraus operators.
    """
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    iso = gram_schmidt(g)[:, :2]
    return KrausChannel([iso[2 * k : 2 * k + 2, :] for k in range(4)])


def sample_chois(n_samples: int, seed: int) -> np.ndarray:
    """Choi matrices of ``n_samples`` random channels; sample i uses seed ``seed + i``."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    return np.stack([choi(random_channel(seed + i)) for i in range(n_samples)])


@dataclass(frozen=True)
class OracleResult:
    max_fidelity_found: float
    argmax_index: int
    argmax_seed: int
    n_samples: int


def random_cptp_oracle(task: TaskParams, n_samples: int, seed: int) -> OracleResult:
    """Best average fidelity over ``n_samples`` seeded random channels."""
    chois = sample_chois(n_samples, seed)
    values = np.real(np.einsum("ij,sji->s", r_matrix(task), chois))
    best = int(np.argmax(values))
    return OracleResult(float(values[best]), best, seed + best, n_samples)


def perturbed_optimum_oracle(task: TaskParams, n_samples: int, seed: int, max_weight: float = 0.2) -> OracleResult:
    """Random convex mixtures (1-w)Υ_QC + wΥ_rand around the optimal channel.

    Mixtures of CPTP maps are CPTP, and near the optimum their fidelities sit
    just below the dual bound, which exercises weak duality where it is tight.
    The weight for sample i is drawn from seed ``seed + i``.
    """
    optimum = choi(quantum_control_channel(task, chi_opt(task)))
    chois = sample_chois(n_samples, seed)
    weights = np.array([np.random.default_rng(seed + i).uniform(0.0, max_weight) for i in range(n_samples)])
    mixed = (1 - weights)[:, None, None] * optimum + weights[:, None, None] * chois
    values = np.real(np.einsum("ij,sji->s", r_matrix(task), mixed))
    best = int(np.argmax(values))
    return OracleResult(float(values[best]), best, seed + best, n_samples)


# --- grid certification ------------------------------------------------------


def task_grid(n: int, *, exclude_degenerate: bool = True) -> list[TaskParams]:
    """Inclusive n x n grid over p ∈ [0, 0.5], θ ∈ [0, π/2]."""
    tasks = []
    for p in np.linspace(0.0, 0.5, n):
        for theta in np.linspace(0.0, math.pi / 2, n):
            if exclude_degenerate and p == 0.0 and theta == 0.0:
                continue
            tasks.append(TaskParams(float(p), float(theta)))
    return tasks


@dataclass
class GridReport:
    n_tasks: int = 0
    quantum_min_slack: float = math.inf
    quantum_worst_task: TaskParams | None = None
    classical_min_slack: float = math.inf
    classical_worst_task: TaskParams | None = None
    quantum_bound_error: float = 0.0
    classical_bound_error: float = 0.0
    quantum_gap: float = 0.0
    classical_gap: float = 0.0
    classical_exceeds_quantum: float = -math.inf
    oracle_samples: int = 0
    oracle_max_excess: float = -math.inf
    oracle_worst_task: TaskParams | None = None

    def failures(self, psd_tol=PSD_TOL, bound_tol=1e-12, gap_tol=1e-9) -> list[str]:
        out = []
        if self.quantum_min_slack < -psd_tol:
            out.append(f"quantum dual slack {self.quantum_min_slack:.3e} at {self.quantum_worst_task}")
        if self.classical_min_slack < -psd_tol:
            out.append(f"classical dual slack {self.classical_min_slack:.3e} at {self.classical_worst_task}")
        if self.quantum_bound_error > bound_tol:
            out.append(f"|2b0 - F_QCopt| = {self.quantum_bound_error:.3e}")
        if self.classical_bound_error > bound_tol:
            out.append(f"|2a0 - F_DR2| = {self.classical_bound_error:.3e}")
        if self.quantum_gap > gap_tol:
            out.append(f"quantum duality gap {self.quantum_gap:.3e}")
        if self.classical_gap > gap_tol:
            out.append(f"classical duality gap {self.classical_gap:.3e}")
        if self.classical_exceeds_quantum > bound_tol:
            out.append(f"classical bound exceeds quantum bound by {self.classical_exceeds_quantum:.3e}")
        if self.oracle_samples and self.oracle_max_excess > gap_tol:
            out.append(f"random channel beats dual bound by {self.oracle_max_excess:.3e} at {self.oracle_worst_task}")
        return out


def certify_grid(n: int, n_samples: int = 0, seed: int = 0, *, b0_shift: float = 0.0) -> GridReport:
    """Check both dual points, their zero gaps and (optionally) the random oracle on an n x n grid."""
    tasks = task_grid(n)
    report = GridReport(n_tasks=len(tasks))
    chois = sample_chois(n_samples, seed) if n_samples else None
    report.oracle_samples = n_samples
    for task in tasks:
        r = r_matrix(task)
        q = quantum_dual(task, b0_shift=b0_shift, strict=False)
        c = classical_dual(task, strict=False)
        if q.min_eig_slack < report.quantum_min_slack:
            report.quantum_min_slack, report.quantum_worst_task = q.min_eig_slack, task
        if c.min_eig_slack < report.classical_min_slack:
            report.classical_min_slack, report.classical_worst_task = c.min_eig_slack, task
        f_opt = fqc_opt(task)
        f_dr2 = float(dr_value(2, task.theta))
        report.quantum_bound_error = max(report.quantum_bound_error, abs(q.bound - f_opt))
        report.classical_bound_error = max(report.classical_bound_error, abs(c.bound - f_dr2))
        primal_q = objective(r, choi(quantum_control_channel(task, chi_opt(task))))
        primal_c = objective(r, choi(dr_channel(2, task.theta)))
        report.quantum_gap = max(report.quantum_gap, abs(q.bound - primal_q))
        report.classical_gap = max(report.classical_gap, abs(c.bound - primal_c))
        report.classical_exceeds_quantum = max(report.classical_exceeds_quantum, c.bound - q.bound)
        if chois is not None:
            best = float(np.max(np.real(np.einsum("ij,sji->s", r, chois))))
            if best - q.bound > report.oracle_max_excess:
                report.oracle_max_excess, report.oracle_worst_task = best - q.bound, task
    return report
