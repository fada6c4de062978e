import math

import numpy as np
import pytest

from qfeedback import channels as ch
from qfeedback.linalg import I2, X, Y, Z, eig_hermitian, partial_trace, phase_aligned_distance
from qfeedback.qstate import (
    KET0,
    KET_MINUS_I,
    KET_PLUS,
    KET_PLUS_I,
    bloch,
    check_density,
    density_from_bloch,
    fidelity,
    prepare_input,
    projector,
    random_density,
)
from qfeedback.schemes import TaskParams, chi_opt, quantum_control_channel


def choi_by_definition(channel):
    """Σ_jk |j><k| ⊗ C(|j><k|), assembled entry by entry."""
    ups = np.zeros((4, 4), dtype=complex)
    for j in range(2):
        for k in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[j, k] = 1
            ups += np.kron(e, ch.apply(channel, e))
    return ups


def test_rotation_basics():
    assert np.abs(ch.rotation("z", 0) - I2).max() == 0
    for axis in "xyz":
        for a, b in ((0.3, 1.1), (-2.0, 0.7)):
            u = ch.rotation(axis, a)
            assert np.abs(u @ u.conj().T - I2).max() <= 1e-12
            assert np.abs(ch.rotation(axis, a) @ ch.rotation(axis, b) - ch.rotation(axis, a + b)).max() <= 1e-12
    with pytest.raises(ValueError):
        ch.rotation("w", 0.1)


def test_rotation_handedness():
    # conjugating |+><+| by Z_α turns the Bloch vector from x towards +y
    alpha = 0.4
    u = ch.rotation("z", alpha)
    r = bloch(u @ projector(KET_PLUS) @ u.conj().T)
    assert r[0] == pytest.approx(math.cos(alpha), abs=1e-14)
    assert r[1] == pytest.approx(math.sin(alpha), abs=1e-14)
    assert abs(r[2]) <= 1e-15


def test_y_rotation_matches_circuit_matrix():
    out = ch.rotation("y", math.pi / 2) @ KET0
    assert fidelity((KET0 + np.array([0, 1])) / math.sqrt(2), projector(out)) == pytest.approx(1, abs=1e-14)
    chi = 0.9
    expected = np.array([[math.cos(chi / 2), -math.sin(chi / 2)], [math.sin(chi / 2), math.cos(chi / 2)]])
    assert np.abs(ch.rotation("y", chi) - expected).max() <= 1e-15
    phi = 0.8
    expected = np.array([[math.cos(phi / 2), -1j * math.sin(phi / 2)], [-1j * math.sin(phi / 2), math.cos(phi / 2)]])
    assert np.abs(ch.rotation("x", phi) - expected).max() <= 1e-15


def test_dephasing_examples():
    assert ch.choi_distance(ch.dephasing(0), ch.identity_channel()) == 0
    assert np.abs(ch.dephasing(0.5)(projector(KET_PLUS)) - I2 / 2).max() <= 1e-15
    r = bloch(ch.dephasing(0.3)(density_from_bloch([1, 0, 0])))
    assert np.allclose(r, [0.4, 0, 0], atol=1e-15)
    for bad in (-0.01, 0.51, 0.7):
        with pytest.raises(ValueError, match="p must"):
            ch.dephasing(bad)


def test_dephasing_bloch_action(rng):
    for _ in range(50):
        p = rng.uniform(0, 0.5)
        rho = random_density(rng)
        r, r2 = bloch(rho), bloch(ch.dephasing(p)(rho))
        assert np.allclose(r2, [(1 - 2 * p) * r[0], (1 - 2 * p) * r[1], r[2]], atol=1e-14)


def test_preferred_ensemble_examples():
    assert ch.choi_distance(ch.preferred_ensemble(0.0), ch.identity_channel()) <= 1e-15
    alpha = 2 * math.asin(math.sqrt(0.3))
    assert alpha == pytest.approx(1.1593, abs=1e-4)
    assert ch.choi_distance(ch.preferred_ensemble(alpha), ch.dephasing(0.3)) <= 1e-12
    assert ch.choi_distance(ch.preferred_ensemble(math.pi / 2), ch.dephasing(0.5)) <= 1e-12


def test_weak_measurement_limits():
    none = ch.weak_measurement(math.pi / 2)
    for m in none.operators:
        assert np.abs(m - I2 / math.sqrt(2)).max() <= 1e-15
    rho = projector(prepare_input(0.7, 1))
    for outcome in ch.measure(rho, none):
        assert outcome.probability == pytest.approx(0.5, abs=1e-15)

    proj = ch.weak_measurement(0.0)
    assert np.abs(proj.m0 - projector(KET_PLUS_I)).max() <= 1e-15
    assert np.abs(proj.m1 - projector(KET_MINUS_I)).max() <= 1e-15
    out0, out1 = ch.measure(projector(KET0), proj)
    assert fidelity(KET_PLUS_I, out0.post_state) == pytest.approx(1, abs=1e-14)
    assert fidelity(KET_MINUS_I, out1.post_state) == pytest.approx(1, abs=1e-14)


def test_weak_measurement_structure():
    for chi in np.linspace(0, math.pi / 2, 25):
        pair = ch.weak_measurement(chi)
        e0, e1 = pair.effects
        assert np.abs(e0 + e1 - I2).max() <= 1e-12
        for m in pair.operators:
            assert np.abs(m - m.conj().T).max() <= 1e-15
            # diagonal in the Y eigenbasis: commutes with Y
            assert np.abs(m @ Y - Y @ m).max() <= 1e-15
    with pytest.raises(ValueError, match="chi"):
        ch.weak_measurement(1.7)


def test_weak_measurement_effect_spectrum():
    e0 = ch.weak_measurement(math.pi / 4).effects[0]
    expected = sorted([math.cos(math.pi / 8) ** 2, math.sin(math.pi / 8) ** 2])
    assert np.allclose(np.linalg.eigvalsh(e0), expected, atol=1e-14)
    assert np.allclose(eig_hermitian(e0), expected, atol=1e-14)


def test_measure_examples(rng):
    out0, out1 = ch.measure(projector(KET_PLUS_I), ch.weak_measurement(0.0))
    assert out0.probability == pytest.approx(1, abs=1e-15)
    assert fidelity(KET_PLUS_I, out0.post_state) == pytest.approx(1, abs=1e-14)
    assert out1.probability < 1e-14 and out1.post_state is None

    for chi in (0.0, 0.4, 1.0):
        for outcome in ch.measure(I2 / 2, ch.weak_measurement(chi)):
            assert outcome.probability == pytest.approx(0.5, abs=1e-15)

    noisy = ch.dephasing(0.145)(projector(prepare_input(0.715, 1)))
    out0, _ = ch.measure(noisy, ch.weak_measurement(0.6))
    assert np.linalg.norm(bloch(out0.post_state)) > np.linalg.norm(bloch(noisy))


def test_measure_completeness(rng):
    for _ in range(1000):
        rho = random_density(rng)
        pair = ch.weak_measurement(rng.uniform(0, math.pi / 2))
        outs = ch.measure(rho, pair)
        assert abs(sum(o.probability for o in outs) - 1) <= 1e-12
        unnormalized = sum(m @ rho @ m.conj().T for m in pair.operators)
        assert abs(np.trace(unnormalized) - 1) <= 1e-12
        for o in outs:
            if o.post_state is not None:
                check_density(o.post_state)


def test_circuit_unitary_is_unitary():
    u = ch.circuit_unitary(0.6)
    assert np.abs(u @ u.conj().T - np.eye(4)).max() <= 1e-14


def test_circuit_examples():
    none = ch.circuit_induced_measurement(math.pi / 2)
    for m in none.operators:
        assert phase_aligned_distance(m, I2 / math.sqrt(2)) <= 1e-12
    proj = ch.circuit_induced_measurement(0.0)
    assert phase_aligned_distance(proj.m0, projector(KET_PLUS_I)) <= 1e-12
    assert phase_aligned_distance(proj.m1, projector(KET_MINUS_I)) <= 1e-12
    circ, weak = ch.circuit_induced_measurement(0.6), ch.weak_measurement(0.6)
    for a, b in zip(circ.operators, weak.operators):
        assert phase_aligned_distance(a, b) <= 1e-10


def test_circuit_matches_weak_measurement_on_grid():
    for chi in np.linspace(0, math.pi / 2, 25):
        circ, weak = ch.circuit_induced_measurement(chi), ch.weak_measurement(chi)
        for a, b in zip(circ.operators, weak.operators):
            assert phase_aligned_distance(a, b) <= 1e-10


def test_apply_examples(rng):
    rho = random_density(rng)
    assert np.abs(ch.identity_channel()(rho) - rho).max() <= 1e-15
    assert np.abs(ch.dephasing(0.5)(rho) - np.diag(np.diag(rho))).max() <= 1e-15


def sample_channels():
    task = TaskParams(0.115, 0.715)
    return [
        ch.identity_channel(),
        ch.dephasing(0.3),
        ch.preferred_ensemble(0.7),
        ch.unitary_channel(ch.rotation("x", 0.3) @ ch.rotation("y", 1.1)),
        quantum_control_channel(task, chi_opt(task)),
        quantum_control_channel(task, 0.2),
    ]


def test_choi_matches_definition_and_is_valid():
    for channel in sample_channels():
        ups = ch.choi(channel)
        assert np.abs(ups - choi_by_definition(channel)).max() <= 1e-14
        assert eig_hermitian(ups)[0] >= -1e-9
        assert np.abs(partial_trace(ups, "out") - I2).max() <= 1e-10
        assert np.trace(ups).real == pytest.approx(2, abs=1e-12)


def test_choi_examples():
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 1
    assert np.abs(ch.choi(ch.identity_channel()) - bell).max() == 0
    p = 0.2
    expected = np.diag([1.0, 0, 0, 1]).astype(complex)
    expected[0, 3] = expected[3, 0] = 1 - 2 * p
    ups = ch.choi(ch.dephasing(p))
    assert np.abs(ups - expected).max() <= 1e-15
    assert np.allclose(eig_hermitian(ups), [0, 0, 2 * p, 2 - 2 * p], atol=1e-14)


def test_kraus_and_choi_paths_agree(rng):
    for channel in sample_channels():
        ups = ch.choi(channel)
        for _ in range(100):
            rho = random_density(rng)
            assert np.abs(ch.apply(channel, rho) - ch.apply_choi(ups, rho)).max() <= 1e-12


def test_constructed_channels_trace_preserving():
    for channel in sample_channels():
        assert ch.tp_residual(channel.kraus_ops) <= 1e-12
    with pytest.raises(ValueError, match="trace preserving"):
        ch.KrausChannel([0.5 * I2])


def test_composition():
    composed = ch.dephasing(0.1).then(ch.dephasing(0.2))
    # two dephasings multiply the coherence factors
    assert ch.choi_distance(composed, ch.dephasing((1 - 0.8 * 0.6) / 2)) <= 1e-14


def test_pauli_expectation():
    ups = ch.choi(ch.identity_channel())
    assert ch.pauli_expectation(ups, "X", "X") == pytest.approx(2)
    assert ch.pauli_expectation(ups, "Y", "Y") == pytest.approx(-2)
    assert ch.pauli_expectation(ups, "Z", "Z") == pytest.approx(2)
    assert abs(np.trace(np.kron(X, Z) @ ups)) == 0
