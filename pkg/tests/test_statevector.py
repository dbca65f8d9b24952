import math
from fractions import Fraction

import numpy as np
import pytest

from aqftlab.phase import Phase
from aqftlab.statevector import (
    StateVector,
    apply_controlled_rotation,
    apply_hadamard,
    apply_rotation,
    basis_state,
    dft_reference,
    fidelity,
    inner_product,
    measure_qubit,
    prepare_phase_register,
)

R = 1 / math.sqrt(2)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v), n)


def test_basis_state():
    np.testing.assert_array_equal(basis_state(2, 3).amplitudes, [0, 0, 0, 1])
    np.testing.assert_array_equal(basis_state(1, 0).amplitudes, [1, 0])
    assert basis_state(5, 17).norm() == 1


def test_basis_state_guards():
    with pytest.raises(ValueError):
        basis_state(2, 4)
    with pytest.raises(ValueError):
        basis_state(25, 0)


def test_hadamard():
    np.testing.assert_allclose(apply_hadamard(basis_state(1, 0), 1).amplitudes, [R, R], atol=1e-15)
    np.testing.assert_allclose(apply_hadamard(basis_state(1, 1), 1).amplitudes, [R, -R], atol=1e-15)


def test_hadamard_acts_on_most_significant_bit_for_qubit_one():
    # |00> -> H on qubit 1 -> (|00> + |10>)/sqrt2, i.e. indices 0 and 2
    out = apply_hadamard(basis_state(2, 0), 1).amplitudes
    np.testing.assert_allclose(out, [R, 0, R, 0], atol=1e-15)


def test_hadamard_involution():
    s = random_state(4, 1)
    for q in range(1, 5):
        np.testing.assert_allclose(apply_hadamard(apply_hadamard(s, q), q).amplitudes,
                                   s.amplitudes, atol=1e-14)


def test_rotation():
    s = random_state(3, 2)
    np.testing.assert_allclose(apply_rotation(s, 2, Phase.zero()).amplitudes, s.amplitudes, atol=0)
    a = Phase(5, 7)
    back = apply_rotation(apply_rotation(s, 2, a, 1), 2, a, -1)
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-14)


def test_r2_gives_i():
    plus = apply_hadamard(basis_state(1, 0), 1)
    out = apply_rotation(plus, 1, Phase(1, 2))
    np.testing.assert_allclose(out.amplitudes, [R, 1j * R], atol=1e-15)


def test_controlled_rotation():
    r2 = Phase(1, 2)
    s = basis_state(2, 0b01)  # control (qubit 1) is |0>
    np.testing.assert_allclose(apply_controlled_rotation(s, 1, 2, r2).amplitudes, s.amplitudes)
    out = apply_controlled_rotation(basis_state(2, 3), 1, 2, r2).amplitudes
    np.testing.assert_allclose(out, [0, 0, 0, 1j], atol=1e-15)


def test_controlled_rotation_symmetric():
    s = random_state(4, 3)
    a = Phase(3, 5)
    np.testing.assert_allclose(apply_controlled_rotation(s, 1, 3, a).amplitudes,
                               apply_controlled_rotation(s, 3, 1, a).amplitudes, atol=1e-14)


def test_controlled_rotation_guards():
    s = basis_state(2, 0)
    with pytest.raises(ValueError):
        apply_controlled_rotation(s, 1, 1, Phase(1, 2))
    with pytest.raises(IndexError):
        apply_controlled_rotation(s, 1, 3, Phase(1, 2))
    with pytest.raises(IndexError):
        apply_hadamard(s, 0)


def test_gates_preserve_norm_and_invert():
    s = random_state(6, 4)
    cur = s
    rng = np.random.default_rng(5)
    ops = []
    for _ in range(40):
        q, c = rng.choice(np.arange(1, 7), 2, replace=False)
        a = Phase(int(rng.integers(0, 2**10)), 10)
        kind = rng.integers(0, 3)
        ops.append((kind, int(q), int(c), a))
        if kind == 0:
            cur = apply_hadamard(cur, int(q))
        elif kind == 1:
            cur = apply_rotation(cur, int(q), a)
        else:
            cur = apply_controlled_rotation(cur, int(c), int(q), a)
        assert abs(cur.norm() - 1) < 1e-12
    for kind, q, c, a in reversed(ops):
        if kind == 0:
            cur = apply_hadamard(cur, q)
        elif kind == 1:
            cur = apply_rotation(cur, q, a, -1)
        else:
            cur = apply_controlled_rotation(cur, c, q, a, -1)
    assert np.max(np.abs(cur.amplitudes - s.amplitudes)) < 1e-13


def test_prepare_phase_register():
    n = 4
    np.testing.assert_allclose(prepare_phase_register(Phase.zero(), n).amplitudes,
                               np.full(16, 0.25), atol=1e-15)
    np.testing.assert_allclose(prepare_phase_register(Phase(1, 1), 1).amplitudes, [R, -R],
                               atol=1e-15)


def test_prepare_phase_register_is_product_of_doubled_phases():
    phi = Phase.from_fraction(Fraction(3217, 2**13))
    n = 5
    amps = prepare_phase_register(phi, n).amplitudes
    for idx in range(1 << n):
        bits = [(idx >> (n - p)) & 1 for p in range(1, n + 1)]
        angle = sum(b * (2 ** (p - 1)) * float(phi) for p, b in enumerate(bits, start=1))
        assert abs(amps[idx] - np.exp(2j * np.pi * angle) / 2 ** (n / 2)) < 1e-12


def test_dft_reference():
    for n in (1, 3, 5):
        out = dft_reference(basis_state(n, 0)).amplitudes
        np.testing.assert_allclose(out, np.full(1 << n, 2 ** (-n / 2)), atol=1e-15)
    s = random_state(1, 6)
    np.testing.assert_allclose(dft_reference(s).amplitudes, apply_hadamard(s, 1).amplitudes,
                               atol=1e-15)
    assert abs(dft_reference(random_state(7, 7)).norm() - 1) < 1e-12


def test_dft_reference_matches_numpy_fft():
    s = random_state(6, 8)
    # numpy's inverse FFT uses exp(+2 pi i jk / N) / N
    expected = np.fft.ifft(s.amplitudes) * math.sqrt(64)
    np.testing.assert_allclose(dft_reference(s).amplitudes, expected, atol=1e-12)


def test_dft_size_guard():
    with pytest.raises(ValueError):
        dft_reference(basis_state(13, 0))


def test_measure_basis_state():
    out = measure_qubit(basis_state(3, 0b101), 2, 0.99)
    assert out.bit == 0 and out.probability == 1.0
    out = measure_qubit(basis_state(3, 0b101), 1, 0.0)
    assert out.bit == 1 and out.probability == 1.0


def test_measure_plus_state():
    plus = apply_hadamard(basis_state(1, 0), 1)
    out = measure_qubit(plus, 1, 0.3)
    assert out.bit == 0 and abs(out.probability - 0.5) < 1e-12
    assert abs(out.collapsed_state.norm() - 1) < 1e-12
    assert measure_qubit(plus, 1, 0.7).bit == 1


def test_measurement_marginal():
    s = random_state(5, 9)
    probs = s.probabilities().reshape(2, 2, 2, 2, 2)
    p0 = probs[:, :, 0].sum()
    out = measure_qubit(s, 3, 0.0)
    assert out.bit == 0 and abs(out.probability - p0) < 1e-12
    other = measure_qubit(s, 3, 0.999999)
    assert out.probability + other.probability == 1.0


def test_inner_product_and_fidelity():
    s = random_state(3, 10)
    assert abs(fidelity(s, s) - 1) < 1e-14
    assert fidelity(basis_state(3, 1), basis_state(3, 2)) == 0
    rotated = StateVector(s.amplitudes * np.exp(0.7j), 3)
    assert abs(fidelity(s, rotated) - 1) < 1e-14
    assert abs(inner_product(basis_state(1, 0), StateVector([1j, 0])) - 1j) < 1e-15
    with pytest.raises(ValueError):
        inner_product(basis_state(2, 0), basis_state(3, 0))


def test_states_are_immutable_values():
    s = basis_state(2, 0)
    apply_hadamard(s, 1)
    np.testing.assert_array_equal(s.amplitudes, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2


def test_text_format_golden(tmp_path):
    plus = apply_hadamard(basis_state(2, 1), 1)
    text = plus.to_text()
    assert text == f"1\t{R!r}\t0.0\n3\t{R!r}\t0.0\n"
    back = StateVector.from_text(text, 2)
    np.testing.assert_array_equal(back.amplitudes, plus.amplitudes)
