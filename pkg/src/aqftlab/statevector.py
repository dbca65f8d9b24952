"""Dense statevector simulation.

Qubit 1 is the most significant bit of the basis index, so the amplitude
array reshaped to ``(2,) * n`` has qubit q on axis ``q - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .phase import Phase

MAX_QUBITS = 24
DFT_MAX_QUBITS = 12


class StateVector:
    """2**n complex amplitudes. Treated as a value: gates return new states."""

    __slots__ = ("amplitudes", "n")

    def __init__(self, amplitudes, n: int | None = None):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        size = amps.shape[0]
        if n is None:
            n = size.bit_length() - 1
        if size != 1 << n:
            raise ValueError(f"length {size} is not 2**{n}")
        _check_size(n)
        amps = amps.copy()
        amps.flags.writeable = False
        self.amplitudes = amps
        self.n = n

    @classmethod
    def _owned(cls, amps: np.ndarray, n: int) -> "StateVector":
        # takes ownership of a freshly computed array, skipping the copy
        self = object.__new__(cls)
        amps = amps.reshape(-1)
        amps.flags.writeable = False
        self.amplitudes, self.n = amps, n
        return self

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def to_text(self, atol: float = 0.0) -> str:
        """Debug dump: one ``index<TAB>re<TAB>im`` line per nonzero amplitude."""
        lines = []
        for i, a in enumerate(self.amplitudes):
            if abs(a) > atol:
                lines.append(f"{i}\t{float(a.real)!r}\t{float(a.imag)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        for line in text.splitlines():
            if not line.strip():
                continue
            i, re_, im = line.split("\t")
            amps[int(i)] = complex(float(re_), float(im))
        return cls(amps, n)

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


@dataclass(frozen=True)
class MeasurementOutcome:
    bit: int
    collapsed_state: StateVector
    probability: float


def _check_size(n: int) -> None:
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")


def _check_qubit(s: StateVector, q: int) -> None:
    if not 1 <= q <= s.n:
        raise IndexError(f"qubit {q} out of range 1..{s.n}")


def _slot(n: int, assignments: dict[int, int]) -> tuple:
    idx = [slice(None)] * n
    for q, v in assignments.items():
        idx[q - 1] = v
    return tuple(idx)


def _phase_factor(angle: Phase, sign: int) -> complex:
    theta = 2.0 * math.pi * float(angle)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return complex(math.cos(theta), sign * math.sin(theta))


def basis_state(n: int, j: int) -> StateVector:
    _check_size(n)
    if not 0 <= j < (1 << n):
        raise ValueError(f"basis index {j} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[j] = 1.0
    return StateVector(amps, n)


def apply_hadamard(s: StateVector, q: int) -> StateVector:
    _check_qubit(s, q)
    t = s.tensor().copy()
    i0, i1 = _slot(s.n, {q: 0}), _slot(s.n, {q: 1})
    a0, a1 = t[i0].copy(), t[i1].copy()
    r = 1.0 / math.sqrt(2.0)
    t[i0] = (a0 + a1) * r
    t[i1] = (a0 - a1) * r
    return StateVector._owned(t, s.n)


def apply_rotation(s: StateVector, q: int, angle: Phase, sign: int = 1) -> StateVector:
    """Multiply the |1> component of qubit q by exp(sign * 2*pi*i * angle)."""
    _check_qubit(s, q)
    t = s.tensor().copy()
    t[_slot(s.n, {q: 1})] *= _phase_factor(angle, sign)
    return StateVector._owned(t, s.n)


def apply_controlled_rotation(s: StateVector, control: int, target: int,
                              angle: Phase, sign: int = 1) -> StateVector:
    _check_qubit(s, control)
    _check_qubit(s, target)
    if control == target:
        raise ValueError("control and target must differ")
    t = s.tensor().copy()
    t[_slot(s.n, {control: 1, target: 1})] *= _phase_factor(angle, sign)
    return StateVector._owned(t, s.n)


def prepare_phase_register(phi: Phase, n: int) -> StateVector:
    """Product state with qubit p carrying relative phase 2**(p-1) * phi."""
    _check_size(n)
    amps = np.ones(1, dtype=np.complex128)
    r = 1.0 / math.sqrt(2.0)
    for p in range(1, n + 1):
        qubit = np.array([r, r * _phase_factor(phi.doubled(p - 1), 1)])
        amps = np.kron(amps, qubit)
    return StateVector(amps, n)


@lru_cache(maxsize=4)
def dft_matrix(n: int) -> np.ndarray:
    """The defining DFT matrix exp(2*pi*i*j*k / 2**n) / sqrt(2**n) (read-only, cached)."""
    if not 1 <= n <= DFT_MAX_QUBITS:
        raise ValueError(f"dft_matrix is limited to 1..{DFT_MAX_QUBITS} qubits")
    size = 1 << n
    jk = np.outer(np.arange(size), np.arange(size)) % size
    matrix = np.exp(2j * np.pi * jk / size) / math.sqrt(size)
    matrix.flags.writeable = False
    return matrix


def dft_reference(s: StateVector) -> StateVector:
    """Apply the DFT matrix directly, with no circuit in between."""
    if s.n > DFT_MAX_QUBITS:
        raise ValueError(f"dft_reference is limited to {DFT_MAX_QUBITS} qubits")
    return StateVector._owned(dft_matrix(s.n) @ s.amplitudes, s.n)


def measure_qubit(s: StateVector, q: int, random_draw: float) -> MeasurementOutcome:
    """Projective measurement; outcome 0 iff ``random_draw < P(0)``."""
    _check_qubit(s, q)
    t = s.tensor()
    i0, i1 = _slot(s.n, {q: 0}), _slot(s.n, {q: 1})
    p0 = float(np.sum(np.abs(t[i0]) ** 2))
    p0 /= p0 + float(np.sum(np.abs(t[i1]) ** 2))
    p1 = 1.0 - p0
    bit = 0 if random_draw < p0 else 1
    prob = p0 if bit == 0 else p1
    collapsed = np.zeros_like(t)
    keep = i0 if bit == 0 else i1
    collapsed[keep] = t[keep] / math.sqrt(prob)
    return MeasurementOutcome(bit, StateVector(collapsed.reshape(-1), s.n), prob)


def inner_product(a: StateVector, b: StateVector) -> complex:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner_product(a, b)) ** 2
