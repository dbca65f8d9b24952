"""QFT and AQFT_m gate programs.

The forward circuit follows the textbook layout with no final swaps: wire j
gets a Hadamard and then controlled R_k rotations (k = 2, 3, ...) with
control j + k - 1. Its output leaves (0.x_j ... x_n) on qubit j, which is
the DFT output with the basis index bit-reversed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .phase import Phase, clamp_threshold
from .statevector import (
    StateVector,
    apply_controlled_rotation,
    apply_hadamard,
)

HADAMARD = "H"
CONTROLLED_RK = "CR"


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: int | None = None
    k: int | None = None
    inverted: bool = False

    def __post_init__(self):
        if self.kind == HADAMARD:
            if self.control is not None or self.k is not None:
                raise ValueError("Hadamard takes no control or order")
        elif self.kind == CONTROLLED_RK:
            if self.k is None or self.k < 2:
                raise ValueError(f"rotation order must be >= 2, got {self.k}")
            if self.control is None or self.control == self.target:
                raise ValueError("controlled rotation needs a distinct control")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def angle(self) -> Phase:
        """Rotation angle as a fraction of a turn, 1 / 2**k."""
        return Phase(1, self.k)

    def inverse(self) -> "Gate":
        if self.kind == HADAMARD:
            return self
        return replace(self, inverted=not self.inverted)

    def to_line(self) -> str:
        if self.kind == HADAMARD:
            return f"H {self.target}"
        line = f"CR {self.k} {self.control} {self.target}"
        return line + " inv" if self.inverted else line


@dataclass(frozen=True)
class GateCount:
    hadamards: int
    rotations: int

    @property
    def total(self) -> int:
        return self.hadamards + self.rotations


@dataclass(frozen=True)
class CircuitPlan:
    n: int
    gates: tuple[Gate, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            wires = (g.target,) if g.control is None else (g.target, g.control)
            if any(not 1 <= w <= self.n for w in wires):
                raise ValueError(f"gate {g.to_line()!r} outside register of {self.n}")

    def __len__(self) -> int:
        return len(self.gates)

    def to_text(self) -> str:
        lines = [f"n={self.n} label={self.label}"]
        lines.extend(g.to_line() for g in self.gates)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitPlan":
        rows = [r.split() for r in text.splitlines() if r.strip()]
        header = dict(item.split("=", 1) for item in rows[0])
        gates = []
        for row in rows[1:]:
            if row[0] == "H" and len(row) == 2:
                gates.append(Gate(HADAMARD, int(row[1])))
            elif row[0] == "CR" and len(row) in (4, 5):
                if len(row) == 5 and row[4] != "inv":
                    raise ValueError(f"bad gate line {' '.join(row)!r}")
                gates.append(Gate(CONTROLLED_RK, int(row[3]), int(row[2]),
                                  int(row[1]), len(row) == 5))
            else:
                raise ValueError(f"bad gate line {' '.join(row)!r}")
        return cls(int(header["n"]), tuple(gates), header.get("label", ""))


def _wire_gates(n: int, max_order: int) -> Iterable[Gate]:
    for j in range(1, n + 1):
        yield Gate(HADAMARD, j)
        for k in range(2, min(max_order, n - j + 1) + 1):
            yield Gate(CONTROLLED_RK, target=j, control=j + k - 1, k=k)


def build_qft(n: int) -> CircuitPlan:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CircuitPlan(n, tuple(_wire_gates(n, n)), "qft")


def build_aqft(n: int, m: int) -> CircuitPlan:
    """QFT with every rotation of order k > m dropped (m is clamped to [2, n])."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = clamp_threshold(m, n)
    if m >= n:
        return build_qft(n)
    return CircuitPlan(n, tuple(_wire_gates(n, m)), f"aqft_{m}")


def inverse(plan: CircuitPlan) -> CircuitPlan:
    if plan.label.startswith("inverse_"):
        label = plan.label[len("inverse_"):]
    else:
        label = "inverse_" + plan.label
    return CircuitPlan(plan.n, tuple(g.inverse() for g in reversed(plan.gates)), label)


def run(plan: CircuitPlan, s: StateVector) -> StateVector:
    if plan.n != s.n:
        raise ValueError(f"plan has {plan.n} qubits, state has {s.n}")
    for g in plan.gates:
        if g.kind == HADAMARD:
            s = apply_hadamard(s, g.target)
        else:
            s = apply_controlled_rotation(s, g.control, g.target, g.angle,
                                          -1 if g.inverted else 1)
    return s


def unitary(plan: CircuitPlan) -> np.ndarray:
    """Matrix of the plan; column j is ``run(plan, basis_state(n, j))``."""
    n = plan.n
    if n > 12:
        raise ValueError("unitary is limited to 12 qubits")
    t = np.eye(1 << n, dtype=np.complex128).reshape((2,) * n + (1 << n,))
    r = 1.0 / math.sqrt(2.0)
    for g in plan.gates:
        i0 = [slice(None)] * (n + 1)
        i1 = list(i0)
        i0[g.target - 1], i1[g.target - 1] = 0, 1
        if g.kind == HADAMARD:
            a0, a1 = t[tuple(i0)].copy(), t[tuple(i1)].copy()
            t[tuple(i0)] = (a0 + a1) * r
            t[tuple(i1)] = (a0 - a1) * r
        else:
            i1[g.control - 1] = 1
            theta = 2.0 * math.pi * float(g.angle)
            t[tuple(i1)] *= complex(math.cos(theta), -math.sin(theta) if g.inverted else math.sin(theta))
    return t.reshape(1 << n, 1 << n)


def gate_count(plan: CircuitPlan) -> GateCount:
    h = sum(1 for g in plan.gates if g.kind == HADAMARD)
    return GateCount(h, len(plan.gates) - h)


def rotation_count(n: int, m: int | None = None) -> int:
    """Closed-form number of controlled rotations in AQFT_m (QFT if m is None)."""
    if m is None or m >= n:
        return n * (n - 1) // 2
    m = clamp_threshold(m, n)
    return (m - 1) * (n - m + 1) + (m - 1) * (m - 2) // 2
