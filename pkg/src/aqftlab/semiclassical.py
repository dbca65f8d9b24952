"""Semiclassical (measure-and-feed-forward) inverse AQFT_m phase estimation.

Bits are measured from x_n down to x_1. Before measuring x_p the trial
rotates its qubit by -chi_p, where chi_p is built from the bits already
seen, truncated to the m - 1 most significant ones. The qubit then reads
x_p with probability cos^2(pi * eps_p), eps_p being the leftover phase.

All phase bookkeeping is done on integers modulo 2**W, where W is the
working precision of the trial (at least n bits). Floats only appear at the
final cos^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .phase import BitString, Phase, chi, clamp_threshold, nearest_estimate

FULL_DISTRIBUTION_MAX_QUBITS = 12


class Criterion(str, enum.Enum):
    NEAREST = "nearest"
    ONE_OF_TWO_NEAREST = "two"


@dataclass(frozen=True)
class TrialSpec:
    n: int
    m: int
    phi: Phase
    criterion: Criterion = Criterion.NEAREST

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("register size must be >= 1")
        object.__setattr__(self, "m", clamp_threshold(self.m, self.n))
        object.__setattr__(self, "criterion", Criterion(self.criterion))

    @property
    def precision(self) -> int:
        return max(self.phi.precision, self.n)

    @cached_property
    def _phi_num(self) -> int:
        return self.phi.numerator << (self.precision - self.phi.precision)

    @cached_property
    def nearest(self) -> tuple[BitString, Fraction]:
        return nearest_estimate(self.phi, self.n)

    @cached_property
    def _doubled(self) -> tuple[int, ...]:
        # 2**(p-1) * phi mod 1 for p = 1..n, as numerators over 2**W
        mod = (1 << self.precision) - 1
        return tuple((self._phi_num << (p - 1)) & mod for p in range(1, self.n + 1))

    def with_phi(self, phi: Phase) -> "TrialSpec":
        return TrialSpec(self.n, self.m, phi, self.criterion)


@dataclass(frozen=True)
class RunRecord:
    estimate: BitString
    per_bit_probabilities: tuple[float, ...]
    success: bool

    @property
    def probability(self) -> float:
        return math.prod(self.per_bit_probabilities)


@dataclass(frozen=True)
class BitRow:
    """One line of the per-bit breakdown printed by the ``trial`` command."""
    p: int
    bit: int
    chi: Phase
    delta: Fraction
    probability: float


def _wrap(num: int, w: int) -> int:
    """Integer representative of num / 2**w in [-2**(w-1), 2**(w-1))."""
    num &= (1 << w) - 1
    return num - (1 << w) if num >> (w - 1) else num


def _chi_num(x: int, p: int, spec: TrialSpec) -> int:
    """chi_p over 2**W, read from the low n - p bits of x."""
    n, w = spec.n, spec.precision
    rest = n - p
    width = min(spec.m - 1, rest)
    if width <= 0:
        return 0
    top = (x & ((1 << rest) - 1)) >> (rest - width)
    return top << (w - width - 1)


def _eps_num(spec: TrialSpec, x: int, p: int) -> int:
    w = spec.precision
    bit = (x >> (spec.n - p)) & 1
    return _wrap(spec._doubled[p - 1] - _chi_num(x, p, spec) - (bit << (w - 1)), w)


def _cos2(num: int, w: int) -> float:
    return math.cos(math.pi * (num / (1 << w))) ** 2


def _tail_int(spec: TrialSpec, p: int, measured_tail) -> int:
    """Pack x-hat_1..x-hat_p followed by the given tail into an integer."""
    n = spec.n
    x_hat = spec.nearest[0]
    if measured_tail is None:
        return x_hat.to_int()
    tail = BitString(measured_tail)
    if len(tail) != n - p:
        raise ValueError(f"bit {p} of {n} needs a tail of {n - p} bits, got {len(tail)}")
    return BitString(tuple(x_hat[:p]) + tuple(tail)).to_int()


def delta_p(spec: TrialSpec, p: int, measured_tail: Sequence[int] | None = None) -> Fraction:
    """Residual phase delta_p in [-1/2, 1/2) for the trial measuring x_p.

    The target bit x_p is the nearest estimate's; ``measured_tail`` holds
    x_{p+1}..x_n (defaults to the nearest estimate's tail). Computed both
    from the closed two-case formula and from the operational phase
    difference; the two must agree exactly.
    """
    n, m, w = spec.n, spec.m, spec.precision
    if not 1 <= p <= n:
        raise ValueError(f"bit index {p} out of range 1..{n}")
    x = _tail_int(spec, p, measured_tail)
    operational = Fraction(_eps_num(spec, x, p), 1 << w)

    bits = BitString.from_int(x, n)
    offset = (spec.phi - Phase(x, n)).signed()
    closed = (offset * (1 << (p - 1))) % 1
    if p <= n - m:
        rest = bits[p + m - 1:]
        closed += Fraction(BitString(rest).to_int(), 1 << (len(rest) + m))
    closed %= 1
    if closed >= Fraction(1, 2):
        closed -= 1
    if closed != operational:
        raise AssertionError(f"delta_{p} routes disagree: {closed} vs {operational}")
    return operational


def bit_success_probability(spec: TrialSpec, p: int,
                            measured_tail: Sequence[int] | None = None) -> float:
    d = delta_p(spec, p, measured_tail)
    return math.cos(math.pi * float(d)) ** 2


def path_probability(spec: TrialSpec, target: Sequence[int]) -> float:
    """Probability that the semiclassical chain outputs exactly ``target``."""
    target = BitString(target)
    if len(target) != spec.n:
        raise ValueError(f"target has {len(target)} bits, register has {spec.n}")
    x, w = target.to_int(), spec.precision
    prob = 1.0
    for p in range(spec.n, 0, -1):
        prob *= _cos2(_eps_num(spec, x, p), w)
    return prob


def qualifying_strings(spec: TrialSpec) -> list[BitString]:
    """Estimates that count as a success under the trial's criterion."""
    x_hat, delta = spec.nearest
    if spec.criterion is Criterion.NEAREST or delta == 0:
        return [x_hat]
    n = spec.n
    step = 1 if delta > 0 else -1
    other = BitString.from_int((x_hat.to_int() + step) % (1 << n), n)
    return sorted([x_hat, other])


def candidate_probabilities(spec: TrialSpec) -> dict[BitString, float]:
    return {s: path_probability(spec, s) for s in qualifying_strings(spec)}


def success_probability_exact(spec: TrialSpec) -> float:
    return sum(candidate_probabilities(spec).values())


def per_bit_table(spec: TrialSpec) -> list[BitRow]:
    """Per-trial breakdown along the nearest estimate, in measurement order."""
    x_hat = spec.nearest[0]
    rows = []
    for p in range(spec.n, 0, -1):
        d = delta_p(spec, p)
        rows.append(BitRow(p, x_hat[p - 1], chi(x_hat, p, spec.m, spec.n), d,
                           math.cos(math.pi * float(d)) ** 2))
    return rows


# vectorised kernels

def _int_array(values, w: int) -> np.ndarray:
    return np.asarray(values, dtype=np.int64 if w <= 62 else object)


def _to_float(nums: np.ndarray, w: int) -> np.ndarray:
    if nums.dtype == object:
        return np.array([v / (1 << w) for v in nums], dtype=np.float64)
    return nums.astype(np.float64) * (2.0 ** -w)


def _wrap_array(nums: np.ndarray, w: int) -> np.ndarray:
    nums = nums & ((1 << w) - 1)
    return np.where(nums >= (1 << (w - 1)), nums - (1 << w), nums)


def _chi_array(spec: TrialSpec, xs: np.ndarray, p: int) -> np.ndarray:
    rest = spec.n - p
    width = min(spec.m - 1, rest)
    if width <= 0:
        return xs * 0
    top = (xs & ((1 << rest) - 1)) >> (rest - width)
    return top << (spec.precision - width - 1)


def path_probabilities(spec: TrialSpec, targets) -> np.ndarray:
    """``path_probability`` for an array of integer-encoded targets."""
    w = spec.precision
    xs = _int_array(targets, w)
    prob = np.ones(xs.shape, dtype=np.float64)
    for p in range(spec.n, 0, -1):
        bit = (xs >> (spec.n - p)) & 1
        eps = _wrap_array(spec._doubled[p - 1] - _chi_array(spec, xs, p) - (bit << (w - 1)), w)
        prob *= np.cos(np.pi * _to_float(eps, w)) ** 2
    return prob


def distribution_vector(spec: TrialSpec) -> np.ndarray:
    """Output distribution indexed by the integer value of x_1..x_n."""
    if spec.n > FULL_DISTRIBUTION_MAX_QUBITS:
        raise ValueError(f"full distribution limited to {FULL_DISTRIBUTION_MAX_QUBITS} qubits")
    return path_probabilities(spec, np.arange(1 << spec.n))


def full_distribution(spec: TrialSpec) -> dict[BitString, float]:
    probs = distribution_vector(spec)
    return {BitString.from_int(i, spec.n): float(q) for i, q in enumerate(probs)}


def sample_batch(spec: TrialSpec, draws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run the feed-forward chain for each row of ``draws``.

    ``draws[:, 0]`` decides x_n, ``draws[:, 1]`` decides x_{n-1}, and so on.
    A bit reads 0 when its draw is below cos^2(pi * theta_p). Returns the
    integer estimates and the (rows, n) probabilities of each observed
    outcome, in measurement order.
    """
    draws = np.asarray(draws, dtype=np.float64)
    if draws.ndim != 2 or draws.shape[1] < spec.n:
        raise ValueError(f"need {spec.n} draws per run")
    n, w = spec.n, spec.precision
    xs = _int_array(np.zeros(draws.shape[0], dtype=np.int64), w)
    probs = np.empty((draws.shape[0], n), dtype=np.float64)
    for i, p in enumerate(range(n, 0, -1)):
        theta = _wrap_array(spec._doubled[p - 1] - _chi_array(spec, xs, p), w)
        p0 = np.cos(np.pi * _to_float(theta, w)) ** 2
        bit = (draws[:, i] >= p0)
        probs[:, i] = np.where(bit, 1.0 - p0, p0)
        xs = xs | (_int_array(bit.astype(np.int64), w) << (n - p))
    return xs, probs


def sample_run(spec: TrialSpec, draws: Sequence[float]) -> RunRecord:
    """One run of the chain using ``draws[i]`` for the i-th measured bit (x_n first)."""
    xs, probs = sample_batch(spec, np.asarray(draws, dtype=np.float64)[None, :])
    estimate = BitString.from_int(int(xs[0]), spec.n)
    return RunRecord(estimate, tuple(float(q) for q in probs[0]),
                     estimate in qualifying_strings(spec))
