"""Exact phases on the unit circle, stored as binary fractions k / 2**F.

Everything here is integer arithmetic. Floating point only appears when a
caller asks for ``float(phase)`` or an angle is handed to the simulator.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

GUARD_BITS = 32

_DYADIC_RE = re.compile(r"^\s*(\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")
_BITS_RE = re.compile(r"^\s*0?\.([01]*)b\s*$")
_DECIMAL_RE = re.compile(r"^\s*\d*\.?\d*(e[+-]?\d+)?\s*$", re.IGNORECASE)


def default_precision(n: int) -> int:
    return n + GUARD_BITS


class BitString(tuple):
    """Measured bits x_1 ... x_n, most significant first."""

    def __new__(cls, bits: Iterable[int] = ()):
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {bits!r}")
        return super().__new__(cls, bits)

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        if not 0 <= value < (1 << n):
            raise ValueError(f"{value} does not fit in {n} bits")
        return cls((value >> (n - 1 - i)) & 1 for i in range(n))

    @classmethod
    def parse(cls, text: str) -> "BitString":
        return cls(int(c) for c in text.strip())

    def to_int(self) -> int:
        value = 0
        for b in self:
            value = (value << 1) | b
        return value

    def bit(self, p: int) -> int:
        """1-based access, x_p."""
        if not 1 <= p <= len(self):
            raise IndexError(f"bit index {p} out of range 1..{len(self)}")
        return self[p - 1]

    def __str__(self) -> str:
        return "".join(map(str, self))

    def __repr__(self) -> str:
        return f"BitString('{self}')"


class Phase:
    """A point on the circle, numerator / 2**precision reduced mod 1.

    Equality and hashing go by value, so 1/2 at 4 bits equals 1/2 at 40
    bits. ``rounded`` records whether construction from a decimal string
    had to round; it does not take part in comparisons.
    """

    __slots__ = ("numerator", "precision", "rounded")

    def __init__(self, numerator: int, precision: int, rounded: bool = False):
        if precision < 0:
            raise ValueError("precision must be non-negative")
        object.__setattr__(self, "numerator", int(numerator) % (1 << precision))
        object.__setattr__(self, "precision", int(precision))
        object.__setattr__(self, "rounded", bool(rounded))

    def __setattr__(self, name, value):
        raise AttributeError("Phase is immutable")

    # construction

    @classmethod
    def zero(cls, precision: int = 0) -> "Phase":
        return cls(0, precision)

    @classmethod
    def from_fraction(cls, value, precision: int | None = None) -> "Phase":
        """Exact conversion; raises if ``value`` is not a dyadic fraction."""
        value = Fraction(value) % 1
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not a dyadic fraction")
        bits = den.bit_length() - 1
        if precision is None:
            precision = bits
        elif precision < bits:
            raise ValueError(f"{value} needs {bits} bits, precision is {precision}")
        return cls(value.numerator << (precision - bits), precision)

    @classmethod
    def from_decimal(cls, text: str, precision: int) -> "Phase":
        exact = Fraction(text.strip())
        scaled = exact * (1 << precision)
        num = round(scaled)
        return cls(num, precision, rounded=(num != scaled))

    @classmethod
    def parse(cls, text: str, precision: int | None = None) -> "Phase":
        """Read ``"0.3217"``, ``"k/2^F"`` or ``"0.0101b"``.

        ``precision`` is a floor: exact inputs keep their own precision
        when it is larger. Decimal input needs it (default 64 bits).
        """
        m = _DYADIC_RE.match(text)
        if m:
            k, f = int(m.group(1)), int(m.group(2))
            phase = cls(k, f)
        else:
            m = _BITS_RE.match(text)
            if m:
                phase = phase_from_bits(BitString(int(c) for c in m.group(1)))
            elif text.strip() and _DECIMAL_RE.match(text):
                return cls.from_decimal(text, 64 if precision is None else precision)
            else:
                raise ValueError(f"cannot parse phase {text!r}")
        if precision is not None and precision > phase.precision:
            phase = phase.with_precision(precision)
        return phase

    # conversion

    def with_precision(self, precision: int) -> "Phase":
        shift = precision - self.precision
        if shift >= 0:
            return Phase(self.numerator << shift, precision, self.rounded)
        if self.numerator & ((1 << -shift) - 1):
            raise ValueError(f"{self} is not representable with {precision} bits")
        return Phase(self.numerator >> -shift, precision, self.rounded)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.precision)

    def __float__(self) -> float:
        return self.numerator / (1 << self.precision)

    def dyadic_str(self) -> str:
        return f"{self.numerator}/2^{self.precision}"

    def bits_str(self) -> str:
        frac = self.to_fraction()
        bits = frac.denominator.bit_length() - 1
        num = frac.numerator
        return "0." + (format(num, f"0{bits}b") if bits else "0") + "b"

    def decimal_str(self) -> str:
        """Exact decimal expansion (always finite for a dyadic value)."""
        frac = self.to_fraction()
        bits = frac.denominator.bit_length() - 1
        if bits == 0:
            return "0.0"
        digits = str(frac.numerator * 5**bits).rjust(bits, "0")
        return "0." + digits

    # arithmetic mod 1

    def _align(self, other: "Phase") -> tuple[int, int, int]:
        f = max(self.precision, other.precision)
        return (self.numerator << (f - self.precision),
                other.numerator << (f - other.precision), f)

    def __add__(self, other: "Phase") -> "Phase":
        a, b, f = self._align(other)
        return Phase(a + b, f)

    def __sub__(self, other: "Phase") -> "Phase":
        a, b, f = self._align(other)
        return Phase(a - b, f)

    def __neg__(self) -> "Phase":
        return Phase(-self.numerator, self.precision)

    def doubled(self, times: int) -> "Phase":
        """2**times * phase mod 1 (exact, same precision)."""
        return Phase(self.numerator << times, self.precision)

    def signed(self) -> Fraction:
        """Representative in [-1/2, 1/2)."""
        f = self.to_fraction()
        return f - 1 if f >= Fraction(1, 2) else f

    def __eq__(self, other):
        if isinstance(other, Phase):
            a, b, _ = self._align(other)
            return a == b
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == Fraction(other) % 1
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __str__(self) -> str:
        return self.dyadic_str()

    def __repr__(self) -> str:
        return f"Phase({self.numerator}, {self.precision})"

    def __reduce__(self):
        return (Phase, (self.numerator, self.precision, self.rounded))


def phase_from_bits(x: Sequence[int]) -> Phase:
    """(0.x_1 x_2 ... x_n) as an exact phase with n bits of precision."""
    x = BitString(x)
    return Phase(x.to_int(), len(x))


def wrapped_distance(a: Phase, b: Phase) -> Fraction:
    """Distance on the circle, in [0, 1/2]."""
    d = (a - b).to_fraction()
    return min(d, 1 - d)


def nearest_estimate(phi: Phase, n: int) -> tuple[BitString, Fraction]:
    """Nearest multiple of 2**-n to ``phi`` on the circle.

    Returns the bits of that multiple and the offset delta = phi - estimate,
    wrapped into (-2**-(n+1), 2**-(n+1)]. At an exact halfway point the
    lower multiple wins, so delta = +2**-(n+1).
    """
    if n < 1:
        raise ValueError("register size must be >= 1")
    f = max(phi.precision, n)
    a = phi.numerator << (f - phi.precision)
    s = f - n
    half = (1 << s) >> 1 if s else 0
    if s == 0:
        x = a
    else:
        # ceil((a - half) / 2**s): ties go down
        x = -((half - a) >> s)
    x %= 1 << n
    delta = Phase(a - (x << s), f).signed()
    return BitString.from_int(x, n), delta


def chi(x: Sequence[int], p: int, m: int, n: int) -> Phase:
    """Rotation a truncated semiclassical trial undoes before measuring x_p.

    (0.0 x_{p+1} ... x_{p+m-1}) when p <= n - m, otherwise
    (0.0 x_{p+1} ... x_n). Only x_{p+1} ... x_n are read.
    """
    if not 1 <= p <= n:
        raise ValueError(f"bit index {p} out of range 1..{n}")
    if len(x) != n:
        raise ValueError(f"expected {n} bits, got {len(x)}")
    width = min(m - 1, n - p)
    value = 0
    for b in x[p:p + width]:
        value = (value << 1) | int(b)
    return Phase(value << (n - width - 1), n) if width > 0 else Phase.zero(n)


def clamp_threshold(m: int, n: int) -> int:
    """Clamp a rotation threshold into [2, n]; anything >= n is the full QFT."""
    if m < 1:
        raise ValueError(f"threshold m must be >= 1, got {m}")
    if n < 2:
        return n
    return max(2, min(int(m), n))
