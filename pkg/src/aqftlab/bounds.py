"""Closed-form success-probability bounds for QFT and AQFT_m phase estimation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .phase import clamp_threshold

QFT_BASELINE = 4.0 / math.pi**2
FIXED_BOUND_CONST = QFT_BASELINE - 1.0 / 16.0

CSV_COLUMNS = ("n", "m", "aqft_bound", "fixed_n", "fixed_const", "barenco", "baseline")


def _sin_small(x: float) -> float:
    # series below 1e-8 avoids the ratio sin(t) / (2**n sin(t / 2**n)) losing digits
    if abs(x) < 1e-8:
        return x * (1.0 - x * x / 6.0)
    return math.sin(x)


def cos_product_identity(theta: float, n: int) -> tuple[float, float]:
    """Both sides of prod_{p=1..n} cos^2(theta / 2**p) = (sin theta / (2**n sin(theta / 2**n)))**2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = 1.0
    for p in range(1, n + 1):
        lhs *= math.cos(math.ldexp(theta, -p)) ** 2
    if theta == 0:
        return lhs, 1.0
    denom = math.ldexp(_sin_small(math.ldexp(theta, -n)), n)
    return lhs, (math.sin(theta) / denom) ** 2


def log_rule(n: int, offset: int = 2) -> int:
    """m = ceil(log2 n) + offset, clamped into [2, n]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return clamp_threshold((n - 1).bit_length() + offset, n)


def aqft_product_bound(n: int, m: int) -> float:
    """The bound before the 4/pi^2 relaxation: exact cos-product for the last m bits."""
    m = clamp_threshold(m, n)
    _, tail = cos_product_identity(math.pi / 2, m)
    return tail * math.cos(math.pi * 2.0**-m) ** (2 * (n - m))


def aqft_lower_bound(n: int, m: int) -> float:
    """4/pi^2 * cos^2(pi 2^-m)^(n - m)."""
    m = clamp_threshold(m, n)
    return QFT_BASELINE * math.cos(math.pi * 2.0**-m) ** (2 * (n - m))


def fixed_bound(n: int) -> float:
    """4/pi^2 - 1/(4n), valid for m >= log2(n) + 2 and n >= 4."""
    if n < 4:
        raise ValueError(f"fixed bound needs n >= 4, got {n}")
    return QFT_BASELINE - 1.0 / (4 * n)


def barenco_bound(n: int, m: float) -> float:
    """Earlier AQFT bound 8/pi^2 sin^2(pi m / 4n); m may be real-valued."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return 8.0 / math.pi**2 * math.sin(math.pi * m / (4 * n)) ** 2


def bernoulli_holds(n: int, m: int) -> bool:
    """(1 - s)^c >= 1 - c s with s = sin^2(pi/4n), c = n - m."""
    s = math.sin(math.pi / (4 * n)) ** 2
    c = n - clamp_threshold(m, n)
    return (1.0 - s) ** c >= 1.0 - c * s


@dataclass(frozen=True)
class BoundsReport:
    n: int
    m: int
    aqft_bound: float
    fixed_bound_n: float | None
    fixed_bound_const: float | None
    barenco_bound: float
    qft_baseline: float
    log_rule_satisfied: bool
    chain_holds: bool | None
    beats_barenco: bool

    def row(self) -> tuple:
        return (self.n, self.m, self.aqft_bound, self.fixed_bound_n,
                self.fixed_bound_const, self.barenco_bound, self.qft_baseline)

    def to_dict(self) -> dict:
        return asdict(self)


def bounds_report(n: int, m: int) -> BoundsReport:
    """Evaluate every bound at (n, m); fixed bounds are None when n < 4.

    ``chain_holds`` checks aqft >= fixed(n) >= 4/pi^2 - 1/16 and is only
    meaningful (not None) when 2**m >= 4n and n >= 4.
    """
    m = clamp_threshold(m, n)
    aqft = aqft_lower_bound(n, m)
    barenco = barenco_bound(n, m)
    rule = (1 << m) >= 4 * n or m == n
    if n >= 4:
        fixed_n, fixed_c = fixed_bound(n), FIXED_BOUND_CONST
        chain = (aqft >= fixed_n >= fixed_c) if rule else None
    else:
        fixed_n = fixed_c = chain = None
    # at m = n the two bounds coincide analytically; don't let rounding pick a winner
    beats = aqft > barenco * (1.0 + 1e-12)
    return BoundsReport(n, m, aqft, fixed_n, fixed_c, barenco, QFT_BASELINE,
                        rule, chain, beats)
