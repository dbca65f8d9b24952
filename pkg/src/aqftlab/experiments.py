"""Reproducible batch experiments: exact sweeps, Monte Carlo, fidelity and gate counts.

Rows are always sorted by key before they are returned, and Monte Carlo
draws are addressed by (seed, n, m, sample index), so results do not depend
on how many workers computed them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .bounds import aqft_lower_bound, fixed_bound, log_rule
from .circuits import build_aqft, build_qft, gate_count, rotation_count, unitary
from .phase import Phase, clamp_threshold, default_precision
from .semiclassical import (
    Criterion,
    TrialSpec,
    qualifying_strings,
    sample_batch,
    success_probability_exact,
)

MC_CHUNK = 8192
FIDELITY_MAX_QUBITS = 10


# m rules and phi grids

@dataclass(frozen=True)
class Fixed:
    m: int

    def resolve(self, n: int) -> int:
        return clamp_threshold(self.m, n)


@dataclass(frozen=True)
class LogRule:
    offset: int = 2

    def resolve(self, n: int) -> int:
        return log_rule(n, self.offset)


@dataclass(frozen=True)
class Dyadic:
    """``points`` evenly spaced phases j / points in [0, 1), rounded onto a
    2**-G lattice with G = max(n + 3, log2 points).

    With G = n + 3 every estimate bin is cut into eighths, so a grid whose
    size is not a power of two walks through exact hits, near-ties and ties.
    """
    points: int

    def phases(self, n: int, precision: int) -> list[Phase]:
        if self.points < 1:
            raise ValueError("a dyadic grid needs at least one point")
        k = self.points
        g = max(n + 3, (k - 1).bit_length())
        f = max(precision, g)
        return [Phase(round(Fraction(j << g, k)), g).with_precision(f) for j in range(k)]


@dataclass(frozen=True)
class WorstCase:
    """Exact ties, near-ties and exact hits around a set of estimates.

    Every estimate is used for n <= 8; larger registers use fixed patterns
    (all zeros, all ones, alternating, ones-tails of every length) plus a
    handful of seeded random strings.
    """
    random_strings: int = 16

    def estimates(self, n: int) -> list[int]:
        if n <= 8:
            return list(range(1 << n))
        full = (1 << n) - 1
        alt = int("01" * n, 2) & full
        picks = {0, full, alt, full ^ alt}
        picks.update((1 << k) - 1 for k in range(1, n))
        picks.update(full ^ ((1 << k) - 1) for k in range(1, n))
        rng = random.Random(n)
        picks.update(rng.getrandbits(n) for _ in range(self.random_strings))
        return sorted(picks)

    def phases(self, n: int, precision: int) -> list[Phase]:
        f = precision
        s = f - n
        half = 1 << (s - 1)
        out = set()
        for x in self.estimates(n):
            base = x << s
            for off in (0, half, half - 1, -half + 1):
                out.add(Phase(base + off, f))
        return sorted(out, key=lambda ph: ph.numerator)


@dataclass(frozen=True)
class Explicit:
    phis: tuple

    def phases(self, n: int, precision: int) -> list[Phase]:
        return [p if p.precision >= precision else p.with_precision(precision)
                for p in self.phis]


MRule = Union[Fixed, LogRule]
PhiGrid = Union[Dyadic, WorstCase, Explicit]


@dataclass(frozen=True)
class SweepConfig:
    n_values: tuple[int, ...]
    m_rule: MRule = LogRule(2)
    phi_grids: tuple = (Dyadic(257),)
    criterion: Criterion = Criterion.NEAREST
    seed: int = 0
    samples: int = 0

    def __post_init__(self):
        if not self.n_values:
            raise ValueError("n_values must be non-empty")
        if not self.phi_grids:
            raise ValueError("at least one phi grid is required")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "phi_grids", tuple(self.phi_grids))
        object.__setattr__(self, "criterion", Criterion(self.criterion))


def parse_config(text: str) -> SweepConfig:
    """Read a key=value config. Recognised keys:

    n (comma list), m, log_rule, grid, worst_case, phi (comma list),
    criterion, seed, samples. Blank lines and ``#`` comments are ignored.
    """
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    known = {"n", "m", "log_rule", "grid", "worst_case", "phi", "criterion", "seed", "samples"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "n" not in values:
        raise ValueError("config needs n=")
    n_values = tuple(int(v) for v in values["n"].split(","))
    if "m" in values:
        m_rule: MRule = Fixed(int(values["m"]))
    else:
        m_rule = LogRule(int(values.get("log_rule", 2)))
    grids: list = []
    if "grid" in values:
        grids.append(Dyadic(int(values["grid"])))
    if values.get("worst_case", "false").lower() in ("1", "true", "yes"):
        grids.append(WorstCase())
    if "phi" in values:
        grids.append(Explicit(tuple(Phase.parse(v, 64) for v in values["phi"].split(","))))
    return SweepConfig(n_values, m_rule, tuple(grids) or (Dyadic(257),),
                       Criterion(values.get("criterion", "nearest")),
                       int(values.get("seed", 0)), int(values.get("samples", 0)))


# exact sweeps

@dataclass(frozen=True)
class SweepRow:
    n: int
    m: int
    phi: Phase
    exact_p: float
    aqft_bound: float
    fixed_bound: float | None

    @property
    def margin(self) -> float:
        return self.exact_p - self.aqft_bound

    @property
    def violation(self) -> bool:
        return self.exact_p < self.aqft_bound


@dataclass(frozen=True)
class SweepSummary:
    rows: int
    min_p: float
    argmin_n: int
    argmin_phi: Phase
    violations: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    summary: SweepSummary = field(init=False)

    def __post_init__(self):
        worst = min(self.rows, key=lambda r: r.exact_p)
        object.__setattr__(self, "summary", SweepSummary(
            len(self.rows), worst.exact_p, worst.n, worst.phi,
            sum(r.violation for r in self.rows)))


def _sweep_one(args) -> list[SweepRow]:
    n, m, phis, criterion = args
    aqft = aqft_lower_bound(n, m)
    fixed = fixed_bound(n) if n >= 4 else None
    spec = TrialSpec(n, m, Phase.zero(n), criterion)
    return [SweepRow(n, m, phi, success_probability_exact(spec.with_phi(phi)), aqft, fixed)
            for phi in phis]


def sweep_exact(config: SweepConfig, workers: int = 1) -> SweepResult:
    tasks = []
    for n in config.n_values:
        m = config.m_rule.resolve(n)
        f = default_precision(n)
        phis = [ph for grid in config.phi_grids for ph in grid.phases(n, f)]
        tasks.append((n, m, phis, config.criterion))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_sweep_one, tasks))
    else:
        chunks = [_sweep_one(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.n, r.m, r.phi.to_fraction()))
    return SweepResult(tuple(rows))


def monotonicity_check(n: int, points: int = 1024,
                       criterion: Criterion = Criterion.NEAREST) -> list[tuple[Phase, int, float, float]]:
    """Where does raising m from m to m+1 lower the exact success probability?

    Scans a dyadic grid of ``points`` phases and returns (phi, m, P_m, P_{m+1})
    for every decrease larger than 1e-12.
    """
    f = default_precision(n)
    g = max(n + 3, (points - 1).bit_length())
    phis = [Phase(round(Fraction(j << g, points)), g).with_precision(f) for j in range(points)]
    found = []
    for phi in phis:
        probs = [success_probability_exact(TrialSpec(n, m, phi, criterion))
                 for m in range(2, n + 1)]
        for m, (a, b) in enumerate(zip(probs, probs[1:]), start=2):
            if b < a - 1e-12:
                found.append((phi, m, a, b))
    return found


# Monte Carlo

@dataclass(frozen=True)
class MonteCarloResult:
    p_hat: float
    standard_error: float
    successes: int
    samples: int
    seed: int


def _stream_key(seed: int, n: int, m: int) -> np.ndarray:
    return np.random.SeedSequence([seed, n, m]).generate_state(2, np.uint64)


def sample_draws(seed: int, n: int, m: int, start: int, stop: int) -> np.ndarray:
    """Uniform draws for samples start..stop-1, shape (stop - start, n).

    Sample i always reads the same Philox counter blocks, so any split of
    the index range into chunks reproduces the same draws.
    """
    blocks = -(-n // 4)
    gen = np.random.Philox(key=_stream_key(seed, n, m), counter=start * blocks)
    raw = gen.random_raw((stop - start) * blocks * 4).reshape(stop - start, blocks * 4)
    return (raw[:, :n] >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _count_successes(spec: TrialSpec, seed: int, start: int, stop: int) -> int:
    draws = sample_draws(seed, spec.n, spec.m, start, stop)
    xs, _ = sample_batch(spec, draws)
    good = {s.to_int() for s in qualifying_strings(spec)}
    if xs.dtype == object:
        return sum(1 for x in xs if x in good)
    return int(np.isin(xs, list(good)).sum())


def monte_carlo_estimate(spec: TrialSpec, samples: int, seed: int,
                         workers: int = 1) -> MonteCarloResult:
    if samples < 100:
        raise ValueError("Monte Carlo needs at least 100 samples")
    if seed < 0 or seed >= 1 << 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    bounds = [(i, min(i + MC_CHUNK, samples)) for i in range(0, samples, MC_CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda b: _count_successes(spec, seed, *b), bounds))
    else:
        counts = [_count_successes(spec, seed, *b) for b in bounds]
    hits = sum(counts)
    p_hat = hits / samples
    return MonteCarloResult(p_hat, math.sqrt(p_hat * (1 - p_hat) / samples), hits, samples, seed)


# fidelity and gate counts

@dataclass(frozen=True)
class FidelityRow:
    n: int
    m: int
    min_fidelity: float
    mean_fidelity: float


def fidelity_sweep(n: int, m_list: Iterable[int]) -> list[FidelityRow]:
    """|<QFT x | AQFT_m x>|^2 over every basis input x."""
    if n > FIDELITY_MAX_QUBITS:
        raise ValueError(f"fidelity sweep limited to {FIDELITY_MAX_QUBITS} qubits")
    exact = unitary(build_qft(n))
    rows = []
    for m in sorted({clamp_threshold(m, n) for m in m_list}):
        approx = unitary(build_aqft(n, m))
        fids = np.abs(np.einsum("ij,ij->j", exact.conj(), approx)) ** 2
        rows.append(FidelityRow(n, m, float(fids.min()), float(fids.mean())))
    return rows


@dataclass(frozen=True)
class GateCountRow:
    n: int
    m: int
    hadamards: int
    qft_rotations: int
    aqft_rotations: int

    @property
    def ratio(self) -> float:
        return self.qft_rotations / self.aqft_rotations if self.aqft_rotations else math.nan


def gate_count_table(n_list: Sequence[int], m_rule: MRule = LogRule(2),
                     enumerate_upto: int = 64) -> list[GateCountRow]:
    """Rotation counts per n; small registers are cross-checked by building the circuits."""
    rows = []
    for n in n_list:
        m = m_rule.resolve(n)
        qft_r, aqft_r = rotation_count(n), rotation_count(n, m)
        if n <= enumerate_upto:
            counted = gate_count(build_aqft(n, m))
            if (counted.hadamards, counted.rotations) != (n, aqft_r):
                raise AssertionError(f"closed form disagrees with circuit at n={n}, m={m}")
        rows.append(GateCountRow(n, m, n, qft_r, aqft_r))
    return sorted(rows, key=lambda r: (r.n, r.m))


# serialization

def fmt_prob(x: float | None) -> str:
    return "NA" if x is None else format(x, ".12g")


SWEEP_COLUMNS = ("n", "m", "phi", "phi_dyadic", "exact_p", "aqft_bound", "fixed_bound", "margin")


def _sweep_record(r: SweepRow) -> dict:
    return {"n": r.n, "m": r.m, "phi": fmt_prob(float(r.phi)), "phi_dyadic": r.phi.dyadic_str(),
            "exact_p": fmt_prob(r.exact_p), "aqft_bound": fmt_prob(r.aqft_bound),
            "fixed_bound": fmt_prob(r.fixed_bound), "margin": fmt_prob(r.margin)}


def sweep_to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in result.rows:
        rec = _sweep_record(r)
        w.writerow([rec[c] for c in SWEEP_COLUMNS])
    return buf.getvalue()


def summary_line(s: SweepSummary) -> str:
    return (f"rows={s.rows} min_p={fmt_prob(s.min_p)} argmin_n={s.argmin_n} "
            f"argmin_phi={s.argmin_phi.dyadic_str()} violations={s.violations}")


def sweep_to_json(result: SweepResult) -> str:
    s = result.summary
    objs = [_sweep_record(r) for r in result.rows]
    objs.append({"summary": True, "rows": s.rows, "min_p": fmt_prob(s.min_p),
                 "argmin_n": s.argmin_n, "argmin_phi": s.argmin_phi.dyadic_str(),
                 "violations": s.violations})
    return json.dumps(objs, indent=1) + "\n"
