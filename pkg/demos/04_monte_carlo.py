"""Seeded sampling of the measurement chain agrees with the exact probability.

Draws for sample i come from fixed counter blocks of a Philox stream keyed
by (seed, n, m), so splitting the work across threads changes nothing.
"""

from aqftlab import Phase, TrialSpec, success_probability_exact
from aqftlab.experiments import monte_carlo_estimate

spec = TrialSpec(8, 5, Phase.parse("0.3217", 40))
exact = success_probability_exact(spec)
for workers in (1, 4):
    r = monte_carlo_estimate(spec, 100_000, seed=42, workers=workers)
    z = (r.p_hat - exact) / r.standard_error
    print(f"workers={workers}: p_hat={r.p_hat:.5f} +/- {r.standard_error:.5f}  "
          f"exact={exact:.5f}  z={z:+.2f}")
