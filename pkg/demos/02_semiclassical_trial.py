"""Walk through one semiclassical phase-estimation run.

Each qubit is rotated by a correction built from the bits already read,
then measured. With threshold m the correction keeps only m - 1 of those
bits, and the table shows the residual error each bit is left with.
"""

import numpy as np

from aqftlab import Phase, TrialSpec, sample_run, success_probability_exact
from aqftlab.semiclassical import per_bit_table

n, m = 8, 4
phi = Phase.parse("0.3217", n + 32)  # decimal input is rounded onto a 2^-40 grid
spec = TrialSpec(n, m, phi)
x_hat, delta = spec.nearest
print(f"phi = {phi.decimal_str()}  nearest {n}-bit estimate {x_hat}, offset {float(delta):+.3e}")

print(" p  bit   residual     P(bit)")
for row in per_bit_table(spec):
    print(f"{row.p:2d}  {row.bit}   {float(row.delta):+.6f}   {row.probability:.6f}")
print(f"exact success probability {success_probability_exact(spec):.6f}")

rng = np.random.default_rng(7)
runs = [sample_run(spec, rng.random(n)) for _ in range(5)]
for r in runs:
    print(f"sampled {r.estimate}  success={r.success}  path probability {r.probability:.4f}")
