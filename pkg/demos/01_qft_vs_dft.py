"""The gate-level QFT against the DFT matrix, and what pruning rotations costs.

The circuit leaves qubit j holding (0.x_j ... x_n), which is the DFT output
read with the bit order reversed. Dropping small rotations (AQFT_m) lowers
the fidelity with the exact transform, fast at first and then barely at all.
"""

import numpy as np

from aqftlab import basis_state, build_aqft, build_qft, run
from aqftlab.experiments import fidelity_sweep
from aqftlab.statevector import dft_matrix

n = 6
rev = [int(format(k, f"0{n}b")[::-1], 2) for k in range(1 << n)]
err = max(np.abs(run(build_qft(n), basis_state(n, j)).amplitudes - dft_matrix(n)[rev, j]).max()
          for j in range(1 << n))
print(f"QFT_{n} vs DFT (bit-reversed output): max amplitude error {err:.1e}")

print(build_aqft(4, 2).to_text())

print("n=8: fidelity |<QFT x|AQFT_m x>|^2 over all 256 inputs")
for row in fidelity_sweep(8, range(2, 9)):
    print(f"  m={row.m}  min={row.min_fidelity:.6f}  mean={row.mean_fidelity:.6f}")
