"""Rotation counts: quadratic for the full QFT, n log n under the log rule."""

from aqftlab.experiments import LogRule, gate_count_table

print("     n    m   qft rotations   aqft rotations   ratio")
for row in gate_count_table([8, 32, 128, 512, 1024, 4096], LogRule(2)):
    print(f"{row.n:6d} {row.m:4d} {row.qft_rotations:15d} {row.aqft_rotations:16d} {row.ratio:7.1f}")
