"""Sector operators on a ring of qubits.

A sector operator P is an unnormalized group sum with P @ P = scale * P,
so P / scale projects onto one symmetry sector of the chain.  This
script builds the momentum, spin-flip, reflection and magnetization
operators on small rings, prints their traces and ranks, and draws a
random state from a chosen momentum sector.
"""

import numpy as np

import symdesigns as sd

N = 8

print(f"momentum sectors on a ring of {N} qubits")
print(f"{'k':>3} {'trace':>8} {'rank':>6}")
total = 0
for k in range(N):
    sector = sd.TranslationSector(N, k=k)
    rank = sd.sector_rank(sector)
    total += rank
    print(f"{k:>3} {sd.sector_trace(sector).real:>8.1f} {rank:>6}")
print(f"ranks sum to {total} = 2**{N}\n")

# the sum of all momentum components resolves the identity
dense = sum(sd.TranslationSector(N, k=k).dense() for k in range(N)) / N
print(f"identity resolution deviation: {np.abs(dense - np.eye(2**N)).max():.2e}")

flip = sd.ParityFlipSector(N, parity=0)
mirror = sd.ReflectionSector(N, mirror=True)
charge = sd.ChargeSector(N, charge=0)
for sector, label in ((flip, "flip even"), (mirror, "mirror reflection"),
                      (charge, "zero magnetization")):
    d = sector.dense()
    dev = np.abs(d @ d - sector.scale * d).max()
    print(f"{label:>18}: rank {sd.sector_rank(sector)}, idempotency dev {dev:.2e}")

# draw a random state from the k = 1 momentum sector and check that the
# shift acts on it as a pure phase
sample = sd.sample_symmetric_state(sd.TranslationSector(N, k=1), sd.rng_stream(5))
shifted = sd.translate(sample.state, N)
overlap = np.vdot(sample.state, shifted)
print(f"\nrandom k=1 state: |<psi|T|psi>| = {abs(overlap):.12f}, "
      f"phase/2pi = {np.angle(overlap) / (2 * np.pi):+.6f}")
