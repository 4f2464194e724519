"""Random unitaries that commute with the shift.

Draws unitaries uniformly from the commutant of the translation (via a
Ginibre average over shift conjugations and a polar decomposition) and
checks the two defining properties sample by sample.  Averaging
U rho U^dag over many draws lands on the momentum-block mixture fixed
by the input state, which the script verifies against the closed form.
"""

import numpy as np

import symdesigns as sd

N = 4
DIM = 2**N
SAMPLES = 2000

shift = sd.translation_operator(N)
worst_u = worst_c = 0.0
for i in range(200):
    u = sd.sample_t_invariant_unitary(N, 2, sd.rng_stream(3, i))
    worst_u = max(worst_u, np.abs(u.conj().T @ u - np.eye(DIM)).max())
    worst_c = max(worst_c, np.abs(u @ shift - shift @ u).max())
print(f"200 draws at N={N}: worst unitarity dev {worst_u:.2e}, "
      f"worst shift commutator {worst_c:.2e}")

psi = sd.sample_haar_state(DIM, sd.rng_stream(4))
rho = np.outer(psi, psi.conj())

# closed form for the average: the state's weight in each momentum
# block, spread uniformly over that block
reference = np.zeros((DIM, DIM), dtype=complex)
for k in range(N):
    q = sd.TranslationSector(N, k=k).dense() / N
    rank = round(np.trace(q).real)
    reference += np.trace(q @ rho).real * q / rank

accum = np.zeros((DIM, DIM), dtype=complex)
for i in range(SAMPLES):
    u = sd.sample_t_invariant_unitary(N, 2, sd.rng_stream(5, i))
    accum += u @ rho @ u.conj().T
accum /= SAMPLES

print(f"twirl average over {SAMPLES} draws: trace distance from the "
      f"block mixture {sd.trace_distance(accum, reference):.4f}")
print("(shrinks like one over the square root of the sample count)")
