"""Moment convergence of projected ensembles from symmetric states.

Sweeps the number of measured sites for random momentum-sector states
and for unconstrained random states, prints the mean trace distance
from the uniform moment, and fits the base-2 decay rate per added site.
A rate near one half is the signature of generic (chaotic-like) states;
the symmetry constraint does not slow the approach in the
computational basis.

A faster, smaller version of the design-scan experiment; the CLI runs
the full sweep from configs/design_decay.toml.
"""

import numpy as np

import symdesigns as sd

N_A = 3
NB = (4, 5, 6, 7, 8)
T = (1, 2, 3)
GENERATORS = 6

refs = {t: sd.haar_moment(2**N_A, t) for t in T}


def mean_distances(states, n_b):
    geom = sd.SystemGeometry(N_A + n_b, N_A)
    basis = sd.computational_basis(n_b)
    rows = []
    for state in states:
        ens = sd.projected_ensemble(state, basis, geom)
        rows.append([sd.trace_distance(sd.ensemble_moment(ens, t), refs[t])
                     for t in T])
    return np.asarray(rows).mean(axis=0)


table = {}
for n_b in NB:
    n = N_A + n_b
    shift_states = [
        sd.sample_symmetric_state(sd.TranslationSector(n, k=g % 2),
                                  sd.rng_stream(8, 0, n_b, g)).state
        for g in range(GENERATORS)
    ]
    haar_states = [sd.sample_haar_state(2**n, sd.rng_stream(8, 1, n_b, g))
                   for g in range(GENERATORS)]
    table[n_b] = (mean_distances(shift_states, n_b),
                  mean_distances(haar_states, n_b))

print(f"mean distance from the uniform moment, {GENERATORS} states per point")
print(f"{'N_B':>4}" + "".join(f"  sector t={t}" for t in T)
      + "".join(f"    haar t={t}" for t in T))
for n_b in NB:
    sec, haar = table[n_b]
    print(f"{n_b:>4}" + "".join(f" {v:>11.4f}" for v in sec)
          + "".join(f" {v:>11.4f}" for v in haar))

print("\nfitted decay rate per added site (base 2):")
for idx, t in enumerate(T):
    means = np.array([table[n_b][0][idx] for n_b in NB])
    rate = -np.polyfit(np.asarray(NB, float), np.log2(means), 1)[0]
    print(f"  t={t}: {rate:.3f}")
