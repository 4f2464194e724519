"""When does a measurement basis respect a symmetry sector?

For each outcome b of the measurement on B, sandwich the sector
operator to get an operator on A; a basis is compatible with the sector
when every such block is the identity.  The violation average collects
the trace-norm deviation over outcomes.  Several cases have exact
values, printed here next to the measured ones.
"""

import numpy as np

import symdesigns as sd

N_A = 2

print("spin-flip sector, even parity")
print(f"{'N':>4} {'computational':>15} {'all-x':>10} {'2**N_A':>8} {'rescued':>10}")
for n in (6, 8, 10):
    geom = sd.SystemGeometry(n, N_A)
    n_b = n - N_A
    flip = sd.ParityFlipSector(n, parity=0)
    comp = sd.violation(flip, sd.computational_basis(n_b), geom).average
    xall = sd.violation(flip, sd.sigma_x_basis(n_b), geom).average
    # rotating the last measured site back to the computational axis
    # restores compatibility even though every site reads out spin-x
    resc = sd.violation(flip, sd.mixed_last_site_basis(n_b, 1.0), geom).average
    print(f"{n:>4} {comp:>15.2e} {xall:>10.4f} {2**N_A:>8} {resc:>10.2e}")

print("\nreflection sector, computational basis "
      "(average over outcomes, normalized by 2**N_A)")
print(f"{'N':>4} {'measured':>12} {'closed form':>12}")
for n in (5, 6, 7, 8, 9, 10):
    geom = sd.SystemGeometry(n, N_A)
    if n % 2:
        sector = sd.ReflectionSector(n, site=0, sign=1)
        exact = 2.0 ** (-(n - 1) / 2)
    else:
        sector = sd.ReflectionSector(n, mirror=True)
        exact = 2.0 ** (-n / 2)
    got = sd.violation(sector, sd.computational_basis(n - N_A), geom).average
    print(f"{n:>4} {got / 2**N_A:>12.6f} {exact:>12.6f}")

print("\ntilting the last site from x back toward z, flip sector N = 10:")
geom = sd.SystemGeometry(10, N_A)
flip = sd.ParityFlipSector(10, parity=0)
for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
    basis = sd.mixed_last_site_basis(8, alpha)
    avg = sd.violation(flip, basis, geom).average
    bar = "#" * int(round(12 * avg / 2**N_A))
    print(f"  alpha {alpha:4.2f}: average {avg:8.4f} {bar}")
