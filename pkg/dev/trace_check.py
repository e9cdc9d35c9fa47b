"""Check b_q(0,0) = sum(E)/2 - lam(rho) for the gap-zone model."""

import math
import sys

sys.path.insert(0, "src")

from todalab.asymptotics import gap_model
from todalab.lattice import Background
from todalab.riemann import jacobi_invert, reduce_mod_lattice

left = Background(0.4, -2.0)
gm = gap_model(left)
surf = gm.surface

rho = jacobi_invert(surf, gm.divisor_image)
half_sum = 0.5 * sum(surf.E)
print(f"divisor image  {gm.divisor_image}")
print(f"rho            lam={rho.lam:.12f} sheet={rho.sheet}")
print(f"halfsum E      {half_sum}")

_, b00 = gm.values(0, 0.0)
mu_b = half_sum - b00
print(f"b_q(0,0)       {b00:.12f}   -> mu {mu_b:.12f}")
print(f"mismatch       {abs(mu_b - rho.lam.real):.3e}")

# direction: does mu(n,0) follow A(rho) + n*A_inf or - n*A_inf?
for n in (1, 2, 3):
    _, bn = gm.values(n, 0.0)
    mu_n = half_sum - bn
    for sgn in (+1, -1):
        w = reduce_mod_lattice(gm.divisor_image + sgn * n * surf.abel_infty,
                               surf.tau)
        lam = jacobi_invert(surf, w).lam.real
        print(f"n={n} sgn={sgn:+d}: mu from b {mu_n:.9f}  from abel {lam:.9f}"
              f"  diff {abs(mu_n - lam):.2e}")
