"""Scaling of the whitham divisor image as xi -> xi_r'."""

import math
import sys

import numpy as np

sys.path.insert(0, "src")

from todalab.asymptotics import divisor_gap, divisor_whitham
from todalab.lattice import Background
from todalab.whitham import classify, gamma_mu

left = Background(0.4, -2.0)
sc = classify(left)
xi_rp = sc.ray("xi_r_prime")
ref = divisor_gap(left)
print(f"gap divisor: {ref:.12f}")

rows = []
for dx in (1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7):
    x = xi_rp + dx
    g = gamma_mu(x, left).edge
    s = left.spectrum[1] - g
    v = divisor_whitham(x, left)
    dv = v.real - ref.real
    dv -= round(dv)
    rows.append((dx, s, dv, v.imag - ref.imag))
    print(f"dx={dx:8.1e}  s={s:12.5e}  d_re={dv: .6e}  d_im={rows[-1][3]: .2e}")

print("\nratios (consecutive decades):")
for k in range(2, len(rows), 2):
    print(f"  dx {rows[k-2][0]:.0e}->{rows[k][0]:.0e}: "
          f"s ratio {rows[k-2][1]/rows[k][1]:.3f}, "
          f"d_re ratio {rows[k-2][2]/rows[k][2]:.3f}")

# fit d_re against powers of s
S = np.array([r[1] for r in rows])
D = np.array([r[2] for r in rows])
for name, cols in [
    ("sqrt(s), s", [np.sqrt(S), S]),
    ("s*log s, s", [S * np.log(S), S]),
    ("sqrt(s), sqrt(s)*log s", [np.sqrt(S), np.sqrt(S) * np.log(S)]),
    ("sqrt(s)*log s, sqrt(s), s", [np.sqrt(S) * np.log(S), np.sqrt(S), S]),
]:
    M = np.column_stack([np.ones_like(S)] + cols)
    coef, res, *_ = np.linalg.lstsq(M, D, rcond=None)
    pred = M @ coef
    print(f"model 1,{name}: const={coef[0]: .3e} "
          f"max resid={np.max(np.abs(pred - D)):.2e}")
