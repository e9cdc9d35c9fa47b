"""Fit the residual phase offset at several times and extrapolate t -> inf."""

import math
import sys

import numpy as np

sys.path.insert(0, "src")

from todalab.asymptotics import TwoBandModel, gap_model
from todalab.lattice import (Background, default_window, evolve,
                             make_step_initial)
from todalab.whitham import classify

left = Background(0.4, -2.0)
sc = classify(left)
gm = gap_model(left)
surf = gm.surface

xi_lp = sc.ray("xi_l_prime")
xi_rp = sc.ray("xi_r_prime")

TS = [135.0, 190.0, 280.0, 400.0, 560.0]
window = default_window(left, Background(0.5, 0.0), TS[-1], v_max=2.0)
st = make_step_initial(left, Background(0.5, 0.0), window)
states = []
for T in TS:
    st = evolve(st, T)
    states.append(st)


def lsq_err(delta, state, T):
    m = TwoBandModel(surf, gm.divisor_image, gm.phase_const + delta,
                     gm.a_tilde_sq, gm.b_tilde, gm.gamma_cal, 0.0)
    lo = math.ceil((xi_lp + 0.012) * T)
    hi = math.floor((xi_rp - 0.012) * T)
    tot = 0.0
    for n in range(lo, hi + 1):
        a_sq, b_q = m.values_sq(n, T)
        a_s, b_s = state.value(n)
        tot += (b_s - b_q) ** 2 + (a_s - math.sqrt(a_sq)) ** 2
    return tot / (hi - lo + 1)


def best(state, T):
    grid = np.linspace(0.0, 1.0, 1201)
    errs = [lsq_err(d, state, T) for d in grid]
    k = int(np.argmin(errs))
    a, b = grid[k] - 2e-3, grid[k] + 2e-3
    for _ in range(24):
        m1, m2 = a + (b - a) / 3, b - (b - a) / 3
        if lsq_err(m1, state, T) < lsq_err(m2, state, T):
            b = m2
        else:
            a = m1
    d = 0.5 * (a + b)
    return d, math.sqrt(lsq_err(d, state, T))


ds = []
for st_i, T in zip(states, TS):
    d, e = best(st_i, T)
    ds.append(d)
    print(f"t={T:5.0f}: delta*={d:.6f}  rms {e:.5f}")

t = np.array(TS)
d = np.array(ds)
for p in (0.5, 1.0):
    X = np.vstack([np.ones_like(t), t ** -p]).T
    sol, res, *_ = np.linalg.lstsq(X, d, rcond=None)
    fit = X @ sol
    print(f"p={p}: delta_inf={sol[0]:.6f} beta={sol[1]:.4f} "
          f"max_resid={np.max(np.abs(fit - d)):.2e}")

i_chi_pi = -0.411067
A = surf.abel_infty
print(f"\ncand flipI+2site red(-2I/pi-2A) = "
      f"{(-2 * i_chi_pi - 2 * A) % 1.0:.6f}")
