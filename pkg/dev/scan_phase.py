"""Locate the divisor phase offset against simulation, then identify it."""

import cmath
import math
import sys

import numpy as np

sys.path.insert(0, "src")

from todalab.asymptotics import TwoBandModel, _chi_weight, gap_model
from todalab.lattice import (Background, default_window, evolve,
                             make_step_initial)
from todalab.spectral import joukovski
from todalab.whitham import classify

left = Background(0.4, -2.0)
sc = classify(left)
gm = gap_model(left)
surf = gm.surface
c, d = left.spectrum

T1, T2 = 135.0, 190.0
window = default_window(left, Background(0.5, 0.0), T2, v_max=2.0)
st0 = make_step_initial(left, Background(0.5, 0.0), window)
state1 = evolve(st0, T1)
state2 = evolve(state1, T2)

xi_lp = sc.ray("xi_l_prime")
xi_rp = sc.ray("xi_r_prime")


def sites_at(T):
    return range(math.ceil((xi_lp + 0.015) * T),
                 math.floor((xi_rp - 0.015) * T) + 1)


def err_at(delta, state, T):
    m = TwoBandModel(surf, gm.divisor_image, gm.phase_const + delta,
                     gm.a_tilde_sq, gm.b_tilde, gm.gamma_cal, 0.0)
    worst = 0.0
    for n in sites_at(T):
        a_sq, b_q = m.values_sq(n, T)
        a_s, b_s = state.value(n)
        worst = max(worst, abs(b_s - b_q), abs(a_s - math.sqrt(a_sq)))
    return worst


def best_delta(state, T):
    grid = np.linspace(0.0, 1.0, 2001)
    errs = [err_at(dd, state, T) for dd in grid]
    k = int(np.argmin(errs))
    fine = np.linspace(grid[k] - 1e-3, grid[k] + 1e-3, 801)
    errs_f = [err_at(dd, state, T) for dd in fine]
    kf = int(np.argmin(errs_f))
    return fine[kf], errs_f[kf]


d1, e1 = best_delta(state1, T1)
d2, e2 = best_delta(state2, T2)
print(f"t={T1}: delta*={d1:.6f} err {e1:.4f} (err at 0: {err_at(0, state1, T1):.4f})")
print(f"t={T2}: delta*={d2:.6f} err {e2:.4f} (err at 0: {err_at(0, state2, T2):.4f})")

# weighted integrals of candidate chi modifications
clamp = 1e-9


def guard(f):
    def g(x):
        xx = min(max(x, c + clamp), d - clamp)
        return f(xx)
    return g


i_chi = _chi_weight(surf, left)
i_geom = _chi_weight(surf, left, log_abs_chi=guard(
    lambda x: 0.5 * math.log(abs((x - c) * (x - d)) / (x * x - 1.0))))
i_t = 0.5 * (i_chi - i_geom)
i_zr = _chi_weight(surf, left, log_abs_chi=lambda x: math.log(
    abs(x + math.sqrt(x * x - 1.0))))
print(f"I_chi={i_chi:.6f} I_geom={i_geom:.6f} I_T={i_t:.6f} I_zr={i_zr:.6f}")
print(f"I_chi/pi={i_chi / math.pi:.6f} A_inf={surf.abel_infty:.6f} "
      f"A_inf+={surf.abel_infty_plus:.6f} x_div={gm.divisor_image.real:.6f}")


def red(x):
    return x - math.floor(x)


A = surf.abel_infty
x_div = gm.divisor_image.real
ip = i_chi / math.pi
cands = {
    "flip I_chi": red(-2.0 * ip),
    "I/2pi": red(0.5 * ip),
    "flip I, I/2pi": red(-1.5 * ip),
    "negate divisor": red(-2.0 * x_div),
    "one site +": red(A),
    "one site -": red(-A),
    "half": red(0.5),
    "negdiv+site": red(-2.0 * x_div + A),
    "negdiv-site": red(-2.0 * x_div - A),
    "flipI+site": red(-2.0 * ip + A),
    "flipI-site": red(-2.0 * ip - A),
    "flipI+half": red(-2.0 * ip + 0.5),
    "I2pi+half": red(0.5 * ip + 0.5),
    "I2pi+site": red(0.5 * ip + A),
    "I2pi-site": red(0.5 * ip - A),
    "chi*zr^2": red(2.0 * i_zr / math.pi),
    "chi*zr^-2": red(-2.0 * i_zr / math.pi),
    "chi*zr^2 flipI": red(-2.0 * ip + 2.0 * i_zr / math.pi),
    "chi*zr^-2 flipI": red(-2.0 * ip - 2.0 * i_zr / math.pi),
    "chi*zr^2+site": red(2.0 * i_zr / math.pi + A),
    "chi*zr^-2+site": red(-2.0 * i_zr / math.pi + A),
    "chi*zr^2-site": red(2.0 * i_zr / math.pi - A),
    "chi*zr^-2-site": red(-2.0 * i_zr / math.pi - A),
    "T not T^2": red(-i_t / math.pi),
    "T^4": red(2.0 * i_t / math.pi),
    "geom dropped": red(-i_geom / math.pi),
    "geom flipped": red(-2.0 * i_geom / math.pi),
}
print(f"\ndelta1*={d1:.6f}  delta2*={d2:.6f}")
rows = []
for name, v in cands.items():
    dist1 = min(abs(v - d1), abs(v - d1 + 1), abs(v - d1 - 1))
    dist2 = min(abs(v - d2), abs(v - d2 + 1), abs(v - d2 - 1))
    rows.append((max(dist1, dist2), name, v))
for dist, name, v in sorted(rows)[:12]:
    print(f"  {name:18s} {v:.6f}  (worst dist {dist:.6f})  "
          f"err1 {err_at(v, state1, T1):.4f} err2 {err_at(v, state2, T2):.4f}")
