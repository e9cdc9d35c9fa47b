"""Spectral machinery for steplike Jacobi operators.

Joukovski map, phase function, Jost solutions built by three-term
recurrence from the free solutions outside the perturbation core, and
the right scattering coefficients

    T = W(psibar, psi) / W(psi_l, psi),
    R = W(psi_l, psibar) / W(psi_l, psi),

with W(f,g)(n) = a(n)*(f(n)g(n+1) - f(n+1)g(n)) independent of n.  On
the part of the left spectrum not covered by the right one only T is
meaningful, and the quantity

    chi(x) = -sqrt(|((x-b_l)^2 - 4 a_l^2) / (x^2 - 1)|) * |T(x)|^2

(real and negative there) feeds the divisor integrals downstream.

For the pure step both coefficients also follow from matching the two
free solutions across n = 0 in closed form; the recurrence path is the
general method and the closed form serves as an independent oracle.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (NumericalError, RecurrenceOverflow, ValidationError)
from .lattice import Background, LatticeState

#: half-width of the excluded neighborhoods around band edges
EDGE_MARGIN = 1e-9
#: magnitude bound for the recurrence overflow guard
OVERFLOW = 1e280


def joukovski(lam, background: Background) -> complex:
    """z with lam = b + a*(z + 1/z) and |z| <= 1.

    The branch is z = w - sqrt(w-1)*sqrt(w+1) with principal square
    roots, w = (lam-b)/(2a): analytic exactly off the spectrum, |z| < 1
    there, and on the spectrum it takes the limit from the upper half
    plane, z = x - i*sqrt(1-x^2) with x = (lam-b)/(2a).
    """
    w = (complex(lam) - background.b) / (2.0 * background.a)
    z = w - cmath.sqrt(w - 1.0) * cmath.sqrt(w + 1.0)
    return z


def phase_phi(p, xi: float,
              background: Background | None = None) -> complex:
    """Phase Phi(p, xi) = (z - 1/z)/2 + xi*log z on the upper sheet.

    `p` may be a spectral parameter or a SurfacePoint; the lower sheet
    is reached by oddness, Phi(p*) = -Phi(p).  The background defaults
    to the normalized right one, (1/2, 0).
    """
    sheet = +1
    lam = p
    if hasattr(p, "lam") and hasattr(p, "sheet"):
        lam, sheet = p.lam, p.sheet
    if background is None:
        background = Background(0.5, 0.0)
    z = joukovski(lam, background)
    if z == 0:
        raise ValidationError("phase has a pole at infinity")
    val = 0.5 * (z - 1.0 / z) + xi * cmath.log(z)
    return sheet * val


def _free_z(lam: float, bg: Background) -> complex:
    z = joukovski(lam, bg)
    if abs(abs(z) - 1.0) < EDGE_MARGIN and abs(z.imag) < EDGE_MARGIN:
        raise ValidationError(f"lambda = {lam} sits at a band edge of {bg}")
    return z


def _core(state: LatticeState, tol: float = 1e-13) -> tuple[int, int]:
    """Smallest [lo, hi] outside which the state equals its backgrounds."""
    sites = state.sites
    devL = (np.abs(state.a - state.left.a) > tol) | \
           (np.abs(state.b - state.left.b) > tol)
    devR = (np.abs(state.a - state.right.a) > tol) | \
           (np.abs(state.b - state.right.b) > tol)
    lo = 0
    idx = np.nonzero(devL)[0]
    if idx.size:
        lo = min(lo, int(sites[idx[0]]))
    hi = 0
    idx = np.nonzero(devR)[0]
    if idx.size:
        hi = max(hi, int(sites[idx[-1]]))
    return lo, hi


def _coeff(state: LatticeState, n: int) -> tuple[float, float]:
    """(a(n), b(n)) extended by the backgrounds outside the window."""
    if n < state.n_min:
        return state.left.a, state.left.b
    if n > state.n_max:
        return state.right.a, state.right.b
    i = n - state.n_min
    return float(state.a[i]), float(state.b[i])


def _extend_down(state, lam, n_hi, n_lo, y_hi, y_hi1):
    """Recurrence a(n-1)y(n-1) = (lam-b(n))y(n) - a(n)y(n+1) downward."""
    vals = {n_hi + 1: y_hi1, n_hi: y_hi}
    for n in range(n_hi, n_lo, -1):
        a_n, b_n = _coeff(state, n)
        a_nm1, _ = _coeff(state, n - 1)
        y = ((lam - b_n) * vals[n] - a_n * vals[n + 1]) / a_nm1
        if abs(y) > OVERFLOW:
            raise RecurrenceOverflow("Jost recurrence overflow (downward)")
        vals[n - 1] = y
    return vals


def _extend_up(state, lam, n_lo, n_hi, y_lo, y_lom1):
    vals = {n_lo - 1: y_lom1, n_lo: y_lo}
    for n in range(n_lo, n_hi):
        a_n, b_n = _coeff(state, n)
        a_nm1, _ = _coeff(state, n - 1)
        y = ((lam - b_n) * vals[n] - a_nm1 * vals[n - 1]) / a_n
        if abs(y) > OVERFLOW:
            raise RecurrenceOverflow("Jost recurrence overflow (upward)")
        vals[n + 1] = y
    return vals


def jost_solutions(state0: LatticeState, lam: float,
                   n_range: tuple[int, int] | None = None,
                   right_cutoff: int | None = None,
                   left_cutoff: int | None = None):
    """Jost solutions (psi, psi_l) of the t=0 operator at real lam.

    psi(n) = z_r**n exactly at and beyond the right cutoff, psi_l(n) =
    z_l**(-n) at and beyond the left one; both are carried across the
    perturbation core by the three-term recurrence.  Returns the two
    complex arrays over n_range (default: core widened by 2 sites).
    """
    lam = float(lam)
    z_r = _free_z(lam, state0.right)
    z_l = _free_z(lam, state0.left)
    core_lo, core_hi = _core(state0)
    if right_cutoff is None:
        right_cutoff = core_hi
    if left_cutoff is None:
        left_cutoff = core_lo
    if n_range is None:
        n_range = (min(left_cutoff, core_lo) - 2, max(right_cutoff, core_hi) + 2)
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    if n_hi - n_lo < 2:
        raise ValidationError("n_range must span at least 3 sites")

    hi = max(n_hi, right_cutoff + 1)
    lo = min(n_lo, left_cutoff - 1)
    psi = _extend_down(state0, lam, max(right_cutoff, n_lo), lo,
                       z_r ** max(right_cutoff, n_lo),
                       z_r ** (max(right_cutoff, n_lo) + 1))
    for n in range(max(right_cutoff, n_lo), hi + 1):
        psi[n] = z_r ** n
    psi_l = _extend_up(state0, lam, min(left_cutoff, n_hi), hi,
                       z_l ** (-min(left_cutoff, n_hi)),
                       z_l ** (-min(left_cutoff, n_hi) + 1))
    for n in range(lo - 1, min(left_cutoff, n_hi) + 1):
        psi_l[n] = z_l ** (-n)

    ns = range(n_lo, n_hi + 1)
    return (np.array([psi[n] for n in ns]),
            np.array([psi_l[n] for n in ns]))


@dataclass(frozen=True)
class ScatteringData:
    lam: float
    T: complex
    R: complex | None
    chi: float | None
    multiplicity: int
    wronskian_spread: float


def _in_interval(x, iv, margin=0.0):
    return iv[0] + margin < x < iv[1] - margin


def scattering_data(state0: LatticeState, lam: float) -> ScatteringData:
    """Right transmission/reflection data of the t=0 operator at lam.

    lam must lie in the interior of the continuous spectrum; on the
    multiplicity-one part of the left spectrum R is not defined (None)
    and chi is attached instead.
    """
    lam = float(lam)
    I_l = state0.left.spectrum
    I_r = state0.right.spectrum
    in_l = _in_interval(lam, I_l, EDGE_MARGIN)
    in_r = _in_interval(lam, I_r, EDGE_MARGIN)
    if not (in_l or in_r):
        raise ValidationError(f"lambda = {lam} not inside the continuous spectrum")
    mult = 2 if (in_l and in_r) else 1

    core_lo, core_hi = _core(state0)
    n_lo, n_hi = core_lo - 3, core_hi + 3
    psi, psi_l = jost_solutions(state0, lam, (n_lo, n_hi))

    z_r = _free_z(lam, state0.right)
    if in_r:
        psibar = np.conj(psi) if abs(z_r.imag) > 0 else None
        if psibar is None:
            raise NumericalError("unimodular z_r expected inside right spectrum")
    else:
        # second right solution z_r**-n, z_r real here; carried downward
        vals = _extend_down(state0, lam, core_hi, n_lo - 1,
                            z_r ** float(-core_hi), z_r ** float(-core_hi - 1))
        for n in range(core_hi, n_hi + 2):
            vals[n] = z_r ** float(-n)
        psibar = np.array([vals[n] for n in range(n_lo, n_hi + 1)])

    a_row = np.array([_coeff(state0, n)[0] for n in range(n_lo, n_hi)])

    def wronsk(f, g):
        vals = a_row * (f[:-1] * g[1:] - f[1:] * g[:-1])
        return vals[0], np.max(np.abs(vals - vals[0])), np.max(np.abs(vals))

    w_bl, s1, m1 = wronsk(psibar, psi_l)
    w_lr, s2, m2 = wronsk(psi_l, psi)
    w_br, s3, m3 = wronsk(psibar, psi)
    # drift measured against the size of the nondegenerate Wronskians
    scale = max(m1, m2, m3, 1e-300)
    spread = max(s1, s2, s3) / scale
    if spread > 1e-8:
        raise NumericalError(f"Wronskian drifted by {spread:.2e}")
    if abs(w_lr) < 1e-10 * max(abs(w_br), 1.0):
        raise NumericalError(f"near-resonance at lambda = {lam}")

    T = w_br / w_lr
    # W(psibar, psi_l), not its transpose: the order is forced by the
    # scattering relation T*psi_l = psibar + R*psi
    R = (w_bl / w_lr) if in_r else None
    chi_val = None
    if in_l and not in_r:
        chi_val = _chi_from_T(lam, T, state0.left)
    return ScatteringData(lam, complex(T), R if R is None else complex(R),
                          chi_val, mult, float(spread))


def _chi_from_T(x: float, T: complex, left: Background) -> float:
    num = abs((x - left.b) ** 2 - 4.0 * left.a ** 2)
    den = x * x - 1.0
    if den <= 0:
        raise ValidationError("chi needs |x| > 1 for the normalized right band")
    return -math.sqrt(num / den) * float(abs(T) ** 2)


def chi(state0: LatticeState, x: float) -> float:
    """chi(x) on the multiplicity-one interior of the left spectrum."""
    x = float(x)
    if not _in_interval(x, state0.left.spectrum, EDGE_MARGIN):
        raise ValidationError(f"{x} outside the left spectrum")
    if _in_interval(x, state0.right.spectrum, -EDGE_MARGIN):
        raise ValidationError(f"{x} lies in the right spectrum; chi undefined")
    return scattering_data(state0, x).chi


def purestep_scattering(left: Background, right: Background,
                        lam: float) -> tuple[complex, complex | None]:
    """Closed-form (T, R) for the pure step, by 2x2 matching at n = 0.

    With q = (a_l/a_r)*z_l*z_r:
        T = (1 - z_r**2) / (1 - q),
        R = z_r * ((a_l/a_r)*z_l - z_r) / (1 - q).
    R is returned only when lam lies inside the right spectrum.
    """
    z_r = _free_z(lam, right)
    z_l = _free_z(lam, left)
    q = (left.a / right.a) * z_l * z_r
    if abs(1.0 - q) < 1e-12:
        raise NumericalError("pure-step resonance")
    T = (1.0 - z_r * z_r) / (1.0 - q)
    R = None
    if _in_interval(lam, right.spectrum, EDGE_MARGIN):
        R = z_r * ((left.a / right.a) * z_l - z_r) / (1.0 - q)
    return T, R


def staggeredstep_transmission(left: Background, right: Background,
                               lam: float) -> complex:
    """Transmission of the step whose b switches one site after a.

    Data a(n) = a_l (n <= -1), a_r (n >= 0); b(n) = b_l (n <= 0),
    b_r (n >= 1).  This is the image of the pure step under the
    reflection symmetry a(n) -> a(-n-1), b(n) -> -b(-n) + const, so it
    carries the scattering weight of every left-moving zone.  Matching
    as for the pure step gives

        T = (z_r - 1/z_r) / (z_r - (a_l/a_r)/z_l).
    """
    z_r = _free_z(lam, right)
    z_l = _free_z(lam, left)
    den = z_r - (left.a / right.a) / z_l
    if abs(den) < 1e-12:
        raise NumericalError("staggered-step resonance")
    return (z_r - 1.0 / z_r) / den
