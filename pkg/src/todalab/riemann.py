"""Genus-1 hyperelliptic surface toolkit.

A surface is given by four real branch points E1 < E2 < E3 < E4 and the
square root of R(lam) = prod (lam - Ej).  We fix the branch

    sqrtR(lam) = exp(0.5 * sum Log(lam - Ej))        (principal logs)

which is single valued and analytic exactly off the two bands
[E1, E2] and [E3, E4], agrees with the limit from the upper half plane
everywhere on the real axis, and behaves like +lam**2 at infinity.  The
upper sheet carries P = -sqrtR, so that on the real axis (limits from
above)

    P = -|sqrtR|  on both tails,      P = +|sqrtR|  on the gap,
    P = +i|sqrtR| on band [E1, E2],   P = -i|sqrtR| on band [E3, E4].

Homology and normalization.  The a-cycle is taken through the gap
(E2, E3) and back across the second sheet, the b-cycle around the band
[E1, E2]; the holomorphic differential zeta = d lam / (2*Kg*P) then has
unit a-period and tau = i*Kb/Kg with Kb, Kg the band and gap integrals
of 1/|sqrtR|.  This choice keeps the Abel image of the point infinity
on the real period (so lattice phases built from it are real); the
opposite labeling puts it on the imaginary period and is ruled out by
the solution-level residual checks downstream.

Abel map values along the canonical real path from E1 on the upper
sheet:

    A(E1) = 0,  A(E2) = -tau/2,  A(E3) = (1 - tau)/2,  A(E4) = 1/2,
    A(inf+) = KtL/(2*Kg)  real,   A(inf-) = -A(inf+),

where KtL (KtR) is the left (right) tail integral of 1/|sqrtR|; the
exact identities Kb2 = Kb1 and KtL + KtR = Kg are verified at build
time as a quadrature self test.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._quad import fixed_quad, quad_sqrt_sing, quad_tail
from .errors import (DegenerateSurface, NumericalError, RootBracketError,
                     ValidationError)

#: minimum band/gap width accepted by build_surface
MIN_WIDTH = 1e-8


@dataclass(frozen=True)
class SurfacePoint:
    """Point on the two-sheeted surface: spectral parameter plus sheet.

    sheet +1 is the sheet where P = -sqrtR (the one used for all
    canonical paths), sheet -1 the other.
    """

    lam: complex
    sheet: int = +1

    def __post_init__(self):
        if self.sheet not in (+1, -1):
            raise ValidationError("sheet must be +1 or -1")

    @property
    def is_real(self) -> bool:
        return abs(complex(self.lam).imag) == 0.0


def reduce_mod_lattice(v: complex, tau: complex) -> complex:
    """Representative of v in the fundamental cell [0,1) + [0,1)*tau."""
    v = complex(v)
    tau = complex(tau)
    y = v.imag / tau.imag
    y -= math.floor(y)
    # subtract the tau component, then reduce the real direction
    rest = v - y * tau
    x = rest.real - math.floor(rest.real)
    return x + y * tau


def lattice_dist(v: complex, w: complex, tau: complex) -> float:
    """Distance from v - w to the nearest lattice point of Z + tau*Z."""
    d = reduce_mod_lattice(v - w, tau)
    best = math.inf
    for j in (0, -1, 1):
        for k in (0, -1, 1):
            best = min(best, abs(d - (j + k * tau)))
    return best


# ----------------------------------------------------------------- theta

def theta(v, tau, deriv: int = 0):
    """Riemann theta of genus 1: sum over m of exp(pi i m^2 tau + 2 pi i m v).

    `deriv` in {0, 1, 2} selects d^deriv/dv^deriv.  For Im tau < 1 the
    series converges slowly, so the Poisson-resummed (Gaussian comb)
    form is used instead; for real v it consists of positive terms, so
    produced values never vanish by cancellation.
    """
    v = complex(v)
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValidationError("theta needs Im tau > 0")
    if deriv not in (0, 1, 2):
        raise ValidationError("deriv must be 0, 1 or 2")
    comb_ok = abs(tau.real) < 1e-14
    if tau.imag < 1.0 and comb_ok:
        return _theta_comb(v, tau.imag, deriv)
    return _theta_series(v, tau, deriv)


def _theta_series(v: complex, tau: complex, deriv: int) -> complex:
    Y = tau.imag
    y = abs(v.imag)
    disc = y * y + 18.0 * math.log(10.0) * Y / math.pi
    M = int(math.ceil((y + math.sqrt(disc)) / Y)) + 2
    if M > 20000:
        raise NumericalError("theta series would need too many terms; "
                             "Im tau too small for this argument")
    m = np.arange(-M, M + 1)
    expo = 1j * math.pi * m * m * tau + 2j * math.pi * m * v
    terms = np.exp(expo)
    if deriv:
        terms = terms * (2j * math.pi * m) ** deriv
    # symmetric pairing keeps the sum deterministic and cancellation-free
    return complex(np.sum(terms[np.argsort(np.abs(terms))]))


def _theta_comb(v: complex, Y: float, deriv: int) -> complex:
    # theta(v | iY) = Y**-0.5 * sum_m exp(-pi (m - v)^2 / Y)
    m0 = round(v.real)
    M = int(math.ceil(abs(v.imag) + math.sqrt(18.0 * math.log(10.0) * Y / math.pi))) + 2
    m = np.arange(m0 - M, m0 + M + 1)
    u = m - v
    g = np.exp(-math.pi * u * u / Y)
    if deriv == 0:
        t = g
    elif deriv == 1:
        t = (2.0 * math.pi * u / Y) * g
    else:
        t = ((2.0 * math.pi * u / Y) ** 2 - 2.0 * math.pi / Y) * g
    return complex(np.sum(t[np.argsort(np.abs(t))]) / math.sqrt(Y))


def theta_log_deriv(v, tau):
    """L(v) = theta'(v)/theta(v) and its derivative L'(v)."""
    t0 = theta(v, tau)
    if t0 == 0:
        raise NumericalError("theta vanished where a log-derivative was needed")
    t1 = theta(v, tau, 1)
    t2 = theta(v, tau, 2)
    L = t1 / t0
    return L, t2 / t0 - L * L


# ---------------------------------------------------------------- surface

class TwoBandSurface:
    """Immutable genus-1 surface with cached periods and normalizations.

    Build through build_surface; all quantities are evaluated twice
    (nodes and 2*nodes) and the worst relative discrepancy is kept in
    `period_error`.
    """

    def __init__(self, E1: float, E2: float, E3: float, E4: float,
                 nodes: int = 96):
        E = (float(E1), float(E2), float(E3), float(E4))
        if not all(map(math.isfinite, E)):
            raise ValidationError("branch points must be finite")
        if not (E[0] < E[1] < E[2] < E[3]):
            raise ValidationError(f"branch points must increase: {E}")
        if min(E[1] - E[0], E[2] - E[1], E[3] - E[2]) < MIN_WIDTH:
            raise DegenerateSurface(
                f"band or gap narrower than {MIN_WIDTH}: {E}")
        self.E = E
        self.nodes = int(nodes)

        coarse = self._periods(self.nodes)
        fine = self._periods(2 * self.nodes)
        self.period_error = max(
            abs(c - f) / max(abs(f), 1e-300) for c, f in zip(coarse, fine))
        (self.Kb1, self.Kb2, self.Kg, self.KtL, self.KtR,
         self.gap_mean, c0_num, self.w_b_raw) = fine

        # exact identities of dlam/P; failure means the quadrature broke
        ident = max(abs(self.Kb2 - self.Kb1) / self.Kb1,
                    abs(self.KtL + self.KtR - self.Kg) / self.Kg)
        if ident > 1e-7:
            raise NumericalError(
                f"period identities violated ({ident:.2e}); branch points {E}")
        self.identity_error = ident

        self.tau = 1j * self.Kb1 / self.Kg
        self.c_zeta = 1.0 / (2.0 * self.Kg)
        self.c1 = -0.5 * sum(E)
        self.c0 = -c0_num / self.Kg
        # band-period of the second kind differential: int_E1^E2 Omega0
        # equals -i*w_b with w_b real
        self.w_b = self.w_b_raw + self.c0 * self.Kb1
        self.V = -self.w_b / math.pi
        self.abel_infty_plus = self.KtL / (2.0 * self.Kg)
        self.abel_infty = self.KtL / self.Kg
        self.riemann_const = 0.5 * (1.0 + self.tau)

        tz = abs(theta(self.riemann_const, self.tau))
        if tz > 1e-8 * abs(theta(0.0, self.tau)):
            raise NumericalError(
                "theta does not vanish at the Riemann constant; "
                "homology bookkeeping is inconsistent")

    # quadrature -------------------------------------------------------

    def _periods(self, n: int):
        E1, E2, E3, E4 = self.E

        def w(x):
            return 1.0 / self._abs_sqrtR(x)

        kb1 = quad_sqrt_sing(w, E1, E2, n=n)
        kb2 = quad_sqrt_sing(w, E3, E4, n=n)
        kg = quad_sqrt_sing(w, E2, E3, n=n)
        ktl = quad_tail(w, E1, side=-1, n=2 * n)
        ktr = quad_tail(w, E4, side=+1, n=2 * n)
        gap_mean = quad_sqrt_sing(lambda x: x * w(x), E2, E3, n=n) / kg
        c1 = -0.5 * (E1 + E2 + E3 + E4)
        c0_num = quad_sqrt_sing(lambda x: (x * x + c1 * x) * w(x), E2, E3, n=n)
        wb_raw = quad_sqrt_sing(lambda x: (x * x + c1 * x) * w(x), E1, E2, n=n)
        return kb1, kb2, kg, ktl, ktr, gap_mean, c0_num, wb_raw

    def _abs_sqrtR(self, x):
        E1, E2, E3, E4 = self.E
        return np.sqrt(np.abs((x - E1) * (x - E2) * (x - E3) * (x - E4)))

    # square root and sheets --------------------------------------------

    def sqrtR(self, lam):
        """Single-valued branch, cut along the bands, ~ +lam^2 at infinity."""
        lam = np.asarray(lam, dtype=complex)
        s = np.zeros_like(lam)
        for Ej in self.E:
            s = s + np.log(lam - Ej + (0.0 + 0.0j))
        return np.exp(0.5 * s)

    def P(self, lam, sheet: int = +1):
        """Sheet-resolved value of the surface square root (P = -sqrtR up)."""
        return -sheet * self.sqrtR(lam)

    # abel map ----------------------------------------------------------

    def _partial(self, lo: float, hi: float, sing_lo: bool, sing_hi: bool,
                 n: int = 96, num=None) -> float:
        """Integral of num(x)/|sqrtR(x)| over [lo, hi] (num defaults to 1)."""
        if hi <= lo:
            return 0.0
        if num is None:
            f = lambda x: 1.0 / self._abs_sqrtR(x)
        else:
            f = lambda x: num(x) / self._abs_sqrtR(x)
        return quad_sqrt_sing(f, lo, hi, left=sing_lo, right=sing_hi, n=n)

    def abel_real(self, lam: float) -> complex:
        """A(lam) on the upper sheet along the canonical real path (unreduced)."""
        E1, E2, E3, E4 = self.E
        c = self.c_zeta
        lam = float(lam)
        snap = 1e-13 * max(1.0, abs(E4), abs(E1))
        for Ej, val in ((E1, 0.0), (E2, -self.tau / 2),
                        (E3, 0.5 - self.tau / 2), (E4, 0.5 + 0.0j)):
            if abs(lam - Ej) <= snap:
                return complex(val)
        if lam < E1:
            # left tail, P = -|sqrtR|, path runs leftward
            if math.isinf(lam):
                return complex(self.abel_infty_plus)
            return complex(c * self._partial(lam, E1, False, True))
        if lam < E2:
            return -1j * c * self._partial(E1, lam, True, False)
        if lam < E3:
            return -self.tau / 2 + c * self._partial(E2, lam, True, False)
        if lam < E4:
            return (0.5 - self.tau / 2
                    + 1j * c * self._partial(E3, lam, True, False))
        if math.isinf(lam):
            return complex(self.abel_infty_plus)
        return 0.5 - c * self._partial(E4, lam, True, False)

    def abel_complex(self, lam: complex) -> complex:
        """A(lam) on the upper sheet for lam off the real axis.

        Straight-line integration from the gap midpoint; the segment
        leaves the axis immediately, so it never crosses a band cut and
        the single-valued sqrtR applies along the whole of it.
        """
        anchor = 0.5 * (self.E[1] + self.E[2])
        A0 = self.abel_real(anchor)
        lam = complex(lam)
        d = lam - anchor

        def f(s):
            z = anchor + s * d
            return d * self.c_zeta / (-self.sqrtR(z))

        # composite panels: the integrand is analytic but may peak near
        # the endpoint when lam sits close to a branch point
        val = 0.0 + 0.0j
        cuts = np.linspace(0.0, 1.0, 9)
        for aa, bb in zip(cuts[:-1], cuts[1:]):
            val += fixed_quad(f, aa, bb, n=48)
        return A0 + val

    def to_dict(self) -> dict:
        return {"E": list(self.E), "tau": [self.tau.real, self.tau.imag],
                "Kb": self.Kb1, "Kg": self.Kg, "KtL": self.KtL,
                "KtR": self.KtR, "c1": self.c1, "c0": self.c0,
                "V": self.V, "abel_infty": self.abel_infty,
                "gap_mean": self.gap_mean,
                "period_error": self.period_error}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __repr__(self):
        return (f"TwoBandSurface(E={self.E}, tau={self.tau:.6g}, "
                f"V={self.V:.6g})")


def build_surface(E1: float, E2: float, E3: float, E4: float,
                  nodes: int = 96) -> TwoBandSurface:
    """Construct and validate a TwoBandSurface (see class docstring)."""
    return TwoBandSurface(E1, E2, E3, E4, nodes=nodes)


def abel_map(surface: TwoBandSurface, p: SurfacePoint | complex,
             sheet: int = +1) -> complex:
    """Abel map of p with base point E1, reduced modulo the lattice."""
    if not isinstance(p, SurfacePoint):
        p = SurfacePoint(p, sheet)
    lam = complex(p.lam)
    if lam.imag == 0.0:
        val = surface.abel_real(lam.real)
    else:
        val = surface.abel_complex(lam)
    return reduce_mod_lattice(p.sheet * val, surface.tau)


def abel_between_infinities(surface: TwoBandSurface) -> float:
    """The real lattice-phase increment: A(inf+) - A(inf-) = KtL/Kg in (0,1)."""
    return surface.abel_infty


def riemann_constant(surface: TwoBandSurface) -> complex:
    """Riemann constant for base point E1 in this basis: (1 + tau)/2."""
    return surface.riemann_const


def omega0(surface: TwoBandSurface):
    """Second kind differential evaluator.

    Returns f with f(lam, sheet) = (lam^2 + c1*lam + c0)/P(lam, sheet),
    the density of Omega0.  c1 kills the residues at both infinities,
    c0 the a-period (through-gap cycle); int over [E1, E2] on the upper
    sheet equals -i*w_b with surface.w_b real.
    """
    c1, c0 = surface.c1, surface.c0

    def f(lam, sheet: int = +1):
        lam = np.asarray(lam, dtype=complex)
        return (lam * lam + c1 * lam + c0) / surface.P(lam, sheet)

    return f


# ---------------------------------------------------------- inversion

def _invert_from_edge(surface, edge: float, far: float, target: float) -> float:
    """Solve c * int_edge^lam dx/|sqrtR| = target for lam between edge and far.

    Root-finding runs in u with lam = edge + sign*u**2, which keeps the
    derivative bounded when the solution sits next to the branch point.
    """
    c = surface.c_zeta
    sign = 1.0 if far > edge else -1.0

    def g(u):
        lo, hi = sorted((edge, edge + sign * u * u))
        # substituting at a regular endpoint is harmless, so mark both
        return c * surface._partial(lo, hi, True, True) - target

    umax = math.sqrt(abs(far - edge))
    if g(umax) < 0:
        raise RootBracketError("segment inversion lost its bracket")
    u = brentq(g, 0.0, umax, xtol=1e-14, rtol=8.9e-16)
    return edge + sign * u * u


def _invert_on_tail(surface, edge: float, side: int, target: float) -> float:
    """Solve c * |int| from lam to the edge over a tail = target."""
    c = surface.c_zeta

    def g(u):
        lam = edge + side * u * u
        if side < 0:
            return c * surface._partial(lam, edge, True, True) - target
        return c * surface._partial(edge, lam, True, True) - target

    umax = math.sqrt(max(1.0, surface.E[3] - surface.E[0]))
    while g(umax) < 0:
        umax *= 2.0
        if umax > 1e8:
            raise RootBracketError("tail inversion ran toward infinity")
    u = brentq(g, 0.0, umax, xtol=1e-14, rtol=8.9e-16)
    return edge + side * u * u


def jacobi_invert(surface: TwoBandSurface, w: complex) -> SurfacePoint:
    """Point p with abel_map(p) = w mod lattice (genus-1 inversion).

    Arguments on the two real circles of the Jacobian (tail line Im=0,
    gap line through -tau/2) and on the two band segments are inverted
    by monotone root-finding on the corresponding real segment; other
    arguments fall back to complex Newton seeded from a ring of trial
    points.
    """
    E1, E2, E3, E4 = surface.E
    tau = surface.tau
    v = reduce_mod_lattice(w, tau)
    x = v.real
    y = v.imag / tau.imag
    tol = 1e-9

    def done(p: SurfacePoint) -> SurfacePoint:
        res = lattice_dist(abel_map(surface, p), w, tau)
        if res > 1e-8:
            raise NumericalError(f"inversion residual {res:.2e} for w={w}")
        return p

    half_inf = surface.abel_infty_plus

    if min(y, 1.0 - y) < tol:
        # tail circle; fold the lower sheet onto [0, 1/2]
        sheet, xx = (+1, x) if x <= 0.5 else (-1, 1.0 - x)
        if xx < 1e-14:
            return done(SurfacePoint(E1, +1))
        if abs(xx - 0.5) < 1e-14:
            return done(SurfacePoint(E4, +1))
        if xx <= half_inf:
            lam = _invert_on_tail(surface, E1, -1, xx)
        else:
            lam = _invert_on_tail(surface, E4, +1, 0.5 - xx)
        return done(SurfacePoint(lam, sheet))

    if abs(y - 0.5) < tol:
        # gap circle: A = -tau/2 + c*int_E2^lam on the upper sheet
        sheet, xx = (+1, x) if x <= 0.5 else (-1, 1.0 - x)
        if xx < 1e-14:
            return done(SurfacePoint(E2, +1))
        if abs(xx - 0.5) < 1e-14:
            return done(SurfacePoint(E3, +1))
        if xx <= 0.25:
            lam = _invert_from_edge(surface, E2, E3, xx)
        else:
            lam = _invert_from_edge(surface, E3, E2, 0.5 - xx)
        return done(SurfacePoint(lam, sheet))

    if min(x, 1.0 - x) < tol or abs(x - 0.5) < tol:
        # band segments: purely tau-directional offsets
        if min(x, 1.0 - x) < tol:
            # upper band1 carries A = -i*c*I, I in (0, Kb1), y = 1 - I/(2Kb1)
            sheet = +1 if y > 0.5 else -1
            frac = 2.0 * (1.0 - y) if sheet == +1 else 2.0 * y
            kmax, eL, eR = surface.Kb1, E1, E2
        else:
            # band2 from E3: A = 1/2 - tau/2 + i*c*I, y = 1/2 + I/(2Kb1)
            sheet = +1 if y > 0.5 else -1
            frac = (2.0 * y - 1.0) if sheet == +1 else (1.0 - 2.0 * y)
            kmax, eL, eR = surface.Kb2, E3, E4
        target = frac * kmax * surface.c_zeta
        if frac <= 0.5:
            lam = _invert_from_edge(surface, eL, eR, target)
        else:
            lam = _invert_from_edge(surface, eR, eL, kmax * surface.c_zeta - target)
        return done(SurfacePoint(lam, sheet))

    # generic complex divisor: damped Newton, dA/dlam = c/P
    spread = E4 - E1
    mid = 0.5 * (E1 + E4)
    seeds = [mid + spread * (0.8 * math.cos(k * math.pi / 6)
                             + 0.45j * math.sin(k * math.pi / 6))
             for k in range(1, 12) if k != 6]
    for sheet in (+1, -1):
        target = v if sheet == +1 else reduce_mod_lattice(-v, tau)
        for z0 in seeds:
            z = complex(z0)
            converged = False
            for _ in range(60):
                r = reduce_mod_lattice(surface.abel_complex(z) - target, tau)
                resid = min((r - (j + k * tau) for j in (0, -1, 1)
                             for k in (0, -1, 1)), key=abs)
                if abs(resid) < 1e-12:
                    converged = True
                    break
                step = resid * complex(surface.sqrtR(z)) / surface.c_zeta
                if abs(step) > 0.5 * spread:
                    step *= 0.5 * spread / abs(step)
                z = z + step
                if abs(z.imag) < 1e-15 and E1 <= z.real <= E4:
                    z = complex(z.real, 1e-12 * spread)  # keep off the cuts
            if converged:
                try:
                    return done(SurfacePoint(z, sheet))
                except NumericalError:
                    continue
    raise RootBracketError(f"jacobi inversion failed for w={w}")
