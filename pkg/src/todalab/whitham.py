"""Scenario classification and modulation data for steplike backgrounds.

Everything here works in the normalized frame where the right background
is (1/2, 0), so its spectrum is [-1, 1]; `normalize_right` produces that
frame and the transform to undo it.  The left spectrum [c, d] with
c = b - 2a, d = b + 2a then decides which of six wave patterns emerges,
and the functions below return the boundary rays xi = n/t between the
regions together with the moving band edges inside them:

  gamma(xi)   lower-band edge in the right Whitham zone, with its
              companion mu(xi) in the gap (gamma, -1)
  gamma_l(xi) band edge of the left Whitham zone, realized by reflecting
              the lattice and reusing gamma(xi) on the mirror problem
  eta(xi)     edge of the single growing/shrinking band in rarefaction
              style slope regions
  eta, mu     gap data of the embedded two band region when the left
              spectrum sits strictly inside [-1, 1]

Square roots of the spectral polynomial are always taken positive on the
integration interval; the defining integral equations are arranged so
that their integrands are real there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._quad import fixed_quad, quad_sqrt_sing
from .errors import RootBracketError, ValidationError
from .lattice import Background
from .riemann import SurfacePoint

SHOCK = "ShockNonOverlap"
SHOCK_OVERLAP = "ShockOverlap"
RAREFACTION = "RarefactionNonOverlap"
RAREFACTION_OVERLAP = "RarefactionOverlap"
MIXED_RIGHT_IN_LEFT = "MixedRightInLeft"
MIXED_LEFT_IN_RIGHT = "MixedLeftInRight"
FLAT = "Flat"

KINDS = (SHOCK, SHOCK_OVERLAP, RAREFACTION, RAREFACTION_OVERLAP,
         MIXED_RIGHT_IN_LEFT, MIXED_LEFT_IN_RIGHT, FLAT)

#: relative tolerance for spectra edges coinciding with -1 or 1
EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Transform:
    """Affine change of spectral parameter lam' = (lam - shift)/scale.

    Normalizing a right background (a_r, b_r) uses scale = 2*a_r and
    shift = b_r.  Time speeds up by the same factor (t' = scale*t), so
    rays transform as xi' = xi/scale, and solution values map back via
    a = scale*a', b = shift + scale*b'.
    """

    scale: float
    shift: float

    def lam(self, lam):
        return (lam - self.shift) / self.scale

    def lam_inv(self, lam):
        return self.shift + self.scale * lam

    def xi(self, xi):
        return xi / self.scale

    def xi_inv(self, xi):
        return self.scale * xi

    def time(self, t):
        return self.scale * t

    def time_inv(self, t):
        return t / self.scale

    def background(self, bg: Background) -> Background:
        return Background(bg.a / self.scale, (bg.b - self.shift) / self.scale)

    def background_inv(self, bg: Background) -> Background:
        return Background(self.scale * bg.a, self.shift + self.scale * bg.b)


def normalize_right(left: Background, right: Background):
    """Move the right background to (1/2, 0); returns (left', transform)."""
    tr = Transform(scale=2.0 * right.a, shift=right.b)
    return tr.background(left), tr


@dataclass(frozen=True)
class Ray:
    xi: float
    label: str


@dataclass(frozen=True)
class Scenario:
    """Wave pattern of one background pair: kind, boundary rays, zones.

    zones has one more entry than rays and lists the regions from left
    to right; zone_of picks the one containing a given xi (boundaries
    count to the right zone).
    """

    kind: str
    rays: tuple
    zones: tuple
    left: Background

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown scenario kind {self.kind!r}")
        xs = [r.xi for r in self.rays]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValidationError(f"rays must increase strictly: {xs}")
        if len(self.zones) != len(self.rays) + 1:
            raise ValidationError("need exactly one zone more than rays")

    def zone_of(self, xi: float) -> str:
        k = sum(1 for r in self.rays if r.xi <= xi)
        return self.zones[k]

    def ray(self, label: str) -> float:
        for r in self.rays:
            if r.label == label:
                return r.xi
        raise ValidationError(f"scenario {self.kind} has no ray {label!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "left": {"a": self.left.a, "b": self.left.b},
            "rays": [{"label": r.label, "xi": r.xi} for r in self.rays],
            "zones": list(self.zones),
        }


@dataclass(frozen=True)
class WhithamPoint:
    """Moving spectral data at one ray: band edge, gap point, zone label."""

    xi: float
    edge: float
    mu: float | None
    zone: str


def _reflected(left: Background) -> Background:
    """Left background of the mirror problem, normalized.

    Reflecting the lattice (n -> -n-1 for a, n -> -n for b) negates b
    and swaps the roles of the two backgrounds; renormalizing the new
    right background (a_l, -b_l) gives this one.  Rays map through
    xi -> -xi/(2 a_l) and spectral points through
    lam -> (b_l - lam)/(2 a_l).
    """
    return Background(0.25 / left.a, 0.5 * left.b / left.a)


def classify(left: Background) -> Scenario:
    """Decide the wave pattern from the left spectrum against [-1, 1]."""
    c, d = left.spectrum
    a, b = left.a, left.b
    tol = EDGE_TOL * max(1.0, abs(c), abs(d))
    at_m1 = min(abs(c + 1.0), abs(d + 1.0)) <= tol
    at_p1 = min(abs(c - 1.0), abs(d - 1.0)) <= tol
    if abs(c + 1.0) <= tol and abs(d - 1.0) <= tol:
        return Scenario(FLAT, (), ("flat",), left)
    if at_m1 or at_p1:
        raise ValidationError(
            f"left spectrum [{c}, {d}] touches a band edge of [-1, 1]; "
            "borderline configurations are out of scope")

    if d < -1.0:
        refl = _reflected(left)
        rays = (Ray(-2.0 * a * xi_r(refl), "xi_l"),
                Ray(-2.0 * a * xi_r_prime(refl), "xi_l_prime"),
                Ray(xi_r_prime(left), "xi_r_prime"),
                Ray(xi_r(left), "xi_r"))
        zones = ("left_bg", "left_whitham", "gap",
                 "right_whitham", "right_bg")
        return Scenario(SHOCK, rays, zones, left)

    if c < -1.0 and d < 1.0:
        refl = _reflected(left)
        rays = (Ray(-2.0 * a * xi_r(refl), "xi_l"),
                Ray(0.5 * (1.0 - b - 6.0 * a), "xi_l_prime"),
                Ray(0.5 * (c + 3.0), "xi_r_prime"),
                Ray(xi_r(left), "xi_r"))
        zones = ("left_bg", "left_whitham", "middle_const",
                 "right_whitham", "right_bg")
        return Scenario(SHOCK_OVERLAP, rays, zones, left)

    if c < -1.0:
        rays = (Ray(-2.0 * a, "xi_l"),
                Ray(0.5 * (c - 1.0), "xi_l_prime"),
                Ray(0.5 * (c + 3.0), "xi_r_prime"),
                Ray(xi_r(left), "xi_r"))
        zones = ("left_bg", "slope_left", "middle_const",
                 "right_whitham", "right_bg")
        return Scenario(MIXED_RIGHT_IN_LEFT, rays, zones, left)

    if c > 1.0:
        rays = (Ray(-2.0 * a, "xi_l"), Ray(0.0, "slope_switch"),
                Ray(1.0, "xi_r"))
        zones = ("left_bg", "slope_left", "slope_right", "right_bg")
        return Scenario(RAREFACTION, rays, zones, left)

    if d > 1.0:
        rays = (Ray(-2.0 * a, "xi_l"),
                Ray(0.5 * (c - 1.0), "xi_l_prime"),
                Ray(0.5 * (1.0 - c), "xi_r_prime"),
                Ray(1.0, "xi_r"))
        zones = ("left_bg", "slope_left", "middle_const",
                 "slope_right", "right_bg")
        return Scenario(RAREFACTION_OVERLAP, rays, zones, left)

    rays = (Ray(xi_cr_mixed(left), "xi_cr"),
            Ray(0.5 * (1.0 - b) - 3.0 * a, "xi_l_prime"),
            Ray(0.5 * (1.0 - b) + a, "xi_r_prime"),
            Ray(1.0, "xi_r"))
    zones = ("left_bg", "left_twoband", "middle_const",
             "slope_right", "right_bg")
    return Scenario(MIXED_LEFT_IN_RIGHT, rays, zones, left)


# ------------------------------------------------------- critical rays

def _require_shock_type(left: Background) -> float:
    c = left.spectrum[0]
    if not c < -1.0:
        raise ValidationError(
            f"inf of the left spectrum is {c}, need < -1 for this ray")
    return c


def xi_r(left: Background) -> float:
    """Speed of the leading wave front, closed form."""
    c = _require_shock_type(left)
    s = math.sqrt(c * c - 1.0)
    return s / math.log(-c + s)


def xi_r_root(left: Background) -> float:
    """Same ray as the root of its defining moment integral.

    Kept as an independent route: the integrand (x + xi)/sqrt(x^2 - 1)
    on [c, -1] is evaluated by quadrature and the root located by
    bracketing, no use of the closed form.
    """
    c = _require_shock_type(left)

    def moment(xi):
        return quad_sqrt_sing(
            lambda x: (x + xi) / np.sqrt(np.abs(x * x - 1.0)),
            c, -1.0, left=False, right=True)

    lo, hi = 0.0, 2.0
    while moment(hi) < 0.0:
        hi *= 2.0
        if hi > 1e8:
            raise RootBracketError("front speed bracket did not close")
    return brentq(moment, lo, hi, xtol=1e-12)


def _gap_moment(c: float, gamma: float, num) -> float:
    """Integral of num(x) * sqrt(x - gamma) / sqrt((x^2-1)(x-c)) over the gap.

    This is the gap integral of num(x)(x - gamma)/|sqrtR| with the
    (x - gamma) factor cancelled against the root, so the integrand is
    an honest zero at gamma even when x - gamma underflows.
    """
    def f(x):
        return (num(x) * np.sqrt(np.abs(x - gamma))
                / np.sqrt(np.abs((x * x - 1.0) * (x - c))))

    return quad_sqrt_sing(f, gamma, -1.0, left=True, right=True)


def _xi_of_gamma(gamma: float, left: Background) -> float:
    """Ray at which the lower band edge sits at gamma.

    The gap-period condition is linear in mu, so for fixed gamma the
    matching mu and with it xi follow from two quadratures.
    """
    c = left.spectrum[0]
    num = _gap_moment(c, gamma, lambda x: x)
    den = _gap_moment(c, gamma, lambda x: np.ones_like(x))
    mu = num / den
    return 0.5 * (c - gamma - 2.0 * mu)


def gamma_mu(xi: float, left: Background) -> WhithamPoint:
    """Band edge gamma and gap point mu in the right Whitham zone.

    Eliminates mu through the trace condition
    2a - b + gamma + 2 mu = -2 xi and brackets the remaining gap-period
    residual in gamma over (inf I_l, -1).
    """
    c, d = left.spectrum
    _require_shock_type(left)
    xi = float(xi)

    def residual(gamma):
        mu = 0.5 * (c - gamma) - xi
        return _gap_moment(c, gamma, lambda x: x - mu)

    span = -1.0 - c
    # the -1 margin stays coarser: a nearly closed gap cannot be
    # integrated in double precision (nodes round onto the band edge)
    lo = c + 1e-12 * max(1.0, span)
    hi = -1.0 - 1e-7 * max(1.0, span)
    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo == 0.0:
        gamma = lo
    elif f_hi == 0.0:
        gamma = hi
    elif np.sign(f_lo) == np.sign(f_hi):
        raise RootBracketError(
            f"xi = {xi} is outside the right Whitham zone of {left}")
    else:
        gamma = brentq(residual, lo, hi, xtol=1e-14)

    mu = 0.5 * (c - gamma) - xi
    if d < -1.0 and gamma > d + 1e-9:
        raise RootBracketError(
            f"xi = {xi} lies below the right Whitham zone (gamma > sup I_l)")
    if not gamma < mu < -1.0 + 1e-12:
        raise RootBracketError(
            f"gap point mu = {mu} escaped (gamma, -1) at xi = {xi}")

    # residual of the second defining equation, against its own scale
    scale = _gap_moment(c, gamma, lambda x: np.abs(x - mu))
    if abs(residual(gamma)) > 1e-10 * max(1.0, scale):
        raise RootBracketError(f"band edge residual too large at xi = {xi}")
    return WhithamPoint(xi=xi, edge=gamma, mu=mu, zone="right_whitham")


def xi_r_prime(left: Background) -> float:
    """Inner boundary ray of the right Whitham zone.

    Without overlap the zone ends when gamma reaches sup I_l, and the
    mu-elimination evaluates that ray directly; with overlap (or with
    [-1,1] embedded) the bands merge at gamma = -1 where the trace
    condition alone fixes the ray.
    """
    c, d = left.spectrum
    _require_shock_type(left)
    if d < -1.0:
        return _xi_of_gamma(d, left)
    return 0.5 * (c + 3.0)


def left_zone(xi: float, left: Background) -> WhithamPoint:
    """Band edge gamma_l and gap point of the left Whitham zone.

    Realized on the reflected problem: the mirror lattice sees the
    reflected backgrounds swapped, and its right Whitham data maps back
    through lam -> b_l - 2 a_l lam, xi -> -2 a_l xi.
    """
    a, b = left.a, left.b
    refl = _reflected(left)
    try:
        wp = gamma_mu(-xi / (2.0 * a), refl)
    except RootBracketError as exc:
        raise RootBracketError(
            f"xi = {xi} is outside the left Whitham zone of {left}") from exc
    return WhithamPoint(xi=float(xi), edge=b - 2.0 * a * wp.edge,
                        mu=b - 2.0 * a * wp.mu, zone="left_whitham")


# ------------------------------------------------------- slope regions

def eta(xi: float, scenario: Scenario) -> float:
    """Edge of the single band in a slope region.

    The right-side piece truncates [-1, 1] to [eta, 1] with
    eta = 1 - 2 xi; the left-side piece grows [c, eta] with
    eta = c - 2 xi.  Both move up as xi decreases.
    """
    xi = float(xi)
    c = scenario.left.spectrum[0]
    pieces = {
        RAREFACTION: (("slope_left", c), ("slope_right", 1.0)),
        RAREFACTION_OVERLAP: (("slope_left", c), ("slope_right", 1.0)),
        MIXED_RIGHT_IN_LEFT: (("slope_left", c),),
        MIXED_LEFT_IN_RIGHT: (("slope_right", 1.0),),
    }
    if scenario.kind not in pieces:
        raise ValidationError(
            f"scenario {scenario.kind} has no slope regions")
    for zone, base in pieces[scenario.kind]:
        lo, hi = _zone_bounds(scenario, zone)
        if lo <= xi <= hi:
            return base - 2.0 * xi
    raise ValidationError(
        f"xi = {xi} is not in a slope region of {scenario.kind}")


def _zone_bounds(scenario: Scenario, zone: str):
    k = scenario.zones.index(zone)
    lo = -math.inf if k == 0 else scenario.rays[k - 1].xi
    hi = math.inf if k == len(scenario.rays) else scenario.rays[k].xi
    return lo, hi


# -------------------------------------------------- embedded two band

def xi_cr_mixed(left: Background) -> float:
    """Lower boundary ray of the embedded two-band region.

    The defining moment integral over [sup I_l, 1] is linear in the
    ray, so one quadrature pair suffices.
    """
    c, d = left.spectrum
    if not (-1.0 < c and d < 1.0):
        raise ValidationError(
            f"left spectrum [{c}, {d}] is not embedded in [-1, 1]")
    b = left.b

    def w(x):
        return np.sqrt(np.abs((x - c) * (x - d)))

    num = quad_sqrt_sing(lambda x: (x - b) / w(x), d, 1.0,
                         left=True, right=False)
    den = quad_sqrt_sing(lambda x: 1.0 / w(x), d, 1.0,
                         left=True, right=False)
    return -num / den


def xi_cr_closed(left: Background) -> float:
    """Closed form of the same ray, kept as an independent route."""
    c, d = left.spectrum
    if not (-1.0 < c and d < 1.0):
        raise ValidationError(
            f"left spectrum [{c}, {d}] is not embedded in [-1, 1]")
    u = (1.0 - left.b) / (2.0 * left.a)
    return -math.sqrt(u * u - 1.0) * 2.0 * left.a / math.acosh(u)


def mu_mixed(xi: float, left: Background) -> WhithamPoint:
    """Gap data (eta, mu) of the embedded two-band region.

    eta = 1 + 2b - 2 xi - 2 mu ties the band edge to the gap point; the
    moment condition on [sup I_l, eta] is bracketed in mu.  The square
    roots are taken positive on the integration interval, which makes
    the residual real (the raw integrand pairs sqrt(x - eta) with
    sqrt(x - 1), both negative there, so the ratio is real).
    """
    c, d = left.spectrum
    if not (-1.0 < c and d < 1.0):
        raise ValidationError(
            f"left spectrum [{c}, {d}] is not embedded in [-1, 1]")
    b = left.b
    xi = float(xi)
    s = 1.0 + 2.0 * b - 2.0 * xi

    def residual(mu):
        # hand-substituted halves: x = d + u^2 cancels the 1/sqrt(x-d)
        # factor exactly, x = e - u^2 the sqrt(e-x) zero, so nothing
        # blows up even when the gap (d, e) is microscopic
        e = s - 2.0 * mu
        m = 0.5 * (d + e)

        def f_lo(u):
            x = d + u * u
            return (2.0 * (x - mu) * np.sqrt(np.abs(e - x))
                    / np.sqrt(np.abs((x - c) * (1.0 - x))))

        def f_hi(u):
            x = e - u * u
            return (2.0 * u * u * (x - mu)
                    / np.sqrt(np.abs((x - d) * (x - c) * (1.0 - x))))

        return (fixed_quad(f_lo, 0.0, math.sqrt(m - d), n=96)
                + fixed_quad(f_hi, 0.0, math.sqrt(e - m), n=96))

    # mu ranges over (d, eta) with eta in (d, 1)
    delta = 1e-11 * max(1.0, 1.0 - d)
    lo = max(d, b - xi) + delta
    hi = min(s / 3.0, 0.5 * (s - d)) - delta
    if not lo < hi:
        raise RootBracketError(
            f"xi = {xi} is outside the embedded two-band region of {left}")
    f_lo, f_hi = residual(lo), residual(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise RootBracketError(
            f"xi = {xi} is outside the embedded two-band region of {left}")
    mu = brentq(residual, lo, hi, xtol=1e-14)
    e = s - 2.0 * mu

    scale = abs(residual(0.5 * (d + e))) + 1.0
    if abs(residual(mu)) > 1e-10 * scale:
        raise RootBracketError(f"gap residual too large at xi = {xi}")
    if not d < mu < e:
        raise RootBracketError(f"gap point mu = {mu} escaped (d, eta)")
    return WhithamPoint(xi=xi, edge=e, mu=mu, zone="left_twoband")


# ----------------------------------------------------------- g-function

def g_function(p, xi: float, left: Background) -> complex:
    """Phase correction g(p, xi) of the right Whitham zone.

    Integral of (lam - mu)(lam - gamma)/P from 1 to p, with P the
    surface square root over the bands [c, gamma] and [-1, 1] (negative
    square root branch on the upper sheet).  Real p is reached along
    the axis through the from-above limits; complex p by a straight
    segment from 1, which never meets the cuts.
    """
    if isinstance(p, SurfacePoint):
        lam, sheet = p.lam, p.sheet
    else:
        lam, sheet = complex(p), +1
    wp = gamma_mu(xi, left)
    c = left.spectrum[0]
    gamma, mu = wp.edge, wp.mu

    def N(x):
        return (x - mu) * (x - gamma)

    lam = complex(lam)
    if lam.imag != 0.0:
        roots = (c, gamma, -1.0, 1.0)

        def f(u):
            lm = 1.0 + (lam - 1.0) * u * u
            s = np.zeros_like(u, dtype=complex)
            for r in roots:
                s = s + np.log(lm - r)
            P = -np.exp(0.5 * s)
            return N(lm) / P * (lam - 1.0) * 2.0 * u

        total = 0.0 + 0.0j
        panels = 8
        for k in range(panels):
            total += fixed_quad(f, k / panels, (k + 1) / panels, n=48)
        return sheet * total

    x = lam.real
    tol = 1e-12 * max(1.0, abs(c))
    on_band1 = gamma - x > tol and x - c > tol
    on_band2 = 1.0 - x > tol and x + 1.0 > tol
    if on_band1 or on_band2:
        raise ValidationError(
            f"g is evaluated on a band at lam = {x}; principal values "
            "are not provided")

    def seg(a_, b_, num):
        # N/|sqrtR| with the (y - gamma) factor of N cancelled against
        # the root; sgn carries its sign, fixed per segment
        sgn = 1.0 if a_ >= gamma else -1.0

        def f(y):
            return (sgn * num(y) * np.sqrt(np.abs(y - gamma))
                    / np.sqrt(np.abs((y * y - 1.0) * (y - c))))

        return quad_sqrt_sing(f, a_, b_, left=True, right=True)

    def M(y):
        return y - mu

    if x >= 1.0 - tol:
        # right tail, P = -|sqrtR|
        val = -seg(1.0, x, M) if x > 1.0 + tol else 0.0
        return sheet * complex(val)

    acc = 1j * seg(-1.0, 1.0, M)          # across [-1, 1], P = -i|sqrtR|
    if abs(x + 1.0) <= tol:
        return sheet * -acc
    if x > gamma:
        acc += seg(x, -1.0, M)            # gap, P = +|sqrtR|
        return sheet * -acc
    acc += seg(gamma, -1.0, M)
    if abs(x - gamma) <= tol:
        return sheet * -acc
    # band1 interiors were rejected above, so x is at or left of c
    acc += -1j * seg(c, gamma, M)
    if abs(x - c) <= tol:
        return sheet * -acc
    acc += -seg(x, c, M)                  # left tail, P = -|sqrtR|
    return sheet * -acc
