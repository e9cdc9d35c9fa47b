"""Leading-order asymptotics: zone dispatch and two-band theta solutions.

Everything is assembled in the frame where the right background is
(1/2, 0).  A two-band zone carries an exact Toda solution built from
theta-function quotients on a genus-1 surface whose real phase moves
linearly in n and t.  Three ingredients pin such a solution:

  * the surface itself (band edge gamma(xi) from whitham.gamma_mu for
    the modulated zone, the full left band for the plateau zone),
  * the initial divisor, the Jacobi-inversion image driven by the
    scattering weight chi of the initial step,

        A(rho) = A(gamma) + I_chi/pi + A(inf+) - A(inf-),
        I_chi  = int_c^gamma log|chi(x)| dx / (2 Kg |sqrtR(x)|),

    reduced modulo the period lattice (the plateau zone uses the same
    expression with gamma = d: the two-sheet contour around the left
    band collapses to twice the upper-limit integral),
  * calibration constants (a~^2, b~, Gamma) that make the quotients an
    actual solution; they are fixed by the equations of motion
    themselves, see calibrate.

Left-moving zones are never treated separately: the reflection
a(n) -> a(-n-1), b(n) -> -b(-n) maps them onto right-moving zones of
the mirror background pair, and AsymptoticModel applies it on the fly.
The reflection shifts the b-switch of the step one site relative to
the a-switch, so mirror divisors weight chi with the staggered-step
transmission instead of the pure-step one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import dyadic_quad
from .errors import NumericalError, ValidationError
from .lattice import Background
from .riemann import (TwoBandSurface, build_surface, lattice_dist,
                      reduce_mod_lattice, theta, theta_log_deriv)
from .spectral import purestep_scattering, staggeredstep_transmission
from .whitham import FLAT, classify, gamma_mu, normalize_right, _reflected

RIGHT_BG = Background(0.5, 0.0)

#: dyadic levels / nodes per panel for the chi-weighted divisor integral
CHI_LEVELS = 44
CHI_NODES = 16


# ------------------------------------------------------------- divisor

def _log_chi_files(left: Background, staggered: bool = False):
    """Pieces of log|chi| for the step against (1/2, 0).

    chi(x) = -sqrt((x-c)(d-x)/(x^2-1)) * |T(x)|^2 on the part of the
    left band outside [-1, 1]; the band-edge factors are returned
    separately so callers can feed exact edge distances (the raw x
    rounds onto the edge under the s^2 substitution and would produce
    log(0)).  `staggered` selects the transmission of the reflected
    step (b-switch one site after the a-switch).
    """
    c, d = left.spectrum
    # |T| is bounded with a sqrt cusp at the band edges, where the
    # closed form refuses to evaluate; a 1e-9 clamp changes the
    # divisor integral by O(1e-9), below the quadrature target
    clamp = 1e-9 * max(1.0, abs(c), abs(d))

    def log_T(x):
        x = min(max(x, c + clamp), d - clamp)
        if staggered:
            T = staggeredstep_transmission(left, RIGHT_BG, x)
        else:
            T, _ = purestep_scattering(left, RIGHT_BG, x)
        return math.log(abs(T))

    def rest(x, dist_c, dist_d):
        return 0.5 * (math.log(dist_c) + math.log(dist_d)
                      - math.log(x * x - 1.0)) + 2.0 * log_T(x)

    return c, d, rest


def _chi_weight(surface: TwoBandSurface, left: Background,
                log_abs_chi=None, levels: int = CHI_LEVELS,
                nodes: int = CHI_NODES, staggered: bool = False) -> float:
    """I_chi = int over the first band of log|chi| d lam/(2 Kg |sqrtR|).

    Both endpoints get the s^2 substitution (integrable inverse square
    roots), after which log singularities remain wherever chi has a
    band-edge zero; dyadic panels toward s = 0 absorb those.  The
    default weight is the pure-step chi of `left`; pass `log_abs_chi`
    (a plain callable of x) to override it.
    """
    E1, E2 = surface.E[0], surface.E[1]
    mid = 0.5 * (E1 + E2)
    inv2kg = 1.0 / (2.0 * surface.Kg)

    def w_rest(x, skip):
        p = np.ones_like(x)
        for k, Ej in enumerate(surface.E):
            if k != skip:
                p = p * np.abs(x - Ej)
        return np.sqrt(p)

    if log_abs_chi is None:
        c, d, rest = _log_chi_files(left, staggered)
        at_c = abs(E1 - c) < 1e-14
        at_d = abs(E2 - d) < 1e-14

        def val_lo(s, x):
            # x = E1 + s^2; |x - c| = s^2 exactly when the band starts at c
            dist_c = s * s if at_c else abs(x - c)
            return rest(x, dist_c, abs(x - d))

        def val_hi(s, x):
            dist_d = s * s if at_d else abs(x - d)
            return rest(x, abs(x - c), dist_d)
    else:
        def val_lo(s, x):
            return log_abs_chi(x)

        val_hi = val_lo

    def f_lo(s):
        s = np.atleast_1d(np.asarray(s, float))
        x = E1 + s * s
        vals = np.array([val_lo(si, xi) for si, xi in zip(s, x)])
        return 2.0 * vals / w_rest(x, 0) * inv2kg

    def f_hi(s):
        s = np.atleast_1d(np.asarray(s, float))
        x = E2 - s * s
        vals = np.array([val_hi(si, xi) for si, xi in zip(s, x)])
        return 2.0 * vals / w_rest(x, 1) * inv2kg

    lo = dyadic_quad(f_lo, 0.0, math.sqrt(mid - E1), sing="left",
                     levels=levels, n=nodes)
    hi = dyadic_quad(f_hi, 0.0, math.sqrt(E2 - mid), sing="left",
                     levels=levels, n=nodes)
    return lo + hi


def _divisor_on(surface: TwoBandSurface, left: Background,
                log_abs_chi=None, levels: int = CHI_LEVELS,
                nodes: int = CHI_NODES, staggered: bool = False) -> complex:
    ichi = _chi_weight(surface, left, log_abs_chi, levels, nodes, staggered)
    # the chi weight enters through the band-side limit that opposes the
    # canonical Abel path, hence the plus sign; the minus variant leaves
    # a constant phase error against the lattice run (parity-flipped
    # oscillation), it does not merely renormalize
    img = -surface.tau / 2.0 + ichi / math.pi + surface.abel_infty
    return reduce_mod_lattice(img, surface.tau)


def divisor_whitham(xi: float, left: Background, log_abs_chi=None,
                    levels: int = CHI_LEVELS, nodes: int = CHI_NODES,
                    staggered: bool = False) -> complex:
    """Abel image of the divisor in the modulated zone at ray xi."""
    wp = gamma_mu(xi, left)
    surface = build_surface(left.spectrum[0], wp.edge, -1.0, 1.0)
    return _divisor_on(surface, left, log_abs_chi, levels, nodes, staggered)


def divisor_gap(left: Background, log_abs_chi=None,
                levels: int = CHI_LEVELS, nodes: int = CHI_NODES,
                staggered: bool = False) -> complex:
    """Abel image of the (xi independent) divisor of the plateau zone."""
    c, d = left.spectrum
    if not d < -1.0:
        raise ValidationError(
            f"plateau zone needs the left band below -1, got sup = {d}")
    surface = build_surface(c, d, -1.0, 1.0)
    return _divisor_on(surface, left, log_abs_chi, levels, nodes, staggered)


# ------------------------------------------------------ two-band model

@dataclass(frozen=True)
class TwoBandModel:
    """Exact two-band Toda solution pinned by surface + divisor + calib.

    The phase is real: z(n, t) = phase_const - n*abel_infty + t*V, and
    theta stays strictly positive along it, so the quotients below are
    globally smooth.
    """

    surface: TwoBandSurface
    divisor_image: complex
    phase_const: float
    a_tilde_sq: float
    b_tilde: float
    gamma_cal: float
    calib_spread: float

    def phase(self, n: int, t: float) -> float:
        return (self.phase_const - n * self.surface.abel_infty
                + t * self.surface.V)

    def values_sq(self, n: int, t: float) -> tuple[float, float]:
        tau = self.surface.tau
        zm = self.phase(n - 1, t)
        z0 = self.phase(n, t)
        zp = self.phase(n + 1, t)
        tm = theta(zm, tau).real
        t0 = theta(z0, tau).real
        tp = theta(zp, tau).real
        a_sq = self.a_tilde_sq * tm * tp / (t0 * t0)
        Lm = theta_log_deriv(zm, tau)[0].real
        L0 = theta_log_deriv(z0, tau)[0].real
        b = self.b_tilde + (Lm - L0) / self.gamma_cal
        return a_sq, b

    def values(self, n: int, t: float) -> tuple[float, float]:
        a_sq, b = self.values_sq(n, t)
        if a_sq <= 0:
            raise NumericalError(f"two-band a^2 = {a_sq} not positive")
        return math.sqrt(a_sq), b


def phase_vector(n: int, t: float, model: TwoBandModel) -> float:
    """Real phase z(n, t); increments are exactly -abel_infty per site.

    The value is a real-circle coordinate: reduction to [0, 1) is a
    lattice shift that the period-1 theta ignores, so the unreduced
    representative is returned to keep the linearity exact.
    """
    return model.phase(n, t)


def two_band(n: int, t: float, model: TwoBandModel) -> tuple[float, float]:
    """(a^2, b) of the exact two-band solution at site n, time t."""
    return model.values_sq(n, t)


def calibrate(surface: TwoBandSurface, divisor_image: complex,
              ns=(-2, -1, 0, 1, 2, 5, 9),
              ts=(0.0, 0.437, 1.731)) -> TwoBandModel:
    """Fix (a~^2, b~, Gamma) so the theta quotients solve the lattice.

    The a-equation forces Gamma = -2/V identically; the b-equation is
    linear in a~^2 and is solved at every sample point (n, t).  For a
    consistent divisor and phase all samples agree; the recorded
    spread is the diagnostic, and beyond 1e-4 the model is rejected.
    b~ comes from the trace formula: half the branch-point sum minus
    the gap mean of the surface.
    """
    tau = surface.tau
    V = surface.V
    A = surface.abel_infty

    y = divisor_image.imag / tau.imag
    if abs(y - 0.5) > 1e-6:
        raise NumericalError(
            f"divisor image off the gap circle (Im fraction {y:.3e}); "
            "the chi weight must be real")
    phase_const = surface.abel_infty_plus - divisor_image.real - 0.5
    # full-formula cross check: the two half periods must cancel
    z_raw = surface.abel_infty_plus - divisor_image - surface.riemann_const
    if lattice_dist(z_raw, phase_const, tau) > 1e-9:
        raise NumericalError("phase bookkeeping lost a half period")

    if V == 0.0:
        raise NumericalError("vanishing frequency; surface degenerate")

    lo, hi = min(ns) - 2, max(ns) + 2
    candidates = []
    for t in ts:
        z = {k: phase_const - k * A + t * V for k in range(lo, hi + 1)}
        th = {k: theta(zk, tau).real for k, zk in z.items()}

        def Q(k):
            return th[k - 1] * th[k + 1] / th[k] ** 2

        for n in ns:
            dQ = Q(n) - Q(n - 1)
            if abs(dQ) < 1e-9 * max(1.0, abs(Q(n)) + abs(Q(n - 1))):
                continue
            lp_m = theta_log_deriv(z[n - 1], tau)[1].real
            lp_0 = theta_log_deriv(z[n], tau)[1].real
            candidates.append(-(V * V / 4.0) * (lp_m - lp_0) / dQ)

    if not candidates:
        raise NumericalError(
            "theta oscillation below rounding at every sample; "
            "the surface is too degenerate to calibrate")
    candidates.sort()
    a_tilde_sq = candidates[len(candidates) // 2]
    spread = (candidates[-1] - candidates[0]) / max(abs(a_tilde_sq), 1e-300)
    if spread > 1e-4:
        raise NumericalError(
            f"calibration depends on the sample (spread {spread:.2e}); "
            "divisor or phase is inconsistent with the surface")
    if a_tilde_sq <= 0:
        raise NumericalError(f"calibrated a~^2 = {a_tilde_sq} not positive")
    b_tilde = 0.5 * sum(surface.E) - surface.gap_mean
    return TwoBandModel(surface, divisor_image, phase_const,
                        a_tilde_sq, b_tilde, -2.0 / V, spread)


def whitham_model(xi: float, left: Background, log_abs_chi=None,
                  levels: int = CHI_LEVELS, nodes: int = CHI_NODES,
                  staggered: bool = False) -> TwoBandModel:
    """Modulated two-band model at ray xi (surface moves with xi)."""
    wp = gamma_mu(xi, left)
    surface = build_surface(left.spectrum[0], wp.edge, -1.0, 1.0)
    image = _divisor_on(surface, left, log_abs_chi, levels, nodes, staggered)
    return calibrate(surface, image)


def gap_model(left: Background, log_abs_chi=None, levels: int = CHI_LEVELS,
              nodes: int = CHI_NODES, staggered: bool = False) -> TwoBandModel:
    """Fixed two-band model of the plateau zone (full left band kept)."""
    c, d = left.spectrum
    if not d < -1.0:
        raise ValidationError(
            f"plateau zone needs the left band below -1, got sup = {d}")
    surface = build_surface(c, d, -1.0, 1.0)
    image = _divisor_on(surface, left, log_abs_chi, levels, nodes, staggered)
    return calibrate(surface, image)


def toda_residual(model: TwoBandModel, ns=range(-3, 4),
                  ts=(0.3, 0.9, 2.1), h: float = 1e-4) -> float:
    """Worst residual of both lattice equations over the sample grid.

    Time derivatives by central differences; h = 1e-4 keeps the
    truncation near 1e-8 for the O(1) frequencies that occur here.
    """
    worst = 0.0
    for t in ts:
        for n in ns:
            asq_c, b_c = model.values_sq(n, t)
            asq_m1, _ = model.values_sq(n - 1, t)
            _, b_p1 = model.values_sq(n + 1, t)
            asq_hp, b_hp = model.values_sq(n, t + h)
            asq_hm, b_hm = model.values_sq(n, t - h)
            bdot = (b_hp - b_hm) / (2.0 * h)
            adot = (math.sqrt(asq_hp) - math.sqrt(asq_hm)) / (2.0 * h)
            r_b = bdot - 2.0 * (asq_c - asq_m1)
            r_a = adot - math.sqrt(asq_c) * (b_p1 - b_c)
            worst = max(worst, abs(r_b), abs(r_a))
    return worst


# ------------------------------------------------------- zone dispatch

class AsymptoticModel:
    """Leading-term evaluator for one background pair on the half plane.

    Construction classifies the normalized scenario; evaluation
    dispatches on xi = n/t, builds the needed two-band models lazily
    (the plateau model once, modulated models per ray) and maps the
    values back to the original frame.  Left-moving zones go through
    the mirror problem, which only ever exercises right-moving code.
    """

    def __init__(self, left: Background, right: Background = RIGHT_BG,
                 levels: int = CHI_LEVELS, nodes: int = CHI_NODES,
                 staggered: bool = False):
        self.left = left
        self.right = right
        self.left_n, self.transform = normalize_right(left, right)
        self.scenario = classify(self.left_n)
        self._levels = levels
        self._nodes = nodes
        # the mirror problem starts from the reflected (staggered) step,
        # and reflecting twice restores the pure step
        self._staggered = staggered
        self._gap: TwoBandModel | None = None
        self._whitham: dict[float, TwoBandModel] = {}
        self._mirror: AsymptoticModel | None = None

    # lazy parts ------------------------------------------------------

    def _gap_model(self) -> TwoBandModel:
        if self._gap is None:
            self._gap = gap_model(self.left_n, levels=self._levels,
                                  nodes=self._nodes,
                                  staggered=self._staggered)
        return self._gap

    def _whitham_model(self, xi: float) -> TwoBandModel:
        m = self._whitham.get(xi)
        if m is None:
            m = whitham_model(xi, self.left_n, levels=self._levels,
                              nodes=self._nodes, staggered=self._staggered)
            self._whitham[xi] = m
        return m

    def _mirror_model(self) -> "AsymptoticModel":
        if self._mirror is None:
            self._mirror = AsymptoticModel(_reflected(self.left_n), RIGHT_BG,
                                           levels=self._levels,
                                           nodes=self._nodes,
                                           staggered=not self._staggered)
        return self._mirror

    # evaluation ------------------------------------------------------

    def evaluate(self, n: int, t: float) -> tuple[float, float, str]:
        """(a, b, zone) of the leading term at site n, time t > 0."""
        if self.scenario.kind == FLAT:
            raise ValidationError(
                "flat scenario: the solution is the background itself")
        if not t > 0:
            raise ValidationError("leading terms are defined for t > 0")
        tn = self.transform.time(t)
        a_n, b_n, zone = self._eval_normalized(int(n), tn)
        return (self.transform.scale * a_n,
                self.transform.shift + self.transform.scale * b_n, zone)

    def _eval_normalized(self, n: int, t: float) -> tuple[float, float, str]:
        xi = n / t
        zone = self.scenario.zone_of(xi)
        c, _d = self.left_n.spectrum
        if zone == "right_bg":
            return 0.5, 0.0, zone
        if zone == "left_bg":
            return self.left_n.a, self.left_n.b, zone
        if zone == "middle_const":
            return 0.25 * (1.0 - c), 0.5 * (1.0 + c), zone
        if zone == "slope_right":
            return 0.5 * xi, 1.0 - xi, zone
        if zone == "slope_left":
            return -0.5 * xi, c - xi, zone
        if zone == "gap":
            a_sq, b = self._gap_model().values_sq(n, t)
            return math.sqrt(a_sq), b, zone
        if zone == "right_whitham":
            a_sq, b = self._whitham_model(xi).values_sq(n, t)
            return math.sqrt(a_sq), b, zone
        # left_whitham / left_twoband: reflect onto the mirror problem
        mirror = self._mirror_model()
        s = 2.0 * self.left_n.a
        a_m = mirror._eval_normalized(-n - 1, s * t)[0]
        b_m = mirror._eval_normalized(-n, s * t)[1]
        return s * a_m, self.left_n.b - s * b_m, zone

    def evaluate_grid(self, ns, t: float):
        """Arrays (a, b) plus zone labels over integer sites ns."""
        ns = np.asarray(ns, dtype=int)
        a = np.empty(len(ns))
        b = np.empty(len(ns))
        zones = []
        for k, n in enumerate(ns):
            a[k], b[k], zone = self.evaluate(int(n), t)
            zones.append(zone)
        return a, b, zones


def leading_term(n: int, t: float, model: AsymptoticModel):
    """(a, b, zone label) of the leading-order solution at (n, t)."""
    return model.evaluate(n, t)
