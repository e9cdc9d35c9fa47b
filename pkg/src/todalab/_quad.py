"""Gauss-Legendre quadrature helpers.

All period, phase and divisor integrals in this package are of one of
three kinds:

* integrands with inverse square root singularities at one or both
  endpoints (hyperelliptic periods),
* the same with an extra logarithmic factor (reflection coefficient
  integrals),
* integrands on a half line decaying like a power (cut contributions
  from infinity).

Endpoint singularities are removed by the substitution x = a + s**2,
half lines are mapped to (0, 1) by x = a + (s/(1-s))**2, and the
logarithmic case uses composite panels shrinking dyadically toward the
singular end.  Gauss-Legendre nodes are interior so integrands are
never evaluated at a singular point.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def fixed_quad(f, a: float, b: float, n: int = 64):
    """Plain n point Gauss-Legendre rule on [a, b] (complex f allowed)."""
    if b == a:
        return 0.0
    x, w = _nodes(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return (half * np.sum(w * f(mid + half * x))).item()


def quad_sqrt_sing(f, a: float, b: float, left: bool = True,
                   right: bool = True, n: int = 96) -> float:
    """Integrate f over (a, b) with 1/sqrt endpoint singularities.

    f is the full integrand.  Where `left` (`right`) is set, f may blow
    up like (x-a)**-0.5 ((b-x)**-0.5); the substitution x = a + s**2
    (x = b - s**2) makes the transformed integrand smooth.
    """
    if b <= a:
        if b == a:
            return 0.0
        raise ValueError("quad_sqrt_sing needs a < b")
    if left and right:
        m = 0.5 * (a + b)
        return (quad_sqrt_sing(f, a, m, True, False, n)
                + quad_sqrt_sing(f, m, b, False, True, n))
    if left:
        smax = np.sqrt(b - a)
        return fixed_quad(lambda s: 2.0 * s * f(a + s * s), 0.0, smax, n)
    if right:
        smax = np.sqrt(b - a)
        return fixed_quad(lambda s: 2.0 * s * f(b - s * s), 0.0, smax, n)
    return fixed_quad(f, a, b, n)


def quad_tail(f, a: float, side: int = +1, n: int = 128) -> float:
    """Integrate f over [a, inf) (side=+1) or (-inf, a] (side=-1).

    Handles an inverse square root singularity at the finite end and
    algebraic decay (x**-1.5 or faster) at infinity.  Substitution
    x = a + side*(s/(1-s))**2 maps the half line to s in (0, 1); the
    result is oriented with increasing x on either side, so it is
    positive for positive f.
    """
    def g(s):
        u = s / (1.0 - s)
        x = a + side * u * u
        jac = 2.0 * s / (1.0 - s) ** 3
        return jac * f(x)

    return fixed_quad(g, 0.0, 1.0, n)


def dyadic_quad(f, a: float, b: float, sing: str = "left",
                levels: int = 44, n: int = 16) -> float:
    """Composite rule with panels accumulating at one endpoint.

    Built for integrands with an integrable logarithmic singularity at
    `sing` in {"left", "right"} after any sqrt factor was already
    substituted away.  `levels` dyadic panels give interval lengths
    down to (b-a)*2**-levels, enough for ~1e-13 with n=16 per panel.
    """
    if b <= a:
        if b == a:
            return 0.0
        raise ValueError("dyadic_quad needs a < b")
    length = b - a
    # breakpoints measured from the singular end
    cuts = [length * 2.0 ** (-k) for k in range(levels + 1)]
    total = 0.0
    if sing == "left":
        lo = a
        for k in range(levels, 0, -1):
            total += fixed_quad(f, a + cuts[k], a + cuts[k - 1], n)
        total += fixed_quad(f, lo, a + cuts[levels], n)
    elif sing == "right":
        for k in range(levels, 0, -1):
            total += fixed_quad(f, b - cuts[k - 1], b - cuts[k], n)
        total += fixed_quad(f, b - cuts[levels], b, n)
    else:
        raise ValueError("sing must be 'left' or 'right'")
    return total
