"""Ad-hoc validation of the whitham module against frozen paper values."""
import math
import numpy as np

from todalab.lattice import Background
from todalab import whitham as wh
from todalab.spectral import phase_phi
from todalab.riemann import SurfacePoint

ok = True


def check(name, val, ref, tol):
    global ok
    err = abs(val - ref)
    flag = "ok " if err <= tol else "FAIL"
    if err > tol:
        ok = False
    print(f"{flag} {name}: {val!r} vs {ref!r}  (err {err:.2e})")


# ---- xi_r closed form vs known values
check("xi_r(0.5,-3)", wh.xi_r(Background(0.5, -3.0)),
      math.sqrt(15) / math.log(4 + math.sqrt(15)), 1e-15)
print("   xi_r(0.5,-3) =", wh.xi_r(Background(0.5, -3.0)))
check("xi_r(0.4,-2)", wh.xi_r(Background(0.4, -2.0)), 1.5482384, 5e-7)
check("xi_r root route (0.4,-2)",
      wh.xi_r_root(Background(0.4, -2.0)), wh.xi_r(Background(0.4, -2.0)), 1e-8)
check("xi_r root route (0.5,-3)",
      wh.xi_r_root(Background(0.5, -3.0)), wh.xi_r(Background(0.5, -3.0)), 1e-8)

# ---- xi_cr quadrature vs closed form
check("xi_cr(0.2,0.3) quad", wh.xi_cr_mixed(Background(0.2, 0.3)),
      -0.4957293, 5e-7)
check("xi_cr quad vs closed", wh.xi_cr_mixed(Background(0.2, 0.3)),
      wh.xi_cr_closed(Background(0.2, 0.3)), 1e-10)

# ---- classification of the six cases + flat
cases = [
    ((0.4, -2.0), wh.SHOCK),
    ((1.0, -2.0), wh.SHOCK_OVERLAP),
    ((0.5, 3.0), wh.RAREFACTION),
    ((0.6, 0.3), wh.RAREFACTION_OVERLAP),
    ((1.0, -0.5), wh.MIXED_RIGHT_IN_LEFT),
    ((0.2, 0.3), wh.MIXED_LEFT_IN_RIGHT),
    ((0.5, 0.0), wh.FLAT),
]
for (a, b), kind in cases:
    sc = wh.classify(Background(a, b))
    flag = "ok " if sc.kind == kind else "FAIL"
    if sc.kind != kind:
        ok = False
    print(f"{flag} classify({a},{b}) -> {sc.kind}",
          [(r.label, round(r.xi, 6)) for r in sc.rays])

# ---- ShockOverlap (1,-2) ray values from the displayed formulas
sc = wh.classify(Background(1.0, -2.0))
check("overlap xi_l_prime", sc.ray("xi_l_prime"), -1.5, 1e-15)
check("overlap xi_r_prime", sc.ray("xi_r_prime"), -0.5, 1e-15)
check("overlap xi_r", sc.ray("xi_r"), 1.8769573, 5e-7)
# xi_l must agree with the reflected xi_r_prime image
refl = wh._reflected(Background(1.0, -2.0))
check("overlap xi_l image", sc.ray("xi_l"), -2.0 * wh.xi_r(refl), 1e-14)
check("overlap xi_l_prime image", -2.0 * wh.xi_r_prime(refl), -1.5, 1e-12)

# ---- gamma_mu boundary behavior, ShockNonOverlap (0.4,-2)
left = Background(0.4, -2.0)
c, d = left.spectrum
xr = wh.xi_r(left)
xrp = wh.xi_r_prime(left)
print("   (0.4,-2): c,d =", (c, d), " xi_r' =", xrp, " xi_r =", xr)
wp = wh.gamma_mu(xr - 1e-6, left)
check("gamma(xi_r-) -> c", wp.edge, c, 1e-3)
wp = wh.gamma_mu(xrp + 1e-6, left)
check("gamma(xi_r'+) -> d", wp.edge, d, 1e-3)
check("gamma(xi_r') residual", wh._xi_of_gamma(d, left), xrp, 1e-14)
# monotone decreasing gamma on a grid
xis = np.linspace(xrp + 1e-4, xr - 1e-4, 25)
gs = [wh.gamma_mu(x, left).edge for x in xis]
mono = all(g2 < g1 for g1, g2 in zip(gs, gs[1:]))
print(("ok " if mono else "FAIL"), "gamma strictly decreasing on grid")
ok = ok and mono
mus = [wh.gamma_mu(x, left).mu for x in xis]
inv = all(g < m < -1 for g, m in zip(gs, mus))
print(("ok " if inv else "FAIL"), "mu in (gamma, -1) on grid")
ok = ok and inv

# outside-zone rejection
for bad in (xr + 0.1, xrp - 0.1):
    try:
        wh.gamma_mu(bad, left)
        print("FAIL gamma_mu accepted xi =", bad)
        ok = False
    except Exception as exc:
        print("ok  gamma_mu rejected xi =", bad, type(exc).__name__)

# ---- overlap variant: gamma -> -1 at inner ray
left2 = Background(1.0, -2.0)
wp = wh.gamma_mu(-0.5 + 1e-4, left2)
check("overlap gamma(xi_r inner+) -> -1", wp.edge, -1.0, 5e-2)
wp = wh.gamma_mu(wh.xi_r(left2) - 1e-6, left2)
check("overlap gamma(xi_r-) -> c", wp.edge, -4.0, 1e-2)

# ---- case 1 runs on the same system
left3 = Background(1.0, -0.5)
sc3 = wh.classify(left3)
print("   case1 rays:", [(r.label, round(r.xi, 6)) for r in sc3.rays])
check("case1 xi_r_prime", sc3.ray("xi_r_prime"), 0.25, 1e-15)
check("case1 xi_l_prime", sc3.ray("xi_l_prime"), -1.75, 1e-15)
wp = wh.gamma_mu(0.25 + 1e-4, left3)
check("case1 gamma(inner+) -> -1", wp.edge, -1.0, 5e-2)
wp = wh.gamma_mu(sc3.ray("xi_r") - 1e-6, left3)
check("case1 gamma(xi_r-) -> c", wp.edge, -2.5, 1e-2)

# ---- left zone boundary values, (0.4,-2)
xl = wh.classify(left).ray("xi_l")
xlp = wh.classify(left).ray("xi_l_prime")
print("   (0.4,-2) xi_l =", xl, " xi_l' =", xlp)
wp = wh.left_zone(xl + 1e-6, left)
check("gamma_l(xi_l+) -> 1", wp.edge, 1.0, 1e-3)
wp = wh.left_zone(xlp - 1e-6, left)
check("gamma_l(xi_l'-) -> -1", wp.edge, -1.0, 1e-3)
# gap point of the left surface lies in (d, gamma_l)
wp = wh.left_zone(0.5 * (xl + xlp), left)
inv = d < wp.mu < wp.edge
print(("ok " if inv else "FAIL"),
      f"left gap point: d={d} < mu={wp.mu:.6f} < gamma_l={wp.edge:.6f}")
ok = ok and inv

# ---- symmetric data: left zone mirrors right zone, a=1/2, b=-3
sym = Background(0.5, -3.0)
scs = wh.classify(sym)
check("sym xi_l = -xi_r", scs.ray("xi_l"), -scs.ray("xi_r"), 1e-12)
check("sym xi_l' = -xi_r'", scs.ray("xi_l_prime"), -scs.ray("xi_r_prime"),
      1e-12)
x0 = 0.5 * (scs.ray("xi_r_prime") + scs.ray("xi_r"))
wr = wh.gamma_mu(x0, sym)
wl = wh.left_zone(-x0, sym)
# mirror map lam -> b - lam = -3 - lam
check("sym gamma_l = -3 - gamma", wl.edge, -3.0 - wr.edge, 1e-10)
check("sym mu_l = -3 - mu", wl.mu, -3.0 - wr.mu, 1e-10)

# ---- eta pieces
sc4 = wh.classify(Background(0.6, 0.3))   # rarefaction overlap, c=-0.9,d=1.5
check("eta at xi=1", wh.eta(1.0, sc4), -1.0, 1e-15)
check("eta at inner right ray", wh.eta(sc4.ray("xi_r_prime"), sc4), -0.9,
      1e-15)
check("eta slope_left outer ray", wh.eta(sc4.ray("xi_l_prime"), sc4), 1.0,
      1e-15)
check("eta at xi_l", wh.eta(sc4.ray("xi_l"), sc4), -0.9 + 2.4, 1e-15)
try:
    wh.eta(0.0, sc4)
    print("FAIL eta accepted middle zone")
    ok = False
except Exception:
    print("ok  eta rejected middle zone xi")

sc5 = wh.classify(Background(0.5, 3.0))   # non overlap, c=2, d=4
check("eta(0+) right piece", wh.eta(1e-14, sc5), 1.0, 1e-10)
check("eta(0-) left piece", wh.eta(-1e-14, sc5), 2.0, 1e-10)
check("eta(xi_l) -> d", wh.eta(-1.0, sc5), 4.0, 1e-15)

# ---- mu_mixed boundary behavior (0.2,0.3)
left6 = Background(0.2, 0.3)
sc6 = wh.classify(left6)
xcr = sc6.ray("xi_cr")
xgap = sc6.ray("xi_l_prime")      # -0.25, gap opens
print("   case2 rays:", [(r.label, round(r.xi, 6)) for r in sc6.rays])
for off in (1e-2, 1e-3, 1e-4):
    wp = wh.mu_mixed(xgap - off, left6)
    print(f"   eta(xi_gap-{off:g}) = {wp.edge:.8f} (d=0.7), mu = {wp.mu:.8f}")
for off in (1e-2, 1e-3, 1e-4):
    wp = wh.mu_mixed(xcr + off, left6)
    print(f"   eta(xi_cr+{off:g}) = {wp.edge:.8f} (-> 1), mu = {wp.mu:.8f}")
wp = wh.mu_mixed(xgap - 1e-4, left6)
check("eta -> d at gap ray", wp.edge, 0.7, 5e-2)
wp = wh.mu_mixed(xcr + 1e-4, left6)
check("eta -> 1 at xi_cr", wp.edge, 1.0, 5e-2)
wp = wh.mu_mixed(0.5 * (xcr + xgap), left6)
inv = 0.7 < wp.mu < wp.edge < 1.0
print(("ok " if inv else "FAIL"),
      f"case2 invariants: d < mu={wp.mu:.6f} < eta={wp.edge:.6f} < 1")
ok = ok and inv

# ---- g-function checks, (0.4,-2) mid zone
xi0 = 0.5 * (xrp + xr)
for lam in (10.0, 20.0, 40.0):
    gp = wh.g_function(lam + 1e-6, xi0, left)
    gm = wh.g_function(lam - 1e-6, xi0, left)
    dg = (gp - gm) / 2e-6
    ph = (phase_phi(lam + 1e-6, xi0) - phase_phi(lam - 1e-6, xi0)) / 2e-6
    print(f"   lam={lam}: |d(g-Phi)| = {abs(dg - ph):.3e} "
          f"(x lam^2 = {abs(dg - ph) * lam**2:.3f})")
# Re g ~ 0 just above the band [-1,1]
res = max(abs(wh.g_function(x + 1e-8j, xi0, left).real)
          for x in (-0.7, -0.2, 0.3, 0.8))
check("Re g on right band", res, 0.0, 1e-6)
# tail point: straight complex path almost on the axis must agree
g_t = wh.g_function(3.0, xi0, left)
g_t2 = wh.g_function(3.0 + 1e-9j, xi0, left)
check("tail real vs complex route", abs(g_t2 - g_t), 0.0, 1e-6)

# segment-wise derivative checks: g' = (x-mu)(x-gamma)/P with the
# region phase of P (tails -|w|, gap +|w|)
wp0 = wh.gamma_mu(xi0, left)
gam0, mu0 = wp0.edge, wp0.mu


def absw(x):
    return math.sqrt(abs((x * x - 1) * (x - (-2.8)) * (x - gam0)))


h = 1e-6
for x0, phase, name in ((2.0, -1.0, "right tail"), (-1.6, 1.0, "gap"),
                        (-3.3, -1.0, "left tail")):
    fd = (wh.g_function(x0 + h, xi0, left)
          - wh.g_function(x0 - h, xi0, left)) / (2 * h)
    an = (x0 - mu0) * (x0 - gam0) / (phase * absw(x0))
    check(f"g' on {name}", fd, an, 1e-5 * max(1, abs(an)))

# continuity at the joints, approached from the allowed side
for edge, side in ((-1.0, -1.0), (gam0, +1.0), (-2.8, -1.0)):
    near = wh.g_function(edge + side * 1e-6, xi0, left)
    at = wh.g_function(edge, xi0, left)
    check(f"g continuous at {edge:.4f}", abs(near - at), 0.0, 1e-2)

# path independence in the upper half plane
q = 2.0 + 1.5j
p = 0.3 + 1.2j
gq = wh.g_function(q, xi0, left)
gp = wh.g_function(p, xi0, left)
roots0 = (-2.8, gam0, -1.0, 1.0)


def integrand(lm):
    s = 0j
    for r in roots0:
        s += np.log(lm - r)
    return (lm - mu0) * (lm - gam0) / -np.exp(0.5 * s)


from todalab._quad import fixed_quad as fq
leg = fq(lambda u: integrand(q + (p - q) * u) * (p - q), 0.0, 1.0, n=96)
check("path independence", abs(gq + leg - gp), 0.0, 1e-9)
# sheet oddness
g_up = wh.g_function(SurfacePoint(2.0 + 1.0j), xi0, left)
g_dn = wh.g_function(SurfacePoint(2.0 + 1.0j, -1), xi0, left)
check("sheet odd", abs(g_up + g_dn), 0.0, 1e-12)
# degenerate limit: gamma near c, g ~ Phi + const
xi1 = xr - 1e-5
lams = (0.5 + 1.2j, -3.0 + 0.8j, 2.5 + 0.1j)
vals = [wh.g_function(l, xi1, left) - phase_phi(l, xi1) for l in lams]
spread = max(abs(v - vals[0]) for v in vals)
check("flat limit g - Phi const", spread, 0.0, 1e-3)

# ---- normalize_right round trip
tr_left, tr = wh.normalize_right(Background(1.0, -3.0), Background(1.0, 1.0))
check("normalize left a", tr_left.a, 0.5, 1e-15)
check("normalize left b", tr_left.b, -2.0, 1e-15)
bg2 = tr.background_inv(tr_left)
check("round trip a", bg2.a, 1.0, 1e-15)
check("round trip b", bg2.b, -3.0, 1e-15)
check("xi round trip", tr.xi_inv(tr.xi(0.37)), 0.37, 1e-15)
check("lam round trip", tr.lam_inv(tr.lam(2.2)), 2.2, 1e-15)

print("\nALL OK" if ok else "\nSOME CHECKS FAILED")
