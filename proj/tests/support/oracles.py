# Regenerates the frozen values in oracles.hpp. Independent of the C++ code.
import mpmath as mp
from scipy import optimize
import numpy as np
from scipy import stats

mp.mp.dps = 40


def phi(x):
    return mp.ncdf(x)


print("phi_m2", mp.nstr(phi(-2), 20))
print("gauss_2_3_q975", mp.nstr(2 + 3 * mp.sqrt(2) * mp.erfinv(2 * mp.mpf("0.975") - 1), 20))
print("beta_2_5_cdf_03", mp.nstr(mp.betainc(2, 5, 0, mp.mpf("0.3"), regularized=True), 20))
print("beta_15_45_sf_04", mp.nstr(mp.betainc(1.5, 4.5, mp.mpf("0.4"), 1, regularized=True), 20))
print("beta_35_25_q03", mp.nstr(mp.findroot(lambda x: mp.betainc(3.5, 2.5, 0, x, regularized=True) - mp.mpf("0.3"), 0.5), 20))
g1 = phi(-1)
print("g_1a_theta0", mp.nstr(mp.mpf("0.5") * g1 + mp.mpf("0.9") * (1 - g1), 20))


def un_equilibrium(t00, t01, t10, t11):
    # means -5 / 5, sd 5, u+ = u-: gamma(theta) = 1/2 where 0.4 theta = log((1-a)/a)
    def f(a):
        th = mp.mpf("2.5") * mp.log((1 - a) / a)
        G0 = phi((th + 5) / 5)
        G1 = phi((th - 5) / 5)
        g0 = t00 * G0 + t01 * (1 - G0)
        g1 = t10 * G1 + t11 * (1 - G1)
        return 1 / a - 1 - (1 - g1) / g0
    return mp.findroot(f, (mp.mpf('0.05'), mp.mpf('0.95')), solver='anderson')


print("fig2_un_a", mp.nstr(un_equilibrium(0.4, 0.5, 0.5, 0.9), 20))
print("fig2_un_b", mp.nstr(un_equilibrium(0.1, 0.5, 0.5, 0.7), 20))

# fair equilibria of the same scenario by a direct double-precision solver:
# maximize utility over the shared acceptance mass, then Newton on step(x) = x
N0, N1 = stats.norm(-5, 5), stats.norm(5, 5)
T = {"a": (0.4, 0.5, 0.5, 0.9), "b": (0.1, 0.5, 0.5, 0.7)}


def tail(alpha, c, th):
    if c == "eqopt":
        return N1.sf(th)
    return (1 - alpha) * N0.sf(th) + alpha * N1.sf(th)


def theta_at(alpha, c, q):
    return optimize.brentq(lambda t: tail(alpha, c, t) - q, -80, 80, xtol=1e-14, rtol=1e-15)


def utility(al, c, q):
    u = 0.0
    for a in al:
        th = theta_at(a, c, q)
        u += 0.5 * (a * N1.sf(th) - (1 - a) * N0.sf(th))
    return u


def thresholds(al, c):
    qs = np.linspace(1e-6, 1 - 1e-6, 401)
    us = [utility(al, c, q) for q in qs]
    k = int(np.argmax(us))
    r = optimize.minimize_scalar(lambda q: -utility(al, c, q),
                                 bounds=(qs[max(k - 1, 0)], qs[min(k + 1, 400)]),
                                 method="bounded", options={"xatol": 1e-13})
    return [theta_at(a, c, r.x) for a in al]


def step(al, c):
    th = thresholds(al, c)
    out = []
    for a, t, key in zip(al, th, "ab"):
        t00, t01, t10, t11 = T[key]
        G0, G1 = N0.cdf(t), N1.cdf(t)
        g0 = t00 * G0 + t01 * (1 - G0)
        g1 = t10 * G1 + t11 * (1 - G1)
        out.append(g0 * (1 - a) + g1 * a)
    return np.array(out)


for c, guess in (("dp", (0.68, 0.41)), ("eqopt", (0.73, 0.34))):
    sol = optimize.fsolve(lambda v: step(v, c) - v, np.array(guess), xtol=1e-13)
    print("fig2_%s" % c, repr(sol[0]), repr(sol[1]))

# decision-dependent generation: profile with G00 = N(-8, 3), G01 = N(-1, 3), G1 = N(5, 3)
def npdf(x, m, s):
    return mp.npdf(x, m, s)


al, z00 = mp.mpf("0.4"), mp.mpf("0.2")
z01 = 1 - al - z00
num = npdf(0, -8, 3) * z00 + npdf(0, -1, 3) * z01
print("gen_profile_fig4_x0", mp.nstr(1 / (1 + num / (npdf(0, 5, 3) * al)), 20))
