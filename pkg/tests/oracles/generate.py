"""Independent high-precision reference values (mpmath), frozen into the tests.

Run ``python tests/oracles/generate.py`` to regenerate.  Nothing here imports
the package: formulas are written out from scratch in the original
integration variables.
"""
import mpmath as mp

mp.mp.dps = 30

c = mp.mpf(299792458)
hbar = mp.mpf("6.62607015e-34") / (2 * mp.pi)  # CODATA 2022, as scipy.constants
e = mp.mpf("1.602176634e-19")
eps0 = mp.mpf("8.8541878188e-12")
four_pi_eps0 = 4 * mp.pi * eps0
kB = mp.mpf("1.380649e-23")

WP = 9 * e / hbar
GAM = mp.mpf("0.035") * e / hbar
LAM_P = 2 * mp.pi * c / WP


def eps_drude(w, wp=WP, gam=GAM):
    return 1 - wp**2 / (w * (w + 1j * gam))


def kz(w, k, eps):
    # Re >= 0, and Im <= 0 when Re == 0
    r = mp.sqrt(k * k - eps * w * w / c**2)
    if mp.re(r) < 0 or (mp.re(r) == 0 and mp.im(r) > 0):
        r = -r
    return r


def r_tm(w, k, eps):
    a, b = kz(w, k, 1), kz(w, k, eps)
    return (eps * a - b) / (eps * a + b)


def r_te(w, k, eps):
    a, b = kz(w, k, 1), kz(w, k, eps)
    return (a - b) / (a + b)


def trace_imag(L, xi, wp=WP, gam=GAM):
    """(1/4 pi eps0) int_0^inf dk k kap [(1 + k^2/kap^2) r_TM - (xi^2/c^2 kap^2) r_TE] e^{-2 kap L}, omega = i xi."""
    eps = 1 + wp**2 / (xi * (xi + gam))

    def f(k):
        kap = mp.sqrt(k * k + xi * xi / c**2)
        km = mp.sqrt(k * k + eps * xi * xi / c**2)
        rtm = (eps * kap - km) / (eps * kap + km)
        rte = (kap - km) / (kap + km)
        return k * kap * ((1 + k * k / kap**2) * rtm - xi**2 / (c**2 * kap**2) * rte) * mp.exp(-2 * kap * L)

    s = 1 / L
    return mp.quad(f, [0, s, 4 * s, 20 * s, 80 * s, 400 * s]) / four_pi_eps0


def trace_real(L, w, wp=WP, gam=GAM):
    eps = eps_drude(w, wp, gam)
    k0 = w / c

    def f(k):
        kap = kz(w, k, 1)
        return k * kap * (w**2 / (c**2 * kap**2) * r_te(w, k, eps) + (1 + k * k / kap**2) * r_tm(w, k, eps)) \
            * mp.exp(-2 * kap * L)

    s = 1 / L
    # the integrand has an integrable 1/kap singularity at the light line:
    # k = k0 sin(u) below it and k = k0 cosh(v) above it remove it
    prop = mp.quad(lambda u: f(k0 * mp.sin(u)) * k0 * mp.cos(u), [0, mp.pi / 4, mp.pi / 2])
    # sharp surface-plasmon peak just beyond the light line; cluster breakpoints around it
    kp = k0 * mp.re(mp.sqrt(eps / (eps + 1)))
    vp = mp.acosh(kp / k0)
    width = abs(mp.im(mp.sqrt(eps / (eps + 1)))) * k0 / (k0 * mp.sinh(vp))
    vpts = sorted({mp.mpf(0), vp, mp.acosh(2)} | {vp + j * width for j in (-8, -2, -1, 1, 2, 8) if 0 < vp + j * width < mp.acosh(2)})
    evan = mp.quad(lambda v: f(k0 * mp.cosh(v)) * k0 * mp.sinh(v), vpts)
    kpts = sorted({2 * k0, 2 * k0 + s, 2 * k0 + 4 * s, 2 * k0 + 20 * s, 2 * k0 + 80 * s, 2 * k0 + 400 * s})
    evan += mp.quad(f, kpts)
    return (prop + evan) / four_pi_eps0


def alpha_two_level_imag(xi, wa, a0):
    return a0 * wa**2 / (wa**2 + xi**2)


def U_T0(L, wa, a0):
    g = lambda xi: alpha_two_level_imag(xi, wa, a0) * trace_imag(L, xi)
    top = 10 * max(wa, WP, c / L)
    pts = [0, wa / 10, wa, 3 * wa, WP, c / L, top, 100 * top, 10000 * top]
    pts = sorted(set(pts))
    return -hbar / (2 * mp.pi) * mp.quad(g, pts)


def rb_alpha(w):
    lines = [(mp.mpf("23.6943e14"), mp.mpf("25.377e-30"), mp.mpf("36.1283e6")),
             (mp.mpf("24.1419e14"), mp.mpf("35.842e-30"), mp.mpf("38.1201e6"))]
    s = 0
    for wi, di, gi in lines:
        z = w + 1j * gi
        s += wi * di**2 / (wi**2 - z * z)
    return 2 / (3 * hbar) * s / four_pi_eps0


def sapphire_n(w):
    lam = 2 * mp.pi * c / w * 1e6
    B = [mp.mpf("1.4313493"), mp.mpf("0.65054713"), mp.mpf("5.3414021")]
    C = [mp.mpf("0.0726631"), mp.mpf("0.1193242"), mp.mpf("18.028251")]
    return mp.sqrt(1 + sum(b * lam**2 / (lam**2 - cc**2) for b, cc in zip(B, C)))


def t_str_E(w, theta, delta):
    """Glass/gold/vacuum TM transmission, electric-field amplitude ratio, via a 2x2 transfer matrix."""
    n = sapphire_n(w)
    epsg, epsm = n * n, eps_drude(w)
    k = n * w * mp.sin(theta) / c
    # H-field continuity form per layer; characteristic matrix of the film
    qg = kz(w, k, epsg) / epsg
    qm = kz(w, k, epsm) / epsm
    qv = kz(w, k, 1)
    # with kz = -i k_z convention: layer phase factor exp(-kz d)
    km = kz(w, k, epsm)
    cosh, sinh = mp.cosh(km * delta), mp.sinh(km * delta)
    # fields (H, E_x ~ q H) propagate as M = [[cosh, -sinh/qm],[ -qm sinh, cosh]]
    m11, m12, m21, m22 = cosh, -sinh / qm, -qm * sinh, cosh
    # incident+reflected in glass: H = 1 + r, qE = qg(-(1) + r) -> solve for r, t_H
    # at vacuum side: H = tH, E-part = -qv tH (single decaying wave)
    # [1 + r, qg(r - 1)] = M [tH, -qv tH]
    a = m11 - m12 * qv
    b = m21 - m22 * qv
    # 1 + r = a tH ; qg (r - 1) = b tH  -> 2 = (a - b/qg) tH
    tH = 2 / (a - b / qg)
    return n * tH


def main():
    out = {}
    out["eps_gold_2.4e15"] = eps_drude(mp.mpf("2.4e15"))
    wsp = WP / mp.sqrt(2)
    w = mp.mpf("0.9") * wsp
    out["rtm_gold_0.9wsp_k1.2"] = r_tm(w, mp.mpf("1.2") * w / c, eps_drude(w))
    wl = mp.mpf("24.6e14")
    out["k_sp_24.6e14"] = wl / c * mp.sqrt((wl**2 - WP**2) / (2 * wl**2 - WP**2))
    out["k_sp_0.9999wsp_over_WP_c"] = (mp.mpf("0.9999") * wsp / c) * mp.sqrt(
        ((mp.mpf("0.9999") * wsp) ** 2 - WP**2) / (2 * (mp.mpf("0.9999") * wsp) ** 2 - WP**2)) / (WP / c)
    for xi in ["1e13", "1e15", "1e16"]:
        out[f"trace_imag_lamP_xi{xi}"] = trace_imag(LAM_P, mp.mpf(xi))
    out["trace_real_lamP_2.4e15"] = trace_real(LAM_P, mp.mpf("2.4e15"))
    out["trace_real_50nm_2.4e15"] = trace_real(mp.mpf("50e-9"), mp.mpf("2.4e15"))
    a0 = mp.mpf("46e-30") * four_pi_eps0
    out["U_T0_100nm_two_level"] = U_T0(mp.mpf("100e-9"), mp.mpf("2.4e15"), a0)
    for wv in ["0", "21e14", "24.6e14", "24e14"]:
        out[f"rb_alpha_{wv}"] = rb_alpha(mp.mpf(wv))
    out["tanh_300K"] = mp.tanh(hbar * mp.mpf("2.4e15") / (2 * kB * 300))
    n = sapphire_n(wl)
    thT = mp.asin(1 / n)
    out["thetaT_deg_24.6e14"] = mp.degrees(thT)
    out["thetaT_deg_21e14"] = mp.degrees(mp.asin(1 / sapphire_n(mp.mpf("21e14"))))
    out["abs_t_str_E_sq_0.7deg"] = abs(t_str_E(wl, thT + mp.radians(mp.mpf("0.7")), mp.mpf("50e-9"))) ** 2
    for k, v in out.items():
        print(f"{k} = {mp.nstr(v, 17)}")


if __name__ == "__main__":
    main()
