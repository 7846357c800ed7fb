"""Independent reference computations used by the tests.

Each oracle is written from the defining formula with its own constants
or arithmetic, without calling into the package.
"""

import math
from fractions import Fraction

import mpmath

# rounded constants, as a hand calculation would use them
HBAR = 1.054571817e-34
H = 6.62607015e-34
MU_B = 9.2740100783e-24
M_RB = 1.44316060e-25
G = 9.80665


def lande_gF(F, I=Fraction(3, 2), J=Fraction(1, 2), gJ=2.002331, gI=-0.000995):
    F = Fraction(F)
    ff, ii, jj = F * (F + 1), I * (I + 1), J * (J + 1)
    den = 2 * ff
    return gJ * float((ff - ii + jj) / den) + gI * float((ff + ii - jj) / den)


def gamma_hand(alpha_G_cm, gF_abs, mass=M_RB, g=G):
    return mass * g / (2.0 * gF_abs * MU_B * alpha_G_cm * 1e-2)


def trap_hand(alpha_G_cm, f_rf, f_rabi, gF_abs, mbar=1, g=G):
    """(z0 [m], f_rho [Hz], f_z [Hz]) from the closed-form shell-trap formulas."""
    a = alpha_G_cm * 1e-2
    w, om = 2 * math.pi * f_rf, 2 * math.pi * f_rabi
    gam = gamma_hand(alpha_G_cm, gF_abs, g=g)
    q = 1.0 - gam ** 2
    z0 = HBAR * w / (2 * a * MU_B * gF_abs) * (1 + gam / math.sqrt(q) * om / w)
    w_rho = math.sqrt(g / (4 * z0) * (1 - mbar * HBAR * om * math.sqrt(q) / (2 * M_RB * g * z0)))
    w_z = 2 * gF_abs * MU_B * a / HBAR * math.sqrt(mbar * HBAR / (M_RB * om)) * q ** 0.75
    return z0, w_rho / (2 * math.pi), w_z / (2 * math.pi)


def match_hand(alpha_G_cm, f1, rabi1, g1, g2):
    """(rabi2, f2) in Hz from the matching conditions."""
    gam1 = gamma_hand(alpha_G_cm, abs(g1))
    gam2 = gamma_hand(alpha_G_cm, abs(g2))
    r = abs(g2 / g1)
    rabi2 = r ** 2 * ((1 - gam2 ** 2) / (1 - gam1 ** 2)) ** 1.5 * rabi1
    f2 = r * (gam1 * rabi1 / math.sqrt(1 - gam1 ** 2) + f1) - gam2 * rabi2 / math.sqrt(1 - gam2 ** 2)
    return rabi2, f2


def bessel_j(n, x, dps=40):
    """J_n(x) from the integral representation at high precision."""
    with mpmath.workdps(dps):
        f = lambda t: mpmath.cos(n * t - x * mpmath.sin(t))  # noqa: E731
        return float(mpmath.quad(f, [0, mpmath.pi / 2, mpmath.pi]) / mpmath.pi)
