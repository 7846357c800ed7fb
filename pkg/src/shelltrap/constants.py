"""Physical constants and unit conversions.

Internally everything is SI with angular frequencies (rad/s). The helpers
below translate to and from the laboratory units used in configuration
files and reports: Hz, Gauss and G/cm.
"""

import math

from scipy.constants import physical_constants

#: Bumped whenever a value in this table changes; recorded in run manifests.
CONSTANTS_VERSION = "codata2022-rb87steck-1"

HBAR = physical_constants["reduced Planck constant"][0]
H_PLANCK = physical_constants["Planck constant"][0]
MU_B = physical_constants["Bohr magneton"][0]
ATOMIC_MASS = physical_constants["atomic mass constant"][0]
G_STANDARD = 9.80665

TWO_PI = 2.0 * math.pi

# 87Rb ground state (D. A. Steck, "Rubidium 87 D Line Data")
RB87_MASS_U = 86.909180520
RB87_GJ = 2.002331
RB87_GI = -0.000995
RB87_HFS_HZ = 6.834682610904290e9
RB87_NUCLEAR_SPIN = 1.5
RB87_ELECTRON_SPIN = 0.5

GAUSS = 1e-4  # T
GAUSS_PER_CM = 1e-2  # T/m
MICRON = 1e-6


def hz_to_angular(f):
    return TWO_PI * f


def angular_to_hz(w):
    return w / TWO_PI


def gauss_to_tesla(b):
    return b * GAUSS


def tesla_to_gauss(b):
    return b / GAUSS


def gauss_per_cm_to_tesla_per_m(a):
    return a * GAUSS_PER_CM


def tesla_per_m_to_gauss_per_cm(a):
    return a / GAUSS_PER_CM
