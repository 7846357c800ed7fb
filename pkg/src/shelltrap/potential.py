"""RF-dressed adiabatic shell potential and trap characterization.

Geometry: ``z`` points up, gravity points down and the shell trap forms
below the quadrupole zero. Trap depths ``z0`` are reported as positive
distances below the (possibly bias-translated) quadrupole zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import constants as C
from .core import Manifold, TrapConfig, larmor_per_tesla, require_trap
from .errors import (CharacterizationError, DomainError, RadiallyUntrappedError,
                     SingularityError)


@dataclass(frozen=True)
class TrapCharacterization:
    """Trap bottom and harmonic frequencies of one manifold.

    Attributes
    ----------
    z0 : float
        Depth of the trap bottom below the quadrupole zero (m).
    omega_rho, omega_z : float
        Radial and axial trap frequencies (rad/s).
    gamma : float
        Gravity parameter of the manifold.
    manifold : Manifold
    method : str
        ``"analytic"`` or ``"numeric"``.
    z_center : float
        Height of the quadrupole zero (m); the trap bottom sits at
        ``z_center - z0``.
    """

    z0: float
    omega_rho: float
    omega_z: float
    gamma: float
    manifold: Manifold
    method: str
    z_center: float = 0.0

    def to_dict(self):
        return {
            "z0_um": self.z0 / C.MICRON,
            "omega_rho_Hz": C.angular_to_hz(self.omega_rho),
            "omega_z_Hz": C.angular_to_hz(self.omega_z),
            "gamma": self.gamma,
            "method": self.method,
        }


def rabi_coupling(rho, z, rabi_max):
    """Local RF coupling to the quadrupole's quantization axis.

    ``(rabi_max / 2) * (1 - 2 z / sqrt(rho**2 + 4 z**2))`` with ``(rho, z)``
    measured from the quadrupole zero. Maximal below the zero on axis,
    vanishing above it.
    """
    rho = np.asarray(rho, dtype=float)
    z = np.asarray(z, dtype=float)
    norm = np.sqrt(rho ** 2 + 4.0 * z ** 2)
    if np.any(norm == 0.0):
        raise SingularityError("RF coupling is undefined at the quadrupole zero")
    out = 0.5 * rabi_max * (1.0 - 2.0 * z / norm)
    return float(out) if out.ndim == 0 else out


def _relative_potential(config: TrapConfig, manifold: Manifold, rho, dz):
    """Position-dependent part of V/hbar (rad/s), ``dz`` relative to the zero.

    Gravity is referenced to the quadrupole zero, so a bias field adds
    only the constant ``M g z_center`` which this function leaves out.
    """
    tone = config.tone_for(manifold)
    rho = np.asarray(rho, dtype=float)
    dz = np.asarray(dz, dtype=float)
    b = config.alpha * np.sqrt(rho ** 2 + 4.0 * dz ** 2)
    detuning = larmor_per_tesla(manifold) * b - tone.omega
    if tone.rabi > 0:
        coupling = rabi_coupling(rho, dz, tone.rabi)
    else:
        coupling = 0.0
    mg_over_hbar = config.species.mass * config.gravity / C.HBAR
    return (manifold.sign * manifold.mbar * np.hypot(detuning, coupling)
            + mg_over_hbar * dz)


def hyperfine_offset(config: TrapConfig, manifold: Manifold) -> float:
    """Energy offset ``s (I + 1/2) A_hfs / 2`` of the manifold (J)."""
    sp = config.species
    return manifold.sign * (sp.nuclear_spin + 0.5) * sp.hfs_constant / 2.0


def dressed_potential(config: TrapConfig, manifold: Manifold, r):
    """Adiabatic dressed potential ``V^F(r)`` in joules.

    ``r`` is a position (or array of positions, last axis of length 3) in
    metres, in laboratory coordinates whose origin is the unbiased
    quadrupole zero.
    """
    r = np.asarray(r, dtype=float)
    rho = np.hypot(r[..., 0], r[..., 1])
    zc = config.center_z
    rel = _relative_potential(config, manifold, rho, r[..., 2] - zc)
    mgz_c = config.species.mass * config.gravity * zc
    out = hyperfine_offset(config, manifold) + C.HBAR * rel + mgz_c
    return float(out) if np.ndim(out) == 0 else out


def trap_position(config: TrapConfig, manifold: Manifold) -> float:
    """Depth of the trap bottom below the quadrupole zero (m).

    ``hbar w / (2 alpha mu_B |g_F|) * (1 + gamma / sqrt(1 - gamma^2) * Omega / w)``
    """
    g = require_trap(config, manifold)
    tone = config.tone_for(manifold)
    resonance = tone.omega / (2.0 * config.alpha * larmor_per_tesla(manifold))
    return resonance * (1.0 + g / math.sqrt(1.0 - g * g) * tone.rabi / tone.omega)


def trap_frequencies_analytic(config: TrapConfig, manifold: Manifold):
    """Harmonic ``(omega_rho, omega_z)`` at the trap bottom, rad/s."""
    g = require_trap(config, manifold)
    tone = config.tone_for(manifold)
    if not tone.rabi > 0:
        raise DomainError("harmonic frequencies need a nonzero Rabi frequency")
    z0 = trap_position(config, manifold)
    m = abs(manifold.mbar)
    M = config.species.mass
    gr = config.gravity
    # written as g/(4 z0) - ... so that gravity-free configs raise cleanly
    rho_sq = (gr / (4.0 * z0)
              - m * C.HBAR * tone.rabi * math.sqrt(1.0 - g * g) / (8.0 * M * z0 * z0))
    if not rho_sq > 0:
        raise RadiallyUntrappedError(
            f"negative radial curvature for {manifold.label} (omega_rho^2={rho_sq:.4g})")
    omega_rho = math.sqrt(rho_sq)
    omega_z = (2.0 * abs(manifold.gF) * C.MU_B * config.alpha / C.HBAR
               * math.sqrt(m * C.HBAR / (M * tone.rabi)) * (1.0 - g * g) ** 0.75)
    return omega_rho, omega_z


def characterize(config: TrapConfig, manifold: Manifold) -> TrapCharacterization:
    """Analytic characterization of the trap of ``manifold``."""
    omega_rho, omega_z = trap_frequencies_analytic(config, manifold)
    return TrapCharacterization(
        z0=trap_position(config, manifold),
        omega_rho=omega_rho,
        omega_z=omega_z,
        gamma=require_trap(config, manifold),
        manifold=manifold,
        method="analytic",
        z_center=config.center_z,
    )


def _resonance_depth(config, manifold):
    return config.tone_for(manifold).omega / (2.0 * config.alpha * larmor_per_tesla(manifold))


def find_minimum_numeric(config: TrapConfig, manifold: Manifold, xtol=1e-12) -> float:
    """Depth (m) of the on-axis potential minimum by golden-section search.

    The search is bracketed by ``[0.5, 2.0]`` times the analytic depth.
    """
    require_trap(config, manifold)
    z0a = trap_position(config, manifold)

    def f(u):
        return float(_relative_potential(config, manifold, 0.0, -u))

    bracket = (0.5 * z0a, z0a, 2.0 * z0a)
    if not (f(bracket[1]) < f(bracket[0]) and f(bracket[1]) < f(bracket[2])):
        raise CharacterizationError(
            f"analytic depth {z0a:.6g} m does not bracket a minimum for {manifold.label}")
    res = optimize.minimize_scalar(f, bracket=bracket, method="golden",
                                   options={"xtol": xtol / z0a})
    u = float(res.x)
    if not bracket[0] < u < bracket[2]:
        raise CharacterizationError(f"minimizer left the bracket: u={u:.6g} m")
    return u


def _second_derivative(f, h):
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)


def _richardson_curvature(f, h):
    coarse = _second_derivative(f, h)
    fine = _second_derivative(f, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def trap_characterize_numeric(config: TrapConfig, manifold: Manifold,
                              step=None, richardson=True) -> TrapCharacterization:
    """Brute-force characterization from the potential itself.

    Locates the minimum with :func:`find_minimum_numeric` and takes the
    trap frequencies from central second differences of V, with step
    ``step`` (default ``1e-3 * z0``) refined by one Richardson extrapolation.
    """
    g = require_trap(config, manifold)
    u = find_minimum_numeric(config, manifold)
    h = 1e-3 * u if step is None else step
    curvature = _richardson_curvature if richardson else _second_derivative

    def along_z(d):
        return float(_relative_potential(config, manifold, 0.0, -u + d))

    def along_rho(d):
        return float(_relative_potential(config, manifold, abs(d), -u))

    hbar_over_m = C.HBAR / config.species.mass
    kz = curvature(along_z, h)
    krho = curvature(along_rho, h)
    if not (kz > 0 and krho > 0):
        raise CharacterizationError(
            f"non-positive curvature at z0={u:.6g} m for {manifold.label}: "
            f"d2V/dz2={kz:.4g}, d2V/drho2={krho:.4g} (hbar rad/s/m^2)")
    return TrapCharacterization(
        z0=u,
        omega_rho=math.sqrt(krho * hbar_over_m),
        omega_z=math.sqrt(kz * hbar_over_m),
        gamma=g,
        manifold=manifold,
        method="numeric",
        z_center=config.center_z,
    )


def potential_slice(config: TrapConfig, manifold: Manifold, axis, coords):
    """V/h (Hz) along an axial or radial cut.

    ``axis="z"``: ``coords`` are heights (m) on the symmetry axis in
    laboratory coordinates. ``axis="rho"``: ``coords`` are radii (m) at the
    height of the analytic trap bottom.
    """
    coords = np.asarray(coords, dtype=float)
    pts = np.zeros(coords.shape + (3,))
    if axis == "z":
        pts[..., 2] = coords
    elif axis == "rho":
        pts[..., 0] = coords
        pts[..., 2] = config.center_z - trap_position(config, manifold)
    else:
        raise DomainError(f"unknown slice axis {axis!r}")
    return dressed_potential(config, manifold, pts) / C.H_PLANCK
