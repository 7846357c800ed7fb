"""Microwave spectroscopy of the dressed clock transition.

Covers the resonance ladder of the dressed |1,-1> -> |2,+1> transition,
the multi-photon comb produced by a sinusoidally modulated splitting, and
the line shapes used to analyse measured spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from . import constants as C
from .core import TrapConfig
from .errors import DomainError

PHOTON_RANGE = range(-3, 4)
DRESSED_RANGE = range(-3, 2)


@dataclass(frozen=True)
class LadderEntry:
    n: int
    k: int
    omega_mw: float


@dataclass(frozen=True)
class ResonanceLadder:
    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def group(self, n):
        return [e for e in self.entries if e.n == n]


def resonance_ladder(omega_hfs, omega_rf, rabi_rf) -> ResonanceLadder:
    """All transitions ``omega_hfs + k Omega_RF - n omega_RF`` sorted by frequency.

    ``n`` counts RF photons (-3..3), ``k`` the dressed-level change (-3..1);
    the ``k = 0`` lines are the |1,-1> -> |2,+1> clock transitions.
    """
    if not rabi_rf < omega_rf:
        raise DomainError("dressed-state ladder needs Omega_RF < omega_RF")
    entries = [LadderEntry(n, k, omega_hfs + k * rabi_rf - n * omega_rf)
               for n in PHOTON_RANGE for k in DRESSED_RANGE]
    entries.sort(key=lambda e: (e.omega_mw, e.n, e.k))
    return ResonanceLadder(tuple(entries))


def ladder_for_config(config: TrapConfig) -> ResonanceLadder:
    """Ladder for a bi-chromatic config, using the mean of the two tones."""
    tones = [t for t in (config.tone1, config.tone2) if t is not None]
    omega = sum(t.omega for t in tones) / len(tones)
    rabi = sum(t.rabi for t in tones) / len(tones)
    return resonance_ladder(config.species.omega_hfs, omega, rabi)


@dataclass(frozen=True)
class PolarizationImbalance:
    """Cross couplings from polarization defects (rad/s).

    ``cross_12`` modulates the F=1 coupling and ``cross_21`` the F=2
    coupling, matching ``Delta Omega(t) = Omega_2 - Omega_1 +
    (cross_21 - cross_12) cos(Delta t)``.
    """

    cross_12: float
    cross_21: float

    def __post_init__(self):
        if self.cross_12 < 0 or self.cross_21 < 0:
            raise DomainError("cross couplings must be non-negative")

    @property
    def delta_cross(self):
        return abs(self.cross_21 - self.cross_12)

    @classmethod
    def from_coil_amplitudes(cls, bx1, by1, bx2, by2, g1, g2):
        """Decompose unequal x/y coil amplitudes (T) into cross couplings.

        A tone with amplitudes ``(Bx, By)`` carries a counter-rotating part
        of amplitude ``(Bx - By) / 2`` which couples to the other manifold.
        """
        db1 = abs(bx1 - by1) / 2.0
        db2 = abs(bx2 - by2) / 2.0
        return cls(abs(g2) * C.MU_B * db1 / (2.0 * C.HBAR),
                   abs(g1) * C.MU_B * db2 / (2.0 * C.HBAR))


def modulated_coupling(rabi1, rabi2, omega1, omega2, imbalance: PolarizationImbalance, t):
    """Time-dependent couplings under polarization imbalance.

    Returns ``(omega_sq_1, omega_sq_2, delta_omega)``: the squared effective
    Rabi frequencies of F=1 and F=2 and the modulated splitting difference,
    each evaluated at times ``t`` (s). Modulation frequency is
    ``omega1 - omega2``.
    """
    t = np.asarray(t, dtype=float)
    cos = np.cos((omega1 - omega2) * t)
    x1, x2 = imbalance.cross_12, imbalance.cross_21
    sq1 = rabi1 ** 2 + x1 ** 2 + 2.0 * rabi1 * x1 * cos
    sq2 = rabi2 ** 2 + x2 ** 2 + 2.0 * rabi2 * x2 * cos
    delta = rabi2 - rabi1 + (x2 - x1) * cos
    return sq1, sq2, delta


def default_j_max(xi):
    return max(math.ceil(abs(xi)) + 15, 25)


@dataclass(frozen=True)
class SpectrumModel:
    """Bessel-weighted Lorentzian comb.

    ``delta_omega`` is the tooth spacing, ``gamma_linewidth`` the tooth
    half width and ``center`` the position of the j = 0 tooth, all in the
    same frequency unit as the evaluation grid. ``scale`` is the peak
    height a tooth of unit Bessel weight would have.
    """

    xi: float
    delta_omega: float
    gamma_linewidth: float
    center: float = 0.0
    scale: float = 1.0
    j_max: int = field(default=None)

    def __post_init__(self):
        if not self.gamma_linewidth > 0:
            raise DomainError("linewidth must be positive")
        if self.delta_omega == 0:
            raise DomainError("tooth spacing must be nonzero")
        if self.j_max is None:
            object.__setattr__(self, "j_max", default_j_max(self.xi))

    @property
    def orders(self):
        return np.arange(-self.j_max, self.j_max + 1)

    def weights(self):
        return jv(self.orders, self.xi) ** 2

    @property
    def modulation_amplitude(self):
        """``xi * delta_omega``: amplitude of the splitting modulation."""
        return abs(self.xi * self.delta_omega)


def bessel_weight_sum(xi, j_max=None):
    j_max = default_j_max(xi) if j_max is None else j_max
    j = np.arange(-j_max, j_max + 1)
    return float(np.sum(jv(j, xi) ** 2))


def multiphoton_spectrum(model: SpectrumModel, omega_grid):
    """Comb ``scale * sum_j J_j(xi)^2 G^2 / ((d + j Dw)^2 + G^2)``, ``d = w - center``.

    The microwave coupling ``|Delta_MW|^2 / Gamma`` is absorbed into
    ``scale``, which keeps the comb independent of the frequency unit.
    """
    w = np.asarray(omega_grid, dtype=float)
    d = (w - model.center)[..., None] + model.orders * model.delta_omega
    g2 = model.gamma_linewidth ** 2
    return model.scale * np.sum(model.weights() * g2 / (d * d + g2), axis=-1)


def synth_rabi_trace(rabi_mw, tau, f0, fs, t_grid):
    """Damped Rabi fringe ``f0 + fs/2 (1 - exp(-t/tau) cos(Omega_MW t))``."""
    if not tau > 0:
        raise DomainError("decay time must be positive")
    t = np.asarray(t_grid, dtype=float)
    return f0 + 0.5 * fs * (1.0 - np.exp(-t / tau) * np.cos(rabi_mw * t))


def synth_lorentzian(center, width, amplitude, offset, x_grid):
    """Lorentzian of full width ``width`` and peak ``amplitude`` above ``offset``."""
    if not width > 0:
        raise DomainError("width must be positive")
    x = np.asarray(x_grid, dtype=float)
    hw2 = (0.5 * width) ** 2
    return amplitude * hw2 / ((x - center) ** 2 + hw2) + offset


def dressed_comb_spectrum(ladder: ResonanceLadder, model: SpectrumModel, omega_grid,
                          lines=None):
    """Superpose the comb on the selected ladder lines (default: k = 0 lines)."""
    if lines is None:
        lines = [e for e in ladder if e.k == 0]
    w = np.asarray(omega_grid, dtype=float)
    total = np.zeros_like(w)
    for e in lines:
        total += multiphoton_spectrum(
            SpectrumModel(model.xi, model.delta_omega, model.gamma_linewidth,
                          e.omega_mw + model.center, model.scale, model.j_max), w)
    return total
