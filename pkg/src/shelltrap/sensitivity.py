"""Susceptibility of the dressed clock transition to field fluctuations.

The transition frequency is the difference of the two dressed potentials,
each evaluated at its own trap bottom. Derivatives are central finite
differences checked by step halving.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import constants as C
from .core import RFTone, TrapConfig
from .errors import DifferentiationError
from .matching import matched_tone2
from .potential import _relative_potential, dressed_potential, trap_position

ALPHA_STEP = 1e-4
RICHARDSON_RTOL = 1e-3


def transition_shift(config: TrapConfig) -> float:
    """Transition frequency minus ``omega_hfs`` (rad/s).

    ``(V2 - V1) / hbar - omega_hfs`` with each potential at its own trap
    bottom. The hyperfine offsets add up to exactly ``hbar omega_hfs`` and
    the gravity energy of the quadrupole zero is common to both states, so
    only the parts relative to the zero are formed.
    """
    v = [_relative_potential(config, m, 0.0, -trap_position(config, m))
         for m in config.manifolds]
    return float(v[1] - v[0])


def transition_shift_lab(config: TrapConfig) -> float:
    """Same as :func:`transition_shift`, from the full lab-frame potentials.

    Evaluates :func:`dressed_potential` at the absolute trap bottoms
    (quadrupole zero moved by the bias). Costs about six digits to the
    hyperfine offset, still sub-mHz.
    """
    m1, m2 = config.manifolds
    zc = config.center_z
    e = [dressed_potential(config, m, (0.0, 0.0, zc - trap_position(config, m)))
         for m in (m1, m2)]
    return (e[1] - e[0]) / C.HBAR - config.species.omega_hfs


def transition_energy(config: TrapConfig) -> float:
    """Dressed clock transition frequency ``(V2 - V1) / hbar`` in rad/s."""
    return config.species.omega_hfs + transition_shift(config)


def _central(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _checked_derivative(f, x, h, what, rtol=RICHARDSON_RTOL, atol=0.0):
    """Central difference with a step-halving consistency check.

    Returns the Richardson-refined value and the two raw estimates.
    """
    try:
        d1 = _central(f, x, h)
        d2 = _central(f, x, 0.5 * h)
    except Exception as exc:
        raise DifferentiationError(f"cannot differentiate {what}: {exc}") from exc
    if not (np.isfinite(d1) and np.isfinite(d2)):
        raise DifferentiationError(f"non-finite derivative of {what}")
    if abs(d1 - d2) > rtol * max(abs(d1), abs(d2)) + atol:
        raise DifferentiationError(
            f"step halving disagrees for {what}: {d1:.8g} vs {d2:.8g}")
    return (4.0 * d2 - d1) / 3.0, d1, d2


def _rematched(config, alpha):
    cfg = config.with_alpha(alpha)
    return cfg.with_tone2(matched_tone2(cfg))


def sensitivity_alpha(config: TrapConfig, frozen_tones=False, step=ALPHA_STEP,
                      details=False):
    """d(transition)/d(alpha) in Hz per G/cm.

    By default the F=2 tone is re-matched at every gradient, i.e. the
    traps stay matched while the gradient moves. With ``frozen_tones``
    the tones of ``config`` are kept (matched at the nominal gradient if
    ``config.tone2`` is unset).
    """
    if frozen_tones:
        base = config if config.tone2 is not None else _rematched(config, config.alpha)

        def f(a):
            return C.angular_to_hz(transition_shift(base.with_alpha(a)))
    else:
        def f(a):
            return C.angular_to_hz(transition_shift(_rematched(config, a)))

    a0 = config.alpha
    value, d1, d2 = _checked_derivative(f, a0, step * a0, "transition vs gradient",
                                        atol=1e-6 / C.GAUSS_PER_CM)
    value, d1, d2 = (v * C.GAUSS_PER_CM for v in (value, d1, d2))
    return (value, d1, d2) if details else value


def sensitivity_delta_rabi(config: TrapConfig, step=None, details=False):
    """d(transition)/d(Omega_2 - Omega_1) in Hz/Hz.

    Starts from matched tones and perturbs Omega_2 alone (uncorrelated
    fluctuations of the two RF fields); each trap sits at its own bottom.
    """
    tone2 = matched_tone2(config)
    base = config.with_tone2(tone2)
    h = 1e-4 * tone2.rabi if step is None else step

    def f(rabi2):
        t = RFTone(tone2.omega, rabi2, tone2.polarization_sign)
        return transition_shift(base.with_tone2(t))

    value, d1, d2 = _checked_derivative(f, tone2.rabi, h, "transition vs Rabi difference",
                                        atol=1e-9)
    return (value, d1, d2) if details else value


def sensitivity_bias(config: TrapConfig, step_G=1e-2) -> float:
    """d(transition)/d(B_z) in Hz/G; zero in this model up to round-off."""
    base = config if config.tone2 is not None else config.with_tone2(matched_tone2(config))

    def f(bz_gauss):
        return C.angular_to_hz(transition_shift_lab(base.with_bias(C.gauss_to_tesla(bz_gauss))))

    return _central(f, base.bias_G, step_G)


def bias_field_scan(config: TrapConfig, bz_list_G):
    """Transition frequency for each homogeneous bias in ``bz_list_G`` (G).

    Returns rows ``(Bz_G, transition_Hz, shift_from_hfs_Hz)``.
    """
    base = config if config.tone2 is not None else config.with_tone2(matched_tone2(config))
    rows = []
    for bz in bz_list_G:
        cfg = base.with_bias(C.gauss_to_tesla(bz))
        shift = C.angular_to_hz(transition_shift_lab(cfg))
        rows.append((float(bz), cfg.species.hfs_hz + shift, shift))
    return rows


@dataclass(frozen=True)
class SensitivityReport:
    dE_dalpha: float
    dE_dDeltaOmega: float
    dE_dBz: float
    operating_point: TrapConfig
    frozen_tones: bool = False

    def to_dict(self):
        return {
            "dE_dalpha_Hz_per_G_cm": self.dE_dalpha,
            "dE_dDeltaOmega_Hz_per_Hz": self.dE_dDeltaOmega,
            "dE_dBz_Hz_per_G": self.dE_dBz,
            "frozen_tones": self.frozen_tones,
            "operating_point": self.operating_point.to_dict(),
        }


def sensitivity_report(config: TrapConfig, frozen_tones=False, which=None) -> SensitivityReport:
    """All susceptibilities at ``config``; ``which`` limits the work to one entry."""
    point = config if config.tone2 is not None else config.with_tone2(matched_tone2(config))
    nan = float("nan")
    da = sensitivity_alpha(config, frozen_tones) if which in (None, "alpha") else nan
    dr = sensitivity_delta_rabi(config) if which in (None, "rabi") else nan
    db = sensitivity_bias(config) if which in (None, "bias") else nan
    return SensitivityReport(da, dr, db, replace(point), frozen_tones)
