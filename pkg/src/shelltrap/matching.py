"""Bi-chromatic trap matching between |1,-1> and |2,+1>.

Given the F=1 tone, the F=2 tone is chosen so that both manifolds share
trap depth and axial frequency. Only a small radial mismatch remains.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

from . import constants as C
from .core import RFTone, TrapConfig, require_trap
from .errors import ShellTrapError
from .potential import characterize, trap_characterize_numeric, trap_position


@dataclass(frozen=True)
class MismatchMetrics:
    """Signed trap-2 minus trap-1 differences (m, rad/s, rad/s)."""

    delta_z0: float
    delta_omega_z: float
    delta_omega_rho: float


@dataclass(frozen=True)
class MatchResult:
    tone2: RFTone
    mismatch: MismatchMetrics

    def to_dict(self):
        return {
            "tone2": {"freq_Hz": self.tone2.freq_hz, "rabi_Hz": self.tone2.rabi_hz},
            "mismatch": {
                "delta_z0_um": self.mismatch.delta_z0 / C.MICRON,
                "delta_omega_z_Hz": C.angular_to_hz(self.mismatch.delta_omega_z),
                "delta_omega_rho_mHz": 1e3 * C.angular_to_hz(self.mismatch.delta_omega_rho),
            },
        }


def matched_tone2(config: TrapConfig) -> RFTone:
    """The F=2 tone that matches ``z0`` and ``omega_z`` to the F=1 trap.

    gamma_2 depends only on the gradient, so both conditions are explicit:
    evaluated in the order gamma_2, Omega_2, omega_2.
    """
    m1, m2 = config.manifolds
    g1 = require_trap(config, m1)
    g2 = require_trap(config, m2)
    ratio = abs(m2.gF / m1.gF)
    q1 = 1.0 - g1 * g1
    q2 = 1.0 - g2 * g2
    t1 = config.tone1
    rabi2 = ratio ** 2 * (q2 / q1) ** 1.5 * t1.rabi
    omega2 = ratio * (g1 * t1.rabi / math.sqrt(q1) + t1.omega) - g2 * rabi2 / math.sqrt(q2)
    return RFTone(omega2, rabi2, +1)


def mismatch(config: TrapConfig, numeric=False) -> MismatchMetrics:
    """Trap-2 minus trap-1 differences for the tones in ``config``."""
    m1, m2 = config.manifolds
    if numeric:
        c1 = trap_characterize_numeric(config, m1)
        c2 = trap_characterize_numeric(config, m2)
        d_rho = c2.omega_rho - c1.omega_rho
    else:
        c1 = characterize(config, m1)
        c2 = characterize(config, m2)
        d_rho = _radial_difference(config)
    return MismatchMetrics(c2.z0 - c1.z0, c2.omega_z - c1.omega_z, d_rho)


def match_tones(config: TrapConfig) -> MatchResult:
    """Solve the matching conditions for the F=2 tone; tone1 stays fixed."""
    tone2 = matched_tone2(config)
    return MatchResult(tone2, mismatch(config.with_tone2(tone2)))


def _radial_difference(config):
    # (w2^2 - w1^2) / (w2 + w1): the squared difference is formed from the
    # small per-trap corrections directly instead of subtracting two
    # nearly equal frequencies.
    m1, m2 = config.manifolds
    M, g = config.species.mass, config.gravity
    parts = []
    for m in (m1, m2):
        gm = require_trap(config, m)
        z0 = trap_position(config, m)
        rabi = config.tone_for(m).rabi
        parts.append((g / (4.0 * z0),
                      abs(m.mbar) * C.HBAR * rabi * math.sqrt(1.0 - gm * gm)
                      / (8.0 * M * z0 * z0)))
    c1 = characterize(config, m1)
    c2 = characterize(config, m2)
    diff_sq = math.fsum([parts[1][0], -parts[0][0], -parts[1][1], parts[0][1]])
    return diff_sq / (c1.omega_rho + c2.omega_rho)


def radial_mismatch(config: TrapConfig, numeric=False) -> float:
    """``omega_rho(F=2) - omega_rho(F=1)`` in rad/s for matched tones.

    ``config.tone2`` is used as given; call :func:`match_tones` first.
    """
    if numeric:
        m1, m2 = config.manifolds
        return (trap_characterize_numeric(config, m2).omega_rho
                - trap_characterize_numeric(config, m1).omega_rho)
    return _radial_difference(config)


SCAN_HEADER = ("alpha_G_cm", "omega1_Hz", "rabi1_Hz", "rabi2_Hz", "omega2_Hz",
               "delta_omega_rho_mHz", "status")


@dataclass(frozen=True)
class ScanRow:
    alpha_G_cm: float
    omega1_Hz: float
    rabi1_Hz: float
    rabi2_Hz: float = math.nan
    omega2_Hz: float = math.nan
    delta_omega_rho_mHz: float = math.nan
    status: str = "ok"
    delta_omega_rho_numeric_mHz: float = math.nan


def _scan_point(args):
    alpha, w1, r1, base, numeric = args
    cfg = TrapConfig.from_lab(alpha, w1, r1, bias_G=base.bias_G,
                              gravity=base.gravity, species=base.species)
    try:
        tone2 = matched_tone2(cfg)
        matched = cfg.with_tone2(tone2)
        d = radial_mismatch(matched)
        dn = radial_mismatch(matched, numeric=True) if numeric else math.nan
    except ShellTrapError as exc:
        return ScanRow(alpha, w1, r1, status=type(exc).__name__)
    return ScanRow(alpha, w1, r1, tone2.rabi_hz, tone2.freq_hz,
                   1e3 * C.angular_to_hz(d), "ok",
                   1e3 * C.angular_to_hz(dn))


def default_workers():
    env = os.environ.get("SHELLTRAP_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def scan_radial_mismatch(grid, numeric=False, workers=1, base=None):
    """Radial mismatch over a grid of operating points.

    ``grid`` maps ``alpha_list`` (G/cm), ``omega1_list`` (Hz) and
    ``rabi1_list`` (Hz) to sequences. Rows follow the nested grid order
    alpha, omega1, rabi1; points without a trap keep their row with the
    exception name in ``status``.
    """
    if base is None:
        base = TrapConfig.from_lab(1.0, 1.0, 0.0)
    lists = [list(grid[k]) for k in ("alpha_list", "omega1_list", "rabi1_list")]
    if not all(lists):
        raise ValueError("scan grid must be non-empty along every axis")
    jobs = [(a, w, r, base, numeric) for a, w, r in product(*lists)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_scan_point(j) for j in jobs]
