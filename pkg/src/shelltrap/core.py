"""Atomic species, dressing tones and trap configurations.

The quadrupole field is ``B_q(r) = alpha * (x, y, -2 z)`` with its zero at the
origin. A homogeneous bias ``B_z`` along the symmetry axis only translates
that zero to ``z_c = B_z / (2 alpha)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import constants as C
from .errors import ConfigError, DomainError, NoTrapError, NotTrappableError


@dataclass(frozen=True)
class AtomSpecies:
    """Ground-state constants of an alkali atom.

    ``hfs_constant`` is the magnetic-dipole constant A_hfs in joules and
    ``omega_hfs`` the F = I+1/2 <-> I-1/2 splitting in rad/s.
    """

    name: str
    nuclear_spin: float
    electron_spin: float
    gJ: float
    gI: float
    hfs_constant: float
    omega_hfs: float
    mass: float

    @classmethod
    def from_hfs_frequency(cls, name, nuclear_spin, electron_spin, gJ, gI,
                           hfs_hz, mass):
        omega_hfs = C.hz_to_angular(hfs_hz)
        a_hfs = C.HBAR * omega_hfs / (nuclear_spin + 0.5)
        return cls(name, nuclear_spin, electron_spin, gJ, gI, a_hfs,
                   omega_hfs, mass)

    @property
    def hfs_hz(self):
        return C.angular_to_hz(self.omega_hfs)

    def to_dict(self):
        return {
            "name": self.name,
            "nuclear_spin": self.nuclear_spin,
            "electron_spin": self.electron_spin,
            "gJ": self.gJ,
            "gI": self.gI,
            "hfs_Hz": self.hfs_hz,
            "mass_kg": self.mass,
        }


RB87 = AtomSpecies.from_hfs_frequency(
    "Rb87",
    C.RB87_NUCLEAR_SPIN,
    C.RB87_ELECTRON_SPIN,
    C.RB87_GJ,
    C.RB87_GI,
    C.RB87_HFS_HZ,
    C.RB87_MASS_U * C.ATOMIC_MASS,
)

SPECIES = {"Rb87": RB87}


def compute_gF(species: AtomSpecies, F: int) -> float:
    """Hyperfine Lande factor of level ``F``.

    Uses the standard form with J(J+1) in the nuclear term.
    """
    I, J = species.nuclear_spin, species.electron_spin
    if F not in (I - J, I + J) or F != int(F):
        raise DomainError(f"F={F} is not a hyperfine level of {species.name}")
    ff, ii, jj = F * (F + 1), I * (I + 1), J * (J + 1)
    den = 2.0 * ff
    return (species.gJ * ((ff - ii + jj) / den)
            + species.gI * ((ff + ii - jj) / den))


@dataclass(frozen=True)
class Manifold:
    """A dressed hyperfine state |F, mbar_F>."""

    F: int
    mbar: int
    gF: float

    @classmethod
    def of(cls, species: AtomSpecies, F: int, mbar: int) -> "Manifold":
        if abs(mbar) > F:
            raise DomainError(f"mbar={mbar} outside [-{F}, {F}]")
        return cls(F, mbar, compute_gF(species, F))

    @property
    def sign(self) -> int:
        return 1 if self.gF > 0 else -1

    @property
    def label(self):
        return f"|{self.F},{self.mbar:+d}>"


def clock_manifolds(species: AtomSpecies = RB87):
    """The trapped clock pair (|1,-1>, |2,+1>) of ``species``."""
    return Manifold.of(species, 1, -1), Manifold.of(species, 2, 1)


@dataclass(frozen=True)
class RFTone:
    """Circularly polarized dressing tone; ``omega`` and ``rabi`` in rad/s."""

    omega: float
    rabi: float
    polarization_sign: int = -1

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"RF frequency must be positive, got {self.omega}")
        if not self.rabi >= 0:
            raise DomainError(f"Rabi frequency must be >= 0, got {self.rabi}")
        if self.polarization_sign not in (-1, 1):
            raise DomainError("polarization_sign must be +1 or -1")

    @classmethod
    def from_hz(cls, freq_hz, rabi_hz, polarization_sign=-1):
        return cls(C.hz_to_angular(freq_hz), C.hz_to_angular(rabi_hz),
                   polarization_sign)

    @property
    def freq_hz(self):
        return C.angular_to_hz(self.omega)

    @property
    def rabi_hz(self):
        return C.angular_to_hz(self.rabi)


_CONFIG_KEYS = {"species", "alpha_G_per_cm", "bias_G", "gravity_m_s2",
                "tone1", "tone2"}
_TONE_KEYS = {"freq_Hz", "rabi_Hz"}


@dataclass(frozen=True)
class TrapConfig:
    """Quadrupole gradient, gravity, bias and the two dressing tones.

    ``alpha`` is in T/m, ``bias_field`` in T. ``tone1`` dresses F=1 (sigma-),
    ``tone2`` dresses F=2 (sigma+) and may be left unset until matched.
    """

    alpha: float
    tone1: RFTone
    tone2: Optional[RFTone] = None
    species: AtomSpecies = RB87
    gravity: float = C.G_STANDARD
    bias_field: float = 0.0
    manifolds: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"gradient alpha must be positive, got {self.alpha}")
        object.__setattr__(self, "manifolds", clock_manifolds(self.species))

    @classmethod
    def from_lab(cls, alpha_G_per_cm, freq1_Hz, rabi1_Hz, freq2_Hz=None,
                 rabi2_Hz=None, bias_G=0.0, gravity=C.G_STANDARD,
                 species=RB87):
        tone2 = None
        if freq2_Hz is not None:
            tone2 = RFTone.from_hz(freq2_Hz, rabi2_Hz, +1)
        return cls(
            alpha=C.gauss_per_cm_to_tesla_per_m(alpha_G_per_cm),
            tone1=RFTone.from_hz(freq1_Hz, rabi1_Hz, -1),
            tone2=tone2,
            species=species,
            gravity=gravity,
            bias_field=C.gauss_to_tesla(bias_G),
        )

    @property
    def alpha_G_per_cm(self):
        return C.tesla_per_m_to_gauss_per_cm(self.alpha)

    @property
    def bias_G(self):
        return C.tesla_to_gauss(self.bias_field)

    @property
    def center_z(self):
        """Height of the (translated) quadrupole zero, in m."""
        return self.bias_field / (2.0 * self.alpha)

    def manifold(self, F: int) -> Manifold:
        if F == 1:
            return self.manifolds[0]
        if F == 2:
            return self.manifolds[1]
        raise DomainError(f"no clock manifold with F={F}")

    def tone_for(self, manifold: Manifold) -> RFTone:
        tone = self.tone1 if manifold.F == 1 else self.tone2
        if tone is None:
            raise ConfigError(f"no dressing tone configured for F={manifold.F}")
        return tone

    def with_alpha(self, alpha):
        return replace(self, alpha=alpha)

    def with_tone2(self, tone2):
        return replace(self, tone2=tone2)

    def with_bias(self, bias_field):
        return replace(self, bias_field=bias_field)

    # --- JSON ---------------------------------------------------------

    def to_dict(self):
        d = {
            "species": self.species.name if SPECIES.get(self.species.name) == self.species
            else self.species.to_dict(),
            "alpha_G_per_cm": self.alpha_G_per_cm,
            "bias_G": self.bias_G,
            "gravity_m_s2": self.gravity,
            "tone1": {"freq_Hz": self.tone1.freq_hz, "rabi_Hz": self.tone1.rabi_hz},
        }
        if self.tone2 is not None:
            d["tone2"] = {"freq_Hz": self.tone2.freq_hz, "rabi_Hz": self.tone2.rabi_hz}
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("alpha_G_per_cm", "tone1"):
            if key not in d:
                raise ConfigError(f"missing config key {key!r}")
        try:
            species = _parse_species(d.get("species", "Rb87"))
            t1 = _parse_tone(d["tone1"], "tone1")
            t2 = _parse_tone(d["tone2"], "tone2") if d.get("tone2") is not None else None
            return cls.from_lab(
                _number(d["alpha_G_per_cm"], "alpha_G_per_cm"),
                t1[0], t1[1],
                None if t2 is None else t2[0],
                None if t2 is None else t2[1],
                bias_G=_number(d.get("bias_G", 0.0), "bias_G"),
                gravity=_number(d.get("gravity_m_s2", C.G_STANDARD), "gravity_m_s2"),
                species=species,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(d)


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number")
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    return float(value)


def _parse_tone(d, name):
    if not isinstance(d, dict):
        raise ConfigError(f"{name} must be an object")
    unknown = set(d) - _TONE_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {sorted(unknown)}")
    missing = _TONE_KEYS - set(d)
    if missing:
        raise ConfigError(f"missing keys in {name}: {sorted(missing)}")
    return _number(d["freq_Hz"], f"{name}.freq_Hz"), _number(d["rabi_Hz"], f"{name}.rabi_Hz")


_SPECIES_KEYS = {"name", "nuclear_spin", "electron_spin", "gJ", "gI", "hfs_Hz", "mass_kg"}


def _parse_species(value):
    if isinstance(value, str):
        try:
            return SPECIES[value]
        except KeyError:
            raise ConfigError(f"unknown species {value!r}") from None
    if isinstance(value, dict):
        if set(value) != _SPECIES_KEYS:
            raise ConfigError(f"species object needs exactly the keys {sorted(_SPECIES_KEYS)}")
        nums = {k: _number(value[k], f"species.{k}") for k in _SPECIES_KEYS - {"name"}}
        return AtomSpecies.from_hfs_frequency(
            str(value["name"]), nums["nuclear_spin"], nums["electron_spin"],
            nums["gJ"], nums["gI"], nums["hfs_Hz"], nums["mass_kg"])
    raise ConfigError("species must be a name or an object")


# --- field quantities ---------------------------------------------------


def gamma(config: TrapConfig, manifold: Manifold) -> float:
    """Ratio of gravitational to maximal magnetic force, ``M g / (2 m_F g_F mu_B alpha)``.

    Trapping needs ``gamma < 1``.
    """
    mg = manifold.mbar * manifold.gF
    if mg <= 0:
        raise NotTrappableError(f"{manifold.label} is not a low-field seeker")
    return config.species.mass * config.gravity / (2.0 * mg * C.MU_B * config.alpha)


def require_trap(config: TrapConfig, manifold: Manifold) -> float:
    g = gamma(config, manifold)
    if not g < 1.0:
        raise NoTrapError(f"gamma={g:.6g} >= 1 for {manifold.label}: gravity wins")
    return g


def quadrupole_field(config: TrapConfig, r):
    """Static field vector (T) at ``r`` (m), bias included."""
    r = np.asarray(r, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    return np.stack([config.alpha * x, config.alpha * y,
                     -2.0 * config.alpha * z + config.bias_field], axis=-1)


def larmor(config: TrapConfig, manifold: Manifold, r):
    """Local Larmor frequency ``|g_F| mu_B |B_q(r)| / hbar`` in rad/s."""
    b = np.linalg.norm(quadrupole_field(config, r), axis=-1)
    out = abs(manifold.gF) * C.MU_B * b / C.HBAR
    return float(out) if np.ndim(out) == 0 else out


def larmor_per_tesla(manifold: Manifold) -> float:
    return abs(manifold.gF) * C.MU_B / C.HBAR
