"""Shell trap of one dressed clock state: analytic vs numeric characterization."""

import numpy as np

from shelltrap import constants as C
from shelltrap.core import TrapConfig
from shelltrap.potential import characterize, potential_slice, trap_characterize_numeric

cfg = TrapConfig.from_lab(45.0, 2.294336e6, 250e3)
f1 = cfg.manifold(1)

a = characterize(cfg, f1)
n = trap_characterize_numeric(cfg, f1)
print(f"gravity parameter       {a.gamma:.4f}")
print(f"trap bottom below zero  {a.z0 / C.MICRON:.2f} um (numeric {n.z0 / C.MICRON:.2f})")
print(f"axial frequency         {C.angular_to_hz(a.omega_z):.2f} Hz "
      f"(numeric {C.angular_to_hz(n.omega_z):.2f})")
print(f"radial frequency        {C.angular_to_hz(a.omega_rho):.3f} Hz "
      f"(numeric {C.angular_to_hz(n.omega_rho):.3f})")

# axial cut through the trap bottom, energies relative to the minimum
z = np.linspace(cfg.center_z - a.z0 - 20 * C.MICRON, cfg.center_z - a.z0 + 20 * C.MICRON, 9)
v = potential_slice(cfg, f1, "z", z)
for zi, vi in zip(z, v - v.min()):
    print(f"  z = {zi / C.MICRON:9.2f} um   V/h = {vi:10.1f} Hz")
