"""Choosing the second RF tone so both clock states share one trap."""

import numpy as np

from shelltrap.core import TrapConfig
from shelltrap.matching import match_tones, scan_radial_mismatch

cfg = TrapConfig.from_lab(45.0, 2.294336e6, 250e3)
res = match_tones(cfg)
print("matched tone 2:", res.to_dict()["tone2"])
print("residual mismatch:", res.to_dict()["mismatch"])
print(f"tone splitting {cfg.tone1.freq_hz - res.tone2.freq_hz:.1f} Hz")

# the radial frequencies cannot be matched together with z0 and omega_z;
# the leftover difference shrinks with RF frequency and grows with Rabi frequency
grid = {"alpha_list": [20.0, 45.0, 70.0],
        "omega1_list": list(np.linspace(1.5e6, 5e6, 4)),
        "rabi1_list": [100e3, 250e3, 400e3]}
for row in scan_radial_mismatch(grid):
    print(f"  {row.alpha_G_cm:5.0f} G/cm  {row.omega1_Hz / 1e6:5.2f} MHz  "
          f"{row.rabi1_Hz / 1e3:5.0f} kHz  ->  {row.delta_omega_rho_mHz:8.3f} mHz  {row.status}")
