"""Clock transition shift and its sensitivity to gradient, Rabi imbalance and bias."""

import numpy as np

from shelltrap import constants as C
from shelltrap.core import TrapConfig
from shelltrap.sensitivity import (bias_field_scan, sensitivity_alpha, sensitivity_delta_rabi,
                                   sensitivity_report, transition_shift)

for alpha in (22.0, 45.0, 70.0, 150.0):
    cfg = TrapConfig.from_lab(alpha, 2.294336e6, 240e3)
    rep = sensitivity_report(cfg)
    shift = C.angular_to_hz(transition_shift(rep.operating_point))
    print(f"{alpha:6.0f} G/cm  shift {shift:9.1f} Hz  dE/dalpha {rep.dE_dalpha:8.3f} Hz/(G/cm)  "
          f"dE/dDeltaOmega {rep.dE_dDeltaOmega:.4f}")

cfg = TrapConfig.from_lab(70.0, 2.294336e6, 240e3)
print("frozen-tone gradient slope:", sensitivity_alpha(cfg, frozen_tones=True))
print("delta-Rabi slope at 70 G/cm:", sensitivity_delta_rabi(cfg))
rows = bias_field_scan(cfg, np.linspace(0.0, 3.5, 8))
print("bias scan spread (Hz):", np.ptp([r[1] for r in rows]))
