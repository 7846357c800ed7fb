"""Frequency-modulated microwave line: Bessel comb and its fit."""

import numpy as np
from scipy.signal import find_peaks

from shelltrap.fitting import DataSeries, fit_multiphoton
from shelltrap.spectroscopy import SpectrumModel, bessel_weight_sum, multiphoton_spectrum

model = SpectrumModel(118e3 / 9098.0, 9098.0, 300.0)
x = np.linspace(-200e3, 200e3, 4001)
p = multiphoton_spectrum(model, x)
peaks, _ = find_peaks(p, height=0.01 * p.max())
print(f"modulation index {model.xi:.3f}, {len(peaks)} resolved teeth, "
      f"sum J^2 = {bessel_weight_sum(model.xi):.15f}")

rng = np.random.default_rng(1)
fit = fit_multiphoton(DataSeries(x, p + rng.normal(0, 0.005, x.size)))
for k, v in fit.params.items():
    print(f"  {k:12s} {v:14.4f} +- {fit.param_sigmas[k]:.4f}")
print("modulation amplitude (Hz):", fit.params["xi"] * fit.params["delta_omega"])
