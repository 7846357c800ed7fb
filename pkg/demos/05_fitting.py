"""Line-width and Rabi-oscillation fits on synthetic data."""

import numpy as np

from shelltrap import constants as C
from shelltrap.fitting import DataSeries, fit_damped_rabi, fit_lorentzian
from shelltrap.spectroscopy import synth_lorentzian, synth_rabi_trace

rng = np.random.default_rng(7)

x = np.linspace(-400.0, 400.0, 60)
y = synth_lorentzian(0.0, 100.0, 1.0, 0.0, x) + rng.normal(0, 0.05, x.size)
r = fit_lorentzian(DataSeries(x, y))
print(f"line width {r.params['fwhm']:.1f} +- {r.param_sigmas['fwhm']:.1f} Hz, flags {r.flags}")

t = np.linspace(0.0, 50e-3, 100)
y = synth_rabi_trace(C.hz_to_angular(146.0), 18e-3, 0.05, 0.9, t) + rng.normal(0, 0.03, t.size)
r = fit_damped_rabi(DataSeries(t, y))
print(f"Rabi frequency {C.angular_to_hz(r.params['omega_mw']):.2f} Hz, "
      f"decay time {1e3 * r.params['tau']:.2f} ms, converged {r.converged}")
