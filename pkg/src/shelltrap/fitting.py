"""Nonlinear least-squares fits of spectroscopy data.

A small Levenberg-Marquardt solver with Marquardt diagonal scaling drives
three models: a Lorentzian line, the damped Rabi fringe and the
multi-photon comb. Each fit seeds itself from the data when no initial
guess is given.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .spectroscopy import SpectrumModel, multiphoton_spectrum

MAX_ITER = 200
LAMBDA0 = 1e-3
XTOL = 1e-8
FTOL = 1e-10
GTOL = 1e-6


# --- data ---------------------------------------------------------------


@dataclass(frozen=True)
class DataSeries:
    """Measured or synthetic ``(x, y[, sigma])`` samples, sorted by ``x``."""

    x: np.ndarray
    y: np.ndarray
    sigma: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape:
            raise DomainError("x and y must be 1-D arrays of equal length")
        s = None
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != x.shape:
                raise DomainError("sigma must match x in length")
            if np.any(~(s > 0)):
                raise DomainError("sigma must be positive")
        arrays = [x, y] + ([s] if s is not None else [])
        if any(np.any(np.isnan(a)) for a in arrays):
            raise DomainError("data contain NaN")
        order = np.argsort(x, kind="stable")
        x, y = x[order], y[order]
        if s is not None:
            s = s[order]
        if np.any(np.diff(x) <= 0):
            raise DomainError("x values must be distinct")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "sigma", s)

    def __len__(self):
        return len(self.x)

    @classmethod
    def read_csv(cls, source):
        """Parse ``x,y[,sigma]`` rows; ``#`` comments, comma or blank separated.

        A first line with non-numeric fields is taken as a header. Any other
        non-numeric row is an error.
        """
        if isinstance(source, str) and "\n" not in source:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        elif isinstance(source, io.IOBase):
            text = source.read()
        else:
            text = source
        rows = []
        first = True
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = [f for f in re.split(r"[,\s]+", line) if f]
            try:
                vals = [float(f) for f in fields]
            except ValueError:
                if first and rows == []:
                    first = False
                    continue
                raise DomainError(f"line {lineno}: non-numeric row {raw!r}") from None
            first = False
            if len(vals) not in (2, 3):
                raise DomainError(f"line {lineno}: expected 2 or 3 columns, got {len(vals)}")
            rows.append(vals)
        if not rows:
            raise DomainError("no data rows")
        ncol = {len(r) for r in rows}
        if len(ncol) != 1:
            raise DomainError("inconsistent column count")
        arr = np.array(rows)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2] if arr.shape[1] == 3 else None)


# --- solver -------------------------------------------------------------


@dataclass
class LMResult:
    params: np.ndarray
    covariance: np.ndarray
    cost: float
    converged: bool
    iterations: int
    gradient_norm: float
    history: list = field(default_factory=list)
    message: str = ""


def _fd_jacobian(f, p, x):
    f0 = f(x, p)
    jac = np.empty((f0.size, p.size))
    for i in range(p.size):
        h = 1e-6 * max(abs(p[i]), 1e-8)
        pp, pm = p.copy(), p.copy()
        pp[i] += h
        pm[i] -= h
        jac[:, i] = (f(x, pp) - f(x, pm)) / (2.0 * h)
    return jac


def levenberg_marquardt(model: Callable, x, y, p0, jacobian: Optional[Callable] = None,
                        sigma=None, max_iter=MAX_ITER, lam0=LAMBDA0,
                        xtol=XTOL, ftol=FTOL, gtol=GTOL, free=None) -> LMResult:
    """Minimize ``0.5 * sum(((y - model(x, p)) / sigma)**2)``.

    Damped Gauss-Newton with Marquardt scaling ``(J^T J + lam diag(J^T J))``;
    ``lam`` starts at ``lam0`` and is divided by 10 after an accepted step,
    multiplied by 10 after a rejected one. Stops on a relative step below
    ``xtol`` or a relative cost decrease below ``ftol``. ``free`` masks the
    parameters that are varied. ``history`` lists the cost after every
    accepted step.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)
    p = np.array(p0, dtype=float)
    free = np.ones(p.size, bool) if free is None else np.asarray(free, bool)
    jac_fn = jacobian or (lambda xx, pp: _fd_jacobian(model, pp, xx))

    def cost_of(pp):
        r = (y - model(x, pp)) * w
        return 0.5 * float(r @ r), r

    cost, r = cost_of(p)
    history = [cost]
    lam = lam0
    converged = False
    message = "maximum iterations reached"
    it = 0
    J = jac_fn(x, p)[:, free] * w[:, None]
    for it in range(1, max_iter + 1):
        A = J.T @ J
        g = J.T @ r
        diag = np.diag(A).copy()
        diag[diag == 0] = 1.0
        accepted = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p.copy()
            trial[free] += step
            new_cost, new_r = cost_of(trial)
            if np.isfinite(new_cost) and new_cost < cost:
                accepted = True
                break
            if np.linalg.norm(step) <= xtol * (np.linalg.norm(p[free]) + xtol):
                break
            lam *= 10.0
        if not accepted:
            converged = True
            message = "no further decrease possible"
            break
        small_step = np.linalg.norm(step) <= xtol * (np.linalg.norm(p[free]) + xtol)
        small_drop = (cost - new_cost) <= ftol * cost
        p, cost, r = trial, new_cost, new_r
        history.append(cost)
        lam = max(lam / 10.0, 1e-15)
        J = jac_fn(x, p)[:, free] * w[:, None]
        if small_step or small_drop or cost == 0.0:
            converged = True
            message = "relative step" if small_step else "relative cost change"
            break

    A = J.T @ J
    cov_free = np.linalg.pinv(A)
    cov = np.full((p.size, p.size), np.nan)
    cov[np.ix_(free, free)] = cov_free
    gnorm = _gradient_cosine(J, r)
    exact = math.sqrt(2.0 * cost / y.size) <= 1e-9 * max(float(np.max(np.abs(y * w))), 1e-300)
    if converged and gnorm > gtol and not exact:
        converged = False
        message = f"stopped with gradient cosine {gnorm:.2e} > {gtol:.0e}"
    return LMResult(p, cov, cost, converged, it, gnorm, history, message)


def _gradient_cosine(J, r):
    rn = np.linalg.norm(r)
    if rn == 0:
        return 0.0
    cn = np.linalg.norm(J, axis=0)
    cn[cn == 0] = np.inf
    return float(np.max(np.abs(J.T @ r) / (cn * rn)))


# --- results ------------------------------------------------------------


@dataclass
class FitResult:
    model_name: str
    params: dict
    param_sigmas: dict
    residual_rms: float
    converged: bool
    iterations: int
    flags: list = field(default_factory=list)
    gradient_norm: float = 0.0
    cost_history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        def clean(v):
            v = float(v)
            return v if math.isfinite(v) else None

        return {
            "model_name": self.model_name,
            "params": {k: clean(v) for k, v in self.params.items()},
            "param_sigmas": {k: clean(v) for k, v in self.param_sigmas.items()},
            "residual_rms": clean(self.residual_rms),
            "converged": self.converged,
            "iterations": self.iterations,
            "flags": list(self.flags),
        }


def _sigmas(res: LMResult, n, sigma_given):
    var = np.diag(res.covariance).copy()
    dof = n - np.count_nonzero(np.isfinite(var))
    if not sigma_given and dof > 0:
        var *= 2.0 * res.cost / dof
    return np.sqrt(np.where(var >= 0, var, np.nan))


def _rms(model, x, y, p):
    r = y - model(x, p)
    return float(np.sqrt(np.mean(r * r)))


def _check_init(init, names):
    if init is None:
        return None
    unknown = set(init) - set(names)
    if unknown:
        raise DomainError(f"unknown initial parameters: {sorted(unknown)}")
    return init


# --- Lorentzian -----------------------------------------------------------

LORENTZIAN_PARAMS = ("center", "fwhm", "amplitude", "offset")


def lorentzian_model(x, p):
    c, w, a, o = p
    hw2 = 0.25 * w * w
    return a * hw2 / ((x - c) ** 2 + hw2) + o


def lorentzian_jacobian(x, p):
    c, w, a, o = p
    h = 0.5 * w
    d = x - c
    den = d * d + h * h
    return np.column_stack([
        a * h * h * 2.0 * d / den ** 2,
        a * h * d * d / den ** 2,
        h * h / den,
        np.ones_like(x),
    ])


def seed_lorentzian(data: DataSeries):
    x, y = data.x, data.y
    i = int(np.argmax(y))
    lo, hi = float(np.min(y)), float(np.max(y))
    half = lo + 0.5 * (hi - lo)
    above = np.nonzero(y >= half)[0]
    width = x[above[-1]] - x[above[0]]
    if width <= 0:
        width = np.median(np.diff(x)) * 2.0
    return np.array([x[i], width, hi - lo, lo])


def fit_lorentzian(data: DataSeries, init=None) -> FitResult:
    """Fit ``amplitude * (w/2)^2 / ((x - center)^2 + (w/2)^2) + offset``.

    Unset initial values are seeded from the data: center at the maximum,
    width from the half-maximum span, amplitude as max - min.
    """
    init = _check_init(init, LORENTZIAN_PARAMS)
    if len(data) < 5:
        raise DomainError("Lorentzian fit needs at least 5 points")
    flags = []
    if np.ptp(data.y) == 0:
        return FitResult("lorentzian", dict.fromkeys(LORENTZIAN_PARAMS, math.nan),
                         dict.fromkeys(LORENTZIAN_PARAMS, math.nan), 0.0, False, 0,
                         ["degenerate_flat_data"])
    p0 = seed_lorentzian(data)
    if init:
        for k, v in init.items():
            p0[LORENTZIAN_PARAMS.index(k)] = v
    if p0[1] >= np.ptp(data.x):
        flags.append("span_below_one_width")
    res = levenberg_marquardt(lorentzian_model, data.x, data.y, p0,
                              lorentzian_jacobian, data.sigma)
    p = res.params.copy()
    p[1] = abs(p[1])
    sig = _sigmas(res, len(data), data.sigma is not None)
    return FitResult("lorentzian", dict(zip(LORENTZIAN_PARAMS, p)),
                     dict(zip(LORENTZIAN_PARAMS, sig)),
                     _rms(lorentzian_model, data.x, data.y, p),
                     res.converged, res.iterations, flags, res.gradient_norm, res.history)


# --- damped Rabi ---------------------------------------------------------

RABI_PARAMS = ("f0", "fs", "omega_mw", "tau")


def _rabi_internal(t, q):
    f0, fs, om, kappa = q
    return f0 + 0.5 * fs * (1.0 - np.exp(-kappa * t) * np.cos(om * t))


def _rabi_internal_jacobian(t, q):
    f0, fs, om, kappa = q
    e = np.exp(-kappa * t)
    c, s = np.cos(om * t), np.sin(om * t)
    return np.column_stack([
        np.ones_like(t),
        0.5 * (1.0 - e * c),
        0.5 * fs * e * t * s,
        0.5 * fs * t * e * c,
    ])


def rabi_model(t, p):
    """Damped fringe with ``p = (f0, fs, omega_mw, tau)``."""
    f0, fs, om, tau = p
    return _rabi_internal(t, (f0, fs, om, 1.0 / tau))


def _uniform(x, y, n=None):
    n = n or len(x)
    xu = np.linspace(x[0], x[-1], n)
    return xu, np.interp(xu, x, y)


def dominant_frequency(x, y):
    """Angular frequency of the strongest non-DC FFT component of ``y``."""
    xu, yu = _uniform(x, y)
    yu = yu - yu.mean()
    nfft = 16 * len(yu)
    spec = np.abs(np.fft.rfft(yu * np.hanning(len(yu)), nfft))
    freqs = np.fft.rfftfreq(nfft, xu[1] - xu[0])
    k = 1 + int(np.argmax(spec[1:]))
    if 1 <= k < len(spec) - 1:
        a, b, c = spec[k - 1], spec[k], spec[k + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
    else:
        shift = 0.0
    return 2.0 * math.pi * (freqs[k] + shift * (freqs[1] - freqs[0]))


def _linear_amplitudes(basis, y):
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    r = y - basis @ coef
    return coef, float(r @ r)


def seed_rabi(data: DataSeries):
    t, y = data.x, data.y
    span = t[-1] - t[0]
    om = dominant_frequency(t, y)
    best = None
    for kappa in (0.0, 0.5 / span, 1.0 / span, 2.0 / span, 4.0 / span):
        basis = np.column_stack([np.ones_like(t),
                                 0.5 * (1.0 - np.exp(-kappa * t) * np.cos(om * t))])
        (f0, fs), err = _linear_amplitudes(basis, y)
        if best is None or err < best[0]:
            best = (err, np.array([f0, fs, om, kappa]))
    return best[1]


def fit_damped_rabi(data: DataSeries, init=None) -> FitResult:
    """Fit ``f0 + fs/2 (1 - exp(-t/tau) cos(omega_mw t))`` with t in seconds.

    The decay is fitted as a rate so that undamped data stay well posed; a
    non-positive rate or ``tau`` beyond ten times the time span is flagged
    ``tau_unbounded``. ``omega_mw`` is seeded from the FFT of the data.
    """
    init = _check_init(init, RABI_PARAMS)
    t = data.x
    span = t[-1] - t[0]
    if len(data) < 5 or np.ptp(data.y) == 0:
        return FitResult("rabi", dict.fromkeys(RABI_PARAMS, math.nan),
                         dict.fromkeys(RABI_PARAMS, math.nan), 0.0, False, 0,
                         ["degenerate_data"])
    q0 = seed_rabi(data)
    if init:
        for k, v in init.items():
            if k == "tau":
                q0[3] = 1.0 / v
            else:
                q0[RABI_PARAMS.index(k)] = v
    flags = []
    if abs(q0[2]) * span < 2.0 * math.pi:
        flags.append("less_than_one_fringe")
    res = levenberg_marquardt(_rabi_internal, t, data.y, q0, _rabi_internal_jacobian,
                              data.sigma)
    f0, fs, om, kappa = res.params
    sig = _sigmas(res, len(data), data.sigma is not None)
    if kappa <= 0 or 1.0 / kappa > 10.0 * span:
        flags.append("tau_unbounded")
    tau = 1.0 / kappa if kappa > 0 else math.inf
    tau_sigma = sig[3] / kappa ** 2 if kappa > 0 else math.inf
    params = dict(zip(RABI_PARAMS, (f0, fs, abs(om), tau)))
    sigmas = dict(zip(RABI_PARAMS, (sig[0], sig[1], sig[2], tau_sigma)))
    rms = float(np.sqrt(np.mean((data.y - _rabi_internal(t, res.params)) ** 2)))
    return FitResult("rabi", params, sigmas, rms, res.converged, res.iterations,
                     flags, res.gradient_norm, res.history)


# --- multi-photon comb -----------------------------------------------------

COMB_PARAMS = ("xi", "delta_omega", "gamma", "center", "scale")


def _comb_model(j_max):
    def model(x, p):
        xi, dw, g, c, s = p
        m = SpectrumModel(xi, dw if dw != 0 else 1e-300, abs(g) or 1e-300, c, s, j_max)
        return multiphoton_spectrum(m, x)
    return model


def comb_spacing(x, y, guess=None):
    """Tooth spacing from the autocorrelation of the spectrum.

    Without ``guess`` the first autocorrelation maximum after the first
    minimum is used; with ``guess`` the maximum nearest to it. Returns None
    when the data show no periodic structure.
    """
    xu, yu = _uniform(x, y, max(len(x), 2048))
    dx = xu[1] - xu[0]
    yu = yu - yu.mean()
    n = len(yu)
    spec = np.fft.rfft(yu, 2 * n)
    ac = np.fft.irfft(spec * np.conj(spec))[:n]
    if ac[0] <= 0:
        return None
    ac = ac / ac[0]
    peaks = np.nonzero((ac[1:-1] > ac[:-2]) & (ac[1:-1] >= ac[2:]))[0] + 1
    peaks = peaks[ac[peaks] > 0.1]
    dips = np.nonzero((ac[1:-1] < ac[:-2]) & (ac[1:-1] <= ac[2:]))[0] + 1
    if len(dips) == 0:
        return None
    peaks = peaks[peaks > dips[0]]
    if len(peaks) == 0:
        return None
    if guess is None:
        k = peaks[0]
    else:
        k = peaks[np.argmin(np.abs(peaks * dx - abs(guess)))]
    a, b, c = ac[k - 1], ac[k], ac[k + 1]
    den = a - 2 * b + c
    shift = 0.5 * (a - c) / den if den != 0 else 0.0
    return (k + shift) * dx


def comb_phase(x, y, spacing, near):
    """Point congruent to the tooth positions (mod spacing) closest to ``near``.

    The lattice offset is the phase of the data's Fourier component at the
    tooth spacing, which averages over all samples and so tolerates noise.
    """
    xu, yu = _uniform(x, y, max(len(x), 2048))
    z = np.sum((yu - yu.mean()) * np.exp(2j * math.pi * xu / spacing))
    phase = math.atan2(z.imag, z.real) * spacing / (2.0 * math.pi)
    return phase + round((near - phase) / spacing) * spacing


def _mirror_center(x, y):
    """Center of mirror symmetry: the self-convolution peaks at twice it."""
    xu, yu = _uniform(x, y, max(len(x), 2048))
    w = yu - np.median(yu)
    n = len(w)
    conv = np.fft.irfft(np.fft.rfft(w, 2 * n) ** 2, 2 * n)[:2 * n - 1]
    k = int(np.argmax(conv))
    return xu[0] + 0.5 * k * (xu[1] - xu[0])


def _best_scale(model, x, y, p):
    m = model(x, np.r_[p[:4], 1.0])
    den = float(m @ m)
    s = float(m @ y) / den if den > 0 else 1.0
    r = y - s * m
    return s, float(r @ r)


def seed_multiphoton(data: DataSeries, init=None):
    """Seed the comb parameters, or refine a user guess against the data.

    Spacing: autocorrelation peak (nearest to the guess if given). Center:
    tooth lattice points around the mirror-symmetry center (or the guess).
    Modulation index: intensity spread over spacing. Center and index
    are then refined by the best of a grid of candidates. Returns None for
    data without a comb.
    """
    x, y = data.x, data.y
    init = init or {}
    spacing = comb_spacing(x, y, init.get("delta_omega"))
    if spacing is None:
        return None
    mid = _mirror_center(x, y)
    # sum_j j^2 J_j(xi)^2 = xi^2 / 2, so the intensity spread measures xi
    # the model has no offset, so the raw intensity is the weight
    var = float(np.sum(y * (x - mid) ** 2) / np.sum(y)) if np.sum(y) > 0 else 0.0
    half_extent = math.sqrt(2.0 * var) if var > 0 else 0.5 * np.ptp(x[y > 0.1 * y.max()])
    center = comb_phase(x, y, spacing, init.get("center", mid))
    xi0 = init.get("xi", half_extent / spacing)
    gamma = init.get("gamma", _tooth_halfwidth(x, y, spacing))
    j_max = default_j_max_for_fit(max(xi0, half_extent / spacing))
    model = _comb_model(j_max)
    shifts = [0] if "center" in init else [0, -1, 1, -2, 2]
    best = None

    def scan(centers, xis):
        nonlocal best
        for c in centers:
            for xi in xis:
                p = np.array([xi, spacing, gamma, c, 1.0])
                s, err = _best_scale(model, x, y, p)
                if best is None or err < best[0]:
                    best = (err, np.array([xi, spacing, gamma, c, s]))

    # coarse over lattice point and index, then fine in the index
    scan([center + k * spacing for k in shifts], np.arange(max(0.25, 0.5 * xi0), 1.5 * xi0 + 1.0, 0.5))
    xi_c, c_c = best[1][0], best[1][3]
    scan([c_c], np.arange(max(0.25, xi_c - 0.5), xi_c + 0.5, 0.125))
    p = best[1]
    if "scale" in init:
        p[4] = init["scale"]
    return p, j_max


def default_j_max_for_fit(xi):
    return max(math.ceil(1.5 * abs(xi)) + 15, 25)


def _tooth_halfwidth(x, y, spacing):
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    hwhm = 0.5 * (x[hi] - x[lo])
    return float(np.clip(hwhm, 0.01 * spacing, 0.25 * spacing))


def fit_multiphoton(data: DataSeries, init=None) -> FitResult:
    """Fit the Bessel comb ``(xi, delta_omega, gamma, center, scale)``.

    Frequencies share the unit of ``data.x``. Data without a periodic comb
    degrade to a single Lorentzian tooth (``xi = 0``) and are flagged
    ``delta_omega_unidentifiable``.
    """
    init = _check_init(init, COMB_PARAMS)
    x, y = data.x, data.y
    if len(data) < 5 or np.ptp(y) == 0:
        return FitResult("multiphoton", dict.fromkeys(COMB_PARAMS, math.nan),
                         dict.fromkeys(COMB_PARAMS, math.nan), 0.0, False, 0,
                         ["degenerate_data"])
    if init and init.get("delta_omega") and np.ptp(x) < 3 * abs(init["delta_omega"]):
        raise DomainError("data span fewer than 3 comb teeth")
    seeded = seed_multiphoton(data, init)
    flags = []
    if seeded is None or seeded[0][0] < 0.3:
        return _fit_single_tooth(data, init, flags + ["delta_omega_unidentifiable"])
    p0, j_max = seeded
    if np.ptp(x) < 3 * p0[1]:
        raise DomainError("data span fewer than 3 comb teeth")
    model = _comb_model(j_max)
    res = levenberg_marquardt(model, x, y, p0, None, data.sigma)
    xi, dw, g, c, s = res.params
    sig = _sigmas(res, len(data), data.sigma is not None)
    params = dict(zip(COMB_PARAMS, (abs(xi), abs(dw), abs(g), c, s)))
    return FitResult("multiphoton", params, dict(zip(COMB_PARAMS, sig)),
                     _rms(model, x, y, res.params), res.converged, res.iterations,
                     flags, res.gradient_norm, res.history)


def _fit_single_tooth(data, init, flags):
    x, y = data.x, data.y
    model = _comb_model(25)
    lor = seed_lorentzian(data)
    p0 = np.array([0.0, 1.0, 0.5 * lor[1], lor[0], lor[2]])
    if init:
        for k in ("gamma", "center", "scale"):
            if k in init:
                p0[COMB_PARAMS.index(k)] = init[k]
    free = np.array([False, False, True, True, True])
    res = levenberg_marquardt(model, x, y, p0, None, data.sigma, free=free)
    sig = _sigmas(res, len(data), data.sigma is not None)
    p = res.params
    params = {"xi": 0.0, "delta_omega": math.nan, "gamma": abs(p[2]),
              "center": p[3], "scale": p[4]}
    sigmas = {"xi": math.nan, "delta_omega": math.nan, "gamma": sig[2],
              "center": sig[3], "scale": sig[4]}
    return FitResult("multiphoton", params, sigmas, _rms(model, x, y, p),
                     res.converged, res.iterations, flags, res.gradient_norm, res.history)


FITTERS = {
    "lorentzian": fit_lorentzian,
    "rabi": fit_damped_rabi,
    "multiphoton": fit_multiphoton,
}
