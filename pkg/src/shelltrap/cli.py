"""Command-line front end: ``shelltrap <command> ...``.

Exit codes: 0 success, 2 bad input, 3 no trap, 4 fit did not converge,
1 any other model failure. Tabular output is CSV, structured output JSON;
numbers are written with 12 significant digits so repeated runs are
byte-identical. Every file output gets a ``<file>.manifest.json`` next
to it.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import io
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import constants as C
from .core import TrapConfig
from .errors import (ConfigError, DomainError, NoTrapError, NotTrappableError,
                     ShellTrapError)
from .fitting import FITTERS, DataSeries
from .matching import (SCAN_HEADER, default_workers, match_tones, matched_tone2,
                       scan_radial_mismatch)
from .potential import characterize, potential_slice, trap_characterize_numeric
from .sensitivity import (bias_field_scan, sensitivity_alpha,
                          sensitivity_delta_rabi, sensitivity_report)
from .spectroscopy import SpectrumModel, ladder_for_config, multiphoton_spectrum

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NOTRAP, EXIT_NOFIT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def csv_text(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _round_json(obj):
    if isinstance(obj, dict):
        return {k: _round_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_json(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return bool(obj) if isinstance(obj, np.bool_) else obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    v = float(obj)
    if not math.isfinite(v):
        return None
    return float(format(v, ".12g"))


def json_text(obj):
    return json.dumps(_round_json(obj), indent=2, sort_keys=True) + "\n"


# --- inputs ---------------------------------------------------------------


def _read(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc


def load_config(path):
    raw = _read(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{path} is not UTF-8") from exc
    return TrapConfig.from_json(text), raw


def load_json(path):
    raw = _read(path)
    try:
        return json.loads(raw.decode("utf-8")), raw
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc


def parse_range(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected a range 'a,b', got {text!r}") from None
    return a, b


def _axis(spec, name):
    if isinstance(spec, list) and spec and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in spec):
        return [float(v) for v in spec]
    if isinstance(spec, dict) and set(spec) == {"start", "stop", "num"}:
        return [float(v) for v in np.linspace(spec["start"], spec["stop"], int(spec["num"]))]
    raise ConfigError(f"{name} must be a non-empty list of numbers or {{start, stop, num}}")


_GRID_KEYS = {"alpha_list", "omega1_list", "rabi1_list"}


def parse_grid(d):
    if not isinstance(d, dict):
        raise ConfigError("grid must be a JSON object")
    extra = set(d) - _GRID_KEYS - {"base"}
    missing = _GRID_KEYS - set(d)
    if extra or missing:
        raise ConfigError(f"grid keys: unknown {sorted(extra)}, missing {sorted(missing)}")
    grid = {k: _axis(d[k], k) for k in _GRID_KEYS}
    base = None
    if "base" in d:
        b = d["base"]
        if not isinstance(b, dict) or set(b) - {"species", "bias_G", "gravity_m_s2"}:
            raise ConfigError("grid base may only set species, bias_G, gravity_m_s2")
        base = TrapConfig.from_dict({"alpha_G_per_cm": 1.0,
                                     "tone1": {"freq_Hz": 1.0, "rabi_Hz": 0.0}, **b})
    return grid, base


# --- outputs --------------------------------------------------------------


class Output:
    """Collects results and writes them only once everything succeeded."""

    def __init__(self, argv, inputs=()):
        self.argv = list(argv)
        self.inputs = [bytes(b) for b in inputs]
        self.files = []

    def add(self, path, text):
        self.files.append((path, text))

    def commit(self, stdout):
        written = []
        for path, text in self.files:
            if path in (None, "-"):
                stdout.write(text)
                continue
            d = os.path.dirname(os.path.abspath(path))
            os.makedirs(d, exist_ok=True)
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
            written.append(path)
        for path in written:
            with open(path + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(self.manifest(written), indent=2, sort_keys=True) + "\n")

    def manifest(self, written):
        h = hashlib.sha256()
        for b in self.inputs:
            h.update(hashlib.sha256(b).digest())
        return {
            "command": ["shelltrap"] + self.argv,
            "config_sha256": h.hexdigest(),
            "constants_version": C.CONSTANTS_VERSION,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
            "outputs": list(written),
        }


# --- commands -------------------------------------------------------------


def cmd_potential(args, out):
    cfg, raw = load_config(args.config)
    out.inputs.append(raw)
    manifold = cfg.manifold(1 if args.manifold == "F1" else 2)
    if cfg.tone2 is None and manifold.F == 2:
        cfg = cfg.with_tone2(matched_tone2(cfg))
    if args.slice:
        if args.range is None:
            raise UsageError("--slice needs --range a,b (micrometres)")
        a, b = parse_range(args.range)
        coords = np.linspace(a, b, args.points)
        v = potential_slice(cfg, manifold, args.slice, coords * C.MICRON)
        col = "z_um" if args.slice == "z" else "rho_um"
        out.add(args.out, csv_text((col, "V_over_h_Hz"), zip(coords, v)))
        return EXIT_OK
    char = (trap_characterize_numeric if args.numeric else characterize)(cfg, manifold)
    out.add(args.out, json_text(char.to_dict()))
    return EXIT_OK


def cmd_match(args, out):
    cfg, raw = load_config(args.config)
    out.inputs.append(raw)
    out.add(args.out, json_text(match_tones(cfg).to_dict()))
    return EXIT_OK


def _scan_csv(rows, numeric):
    header = SCAN_HEADER + (("delta_omega_rho_numeric_mHz",) if numeric else ())
    body = []
    for r in rows:
        vals = [r.alpha_G_cm, r.omega1_Hz, r.rabi1_Hz, r.rabi2_Hz, r.omega2_Hz,
                r.delta_omega_rho_mHz, r.status]
        if numeric:
            vals.append(r.delta_omega_rho_numeric_mHz)
        body.append(vals)
    return csv_text(header, body)


def cmd_scan(args, out):
    d, raw = load_json(args.grid)
    out.inputs.append(raw)
    grid, base = parse_grid(d)
    rows = scan_radial_mismatch(grid, numeric=args.numeric, workers=default_workers(),
                                base=base)
    out.add(args.out, _scan_csv(rows, args.numeric))
    return EXIT_OK


def cmd_ladder(args, out):
    cfg, raw = load_config(args.config)
    out.inputs.append(raw)
    ladder = ladder_for_config(cfg)
    rows = [(e.n, e.k, C.angular_to_hz(e.omega_mw)) for e in ladder]
    out.add(args.out, csv_text(("n", "k", "omega_MW_Hz"), rows))
    return EXIT_OK


def _spectrum_rows(xi, dw, gamma, center, lo, hi, points, scale=1.0, j_max=None):
    model = SpectrumModel(xi, dw, gamma, center, scale, j_max)
    grid = np.linspace(lo, hi, points)
    return zip(grid, multiphoton_spectrum(model, grid))


def cmd_spectrum(args, out):
    lo, hi = parse_range(args.range_hz)
    rows = _spectrum_rows(args.xi, args.delta_omega_hz, args.gamma_hz, args.center_hz,
                          lo, hi, args.points, args.scale, args.j_max)
    out.add(args.out, csv_text(("detuning_Hz", "P"), rows))
    return EXIT_OK


def cmd_sensitivity(args, out):
    cfg, raw = load_config(args.config)
    out.inputs.append(raw)
    if args.which == "bias":
        lo, hi = parse_range(args.bz_range)
        rows = bias_field_scan(cfg, np.linspace(lo, hi, args.points))
        out.add(args.out, csv_text(("Bz_G", "transition_Hz", "shift_from_hfs_Hz"), rows))
        return EXIT_OK
    which = None if args.which == "all" else args.which
    rep = sensitivity_report(cfg, frozen_tones=args.frozen_tones, which=which)
    out.add(args.out, json_text(rep.to_dict()))
    return EXIT_OK


def cmd_fit(args, out):
    raw = _read(args.data)
    out.inputs.append(raw)
    try:
        data = DataSeries.read_csv(raw.decode("utf-8"))
    except (UnicodeDecodeError, DomainError) as exc:
        raise ConfigError(f"{args.data}: {exc}") from exc
    init = None
    if args.init:
        init, iraw = load_json(args.init)
        out.inputs.append(iraw)
        if not isinstance(init, dict):
            raise ConfigError("init must be a JSON object")
    res = FITTERS[args.model](data, init)
    out.add(args.out, json_text(res.to_dict()))
    return EXIT_OK if res.converged else EXIT_NOFIT


# --- reproduce --------------------------------------------------------------

FIGURES = ("fig1", "fig3", "fig8")


def load_preset(name):
    text = resources.files("shelltrap").joinpath("presets", f"{name}.json").read_text("utf-8")
    return json.loads(text), text.encode("utf-8")


def reproduce_fig1(preset):
    grid, base = parse_grid(preset)
    rows = scan_radial_mismatch(grid, workers=default_workers(), base=base)
    return _scan_csv(rows, False)


def reproduce_fig3(preset):
    tone1 = preset["tone1"]
    rows = []
    for rabi1 in _axis(preset["rabi1_list"], "rabi1_list"):
        for alpha in _axis(preset["alpha_list"], "alpha_list"):
            cfg = TrapConfig.from_lab(alpha, tone1["freq_Hz"], rabi1)
            try:
                t2 = matched_tone2(cfg)
                da = sensitivity_alpha(cfg)
                dr = sensitivity_delta_rabi(cfg)
                rows.append((alpha, rabi1, t2.rabi_hz, da, dr, "ok"))
            except ShellTrapError as exc:
                rows.append((alpha, rabi1, math.nan, math.nan, math.nan, type(exc).__name__))
    return csv_text(("alpha_G_cm", "rabi1_Hz", "rabi2_Hz", "dE_dalpha_Hz_per_G_cm",
                     "dE_dDeltaOmega_Hz_per_Hz", "status"), rows)


def reproduce_fig8(preset):
    xi = preset["modulation_amplitude_Hz"] / preset["delta_omega_Hz"]
    lo, hi = preset["range_Hz"]
    rows = _spectrum_rows(xi, preset["delta_omega_Hz"], preset["gamma_Hz"],
                          preset.get("center_Hz", 0.0), lo, hi, preset["points"],
                          preset.get("scale", 1.0))
    return csv_text(("detuning_Hz", "P"), rows)


def cmd_reproduce(args, out):
    preset, raw = load_preset(args.figure)
    out.inputs.append(raw)
    text = {"fig1": reproduce_fig1, "fig3": reproduce_fig3, "fig8": reproduce_fig8}[args.figure](preset)
    out.add(os.path.join(args.out_dir, f"{args.figure}.csv"), text)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="shelltrap",
                                description="Bi-chromatic RF-dressed shell traps for 87Rb.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        return sp

    def out_opt(sp, default="-"):
        sp.add_argument("--out", default=default,
                        help="output file ('-' for standard output, the default)")

    sp = add("potential", "characterize one manifold's trap, or cut the potential")
    sp.add_argument("--config", required=True, help="trap configuration JSON")
    sp.add_argument("--manifold", choices=("F1", "F2"), default="F1",
                    help="F1 = |1,-1>, F2 = |2,+1> (default F1)")
    sp.add_argument("--numeric", action="store_true",
                    help="characterize numerically instead of analytically")
    sp.add_argument("--slice", choices=("z", "rho"),
                    help="emit a potential cut (CSV) instead of the characterization")
    sp.add_argument("--range", help="cut range 'a,b' in micrometres")
    sp.add_argument("--points", type=int, default=201, help="points in the cut (default 201)")
    out_opt(sp)
    sp.set_defaults(func=cmd_potential)

    sp = add("match", "compute the F=2 tone that matches the F=1 trap")
    sp.add_argument("--config", required=True, help="trap configuration JSON (tone1 used)")
    out_opt(sp)
    sp.set_defaults(func=cmd_match)

    sp = add("scan", "radial mismatch over a grid of matched operating points")
    sp.add_argument("--grid", required=True,
                    help="JSON with alpha_list (G/cm), omega1_list (Hz), rabi1_list (Hz)")
    sp.add_argument("--numeric", action="store_true",
                    help="add the numeric-Hessian mismatch column (slow)")
    out_opt(sp)
    sp.set_defaults(func=cmd_scan)

    sp = add("ladder", "microwave resonance ladder of the dressed clock transition")
    sp.add_argument("--config", required=True, help="trap configuration JSON")
    out_opt(sp)
    sp.set_defaults(func=cmd_ladder)

    sp = add("spectrum", "multi-photon comb spectrum")
    sp.add_argument("--xi", type=float, required=True, help="modulation index")
    sp.add_argument("--delta-omega-hz", type=float, required=True, help="tooth spacing (Hz)")
    sp.add_argument("--gamma-hz", type=float, required=True, help="tooth half width (Hz)")
    sp.add_argument("--center-hz", type=float, default=0.0, help="comb center (Hz, default 0)")
    sp.add_argument("--range-hz", required=True, help="detuning range 'a,b' (Hz)")
    sp.add_argument("--points", type=int, default=2001, help="grid points (default 2001)")
    sp.add_argument("--scale", type=float, default=1.0, help="amplitude scale (default 1)")
    sp.add_argument("--j-max", type=int, default=None, help="Bessel truncation order")
    out_opt(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = add("sensitivity", "transition susceptibilities to gradient, Rabi difference, bias")
    sp.add_argument("--config", required=True, help="trap configuration JSON")
    sp.add_argument("--which", choices=("alpha", "rabi", "bias", "all"), default="all",
                    help="quantity to compute; bias emits a CSV scan")
    sp.add_argument("--frozen-tones", action="store_true",
                    help="keep the configured tones while the gradient varies")
    sp.add_argument("--bz-range", default="0,3.5", help="bias scan range 'a,b' in G")
    sp.add_argument("--points", type=int, default=8, help="bias scan points (default 8)")
    out_opt(sp)
    sp.set_defaults(func=cmd_sensitivity)

    sp = add("fit", "fit spectroscopy data")
    sp.add_argument("--model", choices=tuple(FITTERS), required=True, help="model to fit")
    sp.add_argument("--data", required=True, help="CSV with columns x,y[,sigma]")
    sp.add_argument("--init", help="JSON object of initial parameter values")
    out_opt(sp)
    sp.set_defaults(func=cmd_fit)

    sp = add("reproduce", "regenerate the data behind a figure from its preset")
    sp.add_argument("figure", choices=FIGURES, help="figure preset")
    sp.add_argument("--out-dir", default=".", help="directory for <figure>.csv (default .)")
    sp.set_defaults(func=cmd_reproduce)
    return p


_RANGE_FLAGS = ("--range", "--range-hz", "--bz-range")


def _join_ranges(argv):
    # "--range -5,5" would read -5,5 as an option; glue it to its flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _RANGE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_join_ranges(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Output(argv)
    try:
        code = args.func(args, out)
    except (ConfigError, DomainError, UsageError) as exc:
        stderr.write(f"shelltrap: error: {exc}\n")
        return EXIT_INPUT
    except (NoTrapError, NotTrappableError) as exc:
        stderr.write(f"shelltrap: no trap: {exc}\n")
        return EXIT_NOTRAP
    except ShellTrapError as exc:
        stderr.write(f"shelltrap: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    out.commit(stdout)
    if code == EXIT_NOFIT:
        stderr.write("shelltrap: fit did not converge\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
