"""Command-line front end.

Configuration is a YAML (or JSON) file of flat dotted keys, e.g.
``model.eta_p: 19.8``; nested mappings are flattened the same way. Every
key also has a command-line flag (``--model.eta_p 19.8``) that overrides
the file.

Exit codes: 0 success, 2 configuration or parameter error (including
parameters without a topological window), 3 numerical failure, 4 I/O error.
"""
import argparse
import ast
import logging
import math
import operator
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import yaml

from . import __version__
from .dynamics import (
    MicroParams,
    default_drive,
    integrate_one_mode,
    integrate_three_mode,
    reconstruct_steady_state,
    relative_sup_error,
    transient_time,
)
from .errors import FloqampError, NoTopologyError, ParameterError
from .green import green_function, singular_triples
from .io import emit_table, svg_heatmap, write_json, write_meta, write_text
from .jackiw import LEFT, RIGHT, fidelity, soliton_prediction, soliton_profile
from .model import FIELDS, DriveSpec, ModelParams, validate
from .response import sweep_point
from .sambe import build_sambe, default_truncation
from .topology import topo_window, winding_map

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

log = logging.getLogger("floqamp")

# key -> (default, kind); None means "derive automatically"
DEFAULTS = {
    "model.eta_omega": (10.0, "float"),
    "model.eta_kappa": (10.0, "float"),
    "model.eta_gamma": (10.0, "float"),
    "model.eta_p": (19.8, "float"),
    "model.phi": (math.pi / 2, "float"),
    "model.omega_mod": (2 * math.pi, "float"),
    "drive.amplitude": (1.0, "float"),
    "drive.n_d": (None, "int"),
    "drive.omega_bar_d": (0.0, "float"),
    "numerics.n_trunc": (None, "int"),
    "numerics.omega_bar": (0.0, "float"),
    "numerics.omega_bar_points": (8, "int"),
    "numerics.k_points": (2048, "int"),
    "numerics.quad_points": (128, "int"),
    "numerics.samples": (256, "int"),
    "numerics.singular_count": (4, "int"),
    "numerics.harmonic": ("optimal", "str"),
    "numerics.rtol": (1e-9, "float"),
    "numerics.atol": (1e-12, "float"),
    "numerics.samples_per_period": (64, "int"),
    "sweep.param": (None, "str"),
    "sweep.start": (None, "float"),
    "sweep.stop": (None, "float"),
    "sweep.count": (None, "int"),
    "dynamics.periods": (None, "float"),
    "dynamics.window_periods": (5.0, "float"),
    "dynamics.kappa_b": (None, "float"),
    "dynamics.kappa_c": (None, "float"),
    "output.dir": ("out", "str"),
    "output.format": ("csv", "str"),
}

FORMATS = ("csv", "json", "svg")


class ConfigError(Exception):
    pass


_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_number(text):
    """Float from a number or a small arithmetic expression in ``pi``, e.g. ``-pi/2``."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return float(text)
    try:
        return float(text)
    except (TypeError, ValueError):
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ConfigError(f"cannot parse number {text!r}")

    try:
        return ev(ast.parse(str(text), mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _coerce(key, value):
    kind = DEFAULTS[key][1]
    if value is None or (isinstance(value, str) and value.lower() in ("none", "auto", "")):
        return None
    if kind == "float":
        return parse_number(value)
    if kind == "int":
        number = parse_number(value)
        if number != int(number):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(number)
    return str(value)


def _flatten(tree, prefix=""):
    flat = {}
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, path + "."))
        else:
            flat[path] = value
    return flat


def load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            tree = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if tree is None:
        return {}
    if not isinstance(tree, dict):
        raise ConfigError("config must be a mapping of keys to values")
    return _flatten(tree)


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration; ``values`` holds every key of ``DEFAULTS``."""

    values: dict

    @classmethod
    def from_flat(cls, flat):
        unknown = sorted(set(flat) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        values = {key: default for key, (default, _) in DEFAULTS.items()}
        for key, value in flat.items():
            values[key] = _coerce(key, value)
        cfg = cls(values)
        cfg.check()
        return cfg

    def __getitem__(self, key):
        return self.values[key]

    def check(self):
        fmt = self["output.format"]
        if fmt not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}, got {fmt!r}")
        param = self["sweep.param"]
        if param is not None:
            if param not in FIELDS:
                raise ConfigError(f"sweep.param must name a model field {FIELDS}, got {param!r}")
            for key in ("sweep.start", "sweep.stop", "sweep.count"):
                if self[key] is None:
                    raise ConfigError(f"{key} is required when sweep.param is set")
            if self["sweep.count"] < 1:
                raise ConfigError("sweep.count must be >= 1")
        if self["numerics.harmonic"] not in ("optimal", "dirac"):
            raise ConfigError("numerics.harmonic must be 'optimal' or 'dirac'")
        for key in ("dynamics.kappa_b", "dynamics.kappa_c"):
            if self[key] is not None and self[key] <= 0:
                raise ConfigError(f"{key} must be positive")
        if (self["dynamics.kappa_b"] is None) != (self["dynamics.kappa_c"] is None):
            raise ConfigError("dynamics.kappa_b and dynamics.kappa_c must be given together")

    def model(self):
        params = ModelParams(**{name: self[f"model.{name}"] for name in FIELDS})
        try:
            return validate(params)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def drive(self, params):
        n_d = self["drive.n_d"]
        if n_d is None:
            base = default_drive(params)
            n_d = base.n_d
        return DriveSpec(self["drive.amplitude"], n_d, self["drive.omega_bar_d"])

    def n_trunc(self, params):
        n = self["numerics.n_trunc"]
        return default_truncation(params) if n is None else n

    def sweep_values(self):
        if self["sweep.param"] is None:
            return None
        return np.linspace(self["sweep.start"], self["sweep.stop"], self["sweep.count"])

    def formats(self):
        return {"csv", self["output.format"]}


class Emitter:
    """Writes the tables of one subcommand into the output directory."""

    def __init__(self, cfg, command):
        self.cfg = cfg
        self.command = command
        self.out_dir = cfg["output.dir"]
        self.paths = []
        os.makedirs(self.out_dir, exist_ok=True)

    def meta(self, extra=None):
        out = {
            "artifact": "floqamp",
            "version": __version__,
            "command": self.command,
            "config": dict(self.cfg.values),
        }
        if extra:
            out["summary"] = extra
        return out

    def table(self, stem, header, rows, extra=None):
        self.paths += emit_table(self.out_dir, stem, header, rows, self.meta(extra), self.cfg.formats())

    def json(self, name, obj):
        path = os.path.join(self.out_dir, name)
        self.paths.append(write_json(path, dict(self.meta(), **obj)))

    def svg(self, name, text):
        if "svg" in self.cfg.formats():
            path = write_text(os.path.join(self.out_dir, name), text)
            write_meta(path, self.meta())
            self.paths.append(path)


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _singular_rows(triples, omega_mod):
    return [(l, t.value, t.value / omega_mod) for l, t in enumerate(triples)]


def cmd_green_map(cfg, threads=1):
    params = cfg.model()
    n_trunc = cfg.n_trunc(params)
    wbar = cfg["numerics.omega_bar"]
    sambe = build_sambe(params, n_trunc)
    g = green_function(sambe, wbar)
    harm = sambe.harmonics
    mag = np.abs(g.entries)
    em = Emitter(cfg, "green-map")
    triples = singular_triples(sambe, wbar, min(cfg["numerics.singular_count"], sambe.dim))
    values = [t.value for t in triples]
    i, j = np.unravel_index(np.argmax(mag), mag.shape)
    window = topo_window(params, wbar)
    summary = {
        "n_trunc": n_trunc,
        "omega_bar": wbar,
        "condition": g.condition,
        "max_abs_g": float(mag[i, j]),
        "argmax_n": int(harm[i]),
        "argmax_m": int(harm[j]),
        "e0_over_omega": values[0] / params.omega_mod,
        "e1_over_e0": values[1] / values[0] if len(values) > 1 and values[0] > 0 else None,
        "window": list(window) if window else None,
    }
    rows = [(int(harm[a]), int(harm[b]), mag[a, b]) for a in range(sambe.dim) for b in range(sambe.dim)]
    em.table("green_map", ("n", "m", "abs_g"), rows, summary)
    wm = winding_map(params, wbar, n_trunc, cfg["numerics.k_points"])
    em.table(
        "green_overlay",
        ("n", "nu", "boundary"),
        [(int(n), int(v), bool(b)) for n, v, b in zip(wm.harmonics, wm.values, wm.boundary)],
    )
    em.table("singular_values", ("index", "value", "value_over_omega"), _singular_rows(triples, params.omega_mod))
    em.svg("green_map.svg", svg_heatmap(mag, harm, harm, "|G_nm| (rows n, columns m)", log_scale=True))
    return em, summary


def cmd_winding_map(cfg, threads=1):
    params = cfg.model()
    n_trunc = cfg.n_trunc(params)
    count = cfg["numerics.omega_bar_points"]
    if count < 1:
        raise ConfigError("numerics.omega_bar_points must be >= 1")
    wbars = params.omega_mod * np.arange(count) / count
    maps = _map(lambda w: winding_map(params, float(w), n_trunc, cfg["numerics.k_points"]), list(wbars), threads)
    rows = []
    for wm in maps:
        rows += [(int(n), wm.omega_bar, int(v), bool(b)) for n, v, b in zip(wm.harmonics, wm.values, wm.boundary)]
    widths = [int(np.count_nonzero(wm.values)) for wm in maps]
    summary = {"n_trunc": n_trunc, "nontrivial_counts": widths}
    em = Emitter(cfg, "winding-map")
    em.table("winding_map", ("n", "omega_bar", "nu", "boundary"), rows, summary)
    grid = np.array([wm.values for wm in maps], dtype=float).T
    em.svg("winding_map.svg", svg_heatmap(grid, wbars, maps[0].harmonics, "winding number (rows n, columns omega_bar)"))
    return em, summary


def _align(reference, vector):
    overlap = np.vdot(vector, reference)
    if overlap == 0:
        return vector
    return vector * (overlap / abs(overlap))


def cmd_solitons(cfg, threads=1):
    params = cfg.model()
    right = soliton_prediction(params, RIGHT)
    left = soliton_prediction(params, LEFT)
    n_trunc = cfg.n_trunc(params)
    wbar = cfg["numerics.omega_bar"]
    sambe = build_sambe(params, n_trunc)
    t0 = singular_triples(sambe, wbar, 1)[0]
    harm = sambe.harmonics
    u_jr = _align(t0.u, soliton_profile(params, LEFT, harm, bloch=True))
    v_jr = _align(t0.v, soliton_profile(params, RIGHT, harm, bloch=True))
    fid_u = fidelity(t0.u, soliton_profile(params, LEFT, harm), harm, left.k0)
    fid_v = fidelity(t0.v, soliton_profile(params, RIGHT, harm), harm, right.k0)
    rows = []
    for i, n in enumerate(harm):
        row = [int(n)]
        for vec in (t0.u, u_jr, t0.v, v_jr):
            row += [vec[i].real, vec[i].imag, abs(vec[i])]
        rows.append(row)
    header = ["n"]
    for name in ("u0", "u_jr", "v0", "v_jr"):
        header += [f"re_{name}", f"im_{name}", f"abs_{name}"]
    summary = {
        "n_trunc": n_trunc,
        "e0_over_omega": t0.value / params.omega_mod,
        "fidelity_u": fid_u,
        "fidelity_v": fid_v,
    }
    em = Emitter(cfg, "solitons")
    em.table("solitons", header, rows, summary)
    em.table(
        "solitons_summary",
        ("side", "center", "k0", "sigma_r", "sigma_i_sq", "fidelity"),
        [
            ("left", left.center, left.k0, left.sigma_r, left.sigma_i_sq, fid_u),
            ("right", right.center, right.k0, right.sigma_r, right.sigma_i_sq, fid_v),
        ],
    )
    return em, summary


def _sweep_points(cfg, params):
    values = cfg.sweep_values()
    if values is None:
        return [params]
    name = cfg["sweep.param"]
    return [params.replace(**{name: float(v)}) for v in values]


def cmd_snr(cfg, threads=1):
    params = cfg.model()
    points = _sweep_points(cfg, params)
    explicit = cfg["drive.n_d"] is not None

    def one(p):
        drive = cfg.drive(p) if explicit else None
        return sweep_point(
            p,
            drive,
            cfg["numerics.n_trunc"],
            cfg["numerics.quad_points"],
            cfg["numerics.samples"],
            cfg["numerics.harmonic"],
        )

    results = _map(one, points, threads)
    rows = [(r.eta_p, r.beta, r.snr_max, r.t_star, r.stable) for r in results]
    stable = [r for r in results if r.stable and math.isfinite(r.snr_max)]
    best = max(stable, key=lambda r: r.snr_max) if stable else None
    summary = {"stable_argmax_beta": best.beta if best else None, "points": len(results)}
    em = Emitter(cfg, "snr")
    em.table("snr_sweep", ("eta_p", "beta", "snr_max", "t_star", "stable_flag"), rows, summary)
    em.table(
        "snr_drive",
        ("eta_p", "amplitude", "n_d", "omega_bar_d"),
        [
            (r.eta_p, complex(r.drive.amplitude).real, r.drive.n_d, r.drive.omega_bar_d)
            if r.drive is not None
            else (r.eta_p, None, None, None)
            for r in results
        ],
    )
    return em, summary


def _traj_rows(traj):
    cols = [traj.times]
    for k in range(traj.n_modes):
        cols += [traj.amplitudes[:, k].real, traj.amplitudes[:, k].imag]
    return list(zip(*cols))


def cmd_dynamics(cfg, threads=1):
    params = cfg.model()
    drive = cfg.drive(params)
    kw = {
        "tol": cfg["numerics.rtol"],
        "atol": cfg["numerics.atol"],
        "samples_per_period": cfg["numerics.samples_per_period"],
    }
    t_tr = transient_time(params)
    periods = cfg["dynamics.periods"]
    if periods is not None:
        t_end = periods * params.period
    elif math.isfinite(t_tr):
        t_end = t_tr + cfg["dynamics.window_periods"] * params.period
    else:
        t_end = 20 * params.period
    one = integrate_one_mode(params, drive, (0.0, t_end), **kw)
    em = Emitter(cfg, "dynamics")
    report = {"t_end": t_end, "t_transient": t_tr if math.isfinite(t_tr) else None, "drive_n_d": drive.n_d}
    late = one.times >= t_tr if math.isfinite(t_tr) else np.zeros(one.times.shape, dtype=bool)
    em.table("trajectory_one_mode", ("t", "re_a", "im_a"), _traj_rows(one))
    if params.stable:
        n_trunc = max(cfg.n_trunc(params), abs(drive.n_d))
        sambe = build_sambe(params, n_trunc)
        recon = reconstruct_steady_state(sambe, params, drive)(one.times)
        em.table("green_reconstruction", ("t", "re_a", "im_a"), list(zip(one.times, recon.real, recon.imag)))
        if late.any():
            report["one_mode_vs_green"] = relative_sup_error(recon[late], one.alpha[late])
    if cfg["dynamics.kappa_b"] is not None:
        om = params.omega_mod
        micro = MicroParams.from_effective(params, cfg["dynamics.kappa_b"] * om, cfg["dynamics.kappa_c"] * om)
        three = integrate_three_mode(micro, drive, (0.0, t_end), t_eval=one.times, **kw)
        em.table(
            "trajectory_three_mode",
            ("t", "re_a", "im_a", "re_b", "im_b", "re_cstar", "im_cstar"),
            _traj_rows(three),
        )
        report["three_mode_vs_one_mode"] = relative_sup_error(one.alpha, three.alpha)
        if late.any():
            report["three_mode_vs_one_mode_late"] = relative_sup_error(one.alpha[late], three.alpha[late])
        report["adiabatic_warnings"] = micro.adiabatic_warnings()
    em.json("dynamics_report.json", {"report": report})
    return em, report


def cmd_sweep(cfg, threads=1):
    """Window edges and the two smallest singular values along ``sweep.param``."""
    params = cfg.model()
    if cfg["sweep.param"] is None:
        raise ConfigError("the sweep command needs sweep.param, sweep.start, sweep.stop and sweep.count")
    points = _sweep_points(cfg, params)
    wbar = cfg["numerics.omega_bar"]
    fixed = cfg["numerics.n_trunc"]

    def one(p):
        validate(p)
        n_trunc = default_truncation(p) if fixed is None else fixed
        sambe = build_sambe(p, n_trunc)
        e = [t.value for t in singular_triples(sambe, wbar, 2)]
        window = topo_window(p, wbar)
        lo, hi = window if window else (math.nan, math.nan)
        b = p.beta if p.eta_kappa > 0 else math.nan
        return (getattr(p, cfg["sweep.param"]), b, p.stable, lo, hi, n_trunc, e[0], e[1])

    rows = _map(one, points, threads)
    em = Emitter(cfg, "sweep")
    header = (cfg["sweep.param"], "beta", "stable_flag", "n_minus", "n_plus", "n_trunc", "e0", "e1")
    em.table("sweep", header, rows, {"points": len(rows)})
    return em, {"points": len(rows)}


COMMANDS = {
    "green-map": cmd_green_map,
    "winding-map": cmd_winding_map,
    "solitons": cmd_solitons,
    "snr": cmd_snr,
    "dynamics": cmd_dynamics,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="floqamp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"floqamp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", help="YAML or JSON file of dotted keys")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--format", choices=FORMATS, help="extra output format (overrides output.format)")
        p.add_argument("-v", "--verbose", action="store_true")
        for key in DEFAULTS:
            p.add_argument(f"--{key}", dest=key.replace(".", "__"), default=None, metavar="VALUE")
    return parser


def resolve_config(args):
    flat = load_config_file(args.config) if args.config else {}
    for key in DEFAULTS:
        value = getattr(args, key.replace(".", "__"))
        if value is not None:
            flat[key] = value
    if args.out is not None:
        flat["output.dir"] = args.out
    if args.format is not None:
        flat["output.format"] = args.format
    return RunConfig.from_flat(flat)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
        em, summary = COMMANDS[args.command](cfg, max(1, args.threads))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoTopologyError as exc:
        print(f"no topological window: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloqampError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in em.paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
