"""Parameter-sweep command line with deterministic CSV output.

Each subcommand evaluates one experiment over a grid and writes rows in
row-major grid order (family outermost, then eta, then chi).  Numbers are
printed with 17 significant digits so re-running a sweep reproduces the
file byte for byte; run metadata (which may contain timestamps) goes to a
separate .meta.json sidecar.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

import numpy as np

from .errors import CatqfiError, ConfigError
from .metrics import family_fidelity, family_purity, loss_sensitivity
from .qfi import chi_derivative, delta_qfi, pure_qfi, qfi_ratio
from .states import CatParams, match_amplitude_for_photon_number

EXPERIMENTS = ("purity", "fidelity", "qfi-ratio", "qfi-map", "chi-derivative",
               "pure-qfi", "loss-sensitivity")

CSV_HEADER = "experiment,state,alpha,delta_alpha,eta,chi,lo_mag,value,value2"

CONFIG_KEYS = ("alpha", "delta_alpha", "parity", "mean_photon", "eta_grid",
               "chi_grid", "n_grid", "lo_mag", "lo_loss", "out", "cases", "seed")

TWO_PI = 2.0 * math.pi


class SweepRow(NamedTuple):
    experiment: str
    state: str
    alpha: float | None
    delta_alpha: float | None
    eta: float | None
    chi: float | None
    lo_mag: float | None
    value: float
    value2: float | None


@dataclass(frozen=True)
class SweepSpec:
    """Fully resolved description of one sweep."""

    experiment: str
    alpha: float | None          # direct amplitude mode when set
    delta_alpha: float
    parity: str
    mean_photon: float | None    # matched-amplitude mode when set
    eta_grid: tuple
    chi_grid: tuple
    n_grid: tuple
    lo_mag: float | None
    lo_loss: bool
    out: str


def parse_grid(text, flag):
    """'a:b:n' -> n evenly spaced points from a to b inclusive."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{flag}: expected a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from None
    if n < 1:
        raise ConfigError(f"{flag}: need at least one point, got n = {n}")
    return tuple(float(x) for x in np.linspace(a, b, n))


def _check_bounds(grid, lo, hi, flag, hi_open=False):
    for x in grid:
        bad = x < lo or (x >= hi if hi_open else x > hi)
        if bad:
            span = f"[{lo}, {hi})" if hi_open else f"[{lo}, {hi}]"
            raise ConfigError(f"{flag}: value {x} outside {span}")


def load_config_file(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    for key, value in data.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        if isinstance(value, dict):
            raise ConfigError(f"{path}: key {key!r} must be a flat value")
    return data


def _merge_settings(args):
    """Config-file values overridden by explicit flags."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


# per-experiment default grids; fidelity starts off zero because the
# rescaled odd/hhg reference state degenerates at eta = 0
DEFAULT_ETA = {
    "purity": (0.0, 1.0, 501),
    "fidelity": (0.002, 1.0, 500),
    "qfi-ratio": (0.9, 1.0, 101),
    "qfi-map": (0.9, 1.0, 101),
    "chi-derivative": (0.9, 1.0, 101),
}


def _default_chi(experiment):
    if experiment in ("qfi-map", "chi-derivative"):
        # full circle, 2 pi endpoint excluded (it aliases chi = 0)
        return tuple(float(x) for x in np.linspace(0.0, TWO_PI, 128, endpoint=False))
    if experiment == "qfi-ratio":
        return (math.pi / 2.0,)
    return (0.0,)


def parse_config(experiment, args):
    """Resolve flags + config file + defaults into a SweepSpec."""
    merged = _merge_settings(args)

    delta_alpha = float(merged.get("delta_alpha", -0.5))
    parity = str(merged.get("parity", "odd"))
    if parity not in ("even", "odd"):
        raise ConfigError(f"--parity: expected even or odd, got {parity!r}")
    lo_loss = merged.get("lo_loss", True)
    if not isinstance(lo_loss, bool):
        raise ConfigError("lo_loss: expected a boolean")

    alpha = merged.get("alpha")
    mean_photon = merged.get("mean_photon")
    if alpha is not None and mean_photon is not None:
        raise ConfigError("give either alpha or mean_photon, not both")

    n_grid = ()
    if experiment in ("pure-qfi", "loss-sensitivity"):
        if alpha is not None:
            raise ConfigError(f"{experiment} sweeps the target mean photon "
                              "number; use --n-grid or --mean-photon")
        if "n_grid" in merged:
            n_grid = parse_grid(merged["n_grid"], "--n-grid")
        elif mean_photon is not None:
            n_grid = (float(mean_photon),)
        else:
            n_grid = tuple(float(x) for x in np.linspace(4.0, 100.0, 97))
        _check_bounds(n_grid, 1e-6, math.inf, "--n-grid")
        mean_photon = None
    else:
        if alpha is None and mean_photon is None:
            if experiment in ("purity", "fidelity"):
                mean_photon = 100.0
            else:
                alpha = 10.0
        if alpha is not None:
            alpha = float(alpha)
        if mean_photon is not None:
            mean_photon = float(mean_photon)
            if mean_photon <= 0:
                raise ConfigError(f"--mean-photon: must be positive, got {mean_photon}")

    if "eta_grid" in merged:
        eta_grid = parse_grid(merged["eta_grid"], "--eta-grid")
    else:
        a, b, n = DEFAULT_ETA.get(experiment, (0.0, 1.0, 101))
        eta_grid = tuple(float(x) for x in np.linspace(a, b, n))
    _check_bounds(eta_grid, 0.0, 1.0, "--eta-grid")

    if "chi_grid" in merged:
        chi_grid = parse_grid(merged["chi_grid"], "--chi-grid")
    else:
        chi_grid = _default_chi(experiment)
    _check_bounds(chi_grid, 0.0, TWO_PI, "--chi-grid", hi_open=True)

    lo_mag = merged.get("lo_mag")
    if lo_mag is None and experiment in ("qfi-ratio", "qfi-map", "chi-derivative"):
        lo_mag = 10.0
    if lo_mag is not None:
        lo_mag = float(lo_mag)
        if lo_mag <= 0:
            raise ConfigError(f"--lo-mag: must be positive, got {lo_mag}")

    out = str(merged.get("out", f"{experiment}.csv"))
    return SweepSpec(experiment=experiment, alpha=alpha, delta_alpha=delta_alpha,
                     parity=parity, mean_photon=mean_photon, eta_grid=eta_grid,
                     chi_grid=chi_grid, n_grid=n_grid, lo_mag=lo_mag,
                     lo_loss=lo_loss, out=out)


def _family_params(spec, family, target_n=None):
    """CatParams for one family, matching the amplitude when requested.

    In direct mode the hhg pair sits at (alpha, alpha - delta_alpha): the
    flag-level alpha names the displaced component, matching the even/odd
    amplitude it is compared against.
    """
    delta = spec.delta_alpha if family == "hhg" else 0.0
    target = target_n if target_n is not None else spec.mean_photon
    if target is not None:
        a = match_amplitude_for_photon_number(target, family, delta_alpha=delta)
        return CatParams(alpha=a, delta_alpha=delta)
    if family == "hhg":
        return CatParams(alpha=spec.alpha - spec.delta_alpha, delta_alpha=delta)
    return CatParams(alpha=spec.alpha)


def _labeled(label, fn):
    def call():
        try:
            return fn()
        except (CatqfiError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            if isinstance(exc, CatqfiError):
                exc.args = (f"at {label}: {exc}",)
                raise
            raise CatqfiError(f"at {label}: {exc}") from exc
    return call


def _alpha_field(params):
    return float(complex(params.alpha).real)


def _plan(spec):
    """One deferred evaluation per output row, already in output order."""
    exp = spec.experiment
    tasks = []

    if exp in ("purity", "fidelity"):
        families = (("coherent", "even", "odd", "hhg") if exp == "purity"
                    else ("even", "odd", "hhg"))
        metric = family_purity if exp == "purity" else family_fidelity
        for family in families:
            params = _family_params(spec, family)
            a = _alpha_field(params)
            d = spec.delta_alpha if family == "hhg" else None
            for eta in spec.eta_grid:
                def fn(family=family, params=params, eta=eta, a=a, d=d):
                    return SweepRow(exp, family, a, d, eta, None, None,
                                    metric(family, params, eta), None)
                tasks.append(_labeled(f"state={family} eta={eta!r}", fn))
        return tasks

    if exp in ("qfi-ratio", "chi-derivative"):
        func = qfi_ratio if exp == "qfi-ratio" else chi_derivative
        for family in (spec.parity, "hhg"):
            params = _family_params(spec, family)
            a = _alpha_field(params)
            d = spec.delta_alpha if family == "hhg" else None
            for eta in spec.eta_grid:
                for chi in spec.chi_grid:
                    def fn(family=family, params=params, eta=eta, chi=chi, a=a, d=d):
                        value = func(family, params, eta, chi, spec.lo_mag,
                                     lo_loss=spec.lo_loss)
                        return SweepRow(exp, family, a, d, eta, chi,
                                        spec.lo_mag, value, None)
                    tasks.append(_labeled(
                        f"state={family} eta={eta!r} chi={chi!r}", fn))
        return tasks

    if exp == "qfi-map":
        hhg = _family_params(spec, "hhg")
        odd = _family_params(spec, "odd")
        a = _alpha_field(odd)
        for eta in spec.eta_grid:
            for chi in spec.chi_grid:
                def fn(eta=eta, chi=chi):
                    value = delta_qfi(eta, chi, hhg, odd, spec.lo_mag,
                                      lo_loss=spec.lo_loss)
                    return SweepRow(exp, "delta", a, spec.delta_alpha, eta, chi,
                                    spec.lo_mag, value, None)
                tasks.append(_labeled(f"eta={eta!r} chi={chi!r}", fn))
        return tasks

    if exp == "pure-qfi":
        for family in (spec.parity, "hhg"):
            for target in spec.n_grid:
                for chi in spec.chi_grid:
                    def fn(family=family, target=target, chi=chi):
                        params = _family_params(spec, family, target_n=target)
                        mag = spec.lo_mag
                        if mag is None:  # LO tracks the cat amplitude
                            ref = _family_params(spec, spec.parity, target_n=target)
                            mag = _alpha_field(ref)
                        lo = mag * cmath.exp(1j * chi)
                        d = spec.delta_alpha if family == "hhg" else None
                        return SweepRow(exp, family, _alpha_field(params), d,
                                        None, chi, mag, pure_qfi(family, params, lo),
                                        None)
                    tasks.append(_labeled(
                        f"state={family} mean_photon={target!r} chi={chi!r}", fn))
        return tasks

    if exp == "loss-sensitivity":
        for family in ("coherent", "even", "odd", "hhg"):
            delta = spec.delta_alpha if family == "hhg" else 0.0
            template = CatParams(alpha=1.0, delta_alpha=delta)
            for target in spec.n_grid:
                def fn(family=family, template=template, target=target, delta=delta):
                    rep = loss_sensitivity(family, template, [target])[0]
                    d = delta if family == "hhg" else None
                    return SweepRow(exp, family, rep.alpha, d, None, None, None,
                                    rep.d_purity_d_eta, rep.d_fidelity_d_eta)
                tasks.append(_labeled(f"state={family} mean_photon={target!r}", fn))
        return tasks

    raise ConfigError(f"unknown experiment {exp!r}")


def _worker_count():
    env = os.environ.get("CATQFI_THREADS")
    if env is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"CATQFI_THREADS: expected an integer, got {env!r}") from None
    return max(1, n)


def run_sweep(spec):
    """Evaluate every grid point; output order is fixed by the plan."""
    tasks = _plan(spec)
    workers = _worker_count()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: t(), tasks))
    return [t() for t in tasks]


def format_number(x):
    if x is None:
        return ""
    return format(float(x), ".17g")


def render_csv(rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([r.experiment, r.state] +
                              [format_number(v) for v in r[2:]]))
    return "\n".join(lines) + "\n"


def write_outputs(spec, rows, elapsed, workers):
    with open(spec.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows))
    meta = {
        "experiment": spec.experiment,
        "rows": len(rows),
        "spec": {
            "alpha": spec.alpha,
            "delta_alpha": spec.delta_alpha,
            "parity": spec.parity,
            "mean_photon": spec.mean_photon,
            "eta_grid": [spec.eta_grid[0], spec.eta_grid[-1], len(spec.eta_grid)],
            "chi_grid": [spec.chi_grid[0], spec.chi_grid[-1], len(spec.chi_grid)],
            "n_grid": ([spec.n_grid[0], spec.n_grid[-1], len(spec.n_grid)]
                       if spec.n_grid else None),
            "lo_mag": spec.lo_mag,
            "lo_loss": spec.lo_loss,
        },
        "threads": workers,
        "elapsed_seconds": round(elapsed, 3),
        "written_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    sidecar = os.path.splitext(spec.out)[0] + ".meta.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _add_common_flags(sub):
    sub.add_argument("--alpha", type=float, help="component amplitude")
    sub.add_argument("--delta-alpha", dest="delta_alpha", type=float,
                     help="hhg displacement (default -0.5)")
    sub.add_argument("--parity", choices=("even", "odd"),
                     help="which parity cat to sweep alongside hhg")
    sub.add_argument("--mean-photon", dest="mean_photon", type=float,
                     help="match amplitudes to this mean photon number")
    sub.add_argument("--eta-grid", dest="eta_grid", metavar="a:b:n",
                     help="transmission grid")
    sub.add_argument("--chi-grid", dest="chi_grid", metavar="a:b:n",
                     help="LO phase grid, values in [0, 2pi)")
    sub.add_argument("--n-grid", dest="n_grid", metavar="a:b:n",
                     help="mean photon number grid (pure-qfi, loss-sensitivity)")
    sub.add_argument("--lo-mag", dest="lo_mag", type=float,
                     help="LO amplitude magnitude before loss")
    sub.add_argument("--no-lo-loss", dest="lo_loss", action="store_const",
                     const=False, help="keep the LO at full strength under loss")
    sub.add_argument("--config", help="TOML file with flat key = value settings")
    sub.add_argument("--out", help="output CSV path (default <experiment>.csv)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="catqfi",
        description="Sweep purity, fidelity and QFI of lossy optical cat states.")
    subs = parser.add_subparsers(dest="command", required=True)
    for exp in EXPERIMENTS:
        sub = subs.add_parser(exp, help=f"{exp} sweep")
        _add_common_flags(sub)
    val = subs.add_parser("validate", help="run the oracle-agreement suite")
    val.add_argument("--cases", type=int, default=50)
    val.add_argument("--seed", type=int, default=20260815)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            from .fock import run_validation
            report = run_validation(cases=args.cases, seed=args.seed)
            for line in report.summary_lines():
                print(line)
            return 0 if report.passed else 3
        spec = parse_config(args.command, args)
        start = time.perf_counter()
        rows = run_sweep(spec)
        workers = _worker_count()
        write_outputs(spec, rows, time.perf_counter() - start, workers)
        print(f"{spec.out}: {len(rows)} rows")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CatqfiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
