"""Command-line interface: ``gnfi simulate | reconstruct | experiment | verify``.

Every subcommand takes ``--config file.json``. Scalar quantities may be
plain numbers or strings with a unit suffix: ``"1.6pi"`` or
``"0.0125lambda"`` (``lambda = 2 pi / kappa_plus``). Unknown keys are
rejected, and the fully resolved configuration is echoed on every run.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DumpFormatError, GratingError, ResonanceError
from .forward import SynthesisSpec, solve_first_order, synthesize_data
from .inverse import ReconParams, reconstruct, relative_l2_error
from .io import FieldDump, read_dump, read_surface_csv, write_dump, write_surface_csv
from .physics import GratingConfig, mode_basis
from .spectral import (
    PeriodicGrid,
    SurfaceProfile,
    profile_example1,
    profile_example2,
    sample_profile,
    tabulated_profile,
)
from .verify import full_report

log = logging.getLogger("gnfi")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESONANCE = 0, 1, 2, 3

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*(pi|π|lambda|λ)?\s*$")


def parse_quantity(value, wavelength=None):
    """Number, or string ``"<number><unit>"`` with unit ``pi`` or ``lambda``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a number or quantity string, got {value!r}")
    m = _QUANTITY.match(value)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ConfigError(f"cannot parse quantity {value!r}")
    num = float(m.group(1)) if m.group(1) is not None else 1.0
    unit = m.group(2)
    if unit in ("pi", "π"):
        return num * np.pi
    if unit in ("lambda", "λ"):
        if wavelength is None:
            raise ConfigError(f"{value!r}: wavelength units are not available here")
        return num * wavelength
    return num


@dataclass
class Sweep:
    delta: list = field(default_factory=lambda: ["0.05lambda", "0.025lambda", "0.0125lambda"])
    h: list = field(default_factory=lambda: ["0.1lambda", "0.075lambda", "0.05lambda", "0.025lambda"])
    gamma: list = field(default_factory=lambda: [0.01])
    seeds: int = 16


@dataclass
class RunConfig:
    """Everything one run needs; lengths are stored resolved (length units)."""

    kappa_plus: float = np.pi
    kappa_minus: float = 1.6 * np.pi
    period: list = field(default_factory=lambda: [1.0, 1.0])
    grid: list = field(default_factory=lambda: [64, 64])
    delta: float = 0.0125 * 2.0
    h: float = 0.1 * 2.0
    polarization: list = field(default_factory=lambda: [1.0, 0.0])
    side: str = "reflection"
    component: int = 1
    profile: str = "example1"
    order: int = 1
    gamma: float = 0.0
    seed: int = 0
    fine_factor: int = 4
    snr_override: float | None = None
    cutoff_override: float | None = None
    eps_c: float | None = None
    assumed_delta: float | None = None
    assumed_gamma: float | None = None
    verify_cap: int = 8
    jobs: int = 1
    sweep: Sweep = field(default_factory=Sweep)

    @property
    def wavelength(self):
        return 2 * np.pi / self.kappa_plus

    def grating(self, delta=None, h=None) -> GratingConfig:
        h = self.h if h is None else h
        return GratingConfig(
            self.kappa_plus, self.kappa_minus, self.delta if delta is None else delta,
            h, -h, PeriodicGrid(self.period[0], self.period[1], self.grid[0], self.grid[1]),
            tuple(self.polarization),
        )

    def to_json(self):
        return asdict(self)


_LENGTH_KEYS = ("delta", "h", "assumed_delta")
_OPTIONAL_FLOATS = ("snr_override", "cutoff_override", "eps_c", "assumed_gamma")


def load_config(raw: dict | None) -> RunConfig:
    """Validate a config mapping and materialise every default."""
    raw = dict(raw or {})
    cfg = RunConfig()
    allowed = set(RunConfig.__dataclass_fields__)
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    # wavenumbers first: lambda units depend on kappa_plus
    for key in ("kappa_plus", "kappa_minus"):
        if key in raw:
            setattr(cfg, key, parse_quantity(raw[key]))
    lam = cfg.wavelength
    for key in _LENGTH_KEYS:
        if raw.get(key) is not None:
            setattr(cfg, key, parse_quantity(raw[key], lam))
    for key in _OPTIONAL_FLOATS:
        if raw.get(key) is not None:
            setattr(cfg, key, parse_quantity(raw[key], lam))
    if "gamma" in raw:
        cfg.gamma = parse_quantity(raw["gamma"])
    for key in ("period", "polarization"):
        if key in raw:
            v = raw[key]
            if not isinstance(v, (list, tuple)) or len(v) != 2:
                raise ConfigError(f"{key} must be a list of two numbers")
            setattr(cfg, key, [parse_quantity(x, lam) for x in v])
    if "grid" in raw:
        v = raw["grid"]
        v = [v, v] if isinstance(v, int) else v
        if not isinstance(v, (list, tuple)) or len(v) != 2 or not all(isinstance(x, int) for x in v):
            raise ConfigError("grid must be an integer or a list of two integers")
        cfg.grid = list(v)
    for key in ("component", "order", "seed", "fine_factor", "verify_cap", "jobs"):
        if key in raw:
            if isinstance(raw[key], bool) or not isinstance(raw[key], int):
                raise ConfigError(f"{key} must be an integer")
            setattr(cfg, key, raw[key])
    for key in ("side", "profile"):
        if key in raw:
            if not isinstance(raw[key], str):
                raise ConfigError(f"{key} must be a string")
            setattr(cfg, key, raw[key])
    if "sweep" in raw:
        sw = raw["sweep"]
        if not isinstance(sw, dict):
            raise ConfigError("sweep must be an object")
        bad = set(sw) - set(Sweep.__dataclass_fields__)
        if bad:
            raise ConfigError(f"unknown sweep keys: {sorted(bad)}")
        s = Sweep()
        for key in ("delta", "h", "gamma"):
            if key in sw:
                if not isinstance(sw[key], list):
                    raise ConfigError(f"sweep.{key} must be a list")
                setattr(s, key, sw[key])
        if "seeds" in sw:
            if isinstance(sw["seeds"], bool) or not isinstance(sw["seeds"], int) or sw["seeds"] < 1:
                raise ConfigError("sweep.seeds must be a positive integer")
            s.seeds = sw["seeds"]
        cfg.sweep = s
    # resolve sweep quantities; an empty noise list means noise-free
    cfg.sweep = Sweep(
        delta=[parse_quantity(v, lam) for v in cfg.sweep.delta],
        h=[parse_quantity(v, lam) for v in cfg.sweep.h],
        gamma=[parse_quantity(v) for v in cfg.sweep.gamma] or [0.0],
        seeds=cfg.sweep.seeds,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.side not in ("reflection", "transmission"):
        raise ConfigError(f"side must be reflection or transmission, got {cfg.side!r}")
    if cfg.component not in (1, 2):
        raise ConfigError(f"component must be 1 or 2, got {cfg.component}")
    if cfg.order not in (0, 1):
        raise ConfigError(f"order must be 0 or 1, got {cfg.order}")
    if not 0 <= cfg.gamma < 1:
        raise ConfigError(f"gamma must lie in [0, 1), got {cfg.gamma}")
    if cfg.fine_factor < 1 or cfg.jobs < 1 or cfg.verify_cap < 0:
        raise ConfigError("fine_factor and jobs must be >= 1, verify_cap >= 0")
    if not (cfg.profile in ("example1", "example2") or cfg.profile.startswith("file:")):
        raise ConfigError(f"profile must be example1, example2 or file:<path>, got {cfg.profile!r}")
    if not cfg.sweep.delta or not cfg.sweep.h:
        raise ConfigError("sweep lists for delta and h must be nonempty")
    try:
        cfg.grating()
    except GratingError as exc:
        raise ConfigError(str(exc)) from exc


def read_config(path) -> RunConfig:
    if path is None:
        return load_config({})
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return load_config(raw)


def load_profile(cfg: RunConfig, grid: PeriodicGrid) -> SurfaceProfile:
    """Surface shape ``psi`` on ``grid``. ``file:`` accepts a field dump or an ``x, y, phi`` CSV."""
    if cfg.profile == "example1":
        return profile_example1(grid)
    if cfg.profile == "example2":
        return profile_example2(grid)
    path = Path(cfg.profile[len("file:"):])
    try:
        if path.suffix.lower() == ".csv":
            base = PeriodicGrid(cfg.period[0], cfg.period[1], cfg.grid[0], cfg.grid[1])
            prof = tabulated_profile(read_surface_csv(path, base))
        else:
            prof = tabulated_profile(read_dump(path).field)
    except OSError as exc:
        raise ConfigError(f"cannot read profile {path}: {exc}") from exc
    if prof.grid == grid:
        return prof
    try:
        return sample_profile(prof, grid)
    except GratingError as exc:
        raise ConfigError(f"profile {path} does not fit the grid: {exc}") from exc


def _echo(cfg: RunConfig):
    print("# effective config: " + json.dumps(cfg.to_json(), sort_keys=True))


# --------------------------------------------------------------------------
# subcommands

def cmd_simulate(cfg: RunConfig, out_path) -> int:
    gcfg = cfg.grating()
    mode_basis(gcfg.replace(grid=gcfg.grid.refined(cfg.fine_factor)))  # fail early on resonance
    psi = load_profile(cfg, gcfg.grid)
    spec = SynthesisSpec(order=cfg.order, gamma=cfg.gamma, seed=cfg.seed, side=cfg.side,
                         component=cfg.component, fine_factor=cfg.fine_factor)
    data = synthesize_data(gcfg, psi, spec)
    write_dump(out_path, FieldDump(data, gcfg.plane(cfg.side), cfg.component, cfg.side))
    print(f"wrote {out_path} ({gcfg.grid.n1}x{gcfg.grid.n2}, E{cfg.component}, {cfg.side})")
    return EXIT_OK


def _recon_params(cfg: RunConfig) -> ReconParams:
    return ReconParams(
        side=cfg.side, component=cfg.component,
        delta=cfg.assumed_delta if cfg.assumed_delta is not None else cfg.delta,
        gamma=cfg.assumed_gamma if cfg.assumed_gamma is not None else cfg.gamma,
        snr_override=cfg.snr_override, cutoff_override=cfg.cutoff_override, eps_c=cfg.eps_c,
    )


def _check_header(dump: FieldDump, gcfg: GratingConfig, cfg: RunConfig):
    problems = []
    if dump.grid != gcfg.grid:
        problems.append(f"grid {dump.grid} != configured {gcfg.grid}")
    if dump.side != cfg.side:
        problems.append(f"side {dump.side} != configured {cfg.side}")
    if dump.component != cfg.component:
        problems.append(f"component {dump.component} != configured {cfg.component}")
    if not np.isclose(dump.z, gcfg.plane(cfg.side), rtol=1e-12, atol=0):
        problems.append(f"plane z={dump.z} != configured {gcfg.plane(cfg.side)}")
    if problems:
        raise DumpFormatError("data header does not match config: " + "; ".join(problems))


def cmd_reconstruct(cfg: RunConfig, data_path, out_path) -> int:
    gcfg = cfg.grating()
    try:
        dump = read_dump(data_path)
    except OSError as exc:
        raise ConfigError(f"cannot read data {data_path}: {exc}") from exc
    _check_header(dump, gcfg, cfg)
    t0 = time.perf_counter()
    res = reconstruct(dump.field, gcfg, _recon_params(cfg))
    wall_ms = 1e3 * (time.perf_counter() - t0)
    error = None
    try:
        truth = load_profile(cfg, gcfg.grid).values.values.real * gcfg.delta
        if np.any(truth != 0):
            error = relative_l2_error(res.estimate, truth)
    except ConfigError as exc:
        log.warning("no truth profile available: %s", exc)
    write_surface_csv(out_path, res.surface)
    report = {
        "omega_used": None if not np.isfinite(res.omega_used) else res.omega_used,
        "retained": len(res.retained_modes),
        "excluded": {k: len(v) for k, v in res.excluded_modes.items()},
        "error": error,
        "wall_ms": wall_ms,
    }
    report_path = Path(out_path).with_suffix(".report.json")
    report_path.write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report))
    return EXIT_OK


def run_cell(cfg: RunConfig, delta, h, gamma):
    """Mean reconstruction error of one sweep cell over ``cfg.sweep.seeds`` seeds."""
    row = {"delta_lambda": delta / cfg.wavelength, "h_lambda": h / cfg.wavelength, "gamma": gamma,
           "seeds": cfg.sweep.seeds}
    try:
        c = replace(cfg, delta=delta, h=h, gamma=gamma, assumed_delta=None, assumed_gamma=None)
        gcfg = c.grating()
        psi = load_profile(c, gcfg.grid)
        sol = solve_first_order(gcfg)
        truth = psi.values.values.real * delta
        params = _recon_params(c)
        errs = []
        res = None
        for k in range(cfg.sweep.seeds):
            spec = SynthesisSpec(order=c.order, gamma=gamma, seed=cfg.seed + k, side=c.side,
                                 component=c.component, fine_factor=c.fine_factor)
            res = reconstruct(synthesize_data(gcfg, psi, spec), gcfg, params, sol=sol)
            errs.append(relative_l2_error(res.estimate, truth))
        row.update(error=float(np.mean(errs)), error_std=float(np.std(errs)),
                   omega_used=res.omega_used, retained=len(res.retained_modes), status="ok")
    except (GratingError, ValueError) as exc:
        row.update(error=float("nan"), error_std=float("nan"), omega_used=float("nan"),
                   retained=0, status=f"error: {exc}")
    return row


EXPERIMENT_COLUMNS = ["delta_lambda", "h_lambda", "gamma", "seeds", "error", "error_std",
                      "omega_used", "retained", "status"]


def cmd_experiment(cfg: RunConfig, out_path, jobs=1) -> int:
    cells = list(itertools.product(cfg.sweep.delta, cfg.sweep.h, cfg.sweep.gamma))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_cell, [cfg] * len(cells), *zip(*cells)))
    else:
        rows = [run_cell(cfg, *cell) for cell in cells]
    with open(out_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=EXPERIMENT_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        print(f"delta={r['delta_lambda']:.4g}lambda h={r['h_lambda']:.4g}lambda gamma={r['gamma']:.3g} "
              f"error={r['error']:.4g} [{r['status']}]")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    gcfg = cfg.grating()
    mode_basis(gcfg)
    psi = load_profile(cfg, gcfg.grid)
    rep = full_report(gcfg, psi, cap=cfg.verify_cap)
    print(rep.to_text())
    print("verify: " + ("all checks passed" if rep.passed else "FAILED"))
    return EXIT_OK if rep.passed else EXIT_FAIL


# --------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="gnfi", description="Near-field imaging of biperiodic gratings.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON run configuration (defaults apply when omitted)")
        sp.add_argument("--seed", type=int, help="override the configured seed")

    s = sub.add_parser("simulate", help="synthesize near-field data and write a field dump")
    common(s)
    s.add_argument("--out", required=True)
    r = sub.add_parser("reconstruct", help="reconstruct the surface from a field dump")
    common(r)
    r.add_argument("--data", required=True)
    r.add_argument("--out", required=True, help="surface CSV; the report goes next to it")
    e = sub.add_parser("experiment", help="run the parameter sweep, write a CSV")
    common(e)
    e.add_argument("--out", required=True)
    e.add_argument("--jobs", type=int, help="parallel worker processes")
    v = sub.add_parser("verify", help="run the residual oracles")
    common(v)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = read_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if getattr(args, "jobs", None) is not None:
            if args.jobs < 1:
                raise ConfigError("--jobs must be >= 1")
            cfg.jobs = args.jobs
        _echo(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out)
        if args.command == "reconstruct":
            return cmd_reconstruct(cfg, args.data, args.out)
        if args.command == "experiment":
            return cmd_experiment(cfg, args.out, cfg.jobs)
        return cmd_verify(cfg)
    except ResonanceError as exc:
        print(f"gnfi: resonance: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except (GratingError, ValueError, OSError) as exc:
        print(f"gnfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
