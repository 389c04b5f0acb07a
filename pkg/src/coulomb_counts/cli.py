"""Command-line front end: scan data as CSV or JSON, plus the verification suite.

Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error,
3 numeric failure.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

from . import scans
from .ensembles import BUILTIN_TAGS, make_potential
from .errors import DomainError

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

PARAM_KEYS = ("b", "c", "m", "c_tilde")

DEFAULT_GRIDS = {
    "variance-curve": "0.05:0.95:19",
    "edge-profile": "-2:3:11",
    "origin-profile": "0.1:3:30",
}
WEAK_EDGE_GRID = "0.5:50:20"

REGIMES = {
    "variance-curve": ("bulk", "weak_bulk"),
    "edge-profile": ("edge", "weak_edge"),
    "origin-profile": ("origin",),
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    points: int
    log: bool = False

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
            raise ConfigError(f"grid must be min:max:points[:log], got {text!r}")
        try:
            lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"grid must be min:max:points[:log], got {text!r}") from None
        grid = cls(lo, hi, points, len(parts) == 4 and parts[3] == "log")
        if not lo < hi or points < 2 or (grid.log and lo <= 0):
            raise ConfigError(f"invalid grid {text!r}: need min < max, points >= 2, min > 0 for log")
        return grid

    def __str__(self):
        return f"{self.lo!r}:{self.hi!r}:{self.points}" + (":log" if self.log else "")

    def values(self):
        return scans.make_grid(self.lo, self.hi, self.points, self.log)


@dataclass(frozen=True)
class RunConfig:
    command: str
    ensemble: str
    beta: int
    N: int
    regime: str
    grid: GridSpec
    trials: int
    seed: int
    format: str
    out: str
    params: dict = field(default_factory=dict)

    def echo(self):
        d = asdict(self)
        d["grid"] = str(self.grid)
        return d


def read_config_file(path):
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in text.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _parse_param(text):
    if "=" not in text:
        raise ConfigError(f"--param expects key=value, got {text!r}")
    key, value = (s.strip() for s in text.split("=", 1))
    if key not in PARAM_KEYS:
        raise ConfigError(f"unknown ensemble parameter {key!r}; expected one of {PARAM_KEYS}")
    try:
        return key, float(value)
    except ValueError:
        raise ConfigError(f"parameter {key} must be numeric, got {value!r}") from None


def build_config(command, args):
    file_values = read_config_file(args.config) if args.config else {}
    params = {}
    for key in PARAM_KEYS:
        if key in file_values:
            params.update([_parse_param(f"{key}={file_values.pop(key)}")])
    for text in args.param or ():
        params.update([_parse_param(text)])

    def pick(name, default, convert=str):
        value = getattr(args, name)
        if value is None:
            value = file_values.pop(name, None)
        else:
            file_values.pop(name, None)
        if value is None:
            return default
        try:
            return convert(value)
        except ValueError:
            raise ConfigError(f"invalid value for {name}: {value!r}") from None

    ensemble = pick("ensemble", "ginibre")
    if ensemble not in BUILTIN_TAGS:
        raise ConfigError(f"unknown ensemble {ensemble!r}; expected one of {BUILTIN_TAGS}")
    beta = pick("beta", 2, int)
    if beta not in (2, 4):
        raise ConfigError("beta must be 2 or 4")
    n = pick("n", 100, int)
    if n < 1:
        raise ConfigError("N must be at least 1")
    weak = ensemble == "trunc_weak"
    default_regime = {"variance-curve": "weak_bulk" if weak else "bulk",
                      "edge-profile": "weak_edge" if weak else "edge",
                      "origin-profile": "origin"}[command]
    regime = pick("regime", default_regime)
    if regime not in REGIMES[command]:
        raise ConfigError(f"{command} supports regimes {REGIMES[command]}, got {regime!r}")
    if weak != regime.startswith("weak"):
        raise ConfigError(f"regime {regime!r} does not apply to ensemble {ensemble!r}")
    if command == "origin-profile" and weak:
        raise ConfigError("origin-profile needs ginibre, mittag_leffler, product or trunc_strong")
    grid_default = WEAK_EDGE_GRID if regime == "weak_edge" else DEFAULT_GRIDS[command]
    grid = GridSpec.parse(pick("grid", grid_default))
    trials = pick("trials", 0, int)
    if trials < 0 or 0 < trials < 100:
        raise ConfigError("trials must be 0 (no Monte Carlo) or at least 100")
    seed = pick("seed", 0, int)
    if not 0 <= seed < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    fmt = pick("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    out = pick("out", "-")
    if file_values:
        raise ConfigError(f"unknown config keys: {sorted(file_values)}")
    return RunConfig(command, ensemble, beta, n, regime, grid, trials, seed, fmt, out, params)


def run_scan(cfg):
    try:
        potential = make_potential(cfg.ensemble, cfg.beta, cfg.N, **cfg.params)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    grid = cfg.grid.values()
    if cfg.command == "variance-curve":
        return scans.variance_curve(potential, cfg.N, grid, cfg.trials, cfg.seed)
    if cfg.command == "edge-profile":
        return scans.edge_curve(potential, cfg.N, grid, cfg.trials, cfg.seed)
    return scans.origin_curve(potential, cfg.N, grid, cfg.trials, cfg.seed)


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_csv(cfg, curve):
    lines = [f"# coulomb-counts {cfg.command}"]
    for key, value in cfg.echo().items():
        if key == "params":
            value = ",".join(f"{k}={v!r}" for k, v in sorted(value.items()))
        lines.append(f"# {key}={value}")
    columns = curve.meta["columns"]
    lines.append(",".join(columns))
    for rec in curve.records:
        lines.append(",".join(_fmt(float(rec.extra[c])) for c in columns))
    return "\n".join(lines) + "\n"


def render_json(cfg, curve):
    columns = list(curve.meta["columns"])
    doc = {
        "command": cfg.command,
        "config": cfg.echo(),
        "regime": curve.regime,
        "columns": columns,
        "rows": [[float(rec.extra[c]) for c in columns] for rec in curve.records],
    }
    return json.dumps(doc, indent=1) + "\n"


def _write(text, out):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _use_color(stream):
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def cmd_verify(level, stream=None):
    from .verify import run_checks

    stream = stream or sys.stdout
    color = _use_color(stream)
    results = run_checks(level)
    for r in results:
        line = r.line()
        if color:
            code = "32" if r.passed else "31"
            line = line.replace("[PASS]", f"\033[{code}m[PASS]\033[0m").replace(
                "[FAIL]", f"\033[{code}m[FAIL]\033[0m")
        stream.write(f"{line} ({r.seconds:.1f} s)\n")
        for d in r.details:
            stream.write(f"    {d}\n")
    failed = [r.number for r in results if not r.passed]
    stream.write(f"{len(results) - len(failed)}/{len(results)} checks passed\n")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coulomb-counts",
        description="Counting statistics of radial 2D Coulomb gases in centered discs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("variance-curve", "V_N(a) across the bulk with the bulk and edge laws"),
            ("edge-profile", "scaled V_N near the edge against the edge law"),
            ("origin-profile", "E_N and V_N at the origin scaling against their limits")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--ensemble", choices=BUILTIN_TAGS)
        p.add_argument("--beta")
        p.add_argument("--n")
        p.add_argument("--regime")
        p.add_argument("--grid", help="min:max:points[:log]")
        p.add_argument("--trials", help="Monte Carlo trials; 0 disables")
        p.add_argument("--seed")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out", help="output path, '-' for stdout")
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="ensemble parameter b, c, m or c_tilde; repeatable")
        p.add_argument("--config", help="key=value file; flags take precedence")
    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "verify":
        return cmd_verify(args.level)
    try:
        cfg = build_config(args.command, args)
        curve = run_scan(cfg)
        text = render_csv(cfg, curve) if cfg.format == "csv" else render_json(cfg, curve)
        _write(text, cfg.out)
    except (ConfigError, DomainError) as exc:
        sys.stderr.write(f"coulomb-counts: error: {exc}\n")
        return EXIT_CONFIG
    except (ArithmeticError, FloatingPointError) as exc:
        sys.stderr.write(f"coulomb-counts: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except OSError as exc:
        sys.stderr.write(f"coulomb-counts: error: {exc}\n")
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
