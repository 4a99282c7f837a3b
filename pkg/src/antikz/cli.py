"""Command-line front end: parameter sweeps written as CSV, plus the self-test.

    antikz lz-prob      --kappa log:0.05:1000:25 --lambda 1e-3
    antikz ising-defect --kappa log:1:100:20 --lambda 1e-3,5e-3 --n-spins 100
    antikz vopt         --lambda log:1e-4:1e-2:9
    antikz selftest     [--fast]

Settings resolve as flags > key=value config file > defaults, and the
resolved values are echoed as ``# key=value`` lines on top of the CSV.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__, ising, lz, optimize
from .errors import DomainError

__all__ = [
    "RunConfig",
    "SweepTable",
    "ResultCache",
    "ConfigError",
    "parse_grid",
    "load_config",
    "cmd_lz_prob",
    "cmd_ising_defect",
    "cmd_vopt",
    "cmd_selftest",
    "main",
]

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("lz-prob", "ising-defect", "vopt", "selftest")


class ConfigError(ValueError):
    """Invalid command line or config file."""


# -- configuration -------------------------------------------------------------


def parse_grid(text):
    """``1,10,100`` or ``log:lo:hi:n`` (geometric) or ``lin:lo:hi:n``."""
    text = str(text).strip()
    try:
        if text.startswith(("log:", "lin:")):
            kind, lo, hi, n = text.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
            if n < 1:
                raise ValueError
            if kind == "log":
                if lo <= 0 or hi <= 0:
                    raise ValueError
                vals = np.geomspace(lo, hi, n)
            else:
                vals = np.linspace(lo, hi, n)
            return [float(v) for v in vals]
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; use 'a,b,c' or 'log:lo:hi:n'") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"bad grid {text!r}")
    return vals


def _parse_window(text):
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError:
        raise ConfigError(f"bad window {text!r}; use 'a,b'") from None
    if not a < b:
        raise ConfigError("window needs a < b")
    return (a, b)


@dataclass
class RunConfig:
    command: str = "lz-prob"
    kappa: list = field(default_factory=lambda: [1.0, 10.0, 100.0])
    lam: list = field(default_factory=lambda: [1e-3])
    n_spins: int = 100
    window: tuple = (-200.0, 200.0)
    rtol: float = 1e-8
    threads: int = 1
    seed: int = 0
    mc_traj: int = 0
    vnum: str = "master_numeric"
    fast: bool = False
    out: str = None
    cache: str = None
    plot: str = None

    # settings that change results; threads/out/cache/plot do not
    RESULT_KEYS = ("command", "kappa", "lam", "n_spins", "window", "rtol", "seed", "mc_traj", "vnum")

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.kappa or not self.lam:
            raise ConfigError("grids must be non-empty")
        if any(k <= 0 for k in self.kappa):
            raise ConfigError("kappa values must be > 0")
        if any(v < 0 for v in self.lam):
            raise ConfigError("lambda values must be >= 0")
        if self.n_spins < 2 or self.n_spins % 2:
            raise ConfigError("n-spins must be even and >= 2")
        if not self.rtol > 0:
            raise ConfigError("rtol must be > 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.mc_traj < 0:
            raise ConfigError("mc-traj must be >= 0")
        if self.vnum not in ("master_numeric", "inf_order"):
            raise ConfigError("vnum must be master_numeric or inf_order")
        if self.command == "vopt" and any(not 1e-4 <= v <= 1e-2 for v in self.lam):
            raise ConfigError("vopt needs lambda in [1e-4, 1e-2]")
        return self

    def metadata(self):
        out = [("antikz_version", __version__), ("J", "1")]
        for k in self.RESULT_KEYS:
            v = getattr(self, k)
            if isinstance(v, (list, tuple)):
                v = ",".join(_fmt(x) for x in v)
            elif isinstance(v, float):
                v = _fmt(v)
            out.append((k, str(v)))
        return out


_CONVERTERS = {
    "kappa": parse_grid,
    "lam": parse_grid,
    "lambda": parse_grid,
    "n_spins": int,
    "window": _parse_window,
    "rtol": float,
    "threads": int,
    "seed": int,
    "mc_traj": int,
    "vnum": str,
    "fast": lambda s: str(s).lower() in ("1", "true", "yes", "on"),
    "out": str,
    "cache": str,
    "plot": str,
}


def load_config(path):
    """key=value lines; '#' starts a comment.  Keys match the long flags."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{path}:{no}: unknown key {key!r}")
        try:
            values["lam" if key == "lambda" else key] = _CONVERTERS[key](val)
        except ValueError:
            raise ConfigError(f"{path}:{no}: bad value for {key}") from None
    return values


# -- output --------------------------------------------------------------------


def _fmt(x):
    """Shortest decimal that round-trips the double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


@dataclass
class SweepTable:
    columns: list
    rows: list
    meta: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_csv(self):
        lines = [f"# {k}={v}" for k, v in self.meta]
        lines += [f"# column {c}: {unit}" for c, unit in self.columns]
        lines += [f"# {n}" for n in self.notes]
        lines.append(",".join(c for c, _ in self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def column(self, name):
        i = [c for c, _ in self.columns].index(name)
        return [r[i] for r in self.rows]


def plot_script(table, csv_path, title):
    """gnuplot script that plots every result column against the first one."""
    names = [c for c, _ in table.columns]
    params = {"kappa", "lambda"}
    logx = "set logscale x\n" if names[0] in ("kappa", "lambda") else ""
    series = ", \\\n     ".join(
        f"'{csv_path}' using 1:{i + 1} with linespoints title '{name}'" for i, name in enumerate(names) if i > 0 and name not in params
    )
    return (
        f"# generated by antikz {__version__}\n"
        "set datafile separator ','\n"
        f"set title '{title}'\n"
        f"set xlabel '{names[0]}'\n"
        "set key left top\n"
        f"{logx}plot {series}\n"
    )


# -- cache ---------------------------------------------------------------------


class ResultCache:
    """One small text file per value, named by the hash of its parameters."""

    def __init__(self, directory):
        self.dir = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    @staticmethod
    def key(*parts):
        canon = "|".join([__version__] + [_fmt(p) if isinstance(p, float) else str(p) for p in parts])
        return hashlib.sha256(canon.encode()).hexdigest(), canon

    def get_or_compute(self, compute, *parts):
        if not self.dir:
            return compute()
        digest, canon = self.key(*parts)
        path = os.path.join(self.dir, digest + ".txt")
        if os.path.exists(path):
            try:
                with open(path, encoding="utf-8") as fh:
                    value_line, key_line = fh.read().splitlines()[:2]
                if key_line != "key=" + canon:
                    raise ValueError("key mismatch")
                return float(value_line)
            except (OSError, ValueError):
                warnings.warn(f"ignoring corrupt cache entry {path}", RuntimeWarning, stacklevel=2)
        value = compute()
        tmp = path + f".{os.getpid()}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(f"{_fmt(value)}\nkey={canon}\n")
        os.replace(tmp, path)
        return value


def _ordered_map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# -- commands ------------------------------------------------------------------


def cmd_lz_prob(cfg):
    """Transition probability of the noisy sweep over the (lambda, kappa) grid."""
    cache = ResultCache(cfg.cache)
    points = [(lam, k) for lam in cfg.lam for k in cfg.kappa]
    ti, tf = cfg.window

    def row(pt):
        lam, k = pt
        p = lz.LZParams(k, lam, ti, tf)
        num = cache.get_or_compute(lambda: lz.evolve_master(p, rtol=cfg.rtol, atol=cfg.rtol * 1e-2).p_up,
                                   "lz_master", k, lam, ti, tf, cfg.rtol)
        first = cache.get_or_compute(lambda: lz.prob_first_order(p), "lz_first", k, lam)
        out = [k, lam, num, first, lz.p_closed("non_ad", p), lz.p_closed("ad", p),
               lz.p_closed("combined", p), lz.p_closed("kayanuma", p)]
        if cfg.mc_traj:
            mc = lz.noise_trajectory_oracle(p, n_traj=cfg.mc_traj, seed=cfg.seed)
            out += list(mc)
        return out

    columns = [("kappa", "J^2/v"), ("lambda", "W^2/J"), ("P_numeric", "master equation"),
               ("P_first_order", "closed form"), ("P_non_ad", "closed form"), ("P_ad", "closed form"),
               ("P_combined", "closed form"), ("P_kayanuma", "closed form")]
    if cfg.mc_traj:
        columns += [("P_mc", "trajectory mean"), ("P_mc_stderr", "trajectory stderr")]
    return SweepTable(columns, _ordered_map(row, points, cfg.threads), cfg.metadata())


def cmd_ising_defect(cfg):
    """Defect density of the noisy Ising chain over the (lambda, kappa) grid."""
    cache = ResultCache(cfg.cache)
    points = [(lam, k) for lam in cfg.lam for k in cfg.kappa]
    ti, tf = cfg.window

    def row(pt):
        lam, k = pt
        p = ising.IsingParams(k, lam, cfg.n_spins, ti, tf)
        num = cache.get_or_compute(
            lambda: ising.defect_density(p, rtol=cfg.rtol, atol=cfg.rtol * 1e-2).defect_density,
            "ising_sum", k, lam, cfg.n_spins, ti, tf, cfg.rtol)
        rec = ising.defect_closed("reciprocal", k, lam) if lam > 0 else math.nan
        return [k, lam, num] + [ising.defect_closed(kind, k, lam) for kind in
                                ("inf_order", "first_order", "second_order", "kzm", "kayanuma")] + [rec]

    columns = [("kappa", "J^2/v"), ("lambda", "W^2/J"), ("n_numeric", "mode sum"),
               ("n_inf_order", "closed form"), ("n_1st", "closed form"), ("n_2nd", "closed form"),
               ("n_kzm", "closed form"), ("n_kayanuma", "closed form"), ("n_reciprocal", "closed form")]
    return SweepTable(columns, _ordered_map(row, points, cfg.threads), cfg.metadata())


def cmd_vopt(cfg):
    """Optimal sweep rate v/J^2 against lambda."""
    cache = ResultCache(cfg.cache)
    store = {}

    def row(lam):
        def vnum():
            return optimize.v_opt_numeric(lam, cfg.vnum, cfg.n_spins, cfg.window,
                                          rtol=cfg.rtol, cache=store).v_opt_over_J2

        v_num = cache.get_or_compute(vnum, "vopt", cfg.vnum, lam, cfg.n_spins, *cfg.window, cfg.rtol)
        v_inf = optimize.v_opt_numeric(lam, "inf_order").v_opt_over_J2
        return [lam, v_num, v_inf, optimize.v_opt_closed("first", lam), optimize.v_opt_closed("second", lam),
                optimize.zeta(lam), optimize.xi(lam)]

    # numeric optima share the per-lambda cache dict, so run lambdas in order
    rows = [row(lam) for lam in cfg.lam]
    columns = [("lambda", "W^2/J"), ("v_num", cfg.vnum), ("v_inf_order", "closed-form objective"),
               ("v_1st", "closed form"), ("v_2nd", "closed form"), ("zeta", "closed form"), ("xi", "closed form")]
    table = SweepTable(columns, rows, cfg.metadata())
    if len(rows) >= 2 and rows[0][0] != rows[-1][0]:
        dl = math.log(rows[-1][0] / rows[0][0])
        for name, i in (("v_num", 1), ("v_inf_order", 2), ("v_1st", 3)):
            table.notes.append(f"slope_{name}={_fmt(math.log(rows[-1][i] / rows[0][i]) / dl)}")
    return table


def cmd_selftest(cfg, stream=None):
    from . import acceptance

    stream = stream or sys.stdout

    def report(r):
        print(r.line(), file=stream, flush=True)

    results = acceptance.run_all(fast=cfg.fast, report=report)
    summary = {
        "version": __version__,
        "fast": cfg.fast,
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail,
                      "seconds": round(r.seconds, 3)} for r in results],
    }
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} criteria passed", file=stream)
    return summary


# -- entry point ---------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="antikz", description="Noisy Landau-Zener and Ising sweeps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--kappa", help="grid of kappa = J^2/v ('a,b' or 'log:lo:hi:n')")
    p.add_argument("--lambda", dest="lam", help="grid of lambda = W^2/J")
    p.add_argument("--n-spins", dest="n_spins", help="chain length N (even)")
    p.add_argument("--window", help="tau_i,tau_f")
    p.add_argument("--rtol", help="ODE relative tolerance")
    p.add_argument("--threads", help="worker threads")
    p.add_argument("--seed", help="Monte-Carlo seed")
    p.add_argument("--mc-traj", dest="mc_traj", help="noise trajectories per lz-prob row (0: off)")
    p.add_argument("--vnum", help="objective of v_num: master_numeric or inf_order")
    p.add_argument("--fast", action="store_const", const="true", help="selftest: quick subset only")
    p.add_argument("--config", help="key=value settings file")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--cache", help="cache directory")
    p.add_argument("--plot", help="also write a gnuplot script to this path")
    return p


def resolve_config(argv):
    ns = _parser().parse_args(argv)
    values = {"command": ns.command}
    if ns.config:
        values.update(load_config(ns.config))
    for f in fields(RunConfig):
        raw = getattr(ns, f.name, None)
        if raw is None or f.name == "command":
            continue
        try:
            values[f.name] = _CONVERTERS[f.name](raw)
        except ValueError:
            raise ConfigError(f"bad value for --{f.name.replace('_', '-')}: {raw!r}") from None
    return RunConfig(**values).validate()


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    try:
        cfg = resolve_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"antikz: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if cfg.command == "selftest":
            summary = cmd_selftest(cfg)
            if cfg.out:
                _write(json.dumps(summary, indent=2) + "\n", cfg.out)
            return EXIT_OK if summary["passed"] else EXIT_SELFTEST
        cmd = {"lz-prob": cmd_lz_prob, "ising-defect": cmd_ising_defect, "vopt": cmd_vopt}[cfg.command]
        table = cmd(cfg)
    except DomainError as exc:
        print(f"antikz: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"antikz: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _write(table.to_csv(), cfg.out)
    if cfg.plot:
        _write(plot_script(table, cfg.out or "data.csv", cfg.command), cfg.plot)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
