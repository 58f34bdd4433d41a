"""Command-line entry point.

Exit codes: 0 all assertions pass, 1 some assertion fails, 2 usage or
configuration error, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .certificates import DETERMINISTIC_IDS, HOLDS, PRECONDITION_NOT_MET, VIOLATED, Constants, \
    certificates_to_json, lemma_certificates, rank1_chain
from .experiments import CSV_COLUMNS, DEFAULT_GRIDS, DEFAULT_TRIALS, SweepConfig, run_sweep, to_csv, write_outputs
from .loo import build_ensemble, decomposition_identities, make_instance
from .matcore import InputError
from .noise import ConfigError, InstanceSpec, NoiseModel
from .serialization import dumps

SUBCOMMANDS = ("verify", "rank1", "scaling", "first-order", "sbm-phase", "mc-entrywise", "certificates")
GRID_FLAGS = ("n", "r", "sigma_ratio", "kappa", "mu", "a", "b", "p")
SEED_ENV = "SPECTRAL_PERTURB_SEED"
IDENTITY_TOL = 1e-9

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CliInvocation:
    subcommand: str
    overrides: dict = field(default_factory=dict)
    config_path: str | None = None


def _number_list(text: str) -> tuple:
    try:
        vals = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number list {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"malformed number list {text!r}")
    return vals


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-perturb", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    for flag in GRID_FLAGS:
        parser.add_argument("--" + flag.replace("_", "-"), dest=flag, type=_number_list, default=None,
                            help="value or comma-separated grid")
    parser.add_argument("--trials", type=_count, default=None)
    parser.add_argument("--seed", type=_seed, default=None)
    parser.add_argument("--out-dir", dest="out_dir", default=None)
    parser.add_argument("--config", dest="config", default=None, help="flat key=value file")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--jobs", type=_count, default=None)
    return parser


def parse(args) -> CliInvocation:
    """Parse argv into an invocation; argparse exits with code 2 on bad input."""
    ns = build_parser().parse_args(args)
    overrides = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "config") and v is not None}
    return CliInvocation(ns.subcommand, overrides, ns.config)


_CONFIG_TYPES = {**{k: _number_list for k in GRID_FLAGS}, "trials": _count, "seed": _seed, "jobs": _count,
                 "out_dir": str, "format": str}


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CONFIG_TYPES[key](value)
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    if out.get("format", "csv") not in ("csv", "json"):
        raise UsageError(f"{path}: format must be csv or json")
    return out


def effective_settings(inv: CliInvocation, environ=None) -> dict:
    """Merge built-in defaults, the config file, the environment seed and flags."""
    environ = os.environ if environ is None else environ
    settings = {}
    if inv.config_path is not None:
        try:
            settings.update(read_config(inv.config_path))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    if "seed" not in inv.overrides and SEED_ENV in environ:
        try:
            settings["seed"] = _seed(environ[SEED_ENV])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{SEED_ENV}: {exc}") from None
    settings.update(inv.overrides)
    settings.setdefault("seed", 0)
    settings.setdefault("format", "csv")
    settings.setdefault("jobs", 1)
    settings.setdefault("out_dir", os.path.join("results", inv.subcommand))
    return settings


def _sweep_config(sub: str, settings: dict) -> SweepConfig:
    experiment = sub
    allowed = DEFAULT_GRIDS[experiment]
    grid = {}
    for k in GRID_FLAGS:
        if k in settings:
            if k not in allowed:
                raise UsageError(f"{sub} does not take --{k.replace('_', '-')}")
            grid[k] = settings[k]
    return SweepConfig(experiment, grid, trials=settings.get("trials", DEFAULT_TRIALS[experiment]),
                       master_seed=settings["seed"], jobs=settings["jobs"])


def _scalar(settings, key, default):
    vals = settings.get(key, (default,))
    if len(vals) != 1:
        raise UsageError(f"verify takes a single value for --{key.replace('_', '-')}")
    return vals[0]


def _verify(settings: dict):
    """One instance: every certificate plus the algebraic identity residuals."""
    n = int(_scalar(settings, "n", 200))
    r = int(_scalar(settings, "r", 2))
    ratio = _scalar(settings, "sigma_ratio", 0.01)
    kappa = _scalar(settings, "kappa", 2.0 if r > 1 else 1.0)
    mu = _scalar(settings, "mu", 1.0)
    seed = settings["seed"]
    constants = Constants()
    noise = NoiseModel("rademacher-scaled", ratio / math.sqrt(n), seed=seed)
    inst = make_instance(InstanceSpec.from_condition(n, r, 1.0, kappa, mu, noise, seed))
    ens = build_ensemble(inst.mstar, inst.e, inst.r, inst.ustar)
    certs = lemma_certificates(inst, ens, constants)
    if r == 1:
        certs += rank1_chain(inst, constants, ens)
    idents = decomposition_identities(inst, ens)

    rows = [{"cert_id": c.id, "holds": int(c.status == HOLDS), "violated": int(c.status == VIOLATED),
             "precondition_not_met": int(c.status == PRECONDITION_NOT_MET), "trials": 1} for c in certs]
    asserts = [{"name": f"{c.id} not violated", "value": float(c.status == VIOLATED), "bound": 0.0,
                "pass": c.status != VIOLATED} for c in certs]
    for ident in idents:
        if not ident.skipped:
            asserts.append({"name": f"identity ({ident.name}) residual <= {IDENTITY_TOL:g}",
                            "value": ident.residual, "bound": IDENTITY_TOL, "pass": ident.residual <= IDENTITY_TOL})
    canonical = {"experiment": "verify", "n": n, "r": r, "sigma_ratio": ratio, "kappa": kappa, "mu": mu,
                 "seed": seed, "noise_family": noise.family, "constants": constants.as_dict()}
    digest = hashlib.sha256(dumps(canonical, indent=0).encode()).hexdigest()
    summary = {"experiment": "verify", "config_digest": digest, "fits": [], "assertions": asserts}
    files = {
        "certificates.json": certificates_to_json(certs),
        "identities.json": dumps([{"name": i.name, "residual": i.residual, "skipped": i.skipped, "reason": i.reason}
                                  for i in idents]),
        "verify_summary.json": dumps(summary),
    }
    if settings["format"] == "csv":
        files["certificates.csv"] = to_csv(CSV_COLUMNS["certificates"], rows)
    else:
        files["certificates_table.json"] = dumps(rows)
    return canonical, digest, summary, files


def _write(out_dir, files) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        paths.append(path)
    return paths


def run(inv: CliInvocation, environ=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    start = time.perf_counter()
    try:
        settings = effective_settings(inv, environ)
        if inv.subcommand == "verify":
            canonical, digest, summary, files = _verify(settings)
            constants = canonical["constants"]
        else:
            cfg = _sweep_config(inv.subcommand, settings)
            result = run_sweep(cfg)
            canonical, digest, summary = cfg.canonical(), cfg.digest(), result.summary
            constants = cfg.constants.as_dict()
            files = None
    except (UsageError, ConfigError, InputError) as exc:
        print(f"spectral-perturb: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_dir = settings["out_dir"]
    try:
        paths = _write(out_dir, files) if files is not None else write_outputs(result, out_dir, settings["format"])
        manifest = {
            "subcommand": inv.subcommand,
            "config": canonical,
            "config_digest": digest,
            "constants": constants,
            "deterministic_ids": sorted(DETERMINISTIC_IDS),
            "versions": {"spectral_perturb": __version__, "numpy": np.__version__,
                         "python": platform.python_version()},
            "outputs": [os.path.basename(p) for p in paths],
            "wall_time_s": time.perf_counter() - start,
        }
        _write(out_dir, {"manifest.json": dumps(manifest)})
    except OSError as exc:
        print(f"spectral-perturb: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO

    ok = True
    for a in summary["assertions"]:
        ok &= a["pass"]
        print(f"{'PASS' if a['pass'] else 'FAIL'}  {a['name']}  (value={a['value']:.6g}, bound={a['bound']:.6g})",
              file=stdout)
    for f in summary["fits"]:
        print(f"fit   {f['name']}: slope={f['slope']:.4g} r2={f['r2']:.4g}", file=stdout)
    print(f"outputs in {out_dir}", file=stdout)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None) -> int:
    return run(parse(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    sys.exit(main())
