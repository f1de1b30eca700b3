"""Command-line interface: ``freezeq {run,sweep,exact,heatmap,mutual-info,scalability}``.

Experiments are described by one JSON config file; any key can be
overridden with ``--set section.key=value`` (value parsed as JSON when
possible). Exit codes: 0 success, 2 config error, 3 resource error,
4 numeric error.
"""

from __future__ import annotations

import argparse
import copy
import datetime as _dt
import json
import logging
import os
import sys
from collections import defaultdict
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .errors import ConfigurationError, FreezeqError
from .freezing import METRICS, MODES, FreezeConfig
from .harness import (
    PROPORTION_RULE,
    RunConfig,
    _run_many,
    ansatz_for,
    box_stats,
    hamiltonian_from,
    kappa_heatmap,
    mutual_information_experiment,
    scalability_experiment,
    sweep_experiment,
)
from .hamiltonians import ORACLE_MAX_QUBITS, exact_ground_energy
from .io import OutputDir, config_hash, csv_text, json_text, record_from_json, record_to_json
from .optimizers import OPTIMIZERS
from .simcore import ENTROPY_LOG_BASE

log = logging.getLogger("freezeq")

DEFAULTS = {
    "hamiltonian": {"kind": "heisenberg", "n_sites": 5, "n_qubits": None, "J": 1.0, "h": 1.0,
                    "t": 0.5, "U": 0.5, "terms": None, "offset": 0.0},
    "ansatz": {"family": "A", "layers": 3},
    "optimizer": {"kind": "rotosolve"},
    "freezing": {"enabled": False, "metric": "parameter", "mode": "incremental", "kappa": 5,
                 "thresholds": [0.001], "count_only": False},
    "runs": {"count": 1, "seed": 0, "iterations": 50, "jobs": 1},
    "output": {"directory": None, "formats": ["json", "csv"]},
    "mutual_info": {"samples": 1000, "entanglers": True},
    "scalability": {"n_list": [5, 7, 9, 11]},
}

_TYPES = {
    "hamiltonian.kind": str, "hamiltonian.n_sites": int, "hamiltonian.n_qubits": (int, type(None)),
    "hamiltonian.J": (int, float), "hamiltonian.h": (int, float), "hamiltonian.t": (int, float),
    "hamiltonian.U": (int, float), "hamiltonian.terms": (list, type(None)),
    "hamiltonian.offset": (int, float),
    "ansatz.family": str, "ansatz.layers": int,
    "optimizer.kind": str,
    "freezing.enabled": bool, "freezing.metric": str, "freezing.mode": (str, list),
    "freezing.kappa": (int, list), "freezing.thresholds": (list, int, float),
    "freezing.count_only": bool,
    "runs.count": int, "runs.seed": int, "runs.iterations": int, "runs.jobs": int,
    "output.directory": (str, type(None)), "output.formats": list,
    "mutual_info.samples": int, "mutual_info.entanglers": bool,
    "scalability.n_list": list,
}


def _merge(base: dict, user: dict) -> dict:
    out = copy.deepcopy(base)
    for section, body in user.items():
        if section not in base:
            raise ConfigurationError(f"unknown config section '{section}'")
        if not isinstance(body, dict):
            raise ConfigurationError(f"config section '{section}' must be an object")
        for key, val in body.items():
            if key not in base[section]:
                raise ConfigurationError(f"unknown config key '{section}.{key}'")
            out[section][key] = val
    return out


def _parse_override(item: str) -> tuple[str, str, object]:
    if "=" not in item or "." not in item.split("=", 1)[0]:
        raise ConfigurationError(f"override must look like section.key=value, got {item!r}")
    path, raw = item.split("=", 1)
    section, key = path.split(".", 1)
    try:
        val = json.loads(raw)
    except json.JSONDecodeError:
        val = raw
    return section, key, val


def _validate(cfg: dict) -> None:
    for path, typ in _TYPES.items():
        section, key = path.split(".")
        val = cfg[section][key]
        if isinstance(val, bool) and typ in (int, (int, float)):
            raise ConfigurationError(f"config key '{path}' has invalid type bool")
        if not isinstance(val, typ):
            raise ConfigurationError(f"config key '{path}' has invalid type {type(val).__name__}")

    def choice(path, val, allowed):
        if val not in allowed:
            raise ConfigurationError(f"config key '{path}' must be one of {list(allowed)}, got {val!r}")

    choice("hamiltonian.kind", cfg["hamiltonian"]["kind"], ("heisenberg", "hubbard", "pauli"))
    choice("optimizer.kind", cfg["optimizer"]["kind"], OPTIMIZERS)
    choice("freezing.metric", cfg["freezing"]["metric"], METRICS)
    for m in _as_list(cfg["freezing"]["mode"]):
        choice("freezing.mode", m, MODES)
    fam = cfg["ansatz"]["family"]
    if fam.upper() not in ("A", "B", "C", "D") and fam not in (
            "A_roto", "A_free", "B1", "B2", "C1", "C2", "D1", "D2"):
        raise ConfigurationError(f"config key 'ansatz.family' has unknown family {fam!r}")
    for fmt in cfg["output"]["formats"]:
        choice("output.formats", fmt, ("json", "csv"))
    if cfg["hamiltonian"]["kind"] == "pauli" and not cfg["hamiltonian"]["terms"]:
        raise ConfigurationError("config key 'hamiltonian.terms' is required for kind 'pauli'")
    for path in ("ansatz.layers", "runs.count", "runs.iterations", "runs.jobs", "mutual_info.samples"):
        s, k = path.split(".")
        if cfg[s][k] < 1:
            raise ConfigurationError(f"config key '{path}' must be >= 1")
    for t in _as_list(cfg["freezing"]["thresholds"]):
        if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
            raise ConfigurationError(f"config key 'freezing.thresholds' has invalid entry {t!r}")
    for k in _as_list(cfg["freezing"]["kappa"]):
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise ConfigurationError(f"config key 'freezing.kappa' has invalid entry {k!r}")


def _as_list(x):
    return list(x) if isinstance(x, list) else [x]


def load_config(path, overrides=()) -> dict:
    try:
        with open(path) as fh:
            user = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(user, dict):
        raise ConfigurationError("config root must be a JSON object")
    patch = defaultdict(dict)
    for item in overrides:
        s, k, v = _parse_override(item)
        patch[s][k] = v
    cfg = _merge(_merge(DEFAULTS, user), patch)
    _validate(cfg)
    return cfg


def hamiltonian_desc(cfg: dict) -> dict:
    h = cfg["hamiltonian"]
    kind = h["kind"]
    if kind == "heisenberg":
        n = h["n_qubits"] if h["n_qubits"] is not None else h["n_sites"]
        return {"kind": kind, "n_sites": n, "J": float(h["J"]), "h": float(h["h"])}
    if kind == "hubbard":
        return {"kind": kind, "n_sites": h["n_sites"], "t": float(h["t"]), "U": float(h["U"])}
    return {"kind": kind, "terms": h["terms"], "offset": float(h["offset"]), "n_qubits": h["n_qubits"]}


def _freeze_modes(cfg: dict) -> list:
    fz = cfg["freezing"]
    modes = []
    for m in _as_list(fz["mode"]):
        if m == "fixed":
            modes.extend(("fixed", k) for k in _as_list(fz["kappa"]))
        else:
            modes.append(("incremental", None))
    return modes


def base_run_config(cfg: dict, with_freeze: bool = True) -> RunConfig:
    desc = hamiltonian_desc(cfg)
    H = hamiltonian_from(desc)
    freeze = None
    fz = cfg["freezing"]
    if with_freeze and fz["enabled"]:
        mode, kappa = _freeze_modes(cfg)[0]
        freeze = FreezeConfig(float(_as_list(fz["thresholds"])[0]), mode, int(kappa or 1),
                              fz["metric"], fz["count_only"])
    return RunConfig.from_iterations(
        cfg["runs"]["iterations"], hamiltonian=desc, family=cfg["ansatz"]["family"],
        n_qubits=H.n_qubits, n_layers=cfg["ansatz"]["layers"], optimizer=cfg["optimizer"]["kind"],
        seed=cfg["runs"]["seed"], freeze=freeze)


def _hash_config(cfg: dict) -> str:
    return config_hash({k: v for k, v in cfg.items() if k != "output"})


def _output_dir(cfg: dict, cli_value: str | None) -> Path:
    return Path(cli_value or cfg["output"]["directory"] or os.environ.get("FREEZEQ_OUTPUT_DIR")
                or "results")


def _metadata(cfg: dict, chash: str, command: str, **extra) -> str:
    meta = {
        "command": command,
        "config_hash": chash,
        "config": cfg,
        "seed": cfg["runs"]["seed"],
        "software_version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "entropy_log_base": ENTROPY_LOG_BASE,
        "freeze_proportion_rule": PROPORTION_RULE,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    meta.update(extra)
    return json_text(meta)


def _reference_energy(run_cfg: RunConfig):
    H = hamiltonian_from(run_cfg.hamiltonian)
    return exact_ground_energy(H) if H.n_qubits <= ORACLE_MAX_QUBITS else None


def _write_record_tables(out: OutputDir, records, chash, formats, prefix=""):
    spec = records[0].config.spec()
    if "json" in formats:
        for i, rec in enumerate(records):
            out.write(f"{prefix}run_{i:03d}.json", json_text(record_to_json(rec, chash)))
    if "csv" in formats:
        out.write(prefix + "energies.csv", csv_text(
            ["seed", "update", "sweep", "slot", "energy"],
            ([r.config.seed, k, sw, sl, e] for r in records
             for k, (sw, sl, e) in enumerate(zip(r.sweep_trace, r.slot_trace, r.energy_trace))),
            chash))
        out.write(prefix + "freeze_events.csv", csv_text(
            ["seed", "sweep", "slot", "qubit", "layer", "distance", "kappa_at_freeze"],
            ([r.config.seed, e.sweep, e.slot, spec.slots[e.slot].qubit, spec.slots[e.slot].layer,
              e.distance, e.kappa] for r in records for e in r.freeze_events),
            chash))
        if any(r.config.freeze for r in records):
            out.write(prefix + "freeze_proportion.csv", csv_text(
                ["seed", "sweep", "percent_exceeding"],
                ([r.config.seed, k, p] for r in records for k, p in enumerate(r.exceed_proportion)),
                chash))


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.set)
    if args.seed is not None:
        cfg["runs"]["seed"] = args.seed
    if args.jobs is not None:
        cfg["runs"]["jobs"] = args.jobs
    chash = _hash_config(cfg)
    base = base_run_config(cfg)
    configs = [replace(base, seed=base.seed + i) for i in range(cfg["runs"]["count"])]
    records = _run_many(configs, cfg["runs"]["jobs"])
    e_ref = _reference_energy(base)
    formats = cfg["output"]["formats"]
    with OutputDir(_output_dir(cfg, args.output)) as out:
        _write_record_tables(out, records, chash, formats)
        variant = base.freeze.label if base.freeze else "baseline"
        thr = base.freeze.threshold if base.freeze else None
        out.write("summary.csv", csv_text(
            ["variant", "T", "kappa_mode", "seed", "final_energy"],
            ([variant, thr, variant if base.freeze else None, r.config.seed, r.final_energy]
             for r in records), chash))
        out.write("metadata.json", _metadata(cfg, chash, "run", ground_energy=e_ref,
                                             budget=base.budget, n_slots=base.spec().n_slots))
    for r in records:
        print(f"seed {r.config.seed}: final energy {r.final_energy:.10g}")
    return 0


def _slug(variant: str) -> str:
    return variant.replace("=", "").replace("/", "_")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config, args.set)
    if args.seed is not None:
        cfg["runs"]["seed"] = args.seed
    if args.jobs is not None:
        cfg["runs"]["jobs"] = args.jobs
    chash = _hash_config(cfg)
    base = base_run_config(cfg, with_freeze=False)
    fz = cfg["freezing"]
    if fz["metric"] != "parameter" or fz["count_only"]:
        base = replace(base, freeze=FreezeConfig(0.0, "incremental", 1, fz["metric"], fz["count_only"]))
    rows = sweep_experiment(base, [float(t) for t in _as_list(fz["thresholds"])], _freeze_modes(cfg),
                            cfg["runs"]["count"], cfg["runs"]["jobs"])
    by_variant = defaultdict(list)
    for r in rows:
        by_variant[r.variant].append(r)
    formats = cfg["output"]["formats"]
    with OutputDir(_output_dir(cfg, args.output)) as out:
        out.write("sweep.csv", csv_text(
            ["variant", "T", "kappa_mode", "seed", "final_energy"],
            ([r.variant, r.threshold, r.mode, r.seed, r.final_energy] for r in rows), chash))
        stats_rows = []
        median_rows = []
        for variant, vrows in by_variant.items():
            b = box_stats([r.final_energy for r in vrows])
            stats_rows.append([variant, b.median, b.mean, b.q1, b.q3, b.whisker_low, b.whisker_high,
                               len(b.outliers)])
            traces = np.array([r.record.energy_trace for r in vrows])
            for k, med in enumerate(np.median(traces, axis=0)):
                median_rows.append([variant, k, float(med)])
            _write_record_tables(out, [r.record for r in vrows], chash, formats,
                                 prefix=f"records/{_slug(variant)}/")
        out.write("box_stats.csv", csv_text(
            ["variant", "median", "mean", "q1", "q3", "whisker_low", "whisker_high", "n_outliers"],
            stats_rows, chash))
        out.write("median_traces.csv", csv_text(["variant", "update", "median_energy"], median_rows, chash))
        out.write("metadata.json", _metadata(cfg, chash, "sweep", ground_energy=_reference_energy(base),
                                             budget=base.budget))
    for row in stats_rows:
        print(f"{row[0]:>24s}  median {row[1]:.6f}  mean {row[2]:.6f}")
    return 0


def cmd_exact(args) -> int:
    cfg = load_config(args.config, args.set)
    H = hamiltonian_from(hamiltonian_desc(cfg))
    print(f"{exact_ground_energy(H):.10g}")
    return 0


def _load_records(root: Path):
    recs = []
    for path in sorted(root.rglob("*.json")):
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(data, dict) and "final_kappa" in data and "config" in data:
            recs.append(record_from_json(data))
    return recs


def cmd_heatmap(args) -> int:
    root = Path(args.records_dir)
    if not root.is_dir():
        raise ConfigurationError(f"records directory {root} does not exist")
    records = [r for r in _load_records(root) if r.final_kappa]
    if not records:
        raise ConfigurationError(f"no run records with kappa vectors under {root}")
    keys = {r.spec_key for r in records}
    if len(keys) != 1:
        raise ConfigurationError(f"records mix ansatz layouts: {sorted(keys)}")
    spec = records[0].config.spec()
    groups = defaultdict(list)
    for r in records:
        groups[(r.config.freeze.threshold, r.config.freeze.label)].append(r)
    with OutputDir(Path(args.output) if args.output else root) as out:
        for (T, label), recs in sorted(groups.items()):
            grid = kappa_heatmap(recs, spec)
            header = ["qubit"] + [f"layer_{l}" for l in range(spec.n_param_layers)]
            rows = ([q] + [float(x) for x in grid[q]] for q in range(spec.n_qubits))
            name = f"heatmap_T{T:g}_{label}.csv"
            out.write(name, csv_text(header, rows, None))
            print(f"{name}: {len(recs)} runs")
    return 0


def cmd_mutual_info(args) -> int:
    cfg = load_config(args.config, args.set)
    if args.seed is not None:
        cfg["runs"]["seed"] = args.seed
    chash = _hash_config(cfg)
    desc = hamiltonian_desc(cfg)
    n = hamiltonian_from(desc).n_qubits
    spec = ansatz_for(cfg["ansatz"]["family"], n, cfg["ansatz"]["layers"], cfg["optimizer"]["kind"])
    if not cfg["mutual_info"]["entanglers"]:
        spec = spec.without_entanglers()
    samples = cfg["mutual_info"]["samples"]
    mi = mutual_information_experiment(spec, samples, cfg["runs"]["seed"])
    with OutputDir(_output_dir(cfg, args.output)) as out:
        out.write("mutual_info.csv", csv_text(
            ["qubit"] + [f"q{j}" for j in range(n)],
            ([i] + [float(x) for x in mi[i]] for i in range(n)), chash))
        out.write("metadata.json", _metadata(cfg, chash, "mutual-info", samples=samples,
                                             family=spec.family, log_base=ENTROPY_LOG_BASE))
    np.set_printoptions(precision=4, suppress=True)
    print(mi)
    return 0


def cmd_scalability(args) -> int:
    cfg = load_config(args.config, args.set)
    if args.jobs is not None:
        cfg["runs"]["jobs"] = args.jobs
    chash = _hash_config(cfg)
    fz = cfg["freezing"]
    mode, kappa = _freeze_modes(cfg)[0]
    rows = scalability_experiment(
        cfg["scalability"]["n_list"], cfg["optimizer"]["kind"], [float(t) for t in _as_list(fz["thresholds"])],
        cfg["runs"]["count"], cfg["runs"]["iterations"], cfg["runs"]["seed"], mode, int(kappa or 1),
        float(cfg["hamiltonian"]["J"]), float(cfg["hamiltonian"]["h"]), cfg["runs"]["jobs"])
    header = ["n_qubits", "variant", "threshold", "seed", "final_energy", "ground_energy",
              "abs_error", "rel_error"]
    with OutputDir(_output_dir(cfg, args.output)) as out:
        out.write("scalability.csv", csv_text(header, ([r[h] for h in header] for r in rows), chash))
        out.write("metadata.json", _metadata(cfg, chash, "scalability"))
    for r in rows:
        print(f"n={r['n_qubits']:2d} {r['variant']:>22s} seed={r['seed']} rel_err={r['rel_error']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freezeq", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="JSON experiment config")
        sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config value (repeatable)")
        sp.set_defaults(func=func)
        return sp

    for name, func, help_ in (("run", cmd_run, "optimize with one configuration"),
                              ("sweep", cmd_sweep, "baseline vs. freezing thresholds and modes"),
                              ("scalability", cmd_scalability, "Heisenberg errors vs. width with L = n")):
        sp = with_config(name, func, help_)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--output", help="output directory (default: config, $FREEZEQ_OUTPUT_DIR, ./results)")
    with_config("exact", cmd_exact, "print the exact ground energy")
    sp = with_config("mutual-info", cmd_mutual_info, "averaged pairwise mutual information")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--output")
    sp = sub.add_parser("heatmap", help="mean final kappa grids from run records")
    sp.add_argument("records_dir")
    sp.add_argument("--output")
    sp.set_defaults(func=cmd_heatmap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FreezeqError as exc:
        print(f"freezeq: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
