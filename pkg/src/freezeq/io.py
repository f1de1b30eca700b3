"""Serialization of run records and atomic result-file writing."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

from .ansatz import Angle, Axis, Quaternion
from .freezing import FreezeEvent
from .harness import RunConfig, RunRecord


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def param_to_json(p) -> dict:
    if isinstance(p, Angle):
        return {"kind": "angle", "value": [p.theta]}
    if isinstance(p, Axis):
        return {"kind": "axis", "value": list(p.n)}
    return {"kind": "quaternion", "value": list(p.q)}


def param_from_json(d: dict):
    v = d["value"]
    return {"angle": lambda: Angle(v[0]), "axis": lambda: Axis(v), "quaternion": lambda: Quaternion(v)}[d["kind"]]()


def record_to_json(rec: RunRecord, chash: str | None = None) -> dict:
    spec = rec.config.spec()
    out = {
        "config_hash": chash,
        "config": rec.config.to_json(),
        "ansatz": {"family": spec.family, "n_qubits": spec.n_qubits, "n_layers": spec.n_layers},
        "initial_energy": rec.initial_energy,
        "final_energy": rec.final_energy,
        "energy_trace": rec.energy_trace,
        "pre_energy_trace": rec.pre_energy_trace,
        "slot_trace": rec.slot_trace,
        "sweep_trace": rec.sweep_trace,
        "final_params": [param_to_json(p) for p in rec.final_params],
        "freeze_events": [[e.sweep, e.slot, e.distance, e.kappa] for e in rec.freeze_events],
        "final_kappa": rec.final_kappa,
        "exceed_proportion": rec.exceed_proportion,
        "distance_traces": [[list(x) for x in tr] for tr in rec.distance_traces],
        "n_sweeps": rec.n_sweeps,
        "probe_count": rec.probe_count,
    }
    if rec.updates:
        out["updates"] = [u.to_json() for u in rec.updates]
    return out


def record_from_json(d: dict) -> RunRecord:
    return RunRecord(
        config=RunConfig.from_json(d["config"]),
        energy_trace=d["energy_trace"],
        pre_energy_trace=d["pre_energy_trace"],
        slot_trace=d["slot_trace"],
        sweep_trace=d["sweep_trace"],
        initial_energy=d["initial_energy"],
        final_energy=d["final_energy"],
        final_params=[param_from_json(p) for p in d["final_params"]],
        freeze_events=[FreezeEvent(*e) for e in d["freeze_events"]],
        final_kappa=d["final_kappa"],
        exceed_proportion=d["exceed_proportion"],
        distance_traces=[[tuple(x) for x in tr] for tr in d["distance_traces"]],
        n_sweeps=d["n_sweeps"],
        probe_count=d["probe_count"],
    )


def csv_text(header, rows, chash: str | None = None) -> str:
    """CSV with LF line endings; a ``# config_hash=...`` line precedes the header."""
    buf = io.StringIO()
    if chash:
        buf.write(f"# config_hash={chash}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if x is None else repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


class OutputDir:
    """Collects result files in a scratch directory and moves them into place on commit.

    Nothing appears in the target directory unless :meth:`commit` runs, so a
    failed command leaves no partial output.
    """

    def __init__(self, target):
        self.target = Path(target)
        self.target.parent.mkdir(parents=True, exist_ok=True)
        self._tmp = Path(tempfile.mkdtemp(prefix=".freezeq-", dir=self.target.parent))
        self.files: list[str] = []

    def write(self, relpath: str, text: str) -> None:
        path = self._tmp / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        self.files.append(relpath)

    def commit(self) -> list[Path]:
        self.target.mkdir(parents=True, exist_ok=True)
        out = []
        for rel in self.files:
            dest = self.target / rel
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(self._tmp / rel, dest)
            out.append(dest)
        shutil.rmtree(self._tmp, ignore_errors=True)
        return out

    def discard(self) -> None:
        shutil.rmtree(self._tmp, ignore_errors=True)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.discard()
        return False
