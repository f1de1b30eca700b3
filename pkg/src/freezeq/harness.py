"""Seeded optimization runs and the experiments built on them."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .ansatz import (
    Angle,
    AnsatzSpec,
    Axis,
    CircuitEvaluator,
    Quaternion,
    build_ansatz,
    run_circuit,
)
from .errors import ArgumentError, ConfigurationError, ResourceError
from .freezing import (
    FreezeConfig,
    FreezeState,
    param_distance,
    scheduler_record_update,
    scheduler_should_optimize,
    sweep_tick,
)
from .hamiltonians import ORACLE_MAX_QUBITS, build_hamiltonian, exact_ground_energy
from .optimizers import OPTIMIZERS, GateEvalContext, optimizer_step
from .simcore import StateVector, reduced_state, von_neumann_entropy

log = logging.getLogger(__name__)

# Per-sweep freeze proportion: a gate that is currently frozen counts as below threshold.
PROPORTION_RULE = "frozen-counts-as-below-threshold"


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator; each integer seed is an independent stream."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(key=int(seed) % (1 << 64)))


def resolve_family(family: str, optimizer: str) -> str:
    """Map a topology letter (A-D) plus optimizer to a concrete family name."""
    if len(family) != 1:
        return family
    letter = family.upper()
    if letter not in "ABCD":
        raise ConfigurationError(f"unknown ansatz family {family!r}")
    if optimizer == "rotosolve":
        return "A_roto" if letter == "A" else letter + "1"
    return "A_free" if letter == "A" else letter + "2"


def ansatz_for(family: str, n_qubits: int, n_layers: int, optimizer: str) -> AnsatzSpec:
    family = resolve_family(family, optimizer)
    free_gate = "Quaternion" if optimizer == "fqs" else "Free"
    spec = build_ansatz(family, n_qubits, n_layers, free_gate=free_gate)
    if spec.is_rotosolve != (optimizer == "rotosolve"):
        raise ConfigurationError(f"family {family} does not fit optimizer {optimizer}")
    return spec


def init_params(spec: AnsatzSpec, seed) -> list:
    """Uniform random parameters: angles on (-pi, pi], axes on S^2, quaternions on S^3."""
    rng = make_rng(seed)
    params = []
    for s in spec.slots:
        if s.generator in ("X", "Y"):
            # uniform on [-pi, pi) mirrored onto (-pi, pi]
            params.append(Angle(-float(rng.uniform(-math.pi, math.pi))))
        else:
            dim = 3 if s.generator == "Free" else 4
            while True:
                v = rng.standard_normal(dim)
                nrm = np.linalg.norm(v)
                if nrm > 1e-12:
                    break
            v = tuple(v / nrm)
            params.append(Axis(v) if dim == 3 else Quaternion(v))
    return params


@dataclass(frozen=True)
class RunConfig:
    hamiltonian: dict
    family: str
    n_qubits: int
    n_layers: int
    optimizer: str
    budget: int
    seed: int = 0
    freeze: FreezeConfig | None = None

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.budget < 1:
            raise ConfigurationError(f"budget must be >= 1, got {self.budget}")

    def spec(self) -> AnsatzSpec:
        return ansatz_for(self.family, self.n_qubits, self.n_layers, self.optimizer)

    @classmethod
    def from_iterations(cls, iterations: int, **kw) -> RunConfig:
        """Budget = iterations x number of gate slots."""
        probe = cls(budget=1, **kw)
        return replace(probe, budget=iterations * probe.spec().n_slots)

    def to_json(self) -> dict:
        d = asdict(self)
        d["freeze"] = asdict(self.freeze) if self.freeze else None
        return d

    @classmethod
    def from_json(cls, d: dict) -> RunConfig:
        d = dict(d)
        if d.get("freeze"):
            d["freeze"] = FreezeConfig(**d["freeze"])
        return cls(**d)


@lru_cache(maxsize=64)
def _hamiltonian(key: str):
    desc = json.loads(key)
    return build_hamiltonian(desc.pop("kind"), **desc)


def hamiltonian_from(desc: dict):
    """Build (and memoize) the operator described by a config-style dict."""
    return _hamiltonian(json.dumps(desc, sort_keys=True))


@dataclass
class RunRecord:
    config: RunConfig
    energy_trace: list
    pre_energy_trace: list
    slot_trace: list
    sweep_trace: list
    initial_energy: float
    final_energy: float
    final_params: list
    freeze_events: list
    final_kappa: list
    exceed_proportion: list
    distance_traces: list
    n_sweeps: int
    probe_count: int
    updates: list = field(default_factory=list, repr=False)

    @property
    def spec_key(self) -> tuple:
        return self.config.spec().key()


def run_optimization(config: RunConfig, keep_updates: bool = False) -> RunRecord:
    """Sweep the gate slots in order until exactly ``config.budget`` updates are done.

    Frozen slots are skipped without consuming budget; counters tick at the
    end of every sweep (including a final partial one).
    """
    spec = config.spec()
    H = hamiltonian_from(config.hamiltonian)
    if H.n_qubits != spec.n_qubits:
        raise ConfigurationError(
            f"hamiltonian acts on {H.n_qubits} qubits but ansatz has {spec.n_qubits}"
        )
    step = optimizer_step(config.optimizer)
    params = init_params(spec, config.seed)
    ev = CircuitEvaluator(spec, H)
    fz = config.freeze
    state = FreezeState.fresh(spec.n_slots, fz) if fz else None

    energy = ev.energy(params)
    initial = energy
    energies, pre, slots, sweeps, updates = [], [], [], [], []
    proportion = []
    dist_traces = [[] for _ in range(spec.n_slots)]
    done = 0
    sweep = 0
    while done < config.budget:
        exceed = 0
        frozen_now = []
        for d in range(spec.n_slots):
            if done >= config.budget:
                break
            if state is not None and not scheduler_should_optimize(state, d):
                continue
            prev = params[d]
            res = step(GateEvalContext(ev, params, d))
            dist = param_distance(prev, res.param, fz.metric if fz else "parameter",
                                  spec.slots[d].generator)
            dist_traces[d].append((sweep, dist))
            pre.append(energy)
            energy = res.energy
            energies.append(energy)
            slots.append(d)
            sweeps.append(sweep)
            if keep_updates:
                updates.append(res)
            done += 1
            if state is not None:
                if dist >= fz.threshold:
                    exceed += 1
                n_events = len(state.events)
                scheduler_record_update(state, d, dist, fz, sweep)
                if len(state.events) > n_events and not fz.count_only:
                    frozen_now.append(d)
        if state is not None:
            proportion.append(100.0 * exceed / spec.n_slots)
            sweep_tick(state, frozen_now)
        sweep += 1

    return RunRecord(
        config=config,
        energy_trace=energies,
        pre_energy_trace=pre,
        slot_trace=slots,
        sweep_trace=sweeps,
        initial_energy=initial,
        final_energy=energy,
        final_params=params,
        freeze_events=list(state.events) if state else [],
        final_kappa=[int(k) for k in state.kappa] if state else [],
        exceed_proportion=proportion,
        distance_traces=dist_traces,
        n_sweeps=sweep,
        probe_count=ev.n_probes,
        updates=updates,
    )


def freeze_proportion_trace(record: RunRecord) -> list:
    """Per-sweep percentage of gates whose distance reached the threshold."""
    if record.config.freeze is None:
        raise ArgumentError("freeze proportion requires a freezing run")
    return list(record.exceed_proportion)


def _run_many(configs: Sequence[RunConfig], jobs: int = 1) -> list:
    if jobs <= 1 or len(configs) <= 1:
        return [run_optimization(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_optimization, configs))


@dataclass
class SweepRow:
    variant: str
    threshold: float | None
    mode: str | None
    seed: int
    record: RunRecord

    @property
    def final_energy(self) -> float:
        return self.record.final_energy


def sweep_variants(base: RunConfig, thresholds: Iterable[float], modes: Iterable) -> list:
    """Baseline plus one FreezeConfig per (threshold, mode) pair.

    ``modes`` items are ``("fixed", kappa)``, ``("incremental", None)`` or
    ready-made FreezeConfig templates whose threshold is overwritten.
    """
    metric = base.freeze.metric if base.freeze else "parameter"
    count_only = base.freeze.count_only if base.freeze else False
    out = [("baseline", None)]
    for mode in modes:
        for T in thresholds:
            if isinstance(mode, FreezeConfig):
                fc = replace(mode, threshold=float(T))
            else:
                name, kappa = mode
                fc = FreezeConfig(float(T), name, int(kappa or 1), metric, count_only)
            out.append((f"T={T:g}/{fc.label}", fc))
    return out


def sweep_experiment(base: RunConfig, thresholds: Iterable[float], modes: Iterable, n_runs: int,
                     jobs: int = 1) -> list:
    """Run every variant on seeds ``base.seed .. base.seed + n_runs - 1``."""
    if n_runs < 1:
        raise ConfigurationError("n_runs must be >= 1")
    variants = sweep_variants(base, list(thresholds), list(modes))
    plan = []
    for name, fc in variants:
        for i in range(n_runs):
            plan.append((name, fc, replace(base, freeze=fc, seed=base.seed + i)))
    records = _run_many([c for _, _, c in plan], jobs)
    return [
        SweepRow(name, fc.threshold if fc else None, fc.label if fc else None, cfg.seed, rec)
        for (name, fc, cfg), rec in zip(plan, records)
    ]


@dataclass(frozen=True)
class BoxStats:
    median: float
    mean: float
    q1: float
    q3: float
    whisker_low: float
    whisker_high: float
    outliers: tuple


def box_stats(values: Sequence[float]) -> BoxStats:
    """Box-plot summary with linear-interpolation quartiles and 1.5 IQR whiskers."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ArgumentError("box_stats needs at least one value")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    outliers = tuple(float(x) for x in np.sort(v[(v < lo_fence) | (v > hi_fence)]))
    return BoxStats(float(med), float(v.mean()), float(q1), float(q3),
                    float(inside.min()), float(inside.max()), outliers)


def kappa_heatmap(records: Sequence[RunRecord], spec: AnsatzSpec) -> np.ndarray:
    """Mean final kappa per (qubit, parameter layer) over ``records``."""
    if not records:
        raise ArgumentError("no records given")
    grid = np.zeros((spec.n_qubits, spec.n_param_layers))
    for rec in records:
        if rec.spec_key != spec.key():
            raise ArgumentError(f"record layout {rec.spec_key} does not match {spec.key()}")
        if len(rec.final_kappa) != spec.n_slots:
            raise ArgumentError("record carries no kappa vector (run without freezing?)")
        for s, k in zip(spec.slots, rec.final_kappa):
            grid[s.qubit, s.layer] += k
    return grid / len(records)


def scalability_experiment(n_list: Iterable[int], optimizer: str = "rotosolve",
                           thresholds: Iterable[float] = (0.01, 0.005, 0.001), runs: int = 10,
                           iterations: int = 100, seed: int = 0, mode: str = "incremental",
                           kappa: int = 1, J: float = 1.0, h: float = 1.0, jobs: int = 1) -> list:
    """Heisenberg ring with ``L = n``; errors of every run against the exact ground energy."""
    rows = []
    for n in n_list:
        if n > ORACLE_MAX_QUBITS:
            raise ResourceError(f"exact oracle capped at {ORACLE_MAX_QUBITS} qubits, got {n}")
        ham = {"kind": "heisenberg", "n_sites": n, "J": J, "h": h}
        e_g = exact_ground_energy(hamiltonian_from(ham))
        base = RunConfig.from_iterations(iterations, hamiltonian=ham, family="A", n_qubits=n,
                                         n_layers=n, optimizer=optimizer, seed=seed)
        for row in sweep_experiment(base, thresholds, [(mode, kappa)], runs, jobs):
            err = abs(row.final_energy - e_g)
            rows.append({
                "n_qubits": n,
                "variant": row.variant,
                "threshold": row.threshold,
                "seed": row.seed,
                "final_energy": row.final_energy,
                "ground_energy": e_g,
                "abs_error": err,
                "rel_error": err / abs(e_g),
            })
            log.info("n=%d %s seed=%d rel_err=%.4f", n, row.variant, row.seed, err / abs(e_g))
    return rows


def mutual_information_matrix(state: StateVector) -> np.ndarray:
    """Pairwise ``I(i:j) = S(i) + S(j) - S(ij)`` in bits; zero diagonal."""
    n = state.n_qubits
    if n < 2:
        raise ArgumentError("mutual information needs at least two qubits")
    single = [von_neumann_entropy(reduced_state(state, [q])) for q in range(n)]
    mi = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            joint = von_neumann_entropy(reduced_state(state, [i, j]))
            mi[i, j] = mi[j, i] = single[i] + single[j] - joint
    return mi


def mutual_information_experiment(spec: AnsatzSpec, n_samples: int, seed=0) -> np.ndarray:
    """Average pairwise mutual information over random parameter draws."""
    if n_samples < 1:
        raise ArgumentError("n_samples must be >= 1")
    rng = make_rng(seed)
    acc = np.zeros((spec.n_qubits, spec.n_qubits))
    for _ in range(n_samples):
        acc += mutual_information_matrix(run_circuit(spec, init_params(spec, rng)))
    return acc / n_samples


def neighbor_means(mi: np.ndarray) -> tuple[float, float]:
    """Mean MI over open-chain nearest neighbours and over all other pairs."""
    n = mi.shape[0]
    near = [mi[i, i + 1] for i in range(n - 1)]
    far = [mi[i, j] for i in range(n) for j in range(i + 2, n)]
    return float(np.mean(near)), float(np.mean(far)) if far else 0.0
