import math
from dataclasses import replace

import numpy as np
import pytest

from freezeq.ansatz import Quaternion, build_ansatz
from freezeq.errors import ArgumentError, ConfigurationError
from freezeq.freezing import FreezeConfig
from freezeq.harness import (
    RunConfig,
    ansatz_for,
    box_stats,
    freeze_proportion_trace,
    init_params,
    kappa_heatmap,
    mutual_information_experiment,
    mutual_information_matrix,
    neighbor_means,
    resolve_family,
    run_optimization,
    scalability_experiment,
    sweep_experiment,
    sweep_variants,
)
from freezeq.io import record_from_json, record_to_json
from freezeq.simcore import from_amplitudes, prepare_zero

HEIS5 = {"kind": "heisenberg", "n_sites": 5, "J": 1.0, "h": 1.0}
HEIS3 = {"kind": "heisenberg", "n_sites": 3, "J": 1.0, "h": 1.0}


def cfg(optimizer="rotosolve", iterations=4, n=3, layers=2, seed=0, freeze=None, ham=None):
    return RunConfig.from_iterations(iterations, hamiltonian=ham or (HEIS3 if n == 3 else HEIS5), family="A",
                                     n_qubits=n, n_layers=layers, optimizer=optimizer, seed=seed, freeze=freeze)


class TestSetup:
    def test_family_resolution(self):
        assert resolve_family("A", "rotosolve") == "A_roto"
        assert resolve_family("c", "fqs") == "C2"
        assert resolve_family("B1", "rotosolve") == "B1"
        with pytest.raises(ConfigurationError):
            resolve_family("Q", "fraxis")
        with pytest.raises(ConfigurationError):
            ansatz_for("B1", 3, 1, "fraxis")

    def test_init_deterministic(self):
        spec = ansatz_for("A", 4, 2, "fqs")
        a, b = init_params(spec, 9), init_params(spec, 9)
        assert a == b
        assert a != init_params(spec, 10)
        assert all(isinstance(p, Quaternion) for p in a)

    def test_angles_in_range(self):
        spec = ansatz_for("A", 5, 20, "rotosolve")
        thetas = [p.theta for p in init_params(spec, 0)]
        assert all(-math.pi < t <= math.pi for t in thetas)

    def test_axis_samples_isotropic(self):
        spec = build_ansatz("A_free", 100, 1000)
        axes = np.array([p.n for p in init_params(spec, 1)])
        assert len(axes) == 100_000
        assert np.allclose(np.linalg.norm(axes, axis=1), 1.0)
        assert np.linalg.norm(axes.mean(axis=0)) < 0.02

    def test_budget_from_iterations(self):
        assert cfg(iterations=50, n=5, layers=3).budget == 1500
        assert RunConfig.from_iterations(50, hamiltonian=HEIS5, family="A", n_qubits=5, n_layers=5,
                                         optimizer="fraxis").budget == 1250

    def test_bad_config(self):
        with pytest.raises(ConfigurationError):
            cfg(optimizer="adam")
        with pytest.raises(ConfigurationError):
            run_optimization(cfg(n=3, ham=HEIS5))


class TestRuns:
    @pytest.mark.parametrize("optimizer", ["rotosolve", "fraxis", "fqs"])
    def test_budget_and_descent(self, optimizer):
        rec = run_optimization(cfg(optimizer))
        assert len(rec.energy_trace) == rec.config.budget
        assert rec.n_sweeps == 4
        for before, after in zip(rec.pre_energy_trace, rec.energy_trace):
            assert after <= before + 1e-10
        assert rec.final_energy == rec.energy_trace[-1]

    def test_deterministic(self):
        a = run_optimization(cfg("fraxis", seed=3))
        b = run_optimization(cfg("fraxis", seed=3))
        assert a.energy_trace == b.energy_trace
        assert a.energy_trace != run_optimization(cfg("fraxis", seed=4)).energy_trace

    def test_zero_threshold_matches_baseline(self):
        base = run_optimization(cfg("fqs", seed=1))
        frz = run_optimization(cfg("fqs", seed=1, freeze=FreezeConfig(0.0)))
        assert frz.energy_trace == base.energy_trace
        assert frz.freeze_events == []
        assert freeze_proportion_trace(frz) == [100.0] * frz.n_sweeps

    def test_frozen_run_spreads_budget(self):
        base = cfg("rotosolve", iterations=6)
        rec = run_optimization(replace(base, freeze=FreezeConfig(0.5, "fixed", 2)))
        assert len(rec.energy_trace) == base.budget
        assert rec.n_sweeps > 6
        # a slot never appears in a sweep it is frozen for
        for e in rec.freeze_events:
            later = {sw for sw, sl in zip(rec.sweep_trace, rec.slot_trace) if sl == e.slot and sw > e.sweep}
            assert not later & {e.sweep + 1, e.sweep + 2}

    def test_infinite_threshold(self):
        rec = run_optimization(cfg("rotosolve", iterations=3, freeze=FreezeConfig(math.inf, "fixed", 1)))
        props = freeze_proportion_trace(rec)
        assert all(p == 0.0 for p in props)
        # every slot freezes each time it is optimized, so it runs every other sweep
        assert rec.n_sweeps == 2 * 3 - 1

    def test_count_only_runs_like_baseline(self):
        base = run_optimization(cfg("rotosolve", seed=2))
        cnt = run_optimization(cfg("rotosolve", seed=2, freeze=FreezeConfig(0.5, count_only=True)))
        assert cnt.energy_trace == base.energy_trace
        assert cnt.freeze_events

    def test_proportion_requires_freezing(self):
        with pytest.raises(ArgumentError):
            freeze_proportion_trace(run_optimization(cfg()))

    def test_probe_count(self):
        rec = run_optimization(cfg("fqs", iterations=2))
        assert rec.probe_count == 10 * rec.config.budget

    def test_unitary_metric_run(self):
        rec = run_optimization(cfg("fraxis", freeze=FreezeConfig(0.05, metric="unitary_norm")))
        assert all(0 <= d <= 1 for tr in rec.distance_traces for _, d in tr)

    def test_record_round_trip(self):
        rec = run_optimization(cfg("fqs", freeze=FreezeConfig(0.1)))
        back = record_from_json(record_to_json(rec, "abc"))
        assert back.final_params == rec.final_params
        assert back.freeze_events == rec.freeze_events
        assert back.config == rec.config


class TestSweep:
    def test_variants(self):
        names = [n for n, _ in sweep_variants(cfg(), [0.01, 0.001], [("fixed", 5), ("incremental", None)])]
        assert names == ["baseline", "T=0.01/fixed5", "T=0.001/fixed5", "T=0.01/incremental",
                         "T=0.001/incremental"]

    def test_experiment_shares_seeds(self):
        rows = sweep_experiment(cfg(iterations=2), [0.01], [("incremental", None)], 3)
        assert len(rows) == 6
        assert [r.seed for r in rows] == [0, 1, 2, 0, 1, 2]
        for a, b in zip(rows[:3], rows[3:]):
            assert a.record.initial_energy == b.record.initial_energy

    def test_parallel_matches_serial(self):
        serial = sweep_experiment(cfg(iterations=2), [0.1], [("fixed", 2)], 2, jobs=1)
        parallel = sweep_experiment(cfg(iterations=2), [0.1], [("fixed", 2)], 2, jobs=2)
        assert [r.final_energy for r in serial] == [r.final_energy for r in parallel]


class TestStats:
    def test_box_examples(self):
        b = box_stats([1, 2, 3, 4, 5])
        assert (b.median, b.q1, b.q3) == (3, 2, 4)
        assert b.outliers == ()
        c = box_stats([2.5] * 6)
        assert c.median == c.mean == c.q1 == c.q3 == c.whisker_low == c.whisker_high == 2.5
        assert c.outliers == ()
        d = box_stats([1, 2, 3, 4, 100])
        assert d.outliers == (100.0,)
        assert d.whisker_high == 4

    def test_box_empty(self):
        with pytest.raises(ArgumentError):
            box_stats([])

    def test_heatmap_fixed_and_zero(self):
        spec = ansatz_for("A", 3, 2, "rotosolve")
        fixed = [run_optimization(cfg(seed=s, freeze=FreezeConfig(0.3, "fixed", 5))) for s in range(2)]
        grid = kappa_heatmap(fixed, spec)
        assert grid.shape == (3, 4)
        assert np.all(grid == 5)
        zero = [run_optimization(cfg(seed=s, freeze=FreezeConfig(0.0))) for s in range(2)]
        assert np.all(kappa_heatmap(zero, spec) == 1)

    def test_heatmap_mismatch(self):
        rec = run_optimization(cfg(freeze=FreezeConfig(0.1)))
        with pytest.raises(ArgumentError):
            kappa_heatmap([rec], ansatz_for("A", 3, 3, "rotosolve"))
        with pytest.raises(ArgumentError):
            kappa_heatmap([run_optimization(cfg())], rec.config.spec())

    def test_scalability_rows(self):
        rows = scalability_experiment([3], "rotosolve", [0.01], runs=1, iterations=2)
        assert [r["variant"] for r in rows] == ["baseline", "T=0.01/incremental"]
        for r in rows:
            assert r["rel_error"] == pytest.approx(r["abs_error"] / abs(r["ground_energy"]))


class TestMutualInformation:
    def test_bell_pair(self):
        s = 1 / math.sqrt(2)
        mi = mutual_information_matrix(from_amplitudes([s, 0, 0, s]))
        assert mi[0, 1] == pytest.approx(2.0, abs=1e-12)
        assert mi[0, 0] == 0.0

    def test_product_state(self):
        assert np.abs(mutual_information_matrix(prepare_zero(4))).max() < 1e-10

    def test_symmetric_nonnegative(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        mi = mutual_information_matrix(from_amplitudes(v))
        assert np.array_equal(mi, mi.T)
        assert mi.min() >= -1e-10

    def test_single_sample_is_single_state(self):
        from freezeq.ansatz import run_circuit
        from freezeq.harness import make_rng

        spec = ansatz_for("B", 3, 2, "fraxis")
        avg = mutual_information_experiment(spec, 1, seed=5)
        direct = mutual_information_matrix(run_circuit(spec, init_params(spec, make_rng(5))))
        assert np.allclose(avg, direct)

    def test_entangler_free(self):
        spec = ansatz_for("C", 4, 2, "rotosolve").without_entanglers()
        assert np.abs(mutual_information_experiment(spec, 20, seed=1)).max() < 1e-10

    def test_neighbor_means(self):
        mi = np.array([[0, 3, 1], [3, 0, 2], [1, 2, 0]], dtype=float)
        assert neighbor_means(mi) == (2.5, 1.0)
