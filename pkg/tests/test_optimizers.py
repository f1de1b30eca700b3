import math

import numpy as np
import pytest

from freezeq.ansatz import Angle, Axis, CircuitEvaluator, Quaternion, build_ansatz, evaluate_energy
from freezeq.errors import ArgumentError
from freezeq.harness import ansatz_for, init_params
from freezeq.optimizers import (
    PROBES_PER_UPDATE,
    GateEvalContext,
    fqs_smatrix,
    fqs_step,
    fraxis_moments,
    fraxis_step,
    optimizer_step,
    rotosolve_step,
)
from freezeq.simcore import PauliSumOperator

Z1 = PauliSumOperator.from_terms([(1.0, "Z")])


def one_qubit_ctx(kind, param):
    if kind == "rotosolve":
        spec = build_ansatz("A_roto", 1, 1)
        params = [param, Angle(0.0)]
    else:
        spec = build_ansatz("A_free", 1, 1, free_gate="Free" if kind == "fraxis" else "Quaternion")
        params = [param]
    return GateEvalContext(CircuitEvaluator(spec, Z1), params, 0)


def random_instance(optimizer, n, seed, layers=2):
    rng = np.random.default_rng(seed)
    labels = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(8)]
    H = PauliSumOperator.from_terms(list(zip(rng.standard_normal(8), labels)), n_qubits=n)
    spec = ansatz_for("A", n, layers, optimizer)
    params = init_params(spec, seed)
    d = int(rng.integers(spec.n_slots))
    return spec, H, params, d


class TestRotosolve:
    @pytest.mark.parametrize("start", [0.0, 1.0, -2.5, math.pi])
    def test_single_z(self, start):
        ctx = one_qubit_ctx("rotosolve", Angle(start))
        res = rotosolve_step(ctx)
        assert res.probe_energies == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)
        assert res.param.theta == pytest.approx(math.pi)
        assert res.energy == pytest.approx(-1.0, abs=1e-12)

    def test_flat_landscape(self):
        spec = build_ansatz("A_roto", 1, 1)
        H = PauliSumOperator.from_terms([], constant_offset=0.25, n_qubits=1)
        ctx = GateEvalContext(CircuitEvaluator(spec, H), [Angle(0.3), Angle(0.0)], 0)
        res = rotosolve_step(ctx)
        assert res.param.theta == pytest.approx(-math.pi / 2)
        assert res.energy == pytest.approx(0.25, abs=1e-10)

    @pytest.mark.parametrize("seed", range(5))
    def test_grid_oracle(self, seed):
        spec, H, params, d = random_instance("rotosolve", 3, seed)
        gen = spec.slots[d].generator
        res = rotosolve_step(GateEvalContext(CircuitEvaluator(spec, H), list(params), d))
        ev = CircuitEvaluator(spec, H)
        from freezeq.ansatz import rotation

        grid = np.linspace(-math.pi, math.pi, 2001)
        best = min(ev.probe_slot(params, d, rotation(t, gen)) for t in grid)
        assert res.energy <= best + 1e-6

    def test_wrong_param_kind(self):
        ctx = one_qubit_ctx("fraxis", Axis((1, 0, 0)))
        with pytest.raises(ArgumentError):
            rotosolve_step(ctx)


class TestFraxis:
    def test_single_z_moments(self):
        m = fraxis_moments(one_qubit_ctx("fraxis", Axis((0, 0, 1))))
        got = (m.r_x, m.r_y, m.r_z, m.r_xy, m.r_xz, m.r_yz)
        assert got == pytest.approx((-1, -1, 1, -1, 0, 0), abs=1e-12)
        assert np.allclose(m.matrix(), np.diag([-2, -2, 2]), atol=1e-12)

    def test_single_z_step(self):
        res = fraxis_step(one_qubit_ctx("fraxis", Axis((0, 0, 1))))
        assert res.energy == pytest.approx(-1.0, abs=1e-12)
        assert abs(res.param.n[2]) < 1e-12
        # degenerate x-y eigenspace resolves to the lowest index
        assert res.param.n == pytest.approx((1.0, 0.0, 0.0), abs=1e-12)

    def test_identity_observable(self):
        spec = build_ansatz("A_free", 2, 1)
        H = PauliSumOperator.from_terms([], constant_offset=0.7, n_qubits=2)
        params = init_params(spec, 0)
        m = fraxis_moments(GateEvalContext(CircuitEvaluator(spec, H), params, 1))
        assert (m.r_x, m.r_y, m.r_z, m.r_xy, m.r_xz, m.r_yz) == pytest.approx((0.7,) * 6, abs=1e-12)

    def test_fixed_point(self):
        spec, H, params, d = random_instance("fraxis", 2, 3)
        ctx = GateEvalContext(CircuitEvaluator(spec, H), params, d)
        first = fraxis_step(ctx)
        again = fraxis_step(ctx)
        assert again.energy == pytest.approx(first.energy, abs=1e-10)

    def test_sampled_axes_oracle(self):
        spec, H, params, d = random_instance("fraxis", 2, 8)
        res = fraxis_step(GateEvalContext(CircuitEvaluator(spec, H), list(params), d))
        ev = CircuitEvaluator(spec, H)
        from freezeq.ansatz import axis_gate

        rng = np.random.default_rng(0)
        v = rng.standard_normal((2000, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        best = min(ev.probe_slot(params, d, axis_gate(n)) for n in v)
        assert res.energy <= best + 1e-6


class TestFQS:
    def test_s_identity_entry(self):
        spec, H, params, d = random_instance("fqs", 3, 1)
        ev = CircuitEvaluator(spec, H)
        S = fqs_smatrix(GateEvalContext(ev, params, d))
        trial = list(params)
        trial[d] = Quaternion((1, 0, 0, 0))
        assert S[0, 0] == pytest.approx(evaluate_energy(spec, trial, H), abs=1e-12)
        assert np.array_equal(S, S.T)

    def test_single_z(self):
        ctx = one_qubit_ctx("fqs", Quaternion((1, 0, 0, 0)))
        S = fqs_smatrix(ctx)
        assert np.allclose(np.diag(S), [1, -1, -1, 1], atol=1e-12)
        res = fqs_step(ctx)
        assert res.energy == pytest.approx(-1.0, abs=1e-12)
        q = np.asarray(res.param.q)
        assert abs(q[0]) < 1e-12 and abs(q[3]) < 1e-12

    def test_quadratic_form(self):
        spec, H, params, d = random_instance("fqs", 3, 6)
        ev = CircuitEvaluator(spec, H)
        S = fqs_smatrix(GateEvalContext(ev, params, d))
        rng = np.random.default_rng(1)
        for _ in range(10):
            q = rng.standard_normal(4)
            q /= np.linalg.norm(q)
            trial = list(params)
            trial[d] = Quaternion(tuple(q))
            assert q @ S @ q == pytest.approx(evaluate_energy(spec, trial, H), abs=1e-10)

    def test_identity_probe_matches_current_energy(self):
        spec, H, params, d = random_instance("fqs", 2, 2)
        params[d] = Quaternion((1, 0, 0, 0))
        ev = CircuitEvaluator(spec, H)
        S = fqs_smatrix(GateEvalContext(ev, params, d))
        assert S[0, 0] == pytest.approx(evaluate_energy(spec, params, H), abs=1e-12)


@pytest.mark.parametrize("name", ["rotosolve", "fraxis", "fqs"])
def test_probe_counts_and_descent(name):
    spec, H, params, _ = random_instance(name, 3, 42)
    ev = CircuitEvaluator(spec, H)
    step = optimizer_step(name)
    energy = ev.energy(params)
    for d in range(spec.n_slots):
        before = ev.n_probes
        res = step(GateEvalContext(ev, params, d))
        assert ev.n_probes - before == PROBES_PER_UPDATE[name]
        assert res.energy <= energy + 1e-10
        assert res.energy == pytest.approx(res.predicted_energy, abs=1e-9)
        energy = res.energy
    assert ev.n_confirms == spec.n_slots


def test_unknown_optimizer():
    with pytest.raises(ArgumentError):
        optimizer_step("adam")
