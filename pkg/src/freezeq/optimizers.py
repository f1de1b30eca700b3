"""Sequential single-gate updates: Rotosolve, Fraxis (angle fixed at pi) and FQS.

Each update probes the energy with only gate ``d`` substituted, solves the
closed-form per-gate problem, writes the new parameter and confirms the
predicted energy with one more evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Angle, Axis, CircuitEvaluator, Quaternion, axis_gate, quaternion_gate, rotation, wrap_angle
from .eigen import symmetric_eigen_lowest
from .errors import ArgumentError, NumericError

CONFIRM_TOL = 1e-9
OPTIMIZERS = ("rotosolve", "fraxis", "fqs")
PROBES_PER_UPDATE = {"rotosolve": 3, "fraxis": 6, "fqs": 10}

_S2 = 1.0 / math.sqrt(2.0)
# Fraxis probe axes: x, y, z, (x+y)/√2, (x+z)/√2, (y+z)/√2
FRAXIS_PROBE_AXES = (
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (_S2, _S2, 0.0),
    (_S2, 0.0, _S2),
    (0.0, _S2, _S2),
)
_QPAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass
class GateEvalContext:
    evaluator: CircuitEvaluator
    params: list
    d: int

    def __post_init__(self):
        if not 0 <= self.d < self.evaluator.spec.n_slots:
            raise ArgumentError(f"slot {self.d} out of range")

    def probe(self, gate) -> float:
        return self.evaluator.probe_slot(self.params, self.d, gate)


@dataclass(frozen=True)
class FraxisMoments:
    r_x: float
    r_y: float
    r_z: float
    r_xy: float
    r_xz: float
    r_yz: float

    def matrix(self) -> np.ndarray:
        """Symmetric 3x3 matrix whose lowest eigenpair gives the optimal axis."""
        r = (self.r_x, self.r_y, self.r_z)
        mixed = {(0, 1): self.r_xy, (0, 2): self.r_xz, (1, 2): self.r_yz}
        m = np.diag([2.0 * v for v in r])
        for (i, j), rij in mixed.items():
            m[i, j] = m[j, i] = 2.0 * rij - r[i] - r[j]
        return m


@dataclass
class UpdateResult:
    """Trace record of one gate update."""

    slot: int
    param: object
    energy: float            # confirmed by re-evaluation
    predicted_energy: float
    probe_energies: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        p = self.param
        value = [p.theta] if isinstance(p, Angle) else list(p.n if isinstance(p, Axis) else p.q)
        return {
            "slot": self.slot,
            "param": value,
            "energy": self.energy,
            "predicted_energy": self.predicted_energy,
            "probe_energies": list(self.probe_energies),
        }


def _confirm(ctx: GateEvalContext, new_param, predicted: float, probes) -> UpdateResult:
    ctx.params[ctx.d] = new_param
    energy = ctx.evaluator.energy(ctx.params, confirm=True)
    if abs(energy - predicted) > CONFIRM_TOL:
        raise NumericError(
            f"slot {ctx.d}: predicted energy {predicted!r} but re-evaluation gave {energy!r}"
        )
    return UpdateResult(ctx.d, new_param, energy, predicted, tuple(probes))


def _require(ctx: GateEvalContext, kind) -> None:
    p = ctx.params[ctx.d]
    if not isinstance(p, kind):
        raise ArgumentError(f"slot {ctx.d} holds {type(p).__name__}, expected {kind.__name__}")


def rotosolve_step(ctx: GateEvalContext) -> UpdateResult:
    """Jump to the minimum of the sinusoidal landscape of one rotation angle."""
    _require(ctx, Angle)
    gen = ctx.evaluator.spec.slots[ctx.d].generator
    m0 = ctx.probe(rotation(0.0, gen))
    mp = ctx.probe(rotation(math.pi / 2, gen))
    mm = ctx.probe(rotation(-math.pi / 2, gen))
    # <M>(theta) = a cos(theta) + b sin(theta) + c
    a = (2.0 * m0 - mp - mm) / 2.0
    b = (mp - mm) / 2.0
    c = (mp + mm) / 2.0
    theta = wrap_angle(-math.pi / 2 - math.atan2(2.0 * m0 - mp - mm, mp - mm))
    predicted = c - math.hypot(a, b)
    return _confirm(ctx, Angle(theta), predicted, (m0, mp, mm))


def fraxis_moments(ctx: GateEvalContext) -> FraxisMoments:
    _require(ctx, Axis)
    return FraxisMoments(*(ctx.probe(axis_gate(n)) for n in FRAXIS_PROBE_AXES))


def fraxis_step(ctx: GateEvalContext) -> UpdateResult:
    """Pick the rotation axis (angle fixed at pi) minimizing the energy."""
    moments = fraxis_moments(ctx)
    lam, vec = symmetric_eigen_lowest(moments.matrix())
    new = Axis(tuple(vec / np.linalg.norm(vec)))
    probes = (moments.r_x, moments.r_y, moments.r_z, moments.r_xy, moments.r_xz, moments.r_yz)
    return _confirm(ctx, new, lam / 2.0, probes)


def _fqs_probes(ctx: GateEvalContext):
    _require(ctx, Quaternion)
    s = np.zeros((4, 4))
    raw = []
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = 1.0
        s[mu, mu] = ctx.probe(quaternion_gate(e))
        raw.append(float(s[mu, mu]))
    for mu, nu in _QPAIRS:
        e = np.zeros(4)
        e[mu] = e[nu] = _S2
        m = ctx.probe(quaternion_gate(e))
        raw.append(m)
        s[mu, nu] = s[nu, mu] = m - 0.5 * (s[mu, mu] + s[nu, nu])
    return s, tuple(raw)


def fqs_smatrix(ctx: GateEvalContext) -> np.ndarray:
    """Real symmetric 4x4 matrix ``S`` with ``E(q) = q^T S q``, from ten probes."""
    return _fqs_probes(ctx)[0]


def fqs_step(ctx: GateEvalContext) -> UpdateResult:
    """Pick the full single-qubit unitary (unit quaternion) minimizing the energy."""
    s, probes = _fqs_probes(ctx)
    lam, vec = symmetric_eigen_lowest(s)
    new = Quaternion(tuple(vec / np.linalg.norm(vec)))
    return _confirm(ctx, new, lam, probes)


STEPS = {"rotosolve": rotosolve_step, "fraxis": fraxis_step, "fqs": fqs_step}


def optimizer_step(name: str):
    try:
        return STEPS[name]
    except KeyError:
        raise ArgumentError(f"unknown optimizer {name!r}; expected one of {OPTIMIZERS}") from None
