"""Gate-freezing: distances between consecutive gate settings and the
fixed-kappa / incremental-kappa schedulers.

A gate whose last update moved it by less than the threshold ``T`` is
skipped for the next ``kappa`` sweeps. In incremental mode every gate keeps
its own ``kappa_d``, starting at 1 and growing by one each time it freezes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Angle, Axis, Quaternion, gate_unitary
from .errors import ArgumentError, ConfigurationError

MODES = ("fixed", "incremental")
METRICS = ("parameter", "unitary_norm")


def angle_distance(prev: float, new: float) -> float:
    """Separation of two angles on the circle, in ``[0, pi]``."""
    d = abs(prev - new)
    return min(d, 2 * math.pi - d)


def quaternion_distance(prev, new) -> float:
    """Great-circle distance with ``q`` and ``-q`` identified, in ``[0, pi/2]``.

    Fraxis axes enter as ``(0, n_x, n_y, n_z)``.
    """
    dot = float(np.dot(np.asarray(prev, dtype=float), np.asarray(new, dtype=float)))
    dg = math.acos(min(1.0, max(-1.0, dot)))
    return min(dg, math.pi - dg)


def unitary_distance_nqubit(prev: np.ndarray, new: np.ndarray) -> float:
    """Phase-invariant Frobenius distance normalized to ``[0, 1]``.

    Equals ``sqrt(2 dim - 2 |Tr(prev^dag new)|) / sqrt(2 dim)`` for unitaries.
    It is evaluated as ``||prev - e^{i phi} new||_F`` at the optimal phase,
    which stays accurate when the two gates nearly coincide.
    """
    prev = np.asarray(prev, dtype=np.complex128)
    new = np.asarray(new, dtype=np.complex128)
    if prev.shape != new.shape or prev.ndim != 2 or prev.shape[0] != prev.shape[1]:
        raise ArgumentError(f"unitaries must be square and equal-sized, got {prev.shape} and {new.shape}")
    dim = prev.shape[0]
    overlap = np.vdot(prev, new)  # Tr(prev^dag new)
    # below ~1e-150 the phase is irrelevant (d is 1 to double precision) and the division may overflow
    mag = abs(overlap)
    phase = overlap / mag if mag > 1e-150 else 1.0
    d = float(np.linalg.norm(prev - np.conj(phase) * new)) / math.sqrt(2 * dim)
    return min(d, 1.0)


def unitary_distance(prev: np.ndarray, new: np.ndarray) -> float:
    """Single-qubit case: ``sqrt(4 - 2|Tr(U^dag V)|) / 2``."""
    if np.shape(prev) != (2, 2) or np.shape(new) != (2, 2):
        raise ArgumentError("unitary_distance expects 2x2 matrices")
    return unitary_distance_nqubit(prev, new)


def _as_quaternion(p) -> np.ndarray:
    if isinstance(p, (Axis, Quaternion)):
        return p.as_quaternion()
    raise ArgumentError(f"no quaternion form for {p!r}")


def param_distance(prev, new, metric: str = "parameter", generator: str = "X") -> float:
    """Distance between two settings of the same gate under ``metric``."""
    if type(prev) is not type(new):
        raise ArgumentError("cannot compare parameters of different kinds")
    if metric == "parameter":
        if isinstance(prev, Angle):
            return angle_distance(prev.theta, new.theta)
        return quaternion_distance(_as_quaternion(prev), _as_quaternion(new))
    if metric == "unitary_norm":
        return unitary_distance(gate_unitary(prev, generator), gate_unitary(new, generator))
    raise ArgumentError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class FreezeConfig:
    """Freezing threshold, kappa schedule and distance metric.

    ``count_only`` keeps the kappa bookkeeping and event log but never skips
    a gate, which gives freeze statistics for an unfrozen run.
    """

    threshold: float
    mode: str = "incremental"
    kappa: int = 1
    metric: str = "parameter"
    count_only: bool = False

    def __post_init__(self):
        if not (self.threshold >= 0) or math.isnan(self.threshold):
            raise ConfigurationError(f"threshold must be >= 0, got {self.threshold}")
        if self.mode not in MODES:
            raise ConfigurationError(f"freeze mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "fixed" and (int(self.kappa) != self.kappa or self.kappa < 1):
            raise ConfigurationError(f"fixed kappa must be a positive integer, got {self.kappa}")
        if self.metric not in METRICS:
            raise ConfigurationError(f"freeze metric must be one of {METRICS}, got {self.metric!r}")

    @property
    def label(self) -> str:
        return f"fixed{self.kappa}" if self.mode == "fixed" else "incremental"


@dataclass(frozen=True)
class FreezeEvent:
    sweep: int
    slot: int
    distance: float
    kappa: int  # freeze length applied by this event


@dataclass
class FreezeState:
    frozen_remaining: np.ndarray
    kappa: np.ndarray
    events: list = field(default_factory=list)

    @classmethod
    def fresh(cls, n_slots: int, config: FreezeConfig) -> FreezeState:
        k0 = config.kappa if config.mode == "fixed" else 1
        return cls(np.zeros(n_slots, dtype=np.int64), np.full(n_slots, k0, dtype=np.int64))


def scheduler_should_optimize(state: FreezeState, slot: int) -> bool:
    return bool(state.frozen_remaining[slot] == 0)


def scheduler_record_update(state: FreezeState, slot: int, distance: float, config: FreezeConfig,
                            sweep: int = 0) -> FreezeState:
    """Freeze ``slot`` if its last move was below the threshold."""
    if distance < 0:
        raise ArgumentError(f"distance must be non-negative, got {distance}")
    if distance < config.threshold:
        k = int(state.kappa[slot])
        if not config.count_only:
            state.frozen_remaining[slot] = k
        if config.mode == "incremental":
            state.kappa[slot] = k + 1
        state.events.append(FreezeEvent(sweep, slot, float(distance), k))
    return state


def sweep_tick(state: FreezeState, exclude=()) -> FreezeState:
    """End of a sweep: every positive counter drops by one.

    Slots listed in ``exclude`` (those frozen during the sweep that just
    ended) keep their full count, so a gate frozen for ``kappa`` is skipped
    in exactly the next ``kappa`` sweeps.
    """
    mask = state.frozen_remaining > 0
    if len(exclude):
        mask[np.asarray(list(exclude), dtype=np.int64)] = False
    np.subtract(state.frozen_remaining, 1, out=state.frozen_remaining, where=mask)
    return state
