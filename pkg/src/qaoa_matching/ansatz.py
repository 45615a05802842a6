"""Constrained mixer, phase separator and the layered QAOA+ run on edge qubits.

Rotation convention: a permitted edge rotation sends
``|z> -> cos(beta/2)|z> - i sin(beta/2)|z xor e>``.

Two control clauses are supported:

* ``ControlMode.NEIGHBORHOOD`` -- the rotation fires when no adjacent edge is
  selected.  The gate is a controlled RX and hence unitary.
* ``ControlMode.INCLUDE_SELF`` -- additionally requires the edge itself to be
  unselected.  The images of ``|z>`` (control on) and ``|z + e>`` (control
  off) overlap, so the operator is linear but not unitary.  Coherent runs
  record the raw norm and renormalise once, after the last round.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import EdgeOrdering, Graph, edge_adjacency, make_ordering
from .statevector import (
    MeasurementDistribution,
    StateVector,
    basis_state,
    check_cap,
    norm2,
    prepare_initial,
    probabilities,
)


class ControlMode(enum.Enum):
    NEIGHBORHOOD = "nbhd"
    INCLUDE_SELF = "self"

    @classmethod
    def parse(cls, text: "str | ControlMode") -> "ControlMode":
        if isinstance(text, cls):
            return text
        aliases = {"nbhd": cls.NEIGHBORHOOD, "neighborhood": cls.NEIGHBORHOOD,
                   "self": cls.INCLUDE_SELF, "include_self": cls.INCLUDE_SELF}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown control mode {text!r}") from None


class Semantics(enum.Enum):
    COHERENT = "coherent"
    MIXTURE = "mixture"

    @classmethod
    def parse(cls, text: "str | Semantics") -> "Semantics":
        return text if isinstance(text, cls) else cls(text.lower())


class InvalidCombination(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    rounds: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.rounds:
            raise ValueError("schedule needs at least one round")

    @classmethod
    def of(cls, pairs: Iterable[Sequence[float]]) -> "Schedule":
        return cls(tuple((float(g), float(b)) for g, b in pairs))

    @classmethod
    def single(cls, beta: float, gamma: float = 0.0) -> "Schedule":
        return cls(((float(gamma), float(beta)),))

    @classmethod
    def constant(cls, beta: float, p: int, gamma: float = 0.0) -> "Schedule":
        return cls(((float(gamma), float(beta)),) * p)

    @property
    def p(self) -> int:
        return len(self.rounds)

    def check_theorem_range(self) -> bool:
        ok = all(0.0 < b < np.pi for _, b in self.rounds)
        if not ok:
            warnings.warn("beta outside (0, pi); theorem guarantees do not apply", stacklevel=2)
        return ok


def control_clause(z: int, e: int, adj: Sequence[frozenset[int]], mode: ControlMode) -> int:
    if any(z >> j & 1 for j in adj[e]):
        return 0
    if mode is ControlMode.INCLUDE_SELF and z >> e & 1:
        return 0
    return 1


def _weights(m: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << m, dtype=np.int64))


def _phase_inplace(amps: np.ndarray, m: int, gamma: float) -> None:
    if gamma == 0.0:
        return
    amps *= np.exp(-1j * gamma * np.arange(m + 1))[_weights(m)]


def _mix_edge_inplace(amps: np.ndarray, m: int, e: int, nbhd: Iterable[int],
                      c: float, s: float, include_self: bool) -> None:
    # Axis m-1-j of the (2,)*m view holds bit j; fixing neighbour axes to 0
    # keeps only basis states where the control clause on neighbours holds.
    t = amps.reshape((2,) * m)
    idx: list = [slice(None)] * m
    # length-1 slices, not ints, so the result stays a view even when every axis is fixed
    for j in nbhd:
        idx[m - 1 - j] = slice(0, 1)
    idx[m - 1 - e] = slice(0, 1)
    v0 = t[tuple(idx)]
    idx[m - 1 - e] = slice(1, 2)
    v1 = t[tuple(idx)]
    a0 = v0.copy()
    if include_self:
        v0 *= c
        v1 += (-1j * s) * a0
    else:
        v0 *= c
        v0 += (-1j * s) * v1
        v1 *= c
        v1 += (-1j * s) * a0


def apply_phase_separator(sv: StateVector, gamma: float) -> StateVector:
    out = sv.copy()
    _phase_inplace(out.amps, out.m, gamma)
    return out


def apply_mixer_edge(sv: StateVector, e: int, beta: float,
                     adj: Sequence[frozenset[int]], mode: ControlMode) -> StateVector:
    if not 0 <= e < sv.m:
        raise IndexError(f"edge {e} outside 0..{sv.m - 1}")
    out = sv.copy()
    _mix_edge_inplace(out.amps, out.m, e, adj[e], np.cos(beta / 2), np.sin(beta / 2),
                      mode is ControlMode.INCLUDE_SELF)
    return out


def _sweep_inplace(amps, m, beta, order, adj, mode) -> None:
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    inc = mode is ControlMode.INCLUDE_SELF
    for e in order:
        _mix_edge_inplace(amps, m, e, adj[e], c, s, inc)


def apply_mixer_sweep(sv: StateVector, beta: float, ordering: EdgeOrdering | Sequence[int],
                      adj: Sequence[frozenset[int]], mode: ControlMode) -> tuple[StateVector, float]:
    """One pass of edge rotations in ``ordering`` order; returns (state, norm^2)."""
    order = list(ordering)
    if sorted(order) != list(range(sv.m)):
        raise ValueError("ordering is not a permutation of the edges")
    out = sv.copy()
    _sweep_inplace(out.amps, out.m, beta, order, adj, mode)
    return out, norm2(out)


@dataclass
class RunOutput:
    semantics: Semantics
    init: str
    mode: ControlMode
    distribution: MeasurementDistribution
    raw_norm2: float
    norm_trace: list[float]
    # coherent
    state: StateVector | None = None
    raw_state: StateVector | None = None
    # mixture: one normalised run per weight-1 start, edge i -> tree i
    tree_states: list[StateVector] = field(default_factory=list)
    tree_raw_norm2: list[float] = field(default_factory=list)
    # optional per-round snapshots (index 0 = initial state)
    round_distributions: list[MeasurementDistribution] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.distribution.m


def _evolve(amps: np.ndarray, m: int, schedule: Schedule, order, adj, mode,
            snapshots: list[np.ndarray] | None) -> list[float]:
    trace = []
    if snapshots is not None:
        snapshots.append(probabilities(StateVector(m, amps)) / np.vdot(amps, amps).real)
    for gamma, beta in schedule.rounds:
        _phase_inplace(amps, m, gamma)
        _sweep_inplace(amps, m, beta, order, adj, mode)
        n2 = float(np.vdot(amps, amps).real)
        trace.append(n2)
        if snapshots is not None:
            snapshots.append(probabilities(StateVector(m, amps)) / n2)
    return trace


def run_qaoa_plus(g: Graph, init: str, schedule: Schedule,
                  mode: ControlMode | str = ControlMode.NEIGHBORHOOD,
                  ordering: EdgeOrdering | Sequence[int] | str | None = None,
                  semantics: Semantics | str = Semantics.COHERENT,
                  record_rounds: bool = False) -> RunOutput:
    """Run ``p`` rounds of phase separator then mixer sweep from ``init``.

    Mixture semantics evolves each weight-1 start ``|e_i>`` on its own and
    averages the normalised output distributions with weight ``1/m``.
    """
    mode = ControlMode.parse(mode)
    semantics = Semantics.parse(semantics)
    check_cap(g.m)
    if ordering is None or isinstance(ordering, str):
        ordering = make_ordering(g, ordering or "fixed")
    order = list(ordering)
    if sorted(order) != list(range(g.m)):
        raise ValueError("ordering is not a permutation of the edges")
    adj = edge_adjacency(g)
    m = g.m

    if semantics is Semantics.COHERENT:
        sv = prepare_initial(init, m)
        snaps: list[np.ndarray] | None = [] if record_rounds else None
        trace = _evolve(sv.amps, m, schedule, order, adj, mode, snaps)
        raw = sv
        n2 = trace[-1]
        final = StateVector(m, raw.amps / np.sqrt(n2))
        return RunOutput(
            semantics, init, mode,
            distribution=MeasurementDistribution(m, probabilities(final)),
            raw_norm2=n2, norm_trace=trace, state=final, raw_state=raw,
            round_distributions=[MeasurementDistribution(m, p) for p in snaps or []],
        )

    if init != "w1":
        raise InvalidCombination("mixture semantics is defined for the w1 initial state only")
    probs = np.zeros(1 << m)
    tree_states, tree_n2, traces = [], [], []
    round_sums: list[np.ndarray] | None = None
    for i in range(m):
        sv = basis_state(m, 1 << i)
        snaps = [] if record_rounds else None
        trace = _evolve(sv.amps, m, schedule, order, adj, mode, snaps)
        final = StateVector(m, sv.amps / np.sqrt(trace[-1]))
        tree_states.append(final)
        tree_n2.append(trace[-1])
        traces.append(trace)
        probs += probabilities(final)
        if snaps is not None:
            round_sums = snaps if round_sums is None else [a + b for a, b in zip(round_sums, snaps)]
    probs /= m
    return RunOutput(
        semantics, init, mode,
        distribution=MeasurementDistribution(m, probs),
        raw_norm2=float(np.mean(tree_n2)),
        norm_trace=[float(x) for x in np.mean(traces, axis=0)],
        tree_states=tree_states, tree_raw_norm2=tree_n2,
        round_distributions=[MeasurementDistribution(m, r / m) for r in round_sums or []],
    )
