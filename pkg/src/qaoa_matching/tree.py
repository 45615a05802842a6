"""Construction trees: the branch-by-branch symbolic expansion of one mixer sweep.

Each processed edge either leaves a branch alone (``I1``, control off) or
splits it into a stay branch (``I2``, factor ``cos(beta/2)``) and a flip branch
(``X2``, factor ``-i sin(beta/2)``).  Nothing here touches a statevector, so
the trees serve as an independent oracle for :mod:`qaoa_matching.ansatz`.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .ansatz import ControlMode, RunOutput, control_clause
from .graph import EdgeOrdering, Graph, components, edge_adjacency, make_ordering
from .matchings import is_matching
from .statevector import StateVector

BRANCH_CAP = 1 << 20


class TreeCapExceeded(ValueError):
    pass


class InfeasibleStart(ValueError):
    pass


@dataclass(frozen=True)
class Branch:
    labels: tuple[str, ...]
    leaf: int
    amplitude: complex

    def count(self, label: str) -> int:
        return self.labels.count(label)


@dataclass(frozen=True)
class ConstructionTree:
    initial: int
    order: tuple[int, ...]
    prefactor: float
    branches: tuple[Branch, ...]

    @property
    def leaves(self) -> list[int]:
        return [b.leaf for b in self.branches]

    def amplitudes(self) -> dict[int, complex]:
        return {b.leaf: b.amplitude for b in self.branches}

    def to_dict(self, m: int) -> dict:
        from .statevector import ket

        return {
            "initial": ket(self.initial, m),
            "order": list(self.order),
            "prefactor": self.prefactor,
            "branches": [
                {"labels": " ".join(b.labels), "leaf": ket(b.leaf, m),
                 "re": b.amplitude.real, "im": b.amplitude.imag}
                for b in self.branches
            ],
        }


@dataclass(frozen=True)
class Forest:
    trees: tuple[ConstructionTree, ...]

    def to_json(self, m: int) -> str:
        return json.dumps({"trees": [t.to_dict(m) for t in self.trees]}, indent=1)


def _order(g: Graph, ordering) -> tuple[int, ...]:
    if ordering is None or isinstance(ordering, str):
        ordering = make_ordering(g, ordering or "fixed")
    return tuple(ordering)


def build_tree(g: Graph, init: int, beta: float,
               ordering: EdgeOrdering | Sequence[int] | str | None = None,
               mode: ControlMode | str = ControlMode.NEIGHBORHOOD,
               prefactor: float = 1.0, cap: int = BRANCH_CAP) -> ConstructionTree:
    mode = ControlMode.parse(mode)
    if not is_matching(g, init):
        raise InfeasibleStart(f"initial state {init:b} is not a matching")
    order = _order(g, ordering)
    adj = edge_adjacency(g)
    cos, sin = np.cos(beta / 2), np.sin(beta / 2)
    # (labels, state, amplitude)
    layer: list[tuple[tuple[str, ...], int, complex]] = [((), init, complex(prefactor))]
    for e in order:
        nxt = []
        for labels, z, amp in layer:
            if control_clause(z, e, adj, mode):
                # XOR: in nbhd mode a set bit e can be rotated back to 0
                # exact zeros (beta = 0) are pruned so the tree stays minimal
                if cos != 0:
                    nxt.append((labels + ("I2",), z, amp * cos))
                if sin != 0:
                    nxt.append((labels + ("X2",), z ^ (1 << e), amp * (-1j) * sin))
            else:
                nxt.append((labels + ("I1",), z, amp))
        if len(nxt) > cap:
            raise TreeCapExceeded(f"more than {cap} branches")
        layer = nxt
    return ConstructionTree(
        init, order, prefactor,
        tuple(Branch(labels, z, complex(a)) for labels, z, a in layer),
    )


def build_forest(g: Graph, beta: float, ordering=None,
                 mode: ControlMode | str = ControlMode.INCLUDE_SELF) -> Forest:
    """One tree per weight-1 start, each carrying the 1/sqrt(m) prefactor."""
    pre = 1.0 / np.sqrt(g.m)
    return Forest(tuple(build_tree(g, 1 << i, beta, ordering, mode, pre) for i in range(g.m)))


def leaf_census(t: ConstructionTree | Forest) -> dict:
    trees = t.trees if isinstance(t, Forest) else (t,)
    leaves = [z for tree in trees for z in tree.leaves]
    sizes = Counter(int(z).bit_count() for z in leaves)
    return {
        "leaves": len(leaves),
        "distinct": len(set(leaves)),
        "per_size": [sizes.get(k, 0) for k in range(max(sizes, default=0) + 1)],
        "multiplicity": dict(Counter(leaves)),
    }


def combine(f: Forest, rule: str = "incoherent") -> dict:
    """Merge per-tree leaves into one outcome table.

    ``incoherent`` adds squared magnitudes tree by tree; ``coherent`` adds
    amplitudes first.  Returns ``{"probs": ..., "norm2": ...}`` and, for the
    coherent rule, ``"amps"``.
    """
    if rule == "incoherent":
        probs: dict[int, float] = defaultdict(float)
        for tree in f.trees:
            for b in tree.branches:
                probs[b.leaf] += abs(b.amplitude) ** 2
        return {"probs": dict(probs), "norm2": sum(probs.values())}
    if rule == "coherent":
        amps: dict[int, complex] = defaultdict(complex)
        for tree in f.trees:
            for b in tree.branches:
                amps[b.leaf] += b.amplitude
        probs = {z: abs(a) ** 2 for z, a in amps.items()}
        return {"probs": probs, "amps": dict(amps), "norm2": sum(probs.values())}
    raise ValueError(f"unknown combine rule {rule!r}")


def _amp_deviation(amps: dict[int, complex], sv: np.ndarray, scale: float = 1.0) -> float:
    expected = np.zeros_like(sv)
    for z, a in amps.items():
        expected[z] = a / scale
    return float(np.max(np.abs(expected - sv)))


def tree_deviation(t: ConstructionTree, sv: StateVector) -> float:
    """Max |tree amplitude - statevector amplitude| over all basis states."""
    return _amp_deviation(t.amplitudes(), sv.amps)


def verify_against_statevector(obj: ConstructionTree | Forest, oracle: StateVector | RunOutput) -> float:
    """Largest amplitude mismatch between a tree (or forest) and a simulated run.

    * tree vs StateVector or coherent RunOutput (raw, pre-renormalisation state)
    * forest vs mixture RunOutput: tree ``i`` against the ``i``-th per-start run
    * forest vs coherent RunOutput: coherently combined leaves against the raw state
    """
    if isinstance(obj, ConstructionTree):
        sv = oracle if isinstance(oracle, StateVector) else oracle.raw_state
        return tree_deviation(obj, sv)
    if isinstance(oracle, StateVector):
        return _amp_deviation(combine(obj, "coherent")["amps"], oracle.amps)
    if oracle.tree_states:
        dev = 0.0
        for tree, sv, n2 in zip(obj.trees, oracle.tree_states, oracle.tree_raw_norm2):
            raw = sv.amps * np.sqrt(n2)
            dev = max(dev, _amp_deviation(tree.amplitudes(), raw, scale=tree.prefactor))
        return dev
    return _amp_deviation(combine(obj, "coherent")["amps"], oracle.raw_state.amps)


@dataclass(frozen=True)
class Eq15Row:
    matching: int
    size: int
    tree: int
    d: int
    alpha_w: float
    alpha_0: float
    ratio: float
    predicted: float

    @property
    def rel_dev(self) -> float:
        return abs(self.ratio - self.predicted) / self.predicted

    @property
    def d_in_claimed_range(self) -> bool:
        return 0 <= self.d <= self.size - 1


def eq15_table(g: Graph, beta: float) -> list[Eq15Row]:
    """Per (matching, contributing W1 tree): measured vs predicted amplitude ratio.

    ``d`` counts sweep positions where the empty-start branch took ``I2`` but
    the W1 branch took ``I1``.
    """
    if not (g.is_two_regular() and len(components(g)) == 1):
        raise ValueError("eq15_table needs a single cycle")
    order = make_ordering(g, "fixed")
    m = g.m
    empty = {b.leaf: b for b in build_tree(g, 0, beta, order).branches}
    forest = build_forest(g, beta, order, ControlMode.INCLUDE_SELF)
    sin, cos = np.sin(beta / 2), np.cos(beta / 2)
    rows = []
    for i, tree in enumerate(forest.trees):
        pos_i = order.order.index(i)
        for b in tree.branches:
            e = empty[b.leaf]
            d = sum(1 for j, (lw, l0) in enumerate(zip(b.labels, e.labels))
                    if j != pos_i and l0 == "I2" and lw == "I1")
            a_w, a_0 = abs(b.amplitude), abs(e.amplitude)
            rows.append(Eq15Row(
                b.leaf, b.leaf.bit_count(), i, d, a_w, a_0, a_w / a_0,
                1.0 / (np.sqrt(m) * sin * cos**d),
            ))
    return sorted(rows, key=lambda r: (r.size, r.matching, r.tree))

