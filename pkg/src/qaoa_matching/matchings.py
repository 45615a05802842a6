"""Brute-force matching oracle and closed-form matching counts.

Edge subsets use the same integer encoding as basis states: bit ``i`` set
means edge ``i`` is selected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .graph import Graph, GraphError, neighbor_masks

ENUMERATION_CAP = 24


class EnumerationCapExceeded(ValueError):
    pass


class NotAMatching(ValueError):
    pass


def is_matching(g: Graph, s: int) -> bool:
    used = 0
    for i, (u, v) in enumerate(g.edges):
        if s >> i & 1:
            bits = (1 << u) | (1 << v)
            if used & bits:
                return False
            used |= bits
    return True


def is_maximal(g: Graph, s: int) -> bool:
    if not is_matching(g, s):
        raise NotAMatching(f"{s:b} is not a matching")
    for i in range(g.m):
        if not s >> i & 1 and is_matching(g, s | (1 << i)):
            return False
    return True


def matching_mask(g: Graph, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Boolean array over all 2^m subsets, true where the subset is a matching."""
    if g.m > cap:
        raise EnumerationCapExceeded(f"m={g.m} exceeds enumeration cap {cap}")
    z = np.arange(1 << g.m, dtype=np.int64)
    ok = np.ones(z.shape, dtype=bool)
    for i, nmask in enumerate(neighbor_masks(g)):
        ok &= ~(((z >> i) & 1).astype(bool) & ((z & nmask) != 0))
    return ok


def enumerate_matchings(g: Graph, cap: int = ENUMERATION_CAP) -> list[int]:
    """All matchings, sorted by (size, integer value)."""
    found = np.flatnonzero(matching_mask(g, cap))
    sizes = np.bitwise_count(found)
    order = np.lexsort((found, sizes))
    return [int(x) for x in found[order]]


@dataclass(frozen=True)
class MatchingCounts:
    phi_k: tuple[int, ...]

    @property
    def nu(self) -> int:
        return len(self.phi_k) - 1

    @property
    def phi(self) -> int:
        return sum(self.phi_k)

    @property
    def phi_plus(self) -> int:
        return sum(k * c for k, c in enumerate(self.phi_k))

    def to_dict(self) -> dict:
        return {"phi_k": list(self.phi_k), "phi": self.phi, "phi_plus": self.phi_plus, "nu": self.nu}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "MatchingCounts":
        counts = cls(tuple(int(x) for x in data["phi_k"]))
        for key in ("phi", "phi_plus", "nu"):
            if key in data and data[key] != getattr(counts, key):
                raise ValueError(f"inconsistent {key}: {data[key]} != {getattr(counts, key)}")
        return counts


def _trim(vec: Sequence[int]) -> tuple[int, ...]:
    vec = list(vec)
    while len(vec) > 1 and vec[-1] == 0:
        vec.pop()
    return tuple(vec)


def matching_counts(g: Graph, cap: int = ENUMERATION_CAP) -> MatchingCounts:
    found = np.flatnonzero(matching_mask(g, cap))
    hist = np.bincount(np.bitwise_count(found), minlength=1)
    return MatchingCounts(_trim(int(x) for x in hist))


def cycle_count(n: int, k: int) -> int:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > n // 2:
        return 0
    num = n * comb(n - k, k)
    assert num % (n - k) == 0
    return num // (n - k)


def path_count(n_vertices: int, k: int) -> int:
    """k-matchings of the path on ``n_vertices`` vertices (n_vertices - 1 edges)."""
    if n_vertices < 2:
        raise GraphError(f"path needs >= 2 vertices, got {n_vertices}")
    if k < 0:
        raise ValueError("k must be non-negative")
    if 2 * k > n_vertices:
        return 0
    return comb(n_vertices - k, k)


def convolve_counts(parts: Sequence[MatchingCounts]) -> MatchingCounts:
    """Counts of a disjoint union: a k-matching splits as k = k_1 + ... + k_r."""
    total = [1]
    for part in parts:
        nxt = [0] * (len(total) + len(part.phi_k) - 1)
        for i, a in enumerate(total):
            for j, b in enumerate(part.phi_k):
                nxt[i + j] += a * b
        total = nxt
    return MatchingCounts(_trim(total))


def closed_form_count(family: str, param, k: int) -> int:
    """Closed-form ``Phi_k`` for ``cycle`` (n), ``path`` (vertex count) or
    ``components`` (a list of per-component :class:`MatchingCounts`)."""
    if family == "cycle":
        return cycle_count(int(param), k)
    if family == "path":
        return path_count(int(param), k)
    if family == "components":
        if k < 0:
            raise ValueError("k must be non-negative")
        vec = convolve_counts(param).phi_k
        return vec[k] if k < len(vec) else 0
    raise GraphError(f"unknown family {family!r}")


def closed_form_counts(family: str, param) -> MatchingCounts:
    if family == "cycle":
        return MatchingCounts(tuple(cycle_count(param, k) for k in range(param // 2 + 1)))
    if family == "path":
        return MatchingCounts(tuple(path_count(param, k) for k in range(param // 2 + 1)))
    if family == "components":
        return convolve_counts(param)
    raise GraphError(f"unknown family {family!r}")
