"""Dense statevectors over edge qubits.

Basis state ``z`` is an integer; bit ``i`` holds ``x_{e_i}``.  Kets are printed
with ``x_{e_0}`` leftmost, so on C4 the matching {e0, e2} renders as ``1010``.

Sampling uses numpy's ``Generator`` seeded with PCG64 (``np.random.default_rng``),
which produces the same stream on every platform for a given seed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

QUBIT_CAP = 24
SUPPORT_THRESHOLD = 1e-9
NORMALIZED_TOL = 1e-10


class CapExceeded(ValueError):
    pass


class ZeroNorm(ValueError):
    pass


class NotNormalized(ValueError):
    pass


def ket(z: int, m: int) -> str:
    return "".join("1" if z >> i & 1 else "0" for i in range(m))


def parse_ket(text: str) -> int:
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def check_cap(m: int, cap: int = QUBIT_CAP) -> None:
    if not 1 <= m <= cap:
        raise CapExceeded(f"m={m} outside 1..{cap}")


@dataclass
class StateVector:
    m: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.m,):
            raise ValueError(f"expected {1 << self.m} amplitudes, got {self.amps.shape}")

    def copy(self) -> "StateVector":
        return StateVector(self.m, self.amps.copy())

    @property
    def normalized(self) -> bool:
        return abs(norm2(self) - 1.0) < NORMALIZED_TOL

    def amp(self, z: int) -> complex:
        return complex(self.amps[z])

    def to_csv(self, threshold: float = 0.0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["basis_state_binary", "re", "im"])
        for z in np.flatnonzero(np.abs(self.amps) > threshold):
            a = self.amps[z]
            w.writerow([ket(int(z), self.m), repr(float(a.real)), repr(float(a.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, m: int) -> "StateVector":
        amps = np.zeros(1 << m, dtype=np.complex128)
        rows = csv.reader(io.StringIO(text))
        next(rows)
        for bits, re, im in rows:
            amps[parse_ket(bits)] = complex(float(re), float(im))
        return cls(m, amps)


def basis_state(m: int, z: int) -> StateVector:
    check_cap(m)
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[z] = 1.0
    return StateVector(m, amps)


def prepare_initial(kind: str, m: int) -> StateVector:
    check_cap(m)
    amps = np.zeros(1 << m, dtype=np.complex128)
    if kind == "empty":
        amps[0] = 1.0
    elif kind == "w1":
        amps[[1 << i for i in range(m)]] = 1.0 / np.sqrt(m)
    else:
        raise ValueError(f"unknown initial state {kind!r}")
    return StateVector(m, amps)


def norm2(sv: StateVector) -> float:
    return float(np.vdot(sv.amps, sv.amps).real)


def normalize(sv: StateVector) -> StateVector:
    n2 = norm2(sv)
    if n2 <= 0.0:
        raise ZeroNorm("cannot normalize the zero vector")
    return StateVector(sv.m, sv.amps / np.sqrt(n2))


def probabilities(sv: StateVector) -> np.ndarray:
    return sv.amps.real**2 + sv.amps.imag**2


@dataclass(frozen=True)
class MeasurementDistribution:
    """Dense probability vector indexed by basis state."""

    m: int
    probs: np.ndarray

    def __getitem__(self, z: int) -> float:
        return float(self.probs[z])

    def as_dict(self, threshold: float = 0.0) -> dict[int, float]:
        return {int(z): float(self.probs[z]) for z in np.flatnonzero(self.probs > threshold)}

    def size_distribution(self) -> np.ndarray:
        """P[X = k] for k = 0..m, X the Hamming weight."""
        weights = np.bitwise_count(np.arange(self.probs.size, dtype=np.int64))
        return np.bincount(weights, weights=self.probs, minlength=self.m + 1)

    def to_csv(self, threshold: float = 0.0) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["basis_state_binary", "probability"])
        for z, p in self.as_dict(threshold).items():
            w.writerow([ket(z, self.m), repr(p)])
        return buf.getvalue()


def distribution(sv: StateVector) -> MeasurementDistribution:
    if not sv.normalized:
        raise NotNormalized(f"norm^2 = {norm2(sv)!r}")
    return MeasurementDistribution(sv.m, probabilities(sv))


def support(sv: StateVector, threshold: float = SUPPORT_THRESHOLD) -> set[int]:
    return {int(z) for z in np.flatnonzero(np.abs(sv.amps) > threshold)}


def sample(d: MeasurementDistribution, shots: int, seed: int) -> dict[int, int]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    nz = np.flatnonzero(d.probs > 0)
    p = d.probs[nz] / d.probs[nz].sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return {int(z): int(c) for z, c in zip(nz, counts) if c}
