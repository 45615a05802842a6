"""Experiment configuration and angle parsing."""

from __future__ import annotations

import ast
import json
import math
import operator
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import graph as G
from .statevector import SUPPORT_THRESHOLD

OUT_ENV = "QAOA_MATCHING_OUT"

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}


def parse_angle(text: str | float) -> float:
    """Radians, with ``pi`` allowed: ``"pi/2"``, ``"3*pi/4"``, ``"2pi/3"``, ``"1.5708"``."""
    if isinstance(text, (int, float)):
        return float(text)
    src = text.strip().lower().replace("π", "pi")
    # "2pi" -> "2*pi"
    for d in "0123456789":
        src = src.replace(f"{d}pi", f"{d}*pi")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported angle expression {text!r}")

    try:
        return ev(ast.parse(src, mode="eval"))
    except SyntaxError as exc:
        raise ValueError(f"bad angle {text!r}") from exc


def load_graph(source: str | dict) -> G.Graph:
    """Graph from a JSON dict, a JSON file path, or a generator descriptor like ``cycle:8``."""
    if isinstance(source, dict):
        return G.build_graph(source["num_vertices"], source["edges"])
    p = Path(source)
    if p.suffix == ".json" or p.is_file():
        return G.Graph.from_json(p.read_text())
    return G.generate(source)


def resolve_ordering(g: G.Graph, spec, rng: np.random.Generator) -> G.EdgeOrdering:
    if spec in (None, "fixed"):
        return G.make_ordering(g, "fixed")
    if spec == "identity":
        return G.make_ordering(g, list(range(g.m)))
    if spec == "random":
        return G.random_ordering(g, rng)
    if isinstance(spec, str):
        spec = [int(x) for x in spec.split(",")]
    return G.make_ordering(g, spec)


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "out"))


@dataclass
class ExperimentConfig:
    graph: str | dict
    init: str = "empty"
    schedule: list[list[float]] = field(default_factory=lambda: [[0.0, math.pi / 2]])
    control: str = "nbhd"
    ordering: str | list[int] = "fixed"
    semantics: str = "coherent"
    seed: int = 0
    threshold: float = SUPPORT_THRESHOLD
    shots: int = 0
    out: str | None = None

    def __post_init__(self):
        if not self.schedule:
            raise ValueError("schedule must be non-empty")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        self.schedule = [[parse_angle(g), parse_angle(b)] for g, b in self.schedule]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return asdict(self)
