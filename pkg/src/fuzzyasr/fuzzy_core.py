"""Mamdani inference engine.

Fuzzification, weighted rule evaluation, min-implication, max-aggregation
and sampled centroid defuzzification over plain immutable dataclasses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_RESOLUTION = 1001

TRIANGULAR = "trimf"
GAUSSIAN = "gaussmf"
MF_KINDS = (TRIANGULAR, GAUSSIAN)

AND = "AND"
OR = "OR"


class FuzzyError(ValueError):
    """Base class for errors raised by the inference engine."""


class InvalidMFError(FuzzyError):
    pass


class FisInputError(FuzzyError):
    pass


def eval_trimf(x, a: float, b: float, c: float):
    """Triangular membership of ``x`` (scalar or array) for corners a <= b <= c.

    Degenerate sides (a == b or b == c) are vertical edges, so the degree at
    ``x == b`` is always 1.
    """
    if not a <= b <= c:
        raise InvalidMFError(f"trimf parameters must satisfy a <= b <= c, got [{a} {b} {c}]")
    x = np.asarray(x, dtype=float)
    y = np.zeros_like(x)
    # slopes may overflow for near-degenerate sides; those cells are masked out
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if b > a:
            rising = (x > a) & (x < b)
            y = np.where(rising, (x - a) / (b - a), y)
        if c > b:
            falling = (x > b) & (x < c)
            y = np.where(falling, (c - x) / (c - b), y)
    y = np.where(x == b, 1.0, y)
    if y.ndim == 0:
        return float(y)
    return y


def eval_gaussmf(x, sigma: float, center: float):
    if not sigma > 0:
        raise InvalidMFError(f"gaussmf sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    y = np.exp(-((x - center) ** 2) / (2.0 * sigma * sigma))
    if y.ndim == 0:
        return float(y)
    return y


@dataclass(frozen=True)
class MembershipFunction:
    """A named triangular (``trimf``) or Gaussian (``gaussmf``) curve.

    ``params`` follow the toolbox convention: ``[a, b, c]`` for triangles and
    ``[sigma, center]`` for Gaussians.
    """

    name: str
    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == TRIANGULAR:
            if len(self.params) != 3:
                raise InvalidMFError(f"MF '{self.name}': trimf takes 3 parameters, got {len(self.params)}")
            a, b, c = self.params
            if not a <= b <= c:
                raise InvalidMFError(f"MF '{self.name}': trimf parameters must satisfy a <= b <= c")
        elif self.kind == GAUSSIAN:
            if len(self.params) != 2:
                raise InvalidMFError(f"MF '{self.name}': gaussmf takes 2 parameters, got {len(self.params)}")
            if not self.params[0] > 0:
                raise InvalidMFError(f"MF '{self.name}': gaussmf sigma must be positive")
        else:
            raise InvalidMFError(f"MF '{self.name}': unsupported type '{self.kind}'")
        if not all(math.isfinite(p) for p in self.params):
            raise InvalidMFError(f"MF '{self.name}': parameters must be finite")

    def __call__(self, x):
        if self.kind == TRIANGULAR:
            return eval_trimf(x, *self.params)
        return eval_gaussmf(x, *self.params)

    @property
    def support(self) -> tuple[float, float]:
        """Interval outside which the degree is zero (infinite for Gaussians)."""
        if self.kind == TRIANGULAR:
            return self.params[0], self.params[2]
        return -math.inf, math.inf


@dataclass(frozen=True)
class FuzzyVariable:
    name: str
    range: tuple[float, float]
    mfs: tuple[MembershipFunction, ...]

    def __post_init__(self):
        lo, hi = (float(v) for v in self.range)
        object.__setattr__(self, "range", (lo, hi))
        object.__setattr__(self, "mfs", tuple(self.mfs))
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise FuzzyError(f"variable '{self.name}': range must be finite with lo < hi, got [{lo} {hi}]")
        if not self.mfs:
            raise FuzzyError(f"variable '{self.name}': needs at least one membership function")
        names = [mf.name for mf in self.mfs]
        if len(set(names)) != len(names):
            raise FuzzyError(f"variable '{self.name}': membership function names must be unique")

    def clamp(self, x: float) -> float:
        lo, hi = self.range
        return min(max(float(x), lo), hi)

    def mf_index(self, name: str) -> int:
        """1-based index of the MF called ``name``."""
        for i, mf in enumerate(self.mfs, start=1):
            if mf.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class FuzzyRule:
    """One rule in toolbox index form.

    ``antecedent`` holds one 1-based MF index per input (0 means the input is
    ignored), ``consequent`` one nonzero index per output.
    """

    antecedent: tuple[int, ...]
    consequent: tuple[int, ...]
    weight: float = 1.0
    connective: str = AND

    def __post_init__(self):
        object.__setattr__(self, "antecedent", tuple(int(i) for i in self.antecedent))
        object.__setattr__(self, "consequent", tuple(int(i) for i in self.consequent))
        object.__setattr__(self, "weight", float(self.weight))
        if self.connective not in (AND, OR):
            raise FuzzyError(f"rule connective must be AND or OR, got {self.connective!r}")


@dataclass(frozen=True)
class FisDefinition:
    name: str
    inputs: tuple[FuzzyVariable, ...]
    outputs: tuple[FuzzyVariable, ...]
    rules: tuple[FuzzyRule, ...]
    and_method: str = "min"
    or_method: str = "max"
    implication: str = "min"
    aggregation: str = "max"
    defuzz: str = "centroid"
    version: str = "2.0"

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "rules", tuple(self.rules))

    def input_names(self) -> list[str]:
        return [v.name for v in self.inputs]


@dataclass(frozen=True)
class InferenceTrace:
    clamped_inputs: tuple[float, ...]
    clamped: tuple[bool, ...]
    degrees: tuple[tuple[float, ...], ...]
    rule_strengths: tuple[float, ...]
    aggregate_x: np.ndarray = field(repr=False, compare=False)
    aggregate_y: np.ndarray = field(repr=False, compare=False)
    crisp: float
    fired: bool

    def to_dict(self) -> dict:
        return {
            "clamped_inputs": list(self.clamped_inputs),
            "clamped": list(self.clamped),
            "degrees": [list(d) for d in self.degrees],
            "rule_strengths": list(self.rule_strengths),
            "crisp": self.crisp,
            "fired": self.fired,
        }


def fuzzify(variable: FuzzyVariable, x: float) -> list[float]:
    """Degrees of every MF of ``variable`` at ``x`` clamped to its range."""
    xc = variable.clamp(x)
    return [float(mf(xc)) for mf in variable.mfs]


def rule_strength(rule: FuzzyRule, degrees: Sequence[Sequence[float]]) -> float:
    """Weighted firing strength of ``rule`` given per-input degree vectors."""
    used = [degrees[i][k - 1] for i, k in enumerate(rule.antecedent) if k != 0]
    if not used:
        return 0.0
    combined = min(used) if rule.connective == AND else max(used)
    return combined * rule.weight


def centroid(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Centroid of sampled curves along the last axis on a uniform grid ``x``.

    Samples are weighted as in the trapezoid rule (half weight at both ends),
    which keeps the result close to the exact center of gravity even at modest
    resolutions. Rows with zero area give NaN.
    """
    w = np.ones_like(x)
    w[0] = w[-1] = 0.5
    wy = y * w
    area = wy.sum(axis=-1)
    moment = (wy * x).sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(area > 0, moment / np.where(area > 0, area, 1.0), np.nan)


def _check_resolution(resolution: int) -> int:
    resolution = int(resolution)
    if resolution < 3:
        raise FisInputError(f"centroid resolution must be at least 3, got {resolution}")
    return resolution


def rule_strength_matrix(fis: FisDefinition, X) -> np.ndarray:
    """Firing strengths for a batch of crisp inputs, shape (n_samples, n_rules).

    Inputs are clamped to each variable's range first.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(fis.inputs):
        raise FisInputError(f"expected inputs with {len(fis.inputs)} columns, got shape {X.shape}")
    degrees = []
    for j, var in enumerate(fis.inputs):
        xc = np.clip(X[:, j], *var.range)
        degrees.append(np.stack([mf(xc) for mf in var.mfs], axis=1))
    strengths = np.zeros((X.shape[0], len(fis.rules)))
    for r, rule in enumerate(fis.rules):
        cols = [degrees[i][:, k - 1] for i, k in enumerate(rule.antecedent) if k != 0]
        if not cols:
            continue
        stacked = np.stack(cols, axis=1)
        combined = stacked.min(axis=1) if rule.connective == AND else stacked.max(axis=1)
        strengths[:, r] = combined * rule.weight
    return strengths


def aggregate(fis: FisDefinition, strengths: np.ndarray, resolution: int = DEFAULT_RESOLUTION, output: int = 0):
    """Max-aggregate of min-clipped consequents for one output.

    Returns ``(x, y)`` with ``y`` of shape (n_samples, resolution).
    """
    var = fis.outputs[output]
    x = np.linspace(var.range[0], var.range[1], _check_resolution(resolution))
    curves = np.stack([mf(x) for mf in var.mfs])
    # max_r min(s_r, mf_k) == min(max_r s_r, mf_k) for rules sharing consequent k
    levels = np.zeros((strengths.shape[0], len(var.mfs)))
    for r, rule in enumerate(fis.rules):
        k = rule.consequent[output]
        if k != 0:
            levels[:, k - 1] = np.maximum(levels[:, k - 1], strengths[:, r])
    y = np.zeros((strengths.shape[0], x.size))
    for k in range(len(var.mfs)):
        y = np.maximum(y, np.minimum(levels[:, k : k + 1], curves[k]))
    return x, y


def _defuzzify(fis: FisDefinition, strengths, x, y, output: int = 0):
    crisp = centroid(x, y)
    fired = strengths.max(axis=1, initial=0.0) > 0
    lo, hi = fis.outputs[output].range
    return np.where(fired & np.isfinite(crisp), crisp, (lo + hi) / 2.0), fired


def infer_batch(fis: FisDefinition, X, resolution: int = DEFAULT_RESOLUTION, output: int = 0):
    """Crisp outputs and fired flags for each row of ``X``.

    Rows where no rule fires get the midpoint of the output range.
    """
    strengths = rule_strength_matrix(fis, X)
    x, y = aggregate(fis, strengths, resolution, output)
    return _defuzzify(fis, strengths, x, y, output)


def infer(fis: FisDefinition, inputs: Sequence[float], resolution: int = DEFAULT_RESOLUTION) -> InferenceTrace:
    """Run one inference and record every pipeline stage."""
    if len(inputs) != len(fis.inputs):
        raise FisInputError(f"expected {len(fis.inputs)} inputs, got {len(inputs)}")
    clamped_inputs = tuple(var.clamp(v) for var, v in zip(fis.inputs, inputs))
    clamped = tuple(c != float(v) for c, v in zip(clamped_inputs, inputs))
    degrees = tuple(tuple(fuzzify(var, v)) for var, v in zip(fis.inputs, clamped_inputs))

    strengths = rule_strength_matrix(fis, [clamped_inputs])
    x, y = aggregate(fis, strengths, resolution)
    crisp, fired = _defuzzify(fis, strengths, x, y)
    return InferenceTrace(
        clamped_inputs=clamped_inputs,
        clamped=clamped,
        degrees=degrees,
        rule_strengths=tuple(float(s) for s in strengths[0]),
        aggregate_x=x,
        aggregate_y=y[0],
        crisp=float(crisp[0]),
        fired=bool(fired[0]),
    )
