"""Projected adaptive gradient ascent over complex beamforming vectors.

Gradients follow the Wirtinger convention: for a real objective ``I`` the
gradient with respect to a complex vector ``x`` is ``dI/d conj(x)``, and the
ascent update is ``x + step * grad``.
"""
from __future__ import annotations

import enum
import io
import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import complex_gaussian

Objective = Callable[[Sequence[np.ndarray]], float]
Gradients = Callable[[Sequence[np.ndarray]], Sequence[np.ndarray]]


class Constraint(str, enum.Enum):
    UNIT_NORM = "unit_norm"
    CONSTANT_AMPLITUDE = "constant_amplitude"


class Init(str, enum.Enum):
    GAUSSIAN = "gaussian"
    SVD = "svd"


class OptimizationError(RuntimeError):
    """Raised when the objective or a gradient stops being finite."""


@dataclass(frozen=True)
class OptimizerConfig:
    step0: float = 1.0
    epsilon: float = 1e-5
    max_iters: int = 10_000
    init: Init = Init.SVD
    constraint: Constraint = Constraint.CONSTANT_AMPLITUDE
    # keep a worse iterate and only halve the step, as the bare algorithm does
    accept_descent: bool = False
    step_floor: float = 1e-12

    def __post_init__(self):
        if not self.step0 > 0:
            raise ValueError(f"step0 must be > 0, got {self.step0}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        object.__setattr__(self, "init", Init(self.init))
        object.__setattr__(self, "constraint", Constraint(self.constraint))


@dataclass
class OptimizerTrace:
    objective_history: list[float]
    step_history: list[float]
    final_vectors: list[np.ndarray]
    converged: bool = False
    rejected: int = field(default=0)

    @property
    def iterations(self) -> int:
        return len(self.objective_history) - 1

    @property
    def objective(self) -> float:
        return self.objective_history[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "objective", "step"])
        for i, (obj, step) in enumerate(zip(self.objective_history, self.step_history)):
            writer.writerow([i, repr(float(obj)), repr(float(step))])
        return buf.getvalue()


def project_unit_norm(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalise the zero vector")
    return v / norm


def project_constant_amplitude(v: np.ndarray) -> np.ndarray:
    """Keep each entry's phase and set its magnitude to ``1/sqrt(n)``.

    Zero entries are given phase 0.
    """
    v = np.asarray(v, dtype=complex)
    phase = np.where(v != 0, np.angle(v), 0.0)
    return np.exp(1j * phase) / np.sqrt(v.size)


def project(v: np.ndarray, constraint: Constraint) -> np.ndarray:
    v = project_unit_norm(v)
    if constraint == Constraint.CONSTANT_AMPLITUDE:
        v = project_constant_amplitude(v)
    return v


def init_gaussian(n: int, rng: np.random.Generator, constraint=Constraint.UNIT_NORM) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    while True:
        v = complex_gaussian(rng, n)
        if np.any(v != 0):
            return project(v, Constraint(constraint))


def init_svd(h: np.ndarray, constraint=Constraint.UNIT_NORM) -> tuple[np.ndarray, np.ndarray]:
    """Dominant right (precoder) and left (combiner) singular vectors of ``h``."""
    h = np.atleast_2d(h)
    if not np.any(h):
        raise ValueError("SVD initialisation of an all-zero channel")
    u, _, vh = np.linalg.svd(h)
    constraint = Constraint(constraint)
    return project(vh[0].conj(), constraint), project(u[:, 0], constraint)


def _check_finite(value, grads, iteration):
    if not np.isfinite(value):
        raise OptimizationError(f"objective is {value} at iteration {iteration}")
    for k, g in enumerate(grads):
        if not np.all(np.isfinite(g)):
            raise OptimizationError(f"gradient {k} is not finite at iteration {iteration}")


def ascend(
    objective: Objective,
    gradients: Gradients,
    init: Sequence[np.ndarray],
    cfg: OptimizerConfig = OptimizerConfig(),
) -> OptimizerTrace:
    """Maximise ``objective`` by projected gradient ascent with step halving.

    Every vector is moved along its gradient, renormalised, and (for the
    constant-amplitude constraint) projected onto equal-magnitude entries.
    A candidate that lowers the objective is discarded and the step halved;
    the run stops once an objective change is at most ``cfg.epsilon``.
    """
    x = [np.asarray(v, dtype=complex) for v in init]
    value = float(objective(x))
    grads = gradients(x)
    _check_finite(value, grads, 0)

    step = cfg.step0
    trace = OptimizerTrace([value], [step], x)
    while trace.iterations < cfg.max_iters:
        cand = [project(v + step * g, cfg.constraint) for v, g in zip(x, grads)]
        cand_value = float(objective(cand))
        if not np.isfinite(cand_value):
            raise OptimizationError(f"objective is {cand_value} at iteration {trace.iterations + 1}")
        delta = cand_value - value

        if delta < 0 and not cfg.accept_descent:
            trace.rejected += 1
            if abs(delta) <= cfg.epsilon:
                trace.converged = True
                break
            step /= 2
            if step < cfg.step_floor:
                break
            continue

        x, value = cand, cand_value
        trace.objective_history.append(value)
        trace.step_history.append(step)
        if delta < 0:
            step /= 2
        if abs(delta) <= cfg.epsilon:
            trace.converged = True
            break
        if step < cfg.step_floor:
            break
        grads = gradients(x)
        _check_finite(value, grads, trace.iterations)

    trace.final_vectors = x
    return trace


def finite_difference_gradient(
    objective: Objective, point: Sequence[np.ndarray], h: float = 1e-6
) -> list[np.ndarray]:
    """Central-difference estimate of ``dI/d conj(x)`` for every vector."""
    point = [np.asarray(v, dtype=complex) for v in point]
    out = []
    for k, v in enumerate(point):
        g = np.zeros_like(v)
        for i in range(v.size):
            parts = []
            for direction in (1.0, 1j):
                plus = [p.copy() for p in point]
                minus = [p.copy() for p in point]
                plus[k][i] += h * direction
                minus[k][i] -= h * direction
                parts.append((objective(plus) - objective(minus)) / (2 * h))
            g[i] = 0.5 * (parts[0] + 1j * parts[1])
        out.append(g)
    return out
