"""
Shared plumbing for every optimizer: search spaces, the random stream,
evaluation budgeting, boundary repair and run records.

All optimizers minimize. An objective is any callable mapping a 1-D array
of length ``dim`` to a float. Objectives may additionally provide a
``batch(X)`` method that evaluates the rows of a 2-D array in one call;
:func:`evaluate_counted_batch` uses it when present and falls back to a
row loop otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "BudgetExhausted",
    "ContractViolation",
    "EvalBudget",
    "RngStream",
    "RunRecord",
    "SearchSpace",
    "Tracker",
    "evaluate_counted",
    "evaluate_counted_batch",
    "fnv1a_64",
    "resample_out_of_bounds",
]


class ContractViolation(ValueError):
    """Raised when an operation is called outside its precondition."""


class BudgetExhausted(RuntimeError):
    """No evaluations left; the run must stop."""


def fnv1a_64(data: bytes | str) -> int:
    """64-bit FNV-1a hash. Stable across platforms and Python versions."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class SearchSpace:
    """Box-bounded domain ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.size < 1:
            raise ValueError("search space needs at least one dimension")
        if lower.shape != upper.shape:
            raise ValueError("lower and upper must have the same length")
        if not np.all(lower < upper):
            raise ValueError("lower[j] < upper[j] must hold for every j")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, dim: int, low: float = -100.0, high: float = 100.0) -> "SearchSpace":
        if dim < 1:
            raise ValueError("dim must be >= 1")
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x >= self.lower) & (x <= self.upper)))

    def sample(self, rng: "RngStream", n: Optional[int] = None) -> np.ndarray:
        """Uniform point(s) in the box; ``n=None`` gives a single vector."""
        shape = (self.dim,) if n is None else (n, self.dim)
        return self.lower + rng.uniform(shape) * self.width


class RngStream:
    """
    Seeded random stream backed by numpy's PCG64 bit generator.

    The seed goes straight into ``numpy.random.PCG64(seed)``, so a given
    seed yields the same variates on every platform numpy supports. Uniform
    draws are counted in :attr:`uniforms_drawn`; this counter backs the
    exact draw-accounting tests of the samplers and optimizers.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self.uniforms_drawn = 0

    def uniform(self, size=None):
        """Uniform reals in [0, 1)."""
        out = self._gen.random(size)
        self.uniforms_drawn += 1 if size is None else int(np.prod(size))
        return out

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def integers(self, low: int, high: int, size=None):
        """Integers in ``[low, high)``."""
        return self._gen.integers(low, high, size=size)


def resample_out_of_bounds(x, space: SearchSpace, rng: RngStream) -> np.ndarray:
    """
    Replace every out-of-box coordinate by a uniform draw inside its bounds.

    Works on a single vector or on a 2-D array of row vectors. In-bounds
    coordinates are returned unchanged. One uniform is drawn per violating
    coordinate, in row-major order.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.dim:
        raise ContractViolation(
            f"vector length {x.shape[-1]} does not match dimension {space.dim}"
        )
    bad = (x < space.lower) | (x > space.upper)
    if not bad.any():
        return x.copy()
    y = x.copy()
    idx = np.nonzero(bad)
    cols = idx[-1]
    y[idx] = space.lower[cols] + rng.uniform(cols.size) * space.width[cols]
    return y


@dataclass
class Tracker:
    """
    Best-so-far bookkeeping fed by the counted evaluators.

    A trace point is stored on every strict improvement; :meth:`mark`
    adds points at interval boundaries and :meth:`close` the final one.
    """

    best_f: float = np.inf
    best_x: Optional[np.ndarray] = None
    trace: list = field(default_factory=list)

    def observe(self, X: np.ndarray, f: np.ndarray, first_count: int) -> None:
        # f[k] was evaluation number first_count + k
        if f.size == 0:
            return
        for k in np.nonzero(f < self.best_f)[0]:
            if f[k] < self.best_f:
                self.best_f = float(f[k])
                self.best_x = np.array(X[k], dtype=float)
                self.trace.append((first_count + int(k), self.best_f))

    def mark(self, eval_count: int) -> None:
        if self.best_x is not None and (not self.trace or self.trace[-1][0] != eval_count):
            self.trace.append((int(eval_count), self.best_f))

    def close(self, eval_count: int) -> None:
        self.mark(eval_count)


@dataclass
class EvalBudget:
    """Evaluation counter with a hard ceiling ``max_evals``."""

    max_evals: int
    used: int = 0
    tracker: Optional[Tracker] = None

    def __post_init__(self):
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")
        if not 0 <= self.used <= self.max_evals:
            raise ValueError("used must lie in [0, max_evals]")

    @property
    def remaining(self) -> int:
        return self.max_evals - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_evals


def evaluate_counted(obj: Callable, x, budget: EvalBudget) -> float:
    """Evaluate ``obj(x)`` and charge one evaluation to ``budget``."""
    if budget.exhausted:
        raise BudgetExhausted(f"budget of {budget.max_evals} evaluations used up")
    x = np.asarray(x, dtype=float)
    value = float(obj(x))
    budget.used += 1
    if budget.tracker is not None:
        budget.tracker.observe(x[None, :], np.array([value]), budget.used)
    return value


def evaluate_counted_batch(obj: Callable, X, budget: EvalBudget) -> np.ndarray:
    """
    Evaluate the leading rows of ``X`` that the budget can still pay for.

    Returns an array of length ``min(len(X), budget.remaining)``; callers
    compare its length with ``len(X)`` to detect truncation.

    Raises
    ------
    BudgetExhausted
        If not a single evaluation is left.
    """
    if budget.exhausted:
        raise BudgetExhausted(f"budget of {budget.max_evals} evaluations used up")
    X = np.asarray(X, dtype=float)
    n = min(X.shape[0], budget.remaining)
    X = X[:n]
    batch = getattr(obj, "batch", None)
    if batch is not None:
        f = np.asarray(batch(X), dtype=float)
    else:
        f = np.array([float(obj(row)) for row in X])
    first = budget.used + 1
    budget.used += n
    if budget.tracker is not None:
        budget.tracker.observe(X, f, first)
    return f


@dataclass
class RunRecord:
    """Outcome of one seeded optimizer run."""

    seed: int
    algorithm: str
    problem: str
    trace: list
    final_best_point: np.ndarray
    final_best_fitness: float
    total_evals: int
    max_evals: int = 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "algorithm": self.algorithm,
            "problem": self.problem,
            "max_evals": self.max_evals,
            "total_evals": self.total_evals,
            "final_best_fitness": self.final_best_fitness,
            "final_best_point": [float(v) for v in self.final_best_point],
            "trace": [[int(c), float(f)] for c, f in self.trace],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            seed=int(d["seed"]),
            algorithm=d["algorithm"],
            problem=d["problem"],
            trace=[(int(c), float(f)) for c, f in d["trace"]],
            final_best_point=np.asarray(d["final_best_point"], dtype=float),
            final_best_fitness=float(d["final_best_fitness"]),
            total_evals=int(d["total_evals"]),
            max_evals=int(d.get("max_evals", 0)),
        )

    @classmethod
    def from_budget(cls, budget: EvalBudget, *, seed: int, algorithm: str, problem: str,
                    best_point: Optional[np.ndarray] = None) -> "RunRecord":
        tracker = budget.tracker
        tracker.close(budget.used)
        point = tracker.best_x if best_point is None else best_point
        return cls(
            seed=seed,
            algorithm=algorithm,
            problem=problem,
            trace=list(tracker.trace),
            final_best_point=np.array(point, dtype=float),
            final_best_fitness=tracker.best_f,
            total_evals=budget.used,
            max_evals=budget.max_evals,
        )


def problem_name(problem) -> str:
    return getattr(problem, "name", None) or getattr(problem, "__name__", None) or repr(problem)


def as_vector(x: Sequence[float]) -> np.ndarray:
    return np.asarray(x, dtype=float).ravel()
