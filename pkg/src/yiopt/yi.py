"""
The Yi optimizer.

A single search point (the Yi-point) is moved by repeated stable-flight
splits. Each split draws ``n_offspring`` candidates
``p0 + eps * stable_vector(alpha)`` and the best of them becomes the new
Yi-point, whether or not it improves on the old one. After ``I`` splits the
Yi-point jumps back to the global best. The evaluation budget is cut into
``K`` equal intervals (by default ``K = i_max - i_min + 2``, i.e. 11 for the
usual 6..15); at each interval boundary the flight scope ``eps`` is divided
by ``sigma`` and ``I`` drops by one, never below ``i_min``. The search thus
moves from long exploratory archives with wide flights to short archives
with narrow ones, and the last interval runs at ``I = i_min`` with the
smallest scope.

Interval boundaries are crossed on the cumulative evaluation count, exactly
at the boundary evaluation, even in the middle of a split: candidates drawn
after the boundary already use the reduced scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (BudgetExhausted, ContractViolation, EvalBudget, RngStream,
                   RunRecord, SearchSpace, Tracker, evaluate_counted,
                   evaluate_counted_batch, problem_name, resample_out_of_bounds)
from .stable import StableParams, sample_stable_array

__all__ = ["YiParams", "YiState", "archive_reset", "cauchy_split",
           "initial_scope", "interval_advance", "interval_boundaries",
           "run_yi", "yi_step"]

EPS0_POLICIES = ("dimension", "dimension_halfwidth")


@dataclass(frozen=True)
class YiParams:
    """
    Parameters
    ----------
    i_min, i_max : int
        Archive length bounds; ``I`` starts at ``i_max`` and ends at ``i_min``.
    sigma : float
        Scope decay rate, ``> 1``.
    alpha_stability : float
        Stability exponent of the flight distribution, in (0, 2].
        ``1.0`` is the literal Cauchy law.
    n_offspring : int or None
        Candidates per split; ``None`` means ``2 * dim``.
    eps0_policy : str
        ``"dimension"`` (eps0 = D) or ``"dimension_halfwidth"``
        (eps0 = D times the mean half-width of the box).
    n_intervals : int or None
        Number of equal evaluation-count intervals; ``None`` means
        ``i_max - i_min + 2``.
    """

    i_min: int = 6
    i_max: int = 15
    sigma: float = 3.0
    alpha_stability: float = 1.5
    n_offspring: Optional[int] = None
    eps0_policy: str = "dimension"
    n_intervals: Optional[int] = None

    def __post_init__(self):
        if self.i_min < 1 or self.i_max < self.i_min:
            raise ValueError("need 1 <= i_min <= i_max")
        if not self.sigma > 1.0:
            raise ValueError("sigma must be > 1")
        if not 0.0 < self.alpha_stability <= 2.0:
            raise ValueError("alpha_stability must lie in (0, 2]")
        if self.n_offspring is not None and self.n_offspring < 1:
            raise ValueError("n_offspring must be positive")
        if self.eps0_policy not in EPS0_POLICIES:
            raise ValueError(f"eps0_policy must be one of {EPS0_POLICIES}")
        if self.n_intervals is not None and self.n_intervals < 1:
            raise ValueError("n_intervals must be positive")

    @property
    def intervals(self) -> int:
        if self.n_intervals is None:
            return self.i_max - self.i_min + 2
        return self.n_intervals

    def offspring(self, dim: int) -> int:
        return 2 * dim if self.n_offspring is None else self.n_offspring


@dataclass
class YiState:
    p0: np.ndarray
    f0: float
    gbest: np.ndarray
    f_gbest: float
    eps: float
    i_current: int
    split_counter: int = 0
    interval_index: int = 0
    boundaries: tuple = ()
    events: Optional[list] = field(default=None, repr=False)

    @property
    def next_boundary(self) -> Optional[int]:
        if self.interval_index < len(self.boundaries):
            return self.boundaries[self.interval_index]
        return None


def interval_boundaries(t_max: int, params) -> list:
    """
    Interior evaluation-count thresholds of the ``K`` equal intervals.

    ``round(t_max * k / K)`` for ``k = 1 .. K-1``, half rounded up, where
    ``K = params.intervals``. Strictly increasing
    whenever ``t_max >= K``; tinier budgets may repeat a threshold, which the
    runners treat as several boundaries crossed at once.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    k_total = params.intervals
    # integer rounding keeps large budgets exact
    return [(2 * t_max * k + k_total) // (2 * k_total) for k in range(1, k_total)]


def initial_scope(space: SearchSpace, params: YiParams) -> float:
    if params.eps0_policy == "dimension":
        return float(space.dim)
    return float(space.dim) * float(np.mean(space.width)) / 2.0


def cauchy_split(state: YiState, params: YiParams, space: SearchSpace, obj: Callable,
                 budget: EvalBudget, rng: RngStream, n: Optional[int] = None):
    """
    Draw ``n`` candidates around the Yi-point and return the fittest.

    Candidates are ``p0 + eps * s`` with ``s`` a vector of stable variates,
    boundary-repaired and evaluated through the budget. When the budget runs
    out part way, only the affordable candidates are drawn and the best of
    those is returned.

    Returns
    -------
    (ndarray, float)
        The local best point and its fitness.
    """
    if budget.exhausted:
        raise BudgetExhausted("no evaluation left for a split")
    n = params.offspring(space.dim) if n is None else n
    n = min(n, budget.remaining)
    steps = sample_stable_array((n, space.dim), StableParams(params.alpha_stability), rng)
    cand = resample_out_of_bounds(state.p0 + state.eps * steps, space, rng)
    f = evaluate_counted_batch(obj, cand, budget)
    k = int(np.argmin(f))
    return cand[k].copy(), float(f[k])


def interval_advance(state: YiState, params: YiParams) -> YiState:
    """Divide the scope by sigma and shorten the archive by one (floored at i_min)."""
    state.eps = state.eps / params.sigma
    state.i_current = max(params.i_min, state.i_current - 1)
    state.interval_index += 1
    return state


def archive_reset(state: YiState) -> YiState:
    """Send the Yi-point back to the global best and restart the split counter."""
    if state.split_counter < state.i_current:
        raise ContractViolation(
            f"archive reset after {state.split_counter} of {state.i_current} splits"
        )
    state.p0 = state.gbest.copy()
    state.f0 = state.f_gbest
    state.split_counter = 0
    return state


def _advance_due(state: YiState, params: YiParams, budget: EvalBudget) -> None:
    while state.next_boundary is not None and budget.used >= state.next_boundary:
        interval_advance(state, params)
        if budget.tracker is not None:
            budget.tracker.mark(budget.used)
        if state.events is not None:
            state.events.append(("interval", budget.used, state.eps, state.i_current))


def yi_step(state: YiState, params: YiParams, space: SearchSpace, obj: Callable,
            budget: EvalBudget, rng: RngStream) -> YiState:
    """One split: the Yi-point moves to the split's best, gbest is kept elitist."""
    remaining = params.offspring(space.dim)
    best_x, best_f = None, np.inf
    while remaining > 0 and not budget.exhausted:
        _advance_due(state, params, budget)
        chunk = remaining
        if state.next_boundary is not None:
            chunk = min(chunk, state.next_boundary - budget.used)
        x, f = cauchy_split(state, params, space, obj, budget, rng, n=chunk)
        if best_x is None or f < best_f:
            best_x, best_f = x, f
        remaining -= chunk
    if best_x is None:
        raise BudgetExhausted("no evaluation left for a split")
    state.p0, state.f0 = best_x, best_f
    if best_f < state.f_gbest:
        state.gbest, state.f_gbest = best_x.copy(), best_f
    state.split_counter += 1
    return state


def run_yi(problem: Callable, space: SearchSpace, params: Optional[YiParams] = None, *,
           t_max: int, seed: int, events: Optional[list] = None,
           algorithm: str = "yi") -> RunRecord:
    """
    Minimize ``problem`` over ``space`` with ``t_max`` evaluations.

    Pass a list as ``events`` to collect ``("interval", eval_count, eps, I)``
    and ``("reset", eval_count, eps, I)`` tuples for inspection.
    """
    params = YiParams() if params is None else params
    rng = RngStream(seed)
    budget = EvalBudget(t_max, tracker=Tracker())
    p0 = space.sample(rng)
    f0 = evaluate_counted(problem, p0, budget)
    state = YiState(p0=p0, f0=f0, gbest=p0.copy(), f_gbest=f0,
                    eps=initial_scope(space, params), i_current=params.i_max,
                    boundaries=tuple(interval_boundaries(t_max, params)),
                    events=events)
    while not budget.exhausted:
        yi_step(state, params, space, problem, budget, rng)
        _advance_due(state, params, budget)
        if state.split_counter >= state.i_current:
            archive_reset(state)
            if events is not None:
                events.append(("reset", budget.used, state.eps, state.i_current))
    return RunRecord.from_budget(budget, seed=seed, algorithm=algorithm,
                                 problem=problem_name(problem), best_point=state.gbest)
