"""
Yin-Yang pair optimization (YYPO) and its dynamic-archive variant (dYYPO).

Two points share the work: ``P1`` (the fitter one) splits with a shrinking
radius ``delta1`` and exploits, ``P2`` splits with a growing radius
``delta2`` and explores. Each update splits both points, either one
coordinate at a time (one-way) or all coordinates at once (D-way, chosen
with probability ``(D / (D + 5))**2``), and keeps the best of the ``2D``
candidates. After ``I`` updates the archive stage contracts ``delta1``,
expands ``delta2`` and draws a new ``I``.

The points live in the unit cube; they are mapped onto the problem box only
for evaluation. Radii are therefore fractions of the box width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (ContractViolation, EvalBudget, RngStream, RunRecord,
                   SearchSpace, Tracker, evaluate_counted_batch, problem_name,
                   resample_out_of_bounds)
from .yi import interval_boundaries

__all__ = ["YypoParams", "YypoState", "archive_stage", "d_way_split",
           "one_way_split", "p_dway", "radius_update", "run_yypo",
           "split_stage"]

VARIANTS = ("static_random_I", "dynamic_ascending_I")


@dataclass(frozen=True)
class YypoParams:
    i_min: int = 6
    i_max: int = 15
    alpha_ec: float = 5.0
    variant: str = "static_random_I"

    def __post_init__(self):
        if self.i_min < 1 or self.i_max < self.i_min:
            raise ValueError("need 1 <= i_min <= i_max")
        if not self.alpha_ec > 1.0:
            raise ValueError("alpha_ec must be > 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def intervals(self) -> int:
        # dynamic variant: one interval per archive length i_min .. i_max
        return self.i_max - self.i_min + 1


@dataclass
class YypoState:
    p1: np.ndarray
    p2: np.ndarray
    f1: float
    f2: float
    delta1: float = 0.5
    delta2: float = 0.5
    archive: list = field(default_factory=list)
    i_current: int = 1
    split_counter: int = 0


class _Denormalized:
    """Objective seen from the unit cube."""

    def __init__(self, obj: Callable, space: SearchSpace):
        self.obj = obj
        self.lower = space.lower
        self.width = space.width

    def __call__(self, u):
        return self.obj(self.lower + u * self.width)

    def batch(self, U):
        X = self.lower + U * self.width
        inner = getattr(self.obj, "batch", None)
        if inner is not None:
            return inner(X)
        return np.array([float(self.obj(x)) for x in X])


def _unit_space(dim: int) -> SearchSpace:
    return SearchSpace(np.zeros(dim), np.ones(dim))


def p_dway(d: int) -> float:
    """Probability of choosing D-way splitting in dimension ``d``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return (d / (d + 5.0)) ** 2


def _one_way_candidates(p: np.ndarray, delta: float, rng: RngStream) -> np.ndarray:
    d = p.size
    step = np.diag(rng.uniform(d) * delta)
    return np.vstack([p + step, p - step])


def _d_way_candidates(p: np.ndarray, delta: float, rng: RngStream) -> np.ndarray:
    d = p.size
    r = 2.0 * rng.uniform((2 * d, d)) - 1.0
    return p + r * (delta / np.sqrt(2.0))


def _evaluate_split(cand, space, obj, budget, rng):
    cand = resample_out_of_bounds(cand, space, rng)
    f = evaluate_counted_batch(obj, cand, budget)
    return cand[: f.size], f


def one_way_split(p, delta: float, space: SearchSpace, obj: Callable,
                  budget: EvalBudget, rng: RngStream):
    """
    ``2D`` candidates ``p +/- r_j delta e_j``, one fresh ``r_j`` per axis.

    Returns the evaluated candidates and their fitness; fewer than ``2D`` rows
    come back when the budget runs out mid-split.
    """
    return _evaluate_split(_one_way_candidates(np.asarray(p, float), delta, rng),
                           space, obj, budget, rng)


def d_way_split(p, delta: float, space: SearchSpace, obj: Callable,
                budget: EvalBudget, rng: RngStream):
    """``2D`` candidates ``p + r delta / sqrt(2)`` with ``r`` uniform in (-1, 1)^D."""
    return _evaluate_split(_d_way_candidates(np.asarray(p, float), delta, rng),
                           space, obj, budget, rng)


def _split_point(p, delta, space, obj, budget, rng):
    if rng.uniform() < p_dway(space.dim):
        cand, f = d_way_split(p, delta, space, obj, budget, rng)
    else:
        cand, f = one_way_split(p, delta, space, obj, budget, rng)
    k = int(np.argmin(f))
    return cand[k].copy(), float(f[k])


def split_stage(state: YypoState, params: YypoParams, space: SearchSpace, obj: Callable,
                budget: EvalBudget, rng: RngStream) -> YypoState:
    """
    Archive both points, split each, then restore the ordering ``f1 <= f2``.

    ``space`` is the space the points live in (the unit cube inside
    :func:`run_yypo`). If the budget runs out before ``P2`` is split, ``P2``
    is left as it was.
    """
    state.archive.append((state.p1.copy(), state.f1))
    state.archive.append((state.p2.copy(), state.f2))
    state.p1, state.f1 = _split_point(state.p1, state.delta1, space, obj, budget, rng)
    if not budget.exhausted:
        state.p2, state.f2 = _split_point(state.p2, state.delta2, space, obj, budget, rng)
    if state.f2 < state.f1:
        state.p1, state.p2 = state.p2, state.p1
        state.f1, state.f2 = state.f2, state.f1
        state.delta1, state.delta2 = state.delta2, state.delta1
    state.split_counter += 1
    return state


def radius_update(state: YypoState, params: YypoParams) -> YypoState:
    state.delta1 = state.delta1 - state.delta1 / params.alpha_ec
    state.delta2 = state.delta2 + state.delta2 / params.alpha_ec
    return state


def _draw_archive_length(params: YypoParams, rng: RngStream, interval_index: int) -> int:
    if params.variant == "static_random_I":
        return int(rng.integers(params.i_min, params.i_max + 1))
    return min(params.i_max, params.i_min + interval_index)


def archive_stage(state: YypoState, params: YypoParams, rng: RngStream,
                  interval_index: int = 0) -> YypoState:
    """
    Close an archive period.

    The fittest archived point replaces ``P1`` when strictly fitter, the radii
    are updated, the archive is cleared and the next archive length is set:
    drawn uniformly from ``[i_min, i_max]`` (static variant) or
    ``i_min + interval_index`` (dynamic variant, ``interval_index`` being the
    number of evaluation-count interval boundaries already crossed).
    """
    if state.split_counter != state.i_current:
        raise ContractViolation(
            f"archive stage after {state.split_counter} of {state.i_current} updates"
        )
    if state.archive:
        k = int(np.argmin([f for _, f in state.archive]))
        x, f = state.archive[k]
        if f < state.f1:
            state.p1, state.f1 = x.copy(), f
    radius_update(state, params)
    state.archive = []
    state.i_current = _draw_archive_length(params, rng, interval_index)
    state.split_counter = 0
    return state


def run_yypo(problem: Callable, space: SearchSpace, params: Optional[YypoParams] = None, *,
             t_max: int, seed: int, algorithm: Optional[str] = None,
             history: Optional[list] = None) -> RunRecord:
    """
    Minimize ``problem`` with YYPO (static variant) or dYYPO (dynamic variant).

    Pass a list as ``history`` to collect ``(eval_count, delta1, delta2, I)``
    after every archive stage.
    """
    params = YypoParams() if params is None else params
    if algorithm is None:
        algorithm = "yypo" if params.variant == "static_random_I" else "dyypo"
    rng = RngStream(seed)
    budget = EvalBudget(t_max, tracker=Tracker())
    unit = _unit_space(space.dim)
    obj = _Denormalized(problem, space)
    pts = unit.sample(rng, 2)
    f = evaluate_counted_batch(obj, pts, budget)
    if f.size < 2:
        pts = np.vstack([pts[0], pts[0]])
        f = np.array([f[0], f[0]])
    order = np.argsort(f, kind="stable")
    boundaries = interval_boundaries(t_max, params)
    state = YypoState(p1=pts[order[0]].copy(), p2=pts[order[1]].copy(),
                      f1=float(f[order[0]]), f2=float(f[order[1]]))
    state.i_current = _draw_archive_length(params, rng, 0)
    while not budget.exhausted:
        split_stage(state, params, unit, obj, budget, rng)
        if state.split_counter == state.i_current:
            crossed = sum(b <= budget.used for b in boundaries)
            archive_stage(state, params, rng, crossed)
            if history is not None:
                history.append((budget.used, state.delta1, state.delta2, state.i_current))
    tracker = budget.tracker
    best = space.lower + tracker.best_x * space.width
    return RunRecord.from_budget(budget, seed=seed, algorithm=algorithm,
                                 problem=problem_name(problem), best_point=best)
