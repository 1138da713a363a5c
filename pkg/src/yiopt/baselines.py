"""Classic DE (rand/1/bin) and global-best PSO baselines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (EvalBudget, RngStream, RunRecord, SearchSpace, Tracker,
                   evaluate_counted_batch, problem_name, resample_out_of_bounds)

__all__ = ["DeParams", "PsoParams", "Swarm", "de_generation", "de_mutant",
           "pso_generation", "run_de", "run_pso"]


@dataclass(frozen=True)
class DeParams:
    pop_size: int = 50
    f_weight: float = 0.5
    crossover_rate: float = 0.001

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("DE needs pop_size >= 4")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")


@dataclass(frozen=True)
class PsoParams:
    pop_size: int = 50
    w: float = 0.9
    c1: float = 2.0
    c2: float = 2.0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("PSO needs pop_size >= 2")


def de_mutant(x_r1, x_r2, x_r3, f_weight: float) -> np.ndarray:
    return np.asarray(x_r1) + f_weight * (np.asarray(x_r2) - np.asarray(x_r3))


def _distinct_donors(n: int, rng: RngStream) -> np.ndarray:
    # random keys, own index excluded, three smallest keys per row
    keys = rng.uniform((n, n))
    np.fill_diagonal(keys, np.inf)
    return np.argsort(keys, axis=1, kind="stable")[:, :3]


def de_generation(pop: np.ndarray, fitness: np.ndarray, params: DeParams,
                  space: SearchSpace, obj: Callable, budget: EvalBudget,
                  rng: RngStream):
    """
    One DE/rand/1/bin generation with greedy one-to-one selection.

    Returns the new ``(pop, fitness)``. When the budget cannot pay for the
    whole population, only the leading trials are evaluated and selected.
    """
    n, d = pop.shape
    if n < 4:
        raise ValueError("DE needs a population of at least 4")
    r = _distinct_donors(n, rng)
    mutant = de_mutant(pop[r[:, 0]], pop[r[:, 1]], pop[r[:, 2]], params.f_weight)
    cross = rng.uniform((n, d)) < params.crossover_rate
    cross[np.arange(n), rng.integers(0, d, size=n)] = True
    trial = resample_out_of_bounds(np.where(cross, mutant, pop), space, rng)
    f_trial = evaluate_counted_batch(obj, trial, budget)
    m = f_trial.size
    better = f_trial < fitness[:m]
    pop, fitness = pop.copy(), fitness.copy()
    pop[:m][better] = trial[:m][better]
    fitness[:m][better] = f_trial[better]
    return pop, fitness


@dataclass
class Swarm:
    x: np.ndarray
    v: np.ndarray
    pbest: np.ndarray
    f_pbest: np.ndarray
    gbest: np.ndarray
    f_gbest: float


def pso_generation(swarm: Swarm, params: PsoParams, space: SearchSpace, obj: Callable,
                   budget: EvalBudget, rng: RngStream) -> Swarm:
    """
    Inertia-weight velocity update, move, repair, evaluate.

    Personal and global bests change on strict improvement only. When the
    budget runs short, particles past the affordable count keep their old
    position and velocity.
    """
    n, d = swarm.x.shape
    u = rng.uniform((2, n, d))
    v = (params.w * swarm.v + params.c1 * u[0] * (swarm.pbest - swarm.x)
         + params.c2 * u[1] * (swarm.gbest - swarm.x))
    x = resample_out_of_bounds(swarm.x + v, space, rng)
    f = evaluate_counted_batch(obj, x, budget)
    m = f.size
    swarm.x[:m], swarm.v[:m] = x[:m], v[:m]
    better = f < swarm.f_pbest[:m]
    swarm.pbest[:m][better] = x[:m][better]
    swarm.f_pbest[:m][better] = f[better]
    k = int(np.argmin(swarm.f_pbest))
    if swarm.f_pbest[k] < swarm.f_gbest:
        swarm.gbest, swarm.f_gbest = swarm.pbest[k].copy(), float(swarm.f_pbest[k])
    return swarm


def _init_population(problem, space, n, budget, rng):
    pop = space.sample(rng, n)
    f = evaluate_counted_batch(problem, pop, budget)
    return pop[: f.size], f


def run_de(problem: Callable, space: SearchSpace, params: Optional[DeParams] = None, *,
           t_max: int, seed: int, algorithm: str = "de") -> RunRecord:
    params = DeParams() if params is None else params
    rng = RngStream(seed)
    budget = EvalBudget(t_max, tracker=Tracker())
    pop, fit = _init_population(problem, space, params.pop_size, budget, rng)
    # a truncated initial population means the budget is already spent
    while not budget.exhausted:
        pop, fit = de_generation(pop, fit, params, space, problem, budget, rng)
    return RunRecord.from_budget(budget, seed=seed, algorithm=algorithm,
                                 problem=problem_name(problem))


def run_pso(problem: Callable, space: SearchSpace, params: Optional[PsoParams] = None, *,
            t_max: int, seed: int, algorithm: str = "pso") -> RunRecord:
    params = PsoParams() if params is None else params
    rng = RngStream(seed)
    budget = EvalBudget(t_max, tracker=Tracker())
    x, f = _init_population(problem, space, params.pop_size, budget, rng)
    k = int(np.argmin(f))
    swarm = Swarm(x=x.copy(), v=np.zeros_like(x), pbest=x.copy(), f_pbest=f.copy(),
                  gbest=x[k].copy(), f_gbest=float(f[k]))
    while not budget.exhausted:
        pso_generation(swarm, params, space, problem, budget, rng)
    return RunRecord.from_budget(budget, seed=seed, algorithm=algorithm,
                                 problem=problem_name(problem))
