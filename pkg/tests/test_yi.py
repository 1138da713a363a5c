import numpy as np
import pytest

from yiopt.benchmarks import BenchmarkProblem
from yiopt.core import (BudgetExhausted, ContractViolation, EvalBudget, RngStream,
                        SearchSpace, resample_out_of_bounds)
from yiopt.stable import StableParams, sample_stable_array
from yiopt.yi import (YiParams, YiState, archive_reset, cauchy_split, initial_scope,
                      interval_advance, interval_boundaries, run_yi, yi_step)


class Counting:
    """Objective wrapper that counts every scalar call."""

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fn(x)


def sphere(x):
    return float(np.dot(x, x))


def make_state(p0, f0, eps=1.0, gbest=None, f_gbest=None, i_current=15):
    p0 = np.asarray(p0, dtype=float)
    return YiState(p0=p0, f0=f0, gbest=p0.copy() if gbest is None else np.asarray(gbest, float),
                   f_gbest=f0 if f_gbest is None else f_gbest, eps=eps, i_current=i_current)


class TestIntervalBoundaries:
    def test_default_schedule(self):
        b = interval_boundaries(100_000, YiParams(6, 15))
        assert len(b) == 10
        assert b[0] == 9091
        assert b == [round(100_000 * k / 11) for k in range(1, 11)]

    def test_default_interval_count(self):
        assert YiParams(6, 15).intervals == 11
        assert YiParams(6, 6).intervals == 2

    def test_single_interval(self):
        assert interval_boundaries(1000, YiParams(6, 6, n_intervals=1)) == []

    def test_arithmetic(self):
        assert interval_boundaries(110, YiParams(6, 15)) == list(range(10, 101, 10))

    @pytest.mark.parametrize("t_max", [11, 12, 97, 1000, 123457])
    def test_strictly_increasing(self, t_max):
        b = interval_boundaries(t_max, YiParams(6, 15))
        assert all(x < y for x, y in zip(b, b[1:]))
        assert 0 < b[0] and b[-1] < t_max


class TestCauchySplit:
    space = SearchSpace.box(2, -5, 5)

    def test_singleton(self):
        params = YiParams(n_offspring=1)
        state = make_state([1.0, 1.0], 2.0)
        b = EvalBudget(10)
        x, f = cauchy_split(state, params, self.space, sphere, b, RngStream(0))
        assert f == sphere(x) and b.used == 1

    def test_returns_min_of_candidates(self):
        params = YiParams(n_offspring=4)
        state = make_state([1.0, -2.0], 5.0)
        seen = []

        def recording(x):
            seen.append(np.array(x))
            return sphere(x)

        x, f = cauchy_split(state, params, self.space, recording, EvalBudget(10), RngStream(3))
        assert len(seen) == 4
        values = [sphere(c) for c in seen]
        assert f == min(values)
        np.testing.assert_array_equal(x, seen[int(np.argmin(values))])

    def test_zero_scope(self):
        params = YiParams(n_offspring=5)
        state = make_state([1.0, 2.0], 5.0, eps=0.0)
        x, f = cauchy_split(state, params, self.space, sphere, EvalBudget(10), RngStream(0))
        np.testing.assert_array_equal(x, [1.0, 2.0])
        assert f == 5.0

    def test_budget_truncation(self):
        b = EvalBudget(10, used=8)
        cauchy_split(make_state([0, 0], 0.0), YiParams(n_offspring=4), self.space, sphere, b,
                     RngStream(0))
        assert b.used == 10
        with pytest.raises(BudgetExhausted):
            cauchy_split(make_state([0, 0], 0.0), YiParams(), self.space, sphere, b, RngStream(0))

    def test_draw_accounting(self):
        # interior point, tiny scope: no repair draws, so exactly 2 uniforms per coordinate
        rng = RngStream(0)
        cauchy_split(make_state([0.0, 0.0], 0.0, eps=1e-9), YiParams(n_offspring=7), self.space,
                     sphere, EvalBudget(100), rng)
        assert rng.uniforms_drawn == 7 * 2 * 2


class TestYiStep:
    space = SearchSpace.box(2, -5, 5)

    def test_worse_lbest_still_moves_p0(self):
        # gbest at the optimum: no candidate can beat it
        state = make_state([3.0, 3.0], 18.0, gbest=[0.0, 0.0], f_gbest=0.0)
        yi_step(state, YiParams(n_offspring=3), self.space, sphere, EvalBudget(100), RngStream(1))
        assert state.f_gbest == 0.0
        np.testing.assert_array_equal(state.gbest, [0, 0])
        assert not np.array_equal(state.p0, [3.0, 3.0])
        assert state.split_counter == 1

    def test_better_lbest_updates_gbest(self):
        state = make_state([3.0, 3.0], 18.0)
        yi_step(state, YiParams(n_offspring=50), self.space, sphere, EvalBudget(100), RngStream(1))
        assert state.f_gbest == state.f0 < 18.0
        np.testing.assert_array_equal(state.gbest, state.p0)

    def test_tie_keeps_gbest(self):
        state = make_state([1.0, 2.0], 5.0, eps=0.0, gbest=[2.0, 1.0], f_gbest=5.0)
        yi_step(state, YiParams(n_offspring=2), self.space, sphere, EvalBudget(100), RngStream(1))
        np.testing.assert_array_equal(state.gbest, [2.0, 1.0])
        np.testing.assert_array_equal(state.p0, [1.0, 2.0])


class TestArchiveReset:
    def test_elitism(self):
        state = make_state([9.0, 9.0], 162.0, gbest=[1.0, 2.0], f_gbest=0.5, i_current=3)
        state.split_counter = 3
        archive_reset(state)
        np.testing.assert_array_equal(state.p0, [1, 2])
        assert state.f0 == 0.5 and state.split_counter == 0

    def test_already_at_gbest(self):
        state = make_state([1.0, 2.0], 5.0, i_current=2)
        state.split_counter = 2
        archive_reset(state)
        np.testing.assert_array_equal(state.p0, [1, 2])
        assert state.f0 == 5.0 and state.split_counter == 0

    def test_too_early(self):
        state = make_state([1.0, 2.0], 5.0, i_current=4)
        state.split_counter = 2
        with pytest.raises(ContractViolation):
            archive_reset(state)

    def test_next_split_centres_on_gbest(self):
        # replay a seeded run by hand: one offspring per split, archive length 2,
        # so every second split must restart from the best point seen so far
        p = BenchmarkProblem("sphere", 3, space=SearchSpace.box(3, -5, 5))
        seen = []

        class Spy:
            name = "spy"

            def batch(self, X):
                seen.append(X.copy())
                return p.batch(X)

            def __call__(self, x):
                seen.append(np.array(x)[None, :])
                return p(x)

        params = YiParams(i_min=2, i_max=2, n_offspring=1, n_intervals=1)
        run_yi(Spy(), p.space, params, t_max=200, seed=5)
        flat = np.vstack(seen)

        rng = RngStream(5)
        x0 = p.space.sample(rng)
        np.testing.assert_array_equal(x0, flat[0])
        p0, gbest, f_gbest = x0, x0, p(x0)
        for k in range(1, 200):
            step = sample_stable_array((1, 3), StableParams(1.5), rng)
            cand = resample_out_of_bounds(p0 + 3.0 * step, p.space, rng)[0]
            np.testing.assert_array_equal(cand, flat[k])
            p0 = cand
            if p(cand) < f_gbest:
                gbest, f_gbest = cand, p(cand)
            if k % 2 == 0:
                p0 = gbest


class TestIntervalAdvance:
    def test_divides_scope(self):
        state = make_state([0.0], 0.0, eps=10.0)
        interval_advance(state, YiParams(sigma=3.0))
        assert state.eps == pytest.approx(10 / 3, rel=1e-15)
        assert state.i_current == 14 and state.interval_index == 1

    def test_floor_clamp(self):
        state = make_state([0.0], 0.0, i_current=6)
        interval_advance(state, YiParams(6, 15))
        assert state.i_current == 6

    def test_closed_form_after_all_boundaries(self):
        state = make_state([0.0], 0.0, eps=50.0)
        params = YiParams(6, 15, sigma=3.0)
        for _ in range(10):
            interval_advance(state, params)
        assert state.eps == pytest.approx(50.0 / 3 ** 10, rel=1e-12)
        assert state.i_current == 6


class TestRunYi:
    @pytest.mark.slow
    def test_sphere_2d_success_rate(self):
        p = BenchmarkProblem("sphere", 2, space=SearchSpace.box(2, -5, 5))
        errors = [run_yi(p, p.space, t_max=20_000, seed=s).final_best_fitness for s in range(51)]
        assert sum(e < 1e-3 for e in errors) >= 45

    def test_tiny_budget(self):
        p = BenchmarkProblem("sphere", 3)
        rec = run_yi(p, p.space, t_max=4, seed=0)
        assert rec.total_evals == 4

    def test_determinism(self):
        p = BenchmarkProblem("rastrigin", 4)
        a = run_yi(p, p.space, t_max=3000, seed=17)
        b = run_yi(p, p.space, t_max=3000, seed=17)
        assert a.to_dict() == b.to_dict()

    def test_counting_wrapper_matches_total(self):
        obj = Counting(sphere)
        rec = run_yi(obj, SearchSpace.box(3, -5, 5), t_max=1234, seed=1)
        assert obj.calls == rec.total_evals == 1234

    def test_trace_monotone_and_gbest_consistent(self):
        p = BenchmarkProblem("ackley", 5)
        rec = run_yi(p, p.space, t_max=5000, seed=3)
        counts = [c for c, _ in rec.trace]
        fits = [f for _, f in rec.trace]
        assert counts == sorted(counts)
        assert all(b <= a for a, b in zip(fits, fits[1:]))
        assert rec.final_best_fitness == fits[-1] == p(rec.final_best_point)

    def test_schedule_events(self):
        events = []
        p = BenchmarkProblem("sphere", 4)
        run_yi(p, p.space, YiParams(sigma=3.0), t_max=40_000, seed=2, events=events)
        intervals = [e for e in events if e[0] == "interval"]
        assert [e[1] for e in intervals] == interval_boundaries(40_000, YiParams())
        assert [e[3] for e in intervals] == list(range(14, 5, -1)) + [6]
        np.testing.assert_allclose([e[2] for e in intervals], [4.0 / 3 ** k for k in range(1, 11)],
                                   rtol=1e-12)

    def test_single_interval_never_decays(self):
        events = []
        p = BenchmarkProblem("sphere", 2)
        run_yi(p, p.space, YiParams(5, 5, n_intervals=1), t_max=2000, seed=2, events=events)
        assert not [e for e in events if e[0] == "interval"]
        assert {e[2] for e in events} == {2.0}

    def test_evals_between_resets(self):
        events = []
        p = BenchmarkProblem("sphere", 3)
        params = YiParams()
        run_yi(p, p.space, params, t_max=30_000, seed=4, events=events)
        bounds = interval_boundaries(30_000, params)
        resets = [e for e in events if e[0] == "reset"]
        n_off = params.offspring(3)
        checked = 0
        for prev, cur in zip(resets, resets[1:]):
            crossed = any(prev[1] < b <= cur[1] for b in bounds)
            if not crossed:
                assert cur[1] - prev[1] == cur[3] * n_off
                checked += 1
        assert checked > 50

    def test_eps0_policies(self):
        space = SearchSpace.box(4, -10, 10)
        assert initial_scope(space, YiParams()) == 4.0
        assert initial_scope(space, YiParams(eps0_policy="dimension_halfwidth")) == 40.0

    @pytest.mark.parametrize("kwargs", [dict(i_min=7, i_max=6), dict(sigma=1.0),
                                        dict(alpha_stability=2.1), dict(n_offspring=0),
                                        dict(eps0_policy="bogus")])
    def test_param_validation(self, kwargs):
        with pytest.raises(ValueError):
            YiParams(**kwargs)
