"""Yi optimizer, its YYPO ancestors, DE/PSO baselines and a benchmark harness."""

from .baselines import DeParams, PsoParams, run_de, run_pso
from .benchmarks import BenchmarkProblem, error_value, make_problem
from .core import (BudgetExhausted, EvalBudget, RngStream, RunRecord, SearchSpace,
                   evaluate_counted, resample_out_of_bounds)
from .stable import StableParams, sample_stable, sample_stable_vector
from .stats import build_table, classify, summarize, welch_one_tail
from .yi import YiParams, run_yi
from .yypo import YypoParams, run_yypo

__version__ = "0.1.0"
