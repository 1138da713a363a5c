"""
Watching the Yi schedule
========================

Run YI on a 10-dimensional Zakharov function and print how the flight scope
and the archive length change as the budget is spent.
"""

from yiopt import BenchmarkProblem, YiParams, run_yi
from yiopt.yi import interval_boundaries

problem = BenchmarkProblem("zakharov", 10)
params = YiParams()                 # i_min=6, i_max=15, sigma=3, alpha=1.5
t_max = 100_000

# %%
# The budget is cut into equal intervals. With the defaults there are 11 of
# them, so the scope decays ten times and ``I`` walks from 15 down to 6.
print("boundaries:", interval_boundaries(t_max, params))

# %%
# ``events`` collects every interval crossing and every reset to the global
# best. Only the crossings are printed here.
events = []
record = run_yi(problem, problem.space, params, t_max=t_max, seed=1, events=events)
for kind, count, eps, i_len in events:
    if kind == "interval":
        so_far = min(f for c, f in record.trace if c <= count)
        print(f"evals={count:>6}  eps={eps:.3e}  I={i_len:>2}  best so far={so_far:.3e}")

# %%
# Resets happen every ``I`` splits of ``2 * D`` candidates each.
resets = [e for e in events if e[0] == "reset"]
print(f"{len(resets)} resets; final error {record.final_best_fitness:.3e} "
      f"after {record.total_evals} evaluations")
