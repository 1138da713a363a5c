"""
A small head-to-head
====================

Run the five optimizers on the smoke suite through the experiment harness and
print the win/tie/loss table against YI. Budgets are tiny so the script
finishes in well under a minute; the CLI runs the full protocol.
"""

import tempfile

from yiopt.harness import export_traces, parse_config, run_experiment

out = tempfile.mkdtemp(prefix="yiopt-demo-")

# %%
# The same mapping could live in a YAML file passed to ``yiopt run --config``.
config = parse_config({
    "suite": "smoke",
    "algorithms": ["yi", "yypo", "dyypo", "de", "pso"],
    "budget_multiplier": 1000,     # 10000 evaluations per 10-D run
    "repetitions": 7,
    "output": out,
})
results = run_experiment(config)

# %%
# A ``+`` means the algorithm's mean error is significantly lower than YI's
# (one-tailed Welch test at 0.05), ``-`` significantly higher.
table = results.table()
for problem in table.problems:
    cells = "  ".join(f"{a}:{table.cells[a, problem].stats.mean:9.3e}{table.cells[a, problem].verdict or ' '}"
                      for a in table.algorithms)
    print(f"{problem:<11} {cells}")
for alg, (w, t, l) in table.totals().items():
    print(f"{alg:>6} vs yi: {w}/{t}/{l}")

# %%
# Convergence curves are written as CSV files, one per problem and algorithm.
paths = export_traces(results, "fraction-of-budget", n_points=21)
print(f"{len(paths)} trace files under {out}/traces")
