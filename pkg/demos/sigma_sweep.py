"""
Sensitivity to the scope decay
==============================

Sweep the decay rate ``sigma`` and compare each setting with the default
``sigma = 3``, in the same win/tie/loss form as a sensitivity table.
"""

import tempfile

from yiopt.harness import SweepSpec, parse_config, run_sweep

config = parse_config({
    "suite": "smoke",
    "algorithms": ["yi"],
    "budget_multiplier": 1000,
    "repetitions": 7,
    "output": tempfile.mkdtemp(prefix="yiopt-sweep-"),
})

# %%
# Each value runs with the same seeds as the base configuration, so the
# ``sigma=3`` row is all ties by construction.
report = run_sweep(config, SweepSpec("sigma", (1.5, 3, 5)))
print(report.to_tsv())
