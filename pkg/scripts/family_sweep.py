# /// script
# requires-python = ">=3.12"
# dependencies = []
# ///

# run with `uv run python scripts/family_sweep.py`, set MOCG_PARALLEL=true to use dask threads.

import numpy as np

from src.directions import BetaFamily, BetaRule
from src.problem import builtin_problem
from src.settings import RuntimeSettings
from src.solver import SolveConfig, StepsizeMode, multistart_pareto

settings = RuntimeSettings()
problems = [("quad-pair", 2), ("jos1", 10), ("aniso-pair", 4)]
starts = 20

for name, n in problems:
    problem = builtin_problem(name, n)
    print(f"{name} (n={n}, L={problem.lipschitz}, mu={problem.convexity})")
    for family in BetaFamily:
        for mode in (StepsizeMode.FIXED, StepsizeMode.WOLFE):
            config = SolveConfig(beta_rule=BetaRule.theorem_default(family), stepsize_mode=mode)
            front = multistart_pareto(problem, starts, 0, config, scheduler=settings.scheduler)
            iterations = [r.iterations for r in front.reports]
            func_evals = [r.func_evals for r in front.reports]
            violations = sum(len(r.invariant_violations) for r in front.reports)
            print(
                f"  {family.value:>3} {mode.value:<6} converged {front.converged_count}/{starts}  "
                f"iterations median {np.median(iterations):.0f}  "
                f"objective evals median {np.median(func_evals):.0f}  "
                f"restarts {front.restarts}  violations {violations}"
            )
