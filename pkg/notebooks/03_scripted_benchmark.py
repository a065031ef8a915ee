"""
A scripted benchmark run
========================

Run every task with a probing policy and a nominal-dynamics policy behind
the same agent loop, then sweep the step budget on the perturbed tasks.
No model endpoint is needed: the policy backend answers the prompts.
"""

# %%
import tempfile
from pathlib import Path

from seekbench.harness import parse_config, run_experiment
from seekbench.harness.records import curve, success_rate

out = Path(tempfile.mkdtemp(prefix="seekbench-demo-"))
methods = [
    {"name": "infoseeker", "max_attempts": 5},
    {"name": "vanilla", "method": "vanilla", "max_attempts": 5, "backend": {"kind": "policy", "policy": "naive"}},
]
config = parse_config({"tasks": [{"id": "*"}], "methods": methods, "trials_per_cell": 10,
                       "workers": 4, "output_dir": str(out / "all")})
records = run_experiment(config)
for row in success_rate(records):
    print(f"{row.group:<40} {row.rate:6.1f}%  ({row.successes}/{row.trials - row.errored})")

# %%
sweep = parse_config({"tasks": [{"id": "arm/perturbed"}, {"id": "nav/perturbed"}], "methods": methods[:1],
                      "trials_per_cell": 20, "budget_sweep": [10, 25, 50, 100], "output_dir": str(out / "sweep")})
for p in curve(run_experiment(sweep), "steps"):
    print(f"{p.group:<28} steps={p.budget:<4} {p.rate:6.1f}%")
print("reports under", out)
