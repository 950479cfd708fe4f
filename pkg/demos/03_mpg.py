"""Fuel consumption (MPG) benchmark, 392 cars and 7 inputs.

Unregularized quadratic rules overfit badly here: 8 rules times 36
terms is 288 coefficients fitted from about 314 training cars.
"""

import sys
from pathlib import Path

from rsfrm import load_config, run_experiment

root = Path(__file__).resolve().parents[1]
config = load_config(sys.argv[1] if len(sys.argv) > 1 else root / "configs" / "mpg.json")
report = run_experiment(config)

print(report.dataset_name, report.n_patterns, "patterns,", report.n_inputs, "inputs")
for v in report.variants:
    te = v.test
    fallbacks = sum(c.used_fallback for c in v.cells)
    print("%-10s test RMSE %8.3f +/- %-8.3f fallback folds: %d" % (v.spec.label, te.mean, te.std, fallbacks))
