"""Convert the Auto-MPG table shipped in ``vega_datasets`` to a KEEL file.

Rows with missing values are dropped (392 remain), model year becomes the
two-digit year and origin is coded 1 = USA, 2 = Europe, 3 = Japan, matching
the UCI/KEEL ``auto-mpg`` layout.

    pip install vega_datasets
    python scripts/make_mpg_keel.py tests/data/mpg.dat
"""

import json
import sys
from importlib import resources

import numpy as np

from rsfrm.dataio import Dataset, save_keel

ORIGIN = {"USA": 1, "Europe": 2, "Japan": 3}
INPUTS = ["Cylinders", "Displacement", "Horsepower", "Weight", "Acceleration", "Model_year", "Origin"]


def main(out):
    raw = json.loads(resources.files("vega_datasets").joinpath("_data/cars.json").read_text())
    rows = []
    for r in raw:
        if any(v is None for v in r.values()):
            continue
        rows.append([
            r["Cylinders"], r["Displacement"], r["Horsepower"], r["Weight_in_lbs"],
            r["Acceleration"], int(r["Year"][:4]) - 1900, ORIGIN[r["Origin"]], r["Miles_per_Gallon"],
        ])
    table = np.array(rows, dtype=np.float64)
    save_keel(Dataset("auto-mpg", table[:, :-1], table[:, -1]), out, INPUTS, "Mpg")
    print(f"wrote {len(rows)} patterns to {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "mpg.dat")
