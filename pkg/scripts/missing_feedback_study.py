"""Readout fidelity when a fraction of the feedback atoms is lost.

Every miss probability reuses the same seed, so members differ only in which
feedback atoms went missing.

    python scripts/missing_feedback_study.py --members 200 --out out/missing.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from rabiwatch.config import preset
from rabiwatch.runner import ensemble_metrics, fmt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--members", type=int, default=50)
    ap.add_argument("--miss", default="0,0.02,0.04,0.07,0.1,0.15,0.25")
    ap.add_argument("--out", default="out/missing_feedback.csv")
    args = ap.parse_args()

    rows = []
    for miss in (float(x) for x in args.miss.split(",")):
        cfg = preset("fig2").replace(seed=args.seed, feedback="per_atom", miss_prob=miss)
        metrics = ensemble_metrics(cfg, args.members)
        fid = np.array([m["fidelity_correlation"] for m in metrics])
        corr = np.array([m["correlation"] for m in metrics])
        rows.append((miss, np.median(fid), fid.std(ddof=1) / np.sqrt(len(fid)), np.median(corr)))
        print(f"miss {miss:5.3f}: fidelity median {rows[-1][1]:.3f} (SE of mean {rows[-1][2]:.3f}), "
              f"readout correlation median {rows[-1][3]:.3f}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["miss_probability", "median_fidelity_correlation", "se_fidelity", "median_readout_correlation"])
        w.writerows([fmt(x) for x in row] for row in rows)


if __name__ == "__main__":
    main()
