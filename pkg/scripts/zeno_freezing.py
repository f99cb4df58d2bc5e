"""Freezing of the photon as measurements at fixed strength become more frequent.

Compares sampled trajectories with the exact non-selective density matrix.

    python scripts/zeno_freezing.py --factors 1,5,20,60 --members 100
"""

import argparse

import numpy as np

from rabiwatch import oracle
from rabiwatch.config import preset
from rabiwatch.measurement import average_fuzziness
from rabiwatch.runner import simulate_members
from rabiwatch.state import NATURAL_G


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--members", type=int, default=100)
    ap.add_argument("--factors", default="1,5,20,40,60,100")
    args = ap.parse_args()

    base = preset("fig2")
    print("factor  tau/T_R    fuzziness  exact mean  sampled mean  per-run median  runs < 0.1")
    for factor in (float(x) for x in args.factors.split(",")):
        cfg = base.replace(seed=args.seed, tau=base.tau / factor, cycles=1.0)
        params = cfg.apparatus()
        exact = oracle.nonselective_population(cfg.initial_state(), NATURAL_G, params, cfg.total_steps).mean()
        per_run = simulate_members(cfg, args.members).c2sq.mean(axis=1)
        print(f"{factor:6g}  {params.tau:.2e}  {average_fuzziness(params):9.4f}  {exact:10.4f}  "
              f"{per_run.mean():12.4f}  {np.median(per_run):14.4f}  {np.mean(per_run < 0.1):10.0%}")


if __name__ == "__main__":
    main()
