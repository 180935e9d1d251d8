"""Detection rates for means 2, 4, ..., 16 (n=5); writes a long CSV for plotting."""
import argparse
from pathlib import Path

from countsel.simulate import SWEEP_MEANS, ExperimentConfig, mean_sweep

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20172)
    ap.add_argument("--out", default="results/sweep.csv")
    a = ap.parse_args()
    rep = mean_sweep(ExperimentConfig(means=SWEEP_MEANS, replications=a.reps, seed=a.seed))
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    Path(a.out).write_text(rep.to_csv())
    print(rep.to_csv())
