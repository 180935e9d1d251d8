"""Selection bias under a 50/50 Poisson/geometric mixture, n=5."""
import argparse
from pathlib import Path

from countsel.simulate import ExperimentConfig, run_bias_experiment
from run_table1 import wide

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20171)
    ap.add_argument("--shards", type=int, default=4)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/table2")
    a = ap.parse_args()
    rep = run_bias_experiment(ExperimentConfig(replications=a.reps, seed=a.seed,
                                               shards=a.shards, workers=a.workers))
    print(wide(rep))
    out = Path(a.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".csv").write_text(rep.to_csv())
    out.with_suffix(".json").write_text(rep.to_json() + "\n")
