"""Regret against s for the MML and two-part ANML codes (n=5), one CSV per model.

Columns: s, then one regret column (nits) per criterion. Plot with any tool;
pass --plot to draw with matplotlib if it is installed.
"""
import argparse
from pathlib import Path

import numpy as np

from countsel.counts_model import ModelClass
from countsel.mdl_criteria import CriterionId
from countsel.selection import regret_curve

CRITERIA = [CriterionId.anml2(), CriterionId.mml_conjugate(), CriterionId.mml_calibrated(),
            CriterionId.mml_half_cauchy_sd(), CriterionId.mml_half_cauchy_mean()]

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--s-max", type=int, default=1000)
    ap.add_argument("--out", default="results/regret")
    ap.add_argument("--plot", action="store_true")
    a = ap.parse_args()
    s = np.arange(1, a.s_max + 1)
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    for model in ModelClass:
        cols = [c for c in CRITERIA if not (model is ModelClass.POISSON and c.kind.value == "mml-hc-mean")]
        curves = [regret_curve(c, model, a.n, s)[1] for c in cols]
        path = Path(f"{a.out}_{model.value}.csv")
        with path.open("w") as fh:
            fh.write("s," + ",".join(c.slug for c in cols) + "\n")
            for i, si in enumerate(s):
                fh.write(f"{si}," + ",".join(f"{cv[i]:.12g}" for cv in curves) + "\n")
        print(f"wrote {path}")
        if a.plot:
            import matplotlib.pyplot as plt
            fig, ax = plt.subplots()
            for c, cv in zip(cols, curves):
                ax.plot(s, cv, label=c.label)
            ax.set_xlabel("s")
            ax.set_ylabel("regret (nits)")
            ax.set_title(f"{model.value}, n={a.n}")
            ax.legend()
            fig.savefig(path.with_suffix(".png"), dpi=120)
