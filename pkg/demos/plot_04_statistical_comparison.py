"""
Ranking algorithms across datasets
==================================

Friedman's test asks whether the algorithms' mean ranks differ at all;
the Nemenyi critical difference says which gaps are large enough.
"""

from pathlib import Path

import numpy as np

from mhscg.cli import read_scores
from mhscg.metrics import friedman_statistic, mean_ranks, nemenyi_cd

# The score table is constructed so that its rank sums give chi2_F = 14.83;
# it is a test fixture, not measured results.
here = Path(__file__).resolve().parent
names, scores = read_scores(here.parent / "tests" / "data" / "friedman_4x8.csv")

table = mean_ranks(scores, higher_is_better=True)
chi2, ff = friedman_statistic(table)
cd = nemenyi_cd(table.n_algorithms, table.n_datasets, q_alpha=3.031)

print(f"chi2_F = {chi2:.3f}, F_F = {ff:.3f}, CD = {cd:.3f}")
order = np.argsort(table.mean_ranks)
best = table.mean_ranks[order[0]]
for j in order:
    gap = table.mean_ranks[j] - best
    flag = "  (significantly worse than the best)" if gap > cd else ""
    print(f"  {names[j]:8s} mean rank {table.mean_ranks[j]:.2f}{flag}")
