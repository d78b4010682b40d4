"""External clustering metrics and rank-based comparison statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import rankdata


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # k_pred x k_true

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def col_sums(self):
        return self.counts.sum(axis=0)

    @property
    def n(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class RankTable:
    scores: np.ndarray
    ranks: np.ndarray

    @property
    def mean_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)

    @property
    def n_datasets(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.ranks.shape[1]


def contingency(pred, truth) -> ContingencyTable:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.size} vs {truth.size}")
    if pred.size == 0:
        raise ValueError("empty label vectors")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    counts = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(counts, (p, t), 1)
    return ContingencyTable(counts)


def _comb2(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2.0


def accuracy(pred, truth) -> float:
    """Fraction of samples matched under the best one-to-one label mapping."""
    table = contingency(pred, truth)
    rows, cols = linear_sum_assignment(-table.counts)
    return float(table.counts[rows, cols].sum()) / table.n


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """Mutual information over the geometric mean of the two entropies."""
    table = contingency(pred, truth)
    n = table.n
    hu = _entropy(table.row_sums, n)
    hv = _entropy(table.col_sums, n)
    if hu == 0.0 or hv == 0.0:
        # a single-cluster side: identical only if both are single-cluster
        return 1.0 if hu == hv else 0.0
    c = table.counts
    nz = c > 0
    outer = np.outer(table.row_sums, table.col_sums)
    mi = float(np.sum(c[nz] / n * np.log(c[nz] * n / outer[nz])))
    return max(0.0, min(1.0, mi / np.sqrt(hu * hv)))


def pairwise_fscore(pred, truth) -> float:
    table = contingency(pred, truth)
    if table.n < 2:
        raise ValueError("pairwise F-score needs at least 2 samples")
    both = _comb2(table.counts).sum()
    same_pred = _comb2(table.row_sums).sum()
    same_truth = _comb2(table.col_sums).sum()
    if same_pred == 0 and same_truth == 0:
        return 1.0
    precision = both / same_pred if same_pred > 0 else 0.0
    recall = both / same_truth if same_truth > 0 else 0.0
    if precision + recall == 0:
        return 0.0
    return float(2 * precision * recall / (precision + recall))


def adjusted_rand(pred, truth) -> float:
    table = contingency(pred, truth)
    index = _comb2(table.counts).sum()
    sa = _comb2(table.row_sums).sum()
    sb = _comb2(table.col_sums).sum()
    total = _comb2(table.n)
    expected = sa * sb / total if total > 0 else 0.0
    maximum = 0.5 * (sa + sb)
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))


def evaluate(pred, truth) -> dict:
    return {
        "acc": accuracy(pred, truth),
        "nmi": nmi(pred, truth),
        "fscore": pairwise_fscore(pred, truth),
        "ari": adjusted_rand(pred, truth),
    }


def summarize(reports) -> dict:
    """Mean and population standard deviation of each metric over repeated runs."""
    out = {}
    for key in ("acc", "nmi", "fscore", "ari"):
        vals = np.array([r[key] for r in reports], dtype=float)
        out[key] = {"mean": float(vals.mean()), "std": float(vals.std()), "values": vals.tolist()}
    out["repeats"] = len(reports)
    return out


def mean_ranks(scores, higher_is_better: bool = True) -> RankTable:
    """Per-row ranks (1 = best, ties share the mid-rank)."""
    S = np.asarray(scores, dtype=float)
    if S.ndim == 1:
        S = S[None, :]
    if np.isnan(S).any():
        raise ValueError("scores contain NaN")
    keyed = -S if higher_is_better else S
    ranks = np.vstack([rankdata(row, method="average") for row in keyed])
    return RankTable(scores=S, ranks=ranks)


def friedman_chi2(avg_ranks, n_datasets: int) -> float:
    R = np.asarray(avg_ranks, dtype=float)
    nk = R.size
    return 12.0 * n_datasets / (nk * (nk + 1)) * (np.sum(R**2) - nk * (nk + 1) ** 2 / 4.0)


def friedman_ff(chi2: float, n_datasets: int, n_algorithms: int) -> float:
    """Iman-Davenport correction of the Friedman statistic."""
    denom = n_datasets * (n_algorithms - 1) - chi2
    if denom <= 0:
        raise ValueError("degenerate F_F denominator (all datasets rank algorithms identically)")
    return (n_datasets - 1) * chi2 / denom


def friedman_statistic(ranks: RankTable):
    """``(chi2_F, F_F)`` for a table of per-dataset ranks."""
    nd, nk = ranks.ranks.shape
    if nd < 2 or nk < 2:
        raise ValueError("need at least 2 datasets and 2 algorithms")
    chi2 = friedman_chi2(ranks.mean_ranks, nd)
    return chi2, friedman_ff(chi2, nd, nk)


def nemenyi_cd(n_algorithms: int, n_datasets: int, q_alpha: float) -> float:
    """Critical difference of average ranks for the Nemenyi post-hoc test."""
    return q_alpha * np.sqrt(n_algorithms * (n_algorithms + 1) / (6.0 * n_datasets))
