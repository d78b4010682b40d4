"""Multi-view datasets: CSV/JSON manifests, label files and synthetic blobs."""
from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised when a dataset, manifest or label file is malformed."""


@dataclass(frozen=True)
class MultiViewDataset:
    """``r`` feature matrices over the same ``n`` samples.

    Views are stored as read-only float arrays of shape ``(n, d_l)``.
    ``labels`` are 0-based class indices or ``None``.
    """

    views: tuple
    k: int
    labels: Optional[np.ndarray] = None
    name: str = "dataset"

    def __post_init__(self):
        views = tuple(_frozen(np.asarray(v, dtype=float)) for v in self.views)
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen(np.asarray(self.labels)))

    @property
    def n(self) -> int:
        return self.views[0].shape[0] if self.views else 0

    @property
    def r(self) -> int:
        return len(self.views)


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    k: int
    views: list = field(default_factory=list)
    labels: Optional[str] = None
    root: Path = Path(".")

    def view_paths(self) -> list:
        return [self.root / p for p in self.views]

    def labels_path(self) -> Optional[Path]:
        return None if self.labels is None else self.root / self.labels


def _frozen(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    a.flags.writeable = False
    return a


def validate(dataset: MultiViewDataset) -> None:
    """Raise :class:`DatasetError` on any structural problem."""
    if dataset.r < 1:
        raise DatasetError("dataset has no views")
    n = dataset.views[0].shape[0] if dataset.views[0].ndim == 2 else -1
    for i, X in enumerate(dataset.views):
        if X.ndim != 2:
            raise DatasetError(f"view {i} is not a 2-D matrix")
        if X.shape[0] != n:
            raise DatasetError(
                f"row-count mismatch: view 0 has {n} rows, view {i} has {X.shape[0]}"
            )
        if X.shape[1] < 1:
            raise DatasetError(f"view {i} has no feature columns")
        if not np.all(np.isfinite(X)):
            raise DatasetError(f"view {i} contains non-finite entries")
    if n < 2:
        raise DatasetError(f"need at least 2 samples, got {n}")
    if not (1 <= int(dataset.k) <= n):
        raise DatasetError(f"k={dataset.k} must satisfy 1 <= k <= n={n}")
    if dataset.labels is not None:
        y = dataset.labels
        if y.ndim != 1 or y.shape[0] != n:
            raise DatasetError(f"labels must have length n={n}")
        if not np.issubdtype(y.dtype, np.integer):
            raise DatasetError("labels must be integers")
        if y.min() < 0 or y.max() >= dataset.k:
            raise DatasetError(f"label out of range [0, {dataset.k})")


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"missing file: {path}")
    try:
        X = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    except ValueError as exc:
        raise DatasetError(f"non-numeric cell in {path}: {exc}") from None
    return X


def write_matrix(X: np.ndarray, path) -> None:
    # %.17g round-trips every float64 exactly
    np.savetxt(path, np.asarray(X, dtype=float), delimiter=",", fmt="%.17g")


def load_labels(path, k: Optional[int] = None) -> np.ndarray:
    """Read one integer label per line.

    Labels that look 1-based (min 1, max ``k`` or max equal to the number of
    distinct values when ``k`` is unknown) are shifted down with a warning.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"missing file: {path}")
    try:
        raw = np.loadtxt(path, dtype=float, ndmin=1)
    except ValueError as exc:
        raise DatasetError(f"non-numeric label in {path}: {exc}") from None
    if raw.size == 0:
        raise DatasetError(f"empty label file: {path}")
    if not np.all(raw == np.round(raw)):
        raise DatasetError(f"non-integer label in {path}")
    y = raw.astype(np.int64)
    top = k if k is not None else len(np.unique(y))
    if y.min() == 1 and y.max() == top:
        warnings.warn(f"{path.name}: 1-based labels detected, re-basing to 0", stacklevel=2)
        y = y - 1
    return y


def save_labels(labels: Sequence[int], path) -> None:
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DatasetError("refusing to write an empty label file")
    with open(path, "w") as fh:
        fh.writelines(f"{int(v)}\n" for v in labels)


def minmax_scale(X: np.ndarray) -> np.ndarray:
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return (X - lo) / span


def read_manifest(manifest_path) -> DatasetManifest:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DatasetError(f"missing manifest: {manifest_path}")
    try:
        raw = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"manifest is not valid JSON: {exc}") from None
    for key in ("k", "views"):
        if key not in raw:
            raise DatasetError(f"manifest lacks field '{key}'")
    if not isinstance(raw["views"], list) or not raw["views"]:
        raise DatasetError("manifest needs at least one view path")
    return DatasetManifest(
        name=str(raw.get("name", manifest_path.stem)),
        k=int(raw["k"]),
        views=[str(v) for v in raw["views"]],
        labels=raw.get("labels"),
        root=manifest_path.resolve().parent,
    )


def load_dataset(manifest_path, scale: bool = False) -> MultiViewDataset:
    """Load and validate the dataset described by a JSON manifest.

    Paths inside the manifest are resolved relative to its directory.
    ``scale=True`` applies per-view min-max scaling to [0, 1].
    """
    man = read_manifest(manifest_path)
    views = [read_matrix(p) for p in man.view_paths()]
    if scale:
        views = [minmax_scale(X) for X in views]
    labels = None
    if man.labels_path() is not None:
        labels = load_labels(man.labels_path(), k=man.k)
    ds = MultiViewDataset(views=tuple(views), k=man.k, labels=labels, name=man.name)
    validate(ds)
    return ds


def save_dataset(dataset: MultiViewDataset, out_dir) -> Path:
    """Write views, labels and a manifest into ``out_dir``; return the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    view_names = []
    for i, X in enumerate(dataset.views, start=1):
        fname = f"view_{i}.csv"
        write_matrix(X, out_dir / fname)
        view_names.append(fname)
    manifest = {"name": dataset.name, "k": int(dataset.k), "views": view_names}
    if dataset.labels is not None:
        save_labels(dataset.labels, out_dir / "labels.csv")
        manifest["labels"] = "labels.csv"
    path = out_dir / "manifest.json"
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(manifest, indent=2) + "\n")
    os.replace(tmp, path)
    return path


def synth_multiview(
    n_per_cluster: int,
    k: int,
    r: int,
    dims: Sequence[int],
    noise_std: float,
    seed: int,
) -> MultiViewDataset:
    """Gaussian blobs around centers on a radius-10 sphere, one set per view.

    Every view shares the same labels; samples are ordered by class.
    """
    dims = list(dims)
    if len(dims) != r:
        raise DatasetError(f"dims has {len(dims)} entries but r={r}")
    if n_per_cluster < 1 or k < 2 or r < 1:
        raise DatasetError("need n_per_cluster >= 1, k >= 2, r >= 1")
    if noise_std < 0:
        raise DatasetError("noise_std must be nonnegative")
    if any(d < 1 for d in dims):
        raise DatasetError("every view dimension must be >= 1")

    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(k), n_per_cluster)
    views = []
    for d in dims:
        centers = rng.standard_normal((k, d))
        centers *= 10.0 / np.linalg.norm(centers, axis=1, keepdims=True)
        X = centers[labels] + noise_std * rng.standard_normal((labels.size, d))
        views.append(X)
    ds = MultiViewDataset(views=tuple(views), k=k, labels=labels, name=f"synth-{seed}")
    validate(ds)
    return ds
