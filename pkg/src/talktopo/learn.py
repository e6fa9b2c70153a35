"""Label preparation, from-scratch classifiers, and k-fold cross-validation.

Ratings become binary labels by normalizing each category's count by the
talk's view count and splitting at the per-category median (strictly
greater than the median maps to 1, so all-equal scores give all zeros).
Three classifiers are implemented directly on numpy: L2-regularized
logistic regression and linear hinge-loss SVM trained by full-batch
(sub)gradient descent, and a one-hidden-layer rectifier MLP trained by
seeded mini-batch gradient descent. Their loss gradients are exposed as
pure functions so the test suite can check them against central finite
differences. Cross-validation shuffles once with a named stream from the
dataset's fold seed, standardizes features with training-fold statistics
only, and reports per-label, per-fold, and grand-mean accuracies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .errors import DataError, TrainingError
from .rng import generator_for, int_seed_for

RATING_CATEGORIES = (
    "beautiful",
    "confusing",
    "courageous",
    "fascinating",
    "funny",
    "informative",
    "ingenious",
    "inspiring",
    "jaw-dropping",
    "long-winded",
    "obnoxious",
    "ok",
    "persuasive",
    "unconvincing",
)

FEATURE_SPECS = ("doc_only", "doc_plus_piv")
MODEL_KINDS = ("logreg", "linear_svm", "mlp")


@dataclass(frozen=True)
class RatingRecord:
    """One talk's view count and per-category rating counts."""

    talk_id: str
    view_count: int
    rating_counts: dict[str, int]

    def __post_init__(self):
        got = set(self.rating_counts)
        want = set(RATING_CATEGORIES)
        if got != want:
            missing = sorted(want - got)
            extra = sorted(got - want)
            raise DataError(
                f"talk {self.talk_id!r}: rating categories mismatch"
                + (f", missing {missing}" if missing else "")
                + (f", unexpected {extra}" if extra else "")
            )
        for name, count in self.rating_counts.items():
            if int(count) != count or count < 0:
                raise DataError(
                    f"talk {self.talk_id!r}: count for {name!r} must be a "
                    f"non-negative integer, got {count!r}"
                )


def binarize_labels(records: list[RatingRecord]) -> np.ndarray:
    """(N, 14) 0/1 matrix: normalized score strictly above category median.

    score = count / view_count per talk and category; the median is taken
    per category across all talks. Scaling every count and view count by
    one constant leaves scores, medians, and therefore labels unchanged.
    """
    if not records:
        raise ValueError("need at least one rating record")
    for r in records:
        if r.view_count <= 0:
            raise DataError(
                f"talk {r.talk_id!r}: view count must be positive, got {r.view_count}"
            )
    scores = np.array(
        [
            [r.rating_counts[c] / r.view_count for c in RATING_CATEGORIES]
            for r in records
        ],
        dtype=np.float64,
    )
    medians = np.median(scores, axis=0)
    return (scores > medians[None, :]).astype(np.int8)


def assemble_features(
    doc_vectors: np.ndarray, pivs: np.ndarray | None, feature_spec: str
) -> np.ndarray:
    """Stack the feature blocks one talk per row, PIV columns last.

    doc_only ignores topology and requires pivs to be absent;
    doc_plus_piv appends each talk's image vector after its document
    vector. Standardization happens downstream, per training fold.
    """
    if feature_spec not in FEATURE_SPECS:
        raise ValueError(f"feature_spec must be one of {FEATURE_SPECS}, got {feature_spec!r}")
    doc = np.asarray(doc_vectors, dtype=np.float64)
    if doc.ndim != 2:
        raise DataError(f"doc_vectors must be 2-D, got shape {doc.shape}")
    if feature_spec == "doc_only":
        if pivs is not None:
            raise ValueError("doc_only takes no PIV block; pass pivs=None")
        out = doc.copy()
    else:
        if pivs is None:
            raise ValueError("doc_plus_piv requires a PIV block")
        piv = np.asarray(pivs, dtype=np.float64)
        if piv.ndim != 2 or piv.shape[0] != doc.shape[0]:
            raise DataError(
                f"PIV rows {piv.shape} do not match doc rows {doc.shape}"
            )
        out = np.hstack([doc, piv])
    if not np.all(np.isfinite(out)):
        raise DataError("features must be finite")
    return out


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix, binary label matrix, and the fold-shuffle seed."""

    features: np.ndarray
    labels: np.ndarray
    feature_spec: str
    fold_seed: int

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim != 2 or y.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError(
                f"features {X.shape} and labels {y.shape} must be 2-D with equal rows"
            )
        if not np.all(np.isfinite(X)):
            raise DataError("features must be finite")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be binary")
        if self.feature_spec not in FEATURE_SPECS:
            raise ValueError(f"feature_spec must be one of {FEATURE_SPECS}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y.astype(np.int8))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]


class Standardizer:
    """Per-column zero-mean unit-variance scaling with frozen statistics.

    fit computes column means and standard deviations from the rows it is
    given (the training fold); transform reuses them unchanged, so test
    rows never influence the statistics. Constant columns get scale 1 and
    land exactly on zero.
    """

    def __init__(self):
        self.mean_: np.ndarray | None = None
        self.scale_: np.ndarray | None = None

    def fit(self, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError(f"need a nonempty 2-D matrix, got shape {X.shape}")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0.0] = 1.0
        self.scale_ = std
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.mean_ is None:
            raise ValueError("fit must run before transform")
        return (np.asarray(X, dtype=np.float64) - self.mean_) / self.scale_


@dataclass(frozen=True)
class Hyperparams:
    """Training knobs; learning_rate None picks the per-model default
    (0.1 for the linear models, 0.01 for the MLP)."""

    learning_rate: float | None = None
    epochs: int = 500
    l2: float = 1e-4
    hidden_size: int = 100
    batch_size: int = 32
    seed: int = 0

    def resolved_rate(self, kind: str) -> float:
        if self.learning_rate is not None:
            return float(self.learning_rate)
        return 0.01 if kind == "mlp" else 0.1


@dataclass(frozen=True)
class TrainedModel:
    """Fitted weights plus enough context to score new rows."""

    kind: str
    weights: dict[str, np.ndarray]
    hyperparams: Hyperparams

    def decision_values(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        w = self.weights
        if self.kind in ("logreg", "linear_svm"):
            return X @ w["w"] + w["b"]
        hidden = np.maximum(X @ w["W1"] + w["b1"], 0.0)
        return hidden @ w["w2"] + w["b2"]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.decision_values(X) > 0.0).astype(np.int8)


def _check_training_inputs(X: np.ndarray, y: np.ndarray):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
        raise ValueError(f"X {X.shape} and y {y.shape} must be nonempty with equal rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("X must be finite")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be binary 0/1")
    return X, y


def logreg_loss_and_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean log loss plus l2/2 * ||w||^2; theta is (F+1,), bias last,
    bias unregularized. Returns (loss, gradient)."""
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))
    resid = (expit(z) - y) / len(y)
    grad = np.concatenate([X.T @ resid + l2 * w, [resid.sum()]])
    return loss, grad


def hinge_loss_and_grad(theta: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean hinge loss max(0, 1 - s*z) with s = 2y - 1, plus l2/2 * ||w||^2;
    subgradient 0 on the margin boundary. Returns (loss, subgradient)."""
    w, b = theta[:-1], theta[-1]
    s = 2.0 * y - 1.0
    z = X @ w + b
    margin = 1.0 - s * z
    loss = float(np.mean(np.maximum(margin, 0.0)) + 0.5 * l2 * (w @ w))
    active = (margin > 0.0).astype(np.float64) * s / len(y)
    grad = np.concatenate([-(X.T @ active) + l2 * w, [-active.sum()]])
    return loss, grad


def mlp_unpack(theta: np.ndarray, n_features: int, hidden: int):
    """Split a flat parameter vector into (W1, b1, w2, b2)."""
    end1 = n_features * hidden
    W1 = theta[:end1].reshape(n_features, hidden)
    b1 = theta[end1:end1 + hidden]
    w2 = theta[end1 + hidden:end1 + 2 * hidden]
    b2 = theta[-1]
    return W1, b1, w2, b2


def mlp_loss_and_grad(
    theta: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float, hidden: int
):
    """Mean log loss of rectifier-hidden-layer network, l2/2 on both weight
    matrices, biases unregularized. Returns (loss, flat gradient)."""
    F = X.shape[1]
    W1, b1, w2, b2 = mlp_unpack(theta, F, hidden)
    pre = X @ W1 + b1
    h = np.maximum(pre, 0.0)
    z = h @ w2 + b2
    loss = float(
        np.mean(np.logaddexp(0.0, z) - y * z)
        + 0.5 * l2 * (float(np.sum(W1 * W1)) + float(w2 @ w2))
    )
    dz = (expit(z) - y) / len(y)
    gw2 = h.T @ dz + l2 * w2
    gb2 = dz.sum()
    dpre = np.outer(dz, w2) * (pre > 0.0)
    gW1 = X.T @ dpre + l2 * W1
    gb1 = dpre.sum(axis=0)
    grad = np.concatenate([gW1.ravel(), gb1, gw2, [gb2]])
    return loss, grad


def _descend(theta, X, y, hp, kind, loss_and_grad):
    rate = hp.resolved_rate(kind)
    for epoch in range(hp.epochs):
        loss, grad = loss_and_grad(theta, X, y, hp.l2)
        if not math.isfinite(loss):
            raise TrainingError(f"{kind}: non-finite loss at epoch {epoch}")
        theta = theta - rate * grad
    return theta


def train_logreg(X, y, hp: Hyperparams | None = None) -> TrainedModel:
    """Full-batch gradient descent on regularized log loss, zero init."""
    hp = hp or Hyperparams()
    X, y = _check_training_inputs(X, y)
    theta = _descend(np.zeros(X.shape[1] + 1), X, y, hp, "logreg", logreg_loss_and_grad)
    return TrainedModel(
        kind="logreg", weights={"w": theta[:-1], "b": theta[-1]}, hyperparams=hp
    )


def train_linear_svm(X, y, hp: Hyperparams | None = None) -> TrainedModel:
    """Full-batch subgradient descent on regularized hinge loss, zero init."""
    hp = hp or Hyperparams()
    X, y = _check_training_inputs(X, y)
    theta = _descend(np.zeros(X.shape[1] + 1), X, y, hp, "linear_svm", hinge_loss_and_grad)
    return TrainedModel(
        kind="linear_svm", weights={"w": theta[:-1], "b": theta[-1]}, hyperparams=hp
    )


def train_mlp(X, y, hp: Hyperparams | None = None) -> TrainedModel:
    """Seeded mini-batch gradient descent on a one-hidden-layer rectifier
    network; weights start Gaussian scaled by 1/sqrt(fan-in), biases zero."""
    hp = hp or Hyperparams()
    X, y = _check_training_inputs(X, y)
    n, F = X.shape
    H = hp.hidden_size
    rng = np.random.default_rng(hp.seed)
    theta = np.concatenate(
        [
            (rng.standard_normal((F, H)) / math.sqrt(F)).ravel(),
            np.zeros(H),
            rng.standard_normal(H) / math.sqrt(H),
            [0.0],
        ]
    )
    rate = hp.resolved_rate("mlp")
    batch = max(1, min(hp.batch_size, n))
    for epoch in range(hp.epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            take = order[start:start + batch]
            loss, grad = mlp_loss_and_grad(theta, X[take], y[take], hp.l2, H)
            if not math.isfinite(loss):
                raise TrainingError(f"mlp: non-finite loss at epoch {epoch}")
            theta = theta - rate * grad
    W1, b1, w2, b2 = mlp_unpack(theta, F, H)
    return TrainedModel(
        kind="mlp",
        weights={"W1": W1.copy(), "b1": b1.copy(), "w2": w2.copy(), "b2": b2},
        hyperparams=hp,
    )


_TRAINERS = {"logreg": train_logreg, "linear_svm": train_linear_svm, "mlp": train_mlp}


@dataclass(frozen=True)
class CrossValidationResult:
    """Accuracy table for one (model kind, feature spec) cell."""

    model_kind: str
    feature_spec: str
    k: int
    per_label_fold_accuracy: np.ndarray  # (labels, k)
    per_label_mean: np.ndarray  # (labels,)
    grand_mean: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


def fold_indices(n_rows: int, k: int, fold_seed: int) -> list[np.ndarray]:
    """Disjoint shuffled folds covering range(n_rows), sizes within 1."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if n_rows < k:
        raise ValueError(f"need at least k={k} rows, got {n_rows}")
    perm = generator_for(fold_seed, "folds").permutation(n_rows)
    return np.array_split(perm, k)


def cross_validate(
    ds: LabeledDataset, model_kind: str, k: int = 10, hp: Hyperparams | None = None
) -> CrossValidationResult:
    """k-fold accuracy per label column for one classifier kind.

    One seeded shuffle fixes the folds for every label and model. Each
    fold standardizes features on its training rows only, trains one
    model per label column, and scores plain accuracy on the held-out
    rows. A training fold whose labels are single-class is recorded as a
    warning and still scored (the model degenerates to a constant
    predictor). Reported means are unweighted over folds, then labels.
    """
    if model_kind not in _TRAINERS:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}, got {model_kind!r}")
    hp = hp or Hyperparams()
    folds = fold_indices(ds.n_rows, k, ds.fold_seed)
    n_labels = ds.labels.shape[1]
    acc = np.zeros((n_labels, k))
    warnings: list[str] = []
    for fold_idx, test_rows in enumerate(folds):
        train_rows = np.setdiff1d(np.arange(ds.n_rows), test_rows)
        scaler = Standardizer().fit(ds.features[train_rows])
        X_train = scaler.transform(ds.features[train_rows])
        X_test = scaler.transform(ds.features[test_rows])
        for label in range(n_labels):
            y_train = ds.labels[train_rows, label].astype(np.float64)
            y_test = ds.labels[test_rows, label]
            if len(np.unique(y_train)) < 2:
                warnings.append(
                    f"fold {fold_idx} label {label}: single-class training labels"
                )
            run_hp = replace(
                hp, seed=int_seed_for(ds.fold_seed, "model", model_kind, label, fold_idx)
            )
            model = _TRAINERS[model_kind](X_train, y_train, run_hp)
            acc[label, fold_idx] = float(np.mean(model.predict(X_test) == y_test))
    per_label = acc.mean(axis=1)
    return CrossValidationResult(
        model_kind=model_kind,
        feature_spec=ds.feature_spec,
        k=k,
        per_label_fold_accuracy=acc,
        per_label_mean=per_label,
        grand_mean=float(per_label.mean()),
        warnings=tuple(warnings),
    )
