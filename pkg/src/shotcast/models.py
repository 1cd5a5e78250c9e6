"""Mean/spread forecasters mapping (home ELO, away ELO) to a normal distribution.

Two estimators are provided:

* a two-stage linear model: an OLS fit of the target, then a second OLS fit
  of the absolute training residuals that predicts the spread;
* a k-nearest-neighbour model whose forecast is the mean and sample standard
  deviation of the neighbours' targets.

Both are wrapped in :class:`DistributionForecaster`, which applies the
physical bounds of the target (shot counts are non-negative, conversion
rates live in [0, 1]).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Protocol, Sequence

import numpy as np

from .elo import NormalSpec

TargetKind = Literal["quantity", "quality"]

MAD_TO_SIGMA = math.sqrt(math.pi / 2)


class DegenerateFeatures(ValueError):
    """The design matrix does not have full column rank."""


class FeatureRow(NamedTuple):
    elo_home: float
    elo_away: float


class _Regressor(Protocol):
    def predict(self, elo_home, elo_away) -> np.ndarray: ...


def _as_features(features) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError(f"features must have shape (n, 2), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    return X


@dataclass(frozen=True)
class LinearModel:
    intercept: float
    coef_home: float
    coef_away: float

    def predict(self, elo_home, elo_away) -> np.ndarray:
        return (
            self.intercept
            + self.coef_home * np.asarray(elo_home, dtype=float)
            + self.coef_away * np.asarray(elo_away, dtype=float)
        )

    def to_dict(self) -> dict:
        return {"kind": "linear", "intercept": self.intercept,
                "coef_home": self.coef_home, "coef_away": self.coef_away}

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        return cls(float(d["intercept"]), float(d["coef_home"]), float(d["coef_away"]))


def fit_ols(features, targets) -> LinearModel:
    """Least-squares fit of ``y ~ 1 + elo_home + elo_away``.

    Solves the normal equations. The slope block is solved on centred
    features and the intercept recovered from the means; this is the same
    minimiser as the raw system but far better conditioned when the
    features sit around several hundred rating points.

    Raises
    ------
    DegenerateFeatures
        If fewer than three rows are given or the features are collinear.
    """
    X = _as_features(features)
    y = np.asarray(targets, dtype=float).ravel()
    if len(y) != len(X):
        raise ValueError("features and targets differ in length")
    if len(X) < 3:
        raise DegenerateFeatures("degenerate features: need at least 3 rows")

    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    gram = Xc.T @ Xc
    scale = np.sqrt(np.diag(gram))
    if np.any(scale == 0):
        raise DegenerateFeatures("degenerate features: a feature column is constant")
    # rank check on the correlation matrix so the threshold is scale-free
    corr = gram / np.outer(scale, scale)
    if np.linalg.eigvalsh(corr).min() < 1e-10:
        raise DegenerateFeatures("degenerate features: columns are collinear")
    slopes = np.linalg.solve(gram, Xc.T @ (y - y_mean))
    intercept = y_mean - x_mean @ slopes
    return LinearModel(float(intercept), float(slopes[0]), float(slopes[1]))


@dataclass(frozen=True, eq=False)
class NeighborModel:
    """Stored training rows queried by Euclidean distance.

    Distances are measured on features standardised with the training
    ``center`` and ``scale``. Ties at the k-th distance go to the row that
    was inserted first.
    """

    features: np.ndarray
    targets: np.ndarray
    k: int
    center: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if not 1 <= self.k <= len(self.targets):
            raise ValueError(f"k={self.k} must be between 1 and the number of rows ({len(self.targets)})")

    def query(self, elo_home, elo_away) -> tuple[np.ndarray, np.ndarray]:
        """Neighbour mean and sample std for each query point."""
        q = np.column_stack([np.atleast_1d(elo_home), np.atleast_1d(elo_away)]).astype(float)
        Z = (self.features - self.center) / self.scale
        Q = (q - self.center) / self.scale
        d = ((Q[:, None, :] - Z[None, :, :]) ** 2).sum(axis=-1)

        k = self.k
        n = d.shape[1]
        if k == n:
            mask = np.ones_like(d, dtype=bool)
        else:
            kth = np.partition(d, k - 1, axis=1)[:, k - 1 : k]
            below = d < kth
            n_below = below.sum(axis=1, keepdims=True)
            at = d == kth
            # keep the earliest tied rows until k are selected
            mask = below | (at & (np.cumsum(at, axis=1) <= k - n_below))

        y = self.targets
        mean = (mask * y).sum(axis=1) / k
        if k == 1:
            std = np.zeros_like(mean)
        else:
            std = np.sqrt((mask * (y - mean[:, None]) ** 2).sum(axis=1) / (k - 1))
        return mean, std

    def predict(self, elo_home, elo_away) -> np.ndarray:
        return self.query(elo_home, elo_away)[0]

    def to_dict(self) -> dict:
        return {
            "kind": "knn",
            "k": self.k,
            "features": self.features.tolist(),
            "targets": self.targets.tolist(),
            "center": self.center.tolist(),
            "scale": self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NeighborModel":
        return cls(
            features=np.asarray(d["features"], dtype=float).reshape(-1, 2),
            targets=np.asarray(d["targets"], dtype=float),
            k=int(d["k"]),
            center=np.asarray(d["center"], dtype=float),
            scale=np.asarray(d["scale"], dtype=float),
        )


def _model_from_dict(d: dict | None):
    if d is None:
        return None
    if d["kind"] == "linear":
        return LinearModel.from_dict(d)
    if d["kind"] == "knn":
        return NeighborModel.from_dict(d)
    raise ValueError(f"unknown model kind {d['kind']!r}")


@dataclass(frozen=True, eq=False)
class DistributionForecaster:
    """A fitted (mean, spread) pair for one target on one side of the pitch.

    ``spread_model`` is None for neighbour models, which report spread
    directly. When ``mad_rescale`` is set the spread model's output (a mean
    absolute residual) is multiplied by sqrt(pi/2) to give a normal sigma.
    """

    mean_model: LinearModel | NeighborModel
    spread_model: LinearModel | None
    target_kind: TargetKind
    side: str = "home"
    mad_rescale: bool = True

    def predict(self, elo_home, elo_away) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised forecast: clamped means and stds for each query."""
        if self.spread_model is None:
            mean, std = self.mean_model.query(elo_home, elo_away)
        else:
            mean = self.mean_model.predict(elo_home, elo_away)
            std = self.spread_model.predict(elo_home, elo_away)
            if self.mad_rescale:
                std = std * MAD_TO_SIGMA
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        std = np.atleast_1d(np.asarray(std, dtype=float))
        if self.target_kind == "quality":
            mean = np.clip(mean, 0.0, 1.0)
        else:
            mean = np.maximum(mean, 0.0)
        return mean, np.maximum(std, 0.0)

    def to_dict(self) -> dict:
        return {
            "kind": "knn" if self.spread_model is None else "two_stage",
            "target_kind": self.target_kind,
            "side": self.side,
            "mad_rescale": self.mad_rescale,
            "clamp": {"mean": [0.0, 1.0 if self.target_kind == "quality" else None],
                      "std": [0.0, None]},
            "mean_model": self.mean_model.to_dict(),
            "spread_model": None if self.spread_model is None else self.spread_model.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionForecaster":
        return cls(
            mean_model=_model_from_dict(d["mean_model"]),
            spread_model=_model_from_dict(d["spread_model"]),
            target_kind=d["target_kind"],
            side=d.get("side", "home"),
            mad_rescale=bool(d.get("mad_rescale", True)),
        )

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "DistributionForecaster":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def fit_two_stage(
    features,
    targets,
    mean_fitter: Callable[..., _Regressor] = fit_ols,
    *,
    target_kind: TargetKind = "quantity",
    side: str = "home",
    mad_rescale: bool = True,
) -> DistributionForecaster:
    """Fit a mean model, then an OLS model of its absolute training residuals."""
    X = _as_features(features)
    y = np.asarray(targets, dtype=float).ravel()
    mean_model = mean_fitter(X, y)
    residuals = np.abs(y - mean_model.predict(X[:, 0], X[:, 1]))
    spread_model = fit_ols(X, residuals)
    return DistributionForecaster(mean_model, spread_model, target_kind, side, mad_rescale)


def fit_knn(
    features,
    targets,
    k: int,
    *,
    target_kind: TargetKind = "quantity",
    side: str = "home",
) -> DistributionForecaster:
    """Store the training rows for neighbour lookup with ``k`` neighbours."""
    X = _as_features(features)
    y = np.asarray(targets, dtype=float).ravel()
    if len(y) != len(X):
        raise ValueError("features and targets differ in length")
    if k < 1 or k > len(y):
        raise ValueError(f"k={k} must be between 1 and the number of rows ({len(y)})")
    center = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    model = NeighborModel(X.copy(), y.copy(), int(k), center, scale)
    return DistributionForecaster(model, None, target_kind, side, mad_rescale=False)


def forecast(fc: DistributionForecaster, row: FeatureRow | Sequence[float]) -> NormalSpec:
    """Clamped normal forecast for a single fixture."""
    mean, std = fc.predict(row[0], row[1])
    return NormalSpec(float(mean[0]), float(std[0]))


FORECASTER_NAMES = ("home_quantity", "home_quality", "away_quantity", "away_quality")


@dataclass(frozen=True, eq=False)
class ForecasterSet:
    """The four forecasters a match simulation needs."""

    home_quantity: DistributionForecaster
    home_quality: DistributionForecaster
    away_quantity: DistributionForecaster
    away_quality: DistributionForecaster

    def save(self, directory: str | os.PathLike) -> list[str]:
        os.makedirs(directory, exist_ok=True)
        paths = []
        for name in FORECASTER_NAMES:
            path = os.path.join(directory, f"{name}.json")
            getattr(self, name).save(path)
            paths.append(path)
        return paths

    @classmethod
    def load(cls, directory: str | os.PathLike) -> "ForecasterSet":
        return cls(**{
            name: DistributionForecaster.load(os.path.join(directory, f"{name}.json"))
            for name in FORECASTER_NAMES
        })
